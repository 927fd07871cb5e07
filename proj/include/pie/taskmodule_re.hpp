// Copyright 2026 The PIE Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Binary relation extraction task module: ordered candidate pairs over
// gold entity spans, marker tokens around both arguments, a context
// window centered on the argument pair, and decoding of predicted labels
// into relation annotations that reference the gold entities.

#ifndef PIE_TASKMODULE_RE_HPP
#define PIE_TASKMODULE_RE_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "pie/document.hpp"
#include "pie/errors.hpp"
#include "pie/taskmodule_ner.hpp"
#include "pie/tokenize.hpp"

namespace pie {

struct ReTaskConfig {
  std::string entity_layer = "entities";
  std::string relation_layer = "relations";
  std::string negative_label = "no_relation";
  std::size_t max_tokens = 128;
  // Token distance between the nearest argument edges; nullopt = unlimited.
  std::optional<std::size_t> max_pair_distance = 30;
  bool typed_markers = true;
  // Training-time fraction of negative candidates kept; 1 keeps all.
  double negative_sample_rate = 1.0;

  void validate() const {
    if (max_tokens < 8) {
      throw Error(ErrorKind::InvalidConfig, "max_tokens must be at least 8");
    }
    if (!(negative_sample_rate > 0.0) || negative_sample_rate > 1.0) {
      throw Error(ErrorKind::InvalidConfig, "negative_sample_rate must be in (0, 1]");
    }
  }
};

struct CandidatePair {
  AnnotationId head;
  AnnotationId tail;

  bool operator==(const CandidatePair&) const = default;
};

struct ReSkipped {
  std::string what;
  std::string reason;
};

struct ReCandidateResult {
  std::vector<CandidatePair> pairs;
  std::vector<ReSkipped> skipped;
};

/// One model-ready candidate: the context tokens with the four marker
/// pseudo-tokens inserted, plus the marker positions within them.
struct ReEncoding {
  std::string document_id;
  AnnotationId head_id = 0;
  AnnotationId tail_id = 0;
  std::vector<std::string> marked_tokens;
  std::size_t head_open = 0;
  std::size_t head_close = 0;
  std::size_t tail_open = 0;
  std::size_t tail_close = 0;
  std::optional<std::string> target;

  bool operator==(const ReEncoding&) const = default;
};

struct ReEncodeResult {
  std::vector<ReEncoding> encodings;
  std::vector<ReSkipped> skipped;
};

namespace detail {

inline std::string pair_location(AnnotationId head, AnnotationId tail) {
  return "pair(" + std::to_string(head) + "," + std::to_string(tail) + ")";
}

// Tokens strictly between the nearest argument edges; 0 when overlapping.
inline std::size_t token_gap(const IndexRange& a, const IndexRange& b) {
  if (b.start >= a.end) return b.start - a.end;
  if (a.start >= b.end) return a.start - b.end;
  return 0;
}

inline std::vector<std::pair<AnnotationId, IndexRange>> aligned_entities(
    const Document& doc, const std::vector<Token>& tokens, const std::string& layer,
    std::vector<ReSkipped>* skipped) {
  std::vector<std::pair<AnnotationId, IndexRange>> out;
  for (AnnotationId id : doc.layer(layer).gold) {
    const Annotation& ann = doc.annotation(id);
    try {
      const auto [ts, te] = char_span_to_token_span(tokens, ann.start, ann.end);
      out.emplace_back(id, IndexRange{ts, te});
    } catch (const Error& e) {
      if (skipped != nullptr) {
        skipped->push_back(ReSkipped{"entity " + std::to_string(id), e.what()});
      }
    }
  }
  // Candidate order: by head start, then tail start; ties by end, then id.
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return std::tuple(a.second.start, a.second.end, a.first) <
           std::tuple(b.second.start, b.second.end, b.first);
  });
  return out;
}

}  // namespace detail

/// All ordered pairs of distinct gold entity spans whose nearest-edge
/// token distance is within the cap, in deterministic order. When
/// training, gold relations whose pair did not survive are reported.
inline ReCandidateResult generate_candidates(const Document& doc, const ReTaskConfig& config,
                                             bool training = false) {
  config.validate();
  ReCandidateResult result;
  const std::vector<Token> tokens = tokenize(doc.text());
  const auto entities =
      detail::aligned_entities(doc, tokens, config.entity_layer, &result.skipped);
  for (const auto& [head_id, head_range] : entities) {
    for (const auto& [tail_id, tail_range] : entities) {
      if (head_id == tail_id) continue;
      const std::size_t gap = detail::token_gap(head_range, tail_range);
      if (config.max_pair_distance.has_value() && gap > *config.max_pair_distance) {
        result.skipped.push_back(
            ReSkipped{detail::pair_location(head_id, tail_id),
                      "argument distance " + std::to_string(gap) + " exceeds cap " +
                          std::to_string(*config.max_pair_distance)});
        continue;
      }
      result.pairs.push_back(CandidatePair{head_id, tail_id});
    }
  }
  if (training && doc.has_layer(config.relation_layer)) {
    for (AnnotationId id : doc.layer(config.relation_layer).gold) {
      const Annotation& rel = doc.annotation(id);
      const CandidatePair pair{rel.head, rel.tail};
      if (std::find(result.pairs.begin(), result.pairs.end(), pair) == result.pairs.end()) {
        result.skipped.push_back(
            ReSkipped{"relation " + std::to_string(id),
                      "gold relation lost, " + detail::pair_location(rel.head, rel.tail) +
                          " not among candidates"});
      }
    }
  }
  return result;
}

/// Builds marked token sequences for the candidate pairs. The context is
/// the smallest token range containing both arguments, extended
/// symmetrically with the remaining budget (odd remainder to the left).
/// Never reads the relation layer.
inline ReEncodeResult encode_inputs(const Document& doc, const std::vector<CandidatePair>& pairs,
                                    const ReTaskConfig& config) {
  config.validate();
  ReEncodeResult result;
  const std::vector<Token> tokens = tokenize(doc.text());
  const auto entities = detail::aligned_entities(doc, tokens, config.entity_layer, nullptr);
  const auto range_of = [&](AnnotationId id) -> const IndexRange* {
    for (const auto& [eid, range] : entities) {
      if (eid == id) return &range;
    }
    return nullptr;
  };
  for (const CandidatePair& pair : pairs) {
    const std::string location = detail::pair_location(pair.head, pair.tail);
    const IndexRange* head = range_of(pair.head);
    const IndexRange* tail = range_of(pair.tail);
    if (head == nullptr || tail == nullptr) {
      result.skipped.push_back(ReSkipped{location, "argument span does not align to tokens"});
      continue;
    }
    if (head->start < tail->end && tail->start < head->end) {
      result.skipped.push_back(ReSkipped{location, "argument token ranges overlap"});
      continue;
    }
    const std::size_t arg_start = std::min(head->start, tail->start);
    const std::size_t arg_end = std::max(head->end, tail->end);
    if (arg_end - arg_start > config.max_tokens) {
      result.skipped.push_back(ReSkipped{location, "distance_exceeds_budget"});
      continue;
    }
    // Symmetric extension; leftovers flow to whichever side still has room.
    const std::size_t budget = config.max_tokens - (arg_end - arg_start);
    const std::size_t left_avail = arg_start;
    const std::size_t right_avail = tokens.size() - arg_end;
    std::size_t left_take = std::min((budget + 1) / 2, left_avail);
    std::size_t right_take = std::min(budget / 2, right_avail);
    left_take = std::min(left_take + (budget - left_take - right_take), left_avail);
    right_take = std::min(right_take + (budget - left_take - right_take), right_avail);
    const IndexRange context{arg_start - left_take, arg_end + right_take};

    const Annotation& head_ann = doc.annotation(pair.head);
    const Annotation& tail_ann = doc.annotation(pair.tail);
    const std::string h_open =
        config.typed_markers ? "<H:" + head_ann.label + ">" : std::string("<H>");
    const std::string h_close =
        config.typed_markers ? "</H:" + head_ann.label + ">" : std::string("</H>");
    const std::string t_open =
        config.typed_markers ? "<T:" + tail_ann.label + ">" : std::string("<T>");
    const std::string t_close =
        config.typed_markers ? "</T:" + tail_ann.label + ">" : std::string("</T>");

    ReEncoding enc;
    enc.document_id = doc.id();
    enc.head_id = pair.head;
    enc.tail_id = pair.tail;
    for (std::size_t i = context.start; i < context.end; ++i) {
      if (i == head->start) {
        enc.head_open = enc.marked_tokens.size();
        enc.marked_tokens.push_back(h_open);
      }
      if (i == tail->start) {
        enc.tail_open = enc.marked_tokens.size();
        enc.marked_tokens.push_back(t_open);
      }
      enc.marked_tokens.push_back(tokens[i].text);
      if (i + 1 == head->end) {
        enc.head_close = enc.marked_tokens.size();
        enc.marked_tokens.push_back(h_close);
      }
      if (i + 1 == tail->end) {
        enc.tail_close = enc.marked_tokens.size();
        enc.marked_tokens.push_back(t_close);
      }
    }
    result.encodings.push_back(std::move(enc));
  }
  return result;
}

/// target = label of the gold relation with exactly this ordered id pair,
/// else the negative label. Two gold labels on one pair reject the
/// document for this task.
inline ReEncoding encode_targets(const ReEncoding& encoding, const Document& doc,
                                 const ReTaskConfig& config) {
  std::optional<std::string> label;
  for (AnnotationId id : doc.layer(config.relation_layer).gold) {
    const Annotation& rel = doc.annotation(id);
    if (rel.head == encoding.head_id && rel.tail == encoding.tail_id) {
      if (label.has_value()) {
        throw Error(ErrorKind::MultiLabelError,
                    detail::pair_location(encoding.head_id, encoding.tail_id) +
                        " carries gold labels '" + *label + "' and '" + rel.label +
                        "' in document '" + doc.id() + "'");
      }
      label = rel.label;
    }
  }
  ReEncoding out = encoding;
  out.target = label.value_or(config.negative_label);
  return out;
}

/// Deterministic training-time subsampling of negative instances. Keeps
/// every target-bearing encoding whose label is not the negative label;
/// negatives survive a seeded draw at the configured rate.
inline std::vector<ReEncoding> subsample_negatives(std::vector<ReEncoding> encodings,
                                                   const ReTaskConfig& config,
                                                   std::uint64_t seed) {
  config.validate();
  if (config.negative_sample_rate >= 1.0) return encodings;
  std::mt19937 rng(static_cast<std::uint32_t>(seed ^ 0x5e9f1a2bULL));
  const auto threshold =
      static_cast<std::uint32_t>(config.negative_sample_rate * 4294967296.0);
  std::vector<ReEncoding> kept;
  kept.reserve(encodings.size());
  for (ReEncoding& enc : encodings) {
    const bool negative = enc.target.has_value() && *enc.target == config.negative_label;
    if (!negative || rng() < threshold) kept.push_back(std::move(enc));
  }
  return kept;
}

/// A predicted label with its model score.
struct ScoredLabel {
  std::string label;
  double score = 0.0;
};

/// Non-negative predictions become relation annotations in the relation
/// layer's prediction set, referencing the gold entity spans; the model
/// score is stored on the annotation (excluded from equality).
inline Document decode(const Document& doc, const std::vector<ReEncoding>& encodings,
                       const std::vector<ScoredLabel>& predictions,
                       const std::vector<std::string>& label_vocabulary,
                       const ReTaskConfig& config) {
  if (encodings.size() != predictions.size()) {
    throw Error(ErrorKind::IndexOutOfRange, "one predicted label per encoding required");
  }
  Document out = doc.thawed();
  for (std::size_t i = 0; i < encodings.size(); ++i) {
    const ScoredLabel& pred = predictions[i];
    if (std::find(label_vocabulary.begin(), label_vocabulary.end(), pred.label) ==
        label_vocabulary.end()) {
      throw Error(ErrorKind::UnknownLabel,
                  "predicted label '" + pred.label + "' is not in the trained vocabulary");
    }
    if (pred.label == config.negative_label) continue;
    out.add_annotation(
        config.relation_layer,
        Annotation::relation(encodings[i].head_id, encodings[i].tail_id, pred.label, pred.score),
        /*as_prediction=*/true);
  }
  out.seal();
  return out;
}

}  // namespace pie

#endif  // PIE_TASKMODULE_RE_HPP
