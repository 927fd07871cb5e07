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

// Span detection/classification task module: encodes documents into
// sliding-window token sequences with BIO targets and decodes predicted
// tag sequences back into predicted spans. Overlapping windows are
// reconciled by ownership: each token belongs to the window whose center
// is nearest (ties to the lower window index), so the ownership ranges
// partition the document's tokens and no span is predicted twice.

#ifndef PIE_TASKMODULE_NER_HPP
#define PIE_TASKMODULE_NER_HPP

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pie/bio.hpp"
#include "pie/document.hpp"
#include "pie/errors.hpp"
#include "pie/tokenize.hpp"

namespace pie {

struct NerTaskConfig {
  std::string layer = "entities";
  std::size_t max_tokens = 128;
  // 0 = default of max_tokens / 2, floored, at least 1.
  std::size_t stride = 0;

  std::size_t effective_stride() const {
    if (stride != 0) return stride;
    return max_tokens / 2 > 0 ? max_tokens / 2 : 1;
  }

  void validate() const {
    if (max_tokens < 2) {
      throw Error(ErrorKind::InvalidConfig, "max_tokens must be at least 2");
    }
    if (effective_stride() > max_tokens) {
      throw Error(ErrorKind::InvalidConfig, "stride must not exceed max_tokens");
    }
  }
};

/// A token index range [start, end).
struct IndexRange {
  std::size_t start;
  std::size_t end;

  bool operator==(const IndexRange&) const = default;
  bool contains(std::size_t s, std::size_t e) const { return start <= s && e <= end; }
};

/// Windows of width max_tokens advancing by stride until the last token
/// is covered; the final window may be clamped short.
inline std::vector<IndexRange> sliding_windows(std::size_t token_count, std::size_t max_tokens,
                                               std::size_t stride) {
  std::vector<IndexRange> windows;
  if (token_count == 0) return windows;
  for (std::size_t start = 0;; start += stride) {
    windows.push_back(IndexRange{start, std::min(start + max_tokens, token_count)});
    if (start + max_tokens >= token_count) break;
  }
  return windows;
}

/// Ownership ranges for the given windows: token t goes to the window
/// containing it whose center is nearest to t + 1/2, ties to the lower
/// index. Restricting to containing windows keeps every ownership range
/// inside its window even when the final window is clamped short. The
/// returned ranges tile [0, token_count) in window order.
inline std::vector<IndexRange> ownership_ranges(const std::vector<IndexRange>& windows,
                                                std::size_t token_count) {
  std::vector<IndexRange> owned(windows.size(), IndexRange{0, 0});
  std::size_t w = 0;
  std::size_t range_start = 0;
  for (std::size_t t = 0; t < token_count; ++t) {
    // Distances to window centers, scaled by 2 to stay in integers:
    // |2t + 1 - (start + end)|.
    const auto dist = [&](std::size_t k) {
      const long long c = static_cast<long long>(windows[k].start + windows[k].end);
      const long long x = 2 * static_cast<long long>(t) + 1;
      return x > c ? x - c : c - x;
    };
    // Window starts, ends and centers all increase with the index, so the
    // owner index never moves backwards; scan forward from w.
    std::size_t best = windows.size();
    for (std::size_t k = w; k < windows.size() && windows[k].start <= t; ++k) {
      if (windows[k].end <= t) continue;
      if (best == windows.size() || dist(k) < dist(best)) best = k;
    }
    if (best == windows.size()) {
      throw Error(ErrorKind::InvalidConfig, "windows do not cover token " + std::to_string(t));
    }
    while (w < best) {
      owned[w] = IndexRange{range_start, t};
      range_start = t;
      ++w;
    }
  }
  while (w < windows.size()) {
    owned[w] = IndexRange{range_start, token_count};
    range_start = token_count;
    ++w;
  }
  return owned;
}

/// One model-ready window. target is present only when produced by
/// encode_targets; owned uses document-level token indices.
struct NerEncoding {
  std::string document_id;
  IndexRange window;
  std::vector<Token> tokens;
  std::optional<std::vector<std::string>> target;
  IndexRange owned;

  bool operator==(const NerEncoding&) const = default;

  std::vector<std::string> token_texts() const {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const Token& t : tokens) out.push_back(t.text);
    return out;
  }
};

struct NerSkipped {
  AnnotationId annotation;
  std::string reason;
};

struct NerEncodeResult {
  std::vector<NerEncoding> encodings;
  std::vector<NerSkipped> skipped;
};

namespace detail {

// Aligned token ranges of the layer's gold spans; unalignable spans are
// reported, never snapped.
inline std::vector<std::pair<AnnotationId, IndexRange>> aligned_gold_spans(
    const Document& doc, const std::vector<Token>& tokens, const std::string& layer,
    std::vector<NerSkipped>* skipped) {
  std::vector<std::pair<AnnotationId, IndexRange>> out;
  for (AnnotationId id : doc.layer(layer).gold) {
    const Annotation& ann = doc.annotation(id);
    try {
      const auto [ts, te] = char_span_to_token_span(tokens, ann.start, ann.end);
      out.emplace_back(id, IndexRange{ts, te});
    } catch (const Error& e) {
      if (skipped != nullptr) skipped->push_back(NerSkipped{id, e.what()});
    }
  }
  return out;
}

}  // namespace detail

/// Tokenizes the document and emits one target-free encoding per sliding
/// window. The encodings are a pure function of the text; gold spans are
/// consulted only to report those that no ownership range fully contains.
inline NerEncodeResult encode_inputs(const Document& doc, const NerTaskConfig& config) {
  config.validate();
  if (!doc.has_layer(config.layer)) {
    throw Error(ErrorKind::UnknownLayer, "no layer '" + config.layer + "'");
  }
  NerEncodeResult result;
  const std::vector<Token> tokens = tokenize(doc.text());
  const std::vector<IndexRange> windows =
      sliding_windows(tokens.size(), config.max_tokens, config.effective_stride());
  const std::vector<IndexRange> owned = ownership_ranges(windows, tokens.size());
  for (std::size_t w = 0; w < windows.size(); ++w) {
    NerEncoding enc;
    enc.document_id = doc.id();
    enc.window = windows[w];
    enc.tokens.assign(tokens.begin() + static_cast<std::ptrdiff_t>(windows[w].start),
                      tokens.begin() + static_cast<std::ptrdiff_t>(windows[w].end));
    enc.owned = owned[w];
    result.encodings.push_back(std::move(enc));
  }
  for (const auto& [id, range] :
       detail::aligned_gold_spans(doc, tokens, config.layer, &result.skipped)) {
    bool contained = false;
    for (const IndexRange& own : owned) {
      if (own.contains(range.start, range.end)) {
        contained = true;
        break;
      }
    }
    if (!contained) {
      result.skipped.push_back(
          NerSkipped{id, "span crosses window ownership boundaries"});
    }
  }
  return result;
}

/// Adds BIO targets over the window's tokens from the gold spans fully
/// inside the window. Prediction sets are never consulted. Overlapping
/// gold spans reject the document for this task.
inline NerEncoding encode_targets(const NerEncoding& encoding, const Document& doc,
                                  const NerTaskConfig& config) {
  const std::vector<Token> tokens = tokenize(doc.text());
  const auto aligned = detail::aligned_gold_spans(doc, tokens, config.layer, nullptr);
  // Document-level overlap check on token ranges.
  std::vector<std::pair<std::size_t, std::size_t>> sorted;
  for (const auto& [id, range] : aligned) sorted.emplace_back(range.start, range.end);
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].first < sorted[i - 1].second) {
      throw Error(ErrorKind::OverlapError,
                  "gold spans overlap on token " + std::to_string(sorted[i].first) +
                      " in document '" + doc.id() + "'");
    }
  }
  std::vector<TokenSpan> window_spans;
  for (const auto& [id, range] : aligned) {
    const Annotation& ann = doc.annotation(id);
    if (encoding.window.contains(range.start, range.end)) {
      window_spans.push_back(
          TokenSpan{range.start - encoding.window.start, range.end - encoding.window.start,
                    ann.label});
    }
  }
  NerEncoding out = encoding;
  out.target = bio_encode(encoding.tokens.size(), window_spans);
  return out;
}

/// Integrates predicted tag sequences back into the document: spans are
/// extracted per window with the lenient BIO rule, kept only when wholly
/// inside the window's ownership range, and added as predictions.
inline Document decode(const Document& doc, const std::vector<NerEncoding>& encodings,
                       const std::vector<std::vector<std::string>>& tag_sequences,
                       const NerTaskConfig& config) {
  if (encodings.size() != tag_sequences.size()) {
    throw Error(ErrorKind::IndexOutOfRange, "one tag sequence per encoding required");
  }
  Document out = doc.thawed();
  for (std::size_t i = 0; i < encodings.size(); ++i) {
    const NerEncoding& enc = encodings[i];
    const std::vector<std::string>& tags = tag_sequences[i];
    if (tags.size() != enc.tokens.size()) {
      throw Error(ErrorKind::IndexOutOfRange,
                  "tag sequence length " + std::to_string(tags.size()) +
                      " does not match window of " + std::to_string(enc.tokens.size()) +
                      " tokens");
    }
    for (const TokenSpan& span : bio_decode(tags)) {
      const std::size_t doc_start = enc.window.start + span.start;
      const std::size_t doc_end = enc.window.start + span.end;
      if (!enc.owned.contains(doc_start, doc_end)) continue;
      const std::size_t char_start = enc.tokens[span.start].start;
      const std::size_t char_end = enc.tokens[span.end - 1].end;
      out.add_annotation(config.layer, Annotation::span(char_start, char_end, span.label),
                         /*as_prediction=*/true);
    }
  }
  out.seal();
  return out;
}

}  // namespace pie

#endif  // PIE_TASKMODULE_NER_HPP
