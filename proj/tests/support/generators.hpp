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

// Seeded random document generation for property tests and the
// acceptance suite.

#ifndef PIE_TESTS_SUPPORT_GENERATORS_HPP
#define PIE_TESTS_SUPPORT_GENERATORS_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "pie/document.hpp"
#include "pie/jsonl.hpp"
#include "pie/tokenize.hpp"

namespace pie_test {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(static_cast<std::uint32_t>(seed)) {}

  std::size_t below(std::size_t n) { return static_cast<std::size_t>(engine_()) % n; }

  std::size_t between(std::size_t lo, std::size_t hi) {  // inclusive bounds
    return lo + below(hi - lo + 1);
  }

  bool chance(unsigned percent) { return below(100) < percent; }

  double unit_real() { return static_cast<double>(engine_() % 100000) / 100000.0; }

  template <typename T>
  const T& pick(const std::vector<T>& pool) {
    return pool[below(pool.size())];
  }

  std::mt19937& engine() { return engine_; }

 private:
  std::mt19937 engine_;
};

inline const std::vector<std::string>& word_pool() {
  static const std::vector<std::string> pool = {
      "alice", "Bob",   "acme",  "works", "for",   "the",   "café",  "Zürich",
      "東京",  "naïve", "x1",    "2024",  "said",  "Berlin", "visits", "office",
      "O'Neill", "u.s", "alpha", "beta",  "GmbH",  "str",   "über",  "plan"};
  return pool;
}

inline const std::vector<std::string>& span_labels() {
  static const std::vector<std::string> pool = {"PER", "ORG", "LOC", "MISC"};
  return pool;
}

inline const std::vector<std::string>& relation_labels() {
  static const std::vector<std::string> pool = {"works_for", "born_in", "located_in"};
  return pool;
}

inline std::string random_text(Rng& rng, std::size_t min_tokens, std::size_t max_tokens) {
  const std::size_t n = rng.between(min_tokens, max_tokens);
  std::string text;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) text += ' ';
    text += rng.pick(word_pool());
  }
  return text;
}

struct GenOptions {
  std::size_t min_tokens = 1;
  std::size_t max_tokens = 30;
  std::size_t max_spans = 6;
  std::size_t max_relations = 4;
  bool token_aligned_spans = true;   // false: arbitrary in-bounds char spans
  bool non_overlapping_spans = false;
  bool with_predictions = false;
  bool with_scores_and_metadata = false;
};

inline std::optional<double> maybe_score(Rng& rng, const GenOptions& options) {
  if (options.with_scores_and_metadata && rng.chance(50)) return rng.unit_real();
  return std::nullopt;
}

inline std::map<std::string, std::string> maybe_metadata(Rng& rng, const GenOptions& options) {
  std::map<std::string, std::string> metadata;
  if (options.with_scores_and_metadata && rng.chance(30)) {
    metadata["source"] = rng.pick(word_pool());
  }
  if (options.with_scores_and_metadata && rng.chance(30)) {
    metadata["note"] = rng.pick(word_pool());
  }
  return metadata;
}

/// Random document under the entities/relations schema. Gold relations
/// reference gold spans; predicted relations reference predicted spans.
inline pie::Document random_document(Rng& rng, const std::string& id,
                                     const GenOptions& options = GenOptions{}) {
  const std::string text = random_text(rng, options.min_tokens, options.max_tokens);
  pie::Document doc(pie::default_schema(), id, text);
  const std::vector<pie::Token> tokens = pie::tokenize(text);
  const std::size_t text_len = doc.text_cp_length();

  const auto add_spans = [&](bool as_prediction) {
    std::vector<pie::AnnotationId> ids;
    std::vector<std::pair<std::size_t, std::size_t>> taken;  // token ranges
    const std::size_t want = rng.below(options.max_spans + 1);
    for (std::size_t k = 0; k < want; ++k) {
      std::size_t start = 0;
      std::size_t end = 0;
      if (options.token_aligned_spans) {
        if (tokens.empty()) break;
        const std::size_t ts = rng.below(tokens.size());
        const std::size_t te = std::min(ts + rng.between(1, 3), tokens.size());
        if (options.non_overlapping_spans) {
          bool clash = false;
          for (const auto& [os, oe] : taken) {
            if (ts < oe && os < te) clash = true;
          }
          if (clash) continue;
          taken.emplace_back(ts, te);
        }
        start = tokens[ts].start;
        end = tokens[te - 1].end;
      } else {
        if (text_len == 0) break;
        start = rng.below(text_len);
        end = rng.between(start + 1, text_len);
      }
      try {
        ids.push_back(doc.add_annotation(
            "entities",
            pie::Annotation::span(start, end, rng.pick(span_labels()), maybe_score(rng, options),
                                  maybe_metadata(rng, options)),
            as_prediction));
      } catch (const pie::Error&) {
        // Structural duplicate; fine, just draw fewer spans.
      }
    }
    return ids;
  };

  const auto add_relations = [&](const std::vector<pie::AnnotationId>& span_ids,
                                 bool as_prediction) {
    if (span_ids.size() < 2) return;
    const std::size_t want = rng.below(options.max_relations + 1);
    for (std::size_t k = 0; k < want; ++k) {
      const pie::AnnotationId head = span_ids[rng.below(span_ids.size())];
      const pie::AnnotationId tail = span_ids[rng.below(span_ids.size())];
      if (head == tail) continue;
      try {
        doc.add_annotation("relations",
                           pie::Annotation::relation(head, tail, rng.pick(relation_labels()),
                                                     maybe_score(rng, options),
                                                     maybe_metadata(rng, options)),
                           as_prediction);
      } catch (const pie::Error&) {
      }
    }
  };

  const std::vector<pie::AnnotationId> gold_spans = add_spans(false);
  add_relations(gold_spans, false);
  if (options.with_predictions) {
    const std::vector<pie::AnnotationId> predicted_spans = add_spans(true);
    add_relations(predicted_spans, true);
  }
  if (options.with_scores_and_metadata && rng.chance(40)) {
    doc.set_metadata("origin", rng.pick(word_pool()));
  }
  doc.seal();
  return doc;
}

/// Layer-by-layer multiset equality of gold and prediction sets under
/// structural annotation equality.
inline bool documents_structurally_equal(const pie::Document& a, const pie::Document& b) {
  if (a.id() != b.id() || a.text() != b.text() || a.metadata() != b.metadata()) return false;
  if (a.schema().layers.size() != b.schema().layers.size()) return false;
  for (const pie::LayerSpec& spec : a.schema().layers) {
    if (!b.has_layer(spec.name)) return false;
    for (const bool predictions : {false, true}) {
      std::vector<pie::AnnotationValue> va = a.values(spec.name, predictions);
      std::vector<pie::AnnotationValue> vb = b.values(spec.name, predictions);
      std::sort(va.begin(), va.end());
      std::sort(vb.begin(), vb.end());
      if (va != vb) return false;
    }
  }
  return true;
}

}  // namespace pie_test

#endif  // PIE_TESTS_SUPPORT_GENERATORS_HPP
