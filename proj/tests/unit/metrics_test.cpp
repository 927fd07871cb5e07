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

#include "pie/metrics.hpp"

#include <catch2/catch_amalgamated.hpp>

#include "pie/jsonl.hpp"
#include "support/generators.hpp"
#include "support/test_util.hpp"

using pie::Annotation;
using pie::Document;
using pie::ErrorKind;
using pie::LayerF1;
using pie::MatchMode;
using pie::PRFScore;

namespace {

Document doc_with_spans(const std::string& id,
                        const std::vector<std::tuple<std::size_t, std::size_t, std::string>>& gold,
                        const std::vector<std::tuple<std::size_t, std::size_t, std::string>>& pred) {
  Document doc(pie::default_schema(), id, std::string(100, 'x'));
  for (const auto& [s, e, label] : gold) {
    doc.add_annotation("entities", Annotation::span(s, e, label));
  }
  for (const auto& [s, e, label] : pred) {
    doc.add_annotation("entities", Annotation::span(s, e, label, 0.5), true);
  }
  doc.seal();
  return doc;
}

// Independent O(n^2) oracle: each annotation matches by exhaustive
// pairwise structural comparison, never via set operations.
struct OracleCounts {
  std::map<std::string, PRFScore> per_label;
  PRFScore micro;
};

OracleCounts brute_force_counts(const std::vector<Document>& docs, const std::string& layer) {
  OracleCounts counts;
  for (const Document& doc : docs) {
    const auto& gold = doc.layer(layer).gold;
    const auto& predictions = doc.layer(layer).predictions;
    for (pie::AnnotationId g : gold) {
      bool matched = false;
      for (pie::AnnotationId p : predictions) {
        if (pie::annotations_equal(doc, g, doc, p)) matched = true;
      }
      const std::string& label = doc.annotation(g).label;
      if (matched) {
        ++counts.per_label[label].tp;
        ++counts.micro.tp;
      } else {
        ++counts.per_label[label].fn;
        ++counts.micro.fn;
      }
    }
    for (pie::AnnotationId p : predictions) {
      bool matched = false;
      for (pie::AnnotationId g : gold) {
        if (pie::annotations_equal(doc, g, doc, p)) matched = true;
      }
      if (!matched) {
        ++counts.per_label[doc.annotation(p).label].fp;
        ++counts.micro.fp;
      }
    }
  }
  return counts;
}

}  // namespace

TEST_CASE("layer_f1 follows the set formula") {
  // gold {A,B,C}, predictions {A,B,D}.
  const Document doc = doc_with_spans("d",
                                      {{0, 1, "X"}, {1, 2, "X"}, {2, 3, "X"}},
                                      {{0, 1, "X"}, {1, 2, "X"}, {5, 6, "X"}});
  const LayerF1 result = pie::layer_f1({doc}, "entities");
  REQUIRE(result.micro.tp == 2);
  REQUIRE(result.micro.fp == 1);
  REQUIRE(result.micro.fn == 1);
  REQUIRE(result.micro.precision() == Catch::Approx(2.0 / 3.0));
  REQUIRE(result.micro.recall() == Catch::Approx(2.0 / 3.0));
  REQUIRE(result.micro.f1() == Catch::Approx(2.0 / 3.0));
}

TEST_CASE("identical gold and prediction sets score one everywhere") {
  const Document doc = doc_with_spans("d",
                                      {{0, 1, "PER"}, {4, 9, "ORG"}},
                                      {{0, 1, "PER"}, {4, 9, "ORG"}});
  const LayerF1 result = pie::layer_f1({doc}, "entities");
  for (const auto& [label, score] : result.per_label) {
    REQUIRE(score.f1() == 1.0);
  }
  REQUIRE(result.macro->f1 == 1.0);
  REQUIRE(result.micro.f1() == 1.0);
}

TEST_CASE("scores are excluded from matching") {
  Document doc(pie::default_schema(), "d", std::string(20, 'x'));
  doc.add_annotation("entities", Annotation::span(0, 5, "PER", 0.99));
  doc.add_annotation("entities", Annotation::span(0, 5, "PER", 0.01, {{"note", "x"}}), true);
  doc.seal();
  const LayerF1 result = pie::layer_f1({doc}, "entities");
  REQUIRE(result.micro.tp == 1);
  REQUIRE(result.micro.fp == 0);
  REQUIRE(result.micro.fn == 0);
}

TEST_CASE("unlabeled match ignores labels and reports micro only") {
  const Document doc = doc_with_spans("d", {{0, 5, "PER"}}, {{0, 5, "ORG"}});
  const LayerF1 labeled = pie::layer_f1({doc}, "entities", MatchMode::labeled);
  REQUIRE(labeled.micro.tp == 0);
  const LayerF1 unlabeled = pie::layer_f1({doc}, "entities", MatchMode::unlabeled);
  REQUIRE(unlabeled.micro.tp == 1);
  REQUIRE(unlabeled.per_label.empty());
  REQUIRE_FALSE(unlabeled.macro.has_value());
}

TEST_CASE("macro averages only over labels present in gold") {
  const Document doc = doc_with_spans("d", {{0, 1, "PER"}}, {{0, 1, "PER"}, {5, 6, "ORG"}});
  const LayerF1 result = pie::layer_f1({doc}, "entities");
  REQUIRE(result.per_label.count("ORG") == 1);  // listed as fp
  REQUIRE(result.macro->f1 == 1.0);             // ORG not averaged in
}

TEST_CASE("relations match structurally across gold and predicted sets") {
  Document doc(pie::default_schema(), "d", "Alice works for Acme");
  const auto head = doc.add_annotation("entities", Annotation::span(0, 5, "PER"));
  const auto tail = doc.add_annotation("entities", Annotation::span(16, 20, "ORG"));
  doc.add_annotation("relations", Annotation::relation(head, tail, "works_for"));
  doc.add_annotation("relations", Annotation::relation(head, tail, "works_for", 0.8), true);
  doc.add_annotation("relations", Annotation::relation(tail, head, "works_for", 0.8), true);
  doc.seal();
  const LayerF1 result = pie::layer_f1({doc}, "relations");
  REQUIRE(result.micro.tp == 1);
  REQUIRE(result.micro.fp == 1);  // the reversed pair
  REQUIRE(result.micro.fn == 0);
}

TEST_CASE("unknown layer is an error") {
  const Document doc = doc_with_spans("d", {}, {});
  REQUIRE_ERROR_KIND(pie::layer_f1({doc}, "nope"), ErrorKind::UnknownLayer);
}

TEST_CASE("counts conserve set sizes and are permutation invariant") {
  pie_test::Rng rng(83);
  pie_test::GenOptions options;
  options.with_predictions = true;
  options.with_scores_and_metadata = true;
  std::vector<Document> docs;
  for (int i = 0; i < 30; ++i) {
    docs.push_back(pie_test::random_document(rng, "doc-" + std::to_string(i), options));
  }
  for (const std::string layer : {"entities", "relations"}) {
    const LayerF1 result = pie::layer_f1(docs, layer);
    std::size_t gold_total = 0;
    std::size_t pred_total = 0;
    for (const Document& doc : docs) {
      gold_total += doc.layer(layer).gold.size();
      pred_total += doc.layer(layer).predictions.size();
    }
    REQUIRE(result.micro.tp + result.micro.fn == gold_total);
    REQUIRE(result.micro.tp + result.micro.fp == pred_total);
    std::vector<Document> reversed(docs.rbegin(), docs.rend());
    const LayerF1 again = pie::layer_f1(reversed, layer);
    REQUIRE(again.micro == result.micro);
    REQUIRE(again.per_label == result.per_label);
  }
}

TEST_CASE("set counts equal the brute-force pairwise oracle") {
  pie_test::Rng rng(89);
  pie_test::GenOptions options;
  options.with_predictions = true;
  options.with_scores_and_metadata = true;
  for (int round = 0; round < 60; ++round) {
    std::vector<Document> docs;
    const std::size_t n = 1 + rng.below(4);
    for (std::size_t i = 0; i < n; ++i) {
      docs.push_back(pie_test::random_document(rng, "doc-" + std::to_string(i), options));
    }
    for (const std::string layer : {"entities", "relations"}) {
      const LayerF1 result = pie::layer_f1(docs, layer);
      const OracleCounts oracle = brute_force_counts(docs, layer);
      REQUIRE(result.micro == oracle.micro);
      for (const auto& [label, score] : oracle.per_label) {
        REQUIRE(result.per_label.at(label) == score);
      }
    }
  }
}

TEST_CASE("dataset stats count gold labels and lengths") {
  Document doc(pie::default_schema(), "d", "Alice met Bob in Berlin");
  doc.add_annotation("entities", Annotation::span(0, 5, "PER"));
  doc.add_annotation("entities", Annotation::span(10, 13, "PER"));
  doc.add_annotation("entities", Annotation::span(17, 23, "LOC"));
  doc.add_annotation("entities", Annotation::span(0, 9, "MISC"), true);  // predictions not counted
  doc.seal();
  const pie::StatsReport report = pie::dataset_stats({doc}, {"entities", "relations"});
  REQUIRE(report.documents == 1);
  REQUIRE(report.label_counts.at("entities") ==
          std::map<std::string, std::size_t>{{"PER", 2}, {"LOC", 1}});
  REQUIRE(report.label_counts.at("relations").empty());
  REQUIRE(report.chars.min == 23);
  REQUIRE(report.tokens.min == 5);
  REQUIRE(report.tokens.histogram == std::vector<std::size_t>{1});
}

TEST_CASE("dataset stats on an empty corpus are flagged undefined") {
  const pie::StatsReport report = pie::dataset_stats({}, {});
  REQUIRE(report.documents == 0);
  REQUIRE_FALSE(report.chars.defined());
  REQUIRE_FALSE(report.tokens.defined());
  REQUIRE(report.chars.histogram.empty());
}

TEST_CASE("histogram bins sum to the document count and median is the lower middle") {
  pie_test::Rng rng(97);
  std::vector<Document> docs;
  for (int i = 0; i < 40; ++i) {
    Document doc(pie::default_schema(), "d" + std::to_string(i),
                 pie_test::random_text(rng, 1, 80));
    doc.seal();
    docs.push_back(std::move(doc));
  }
  const pie::StatsReport report = pie::dataset_stats(docs, {"entities"});
  std::size_t char_sum = 0;
  for (std::size_t c : report.chars.histogram) char_sum += c;
  REQUIRE(char_sum == docs.size());
  std::size_t token_sum = 0;
  for (std::size_t c : report.tokens.histogram) token_sum += c;
  REQUIRE(token_sum == docs.size());

  std::vector<std::size_t> lengths;
  for (const Document& doc : docs) lengths.push_back(doc.text_cp_length());
  std::sort(lengths.begin(), lengths.end());
  REQUIRE(report.chars.median == lengths[(lengths.size() - 1) / 2]);
}
