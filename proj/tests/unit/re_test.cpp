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

#include "pie/taskmodule_re.hpp"

#include <catch2/catch_amalgamated.hpp>

#include "pie/jsonl.hpp"
#include "support/generators.hpp"
#include "support/test_util.hpp"

using pie::Annotation;
using pie::AnnotationId;
using pie::CandidatePair;
using pie::Document;
using pie::ErrorKind;
using pie::ReTaskConfig;

namespace {

struct AliceDoc {
  Document doc;
  AnnotationId head;
  AnnotationId tail;
};

AliceDoc alice_doc() {
  Document doc(pie::default_schema(), "d", "Alice works for Acme");
  const auto head = doc.add_annotation("entities", Annotation::span(0, 5, "PER"));
  const auto tail = doc.add_annotation("entities", Annotation::span(16, 20, "ORG"));
  doc.add_annotation("relations", Annotation::relation(head, tail, "works_for"));
  doc.seal();
  return {std::move(doc), head, tail};
}

Document spaced_entities_doc(std::size_t gap_tokens) {
  std::string text = "A";
  for (std::size_t i = 0; i < gap_tokens; ++i) text += " x";
  text += " B";
  Document doc(pie::default_schema(), "d", text);
  doc.add_annotation("entities", Annotation::span(0, 1, "PER"));
  const std::size_t len = doc.text_cp_length();
  const auto b = doc.add_annotation("entities", Annotation::span(len - 1, len, "ORG"));
  doc.add_annotation("relations", Annotation::relation(0, b, "works_for"));
  doc.seal();
  return doc;
}

}  // namespace

TEST_CASE("candidate generation emits all ordered in-budget pairs") {
  Document doc(pie::default_schema(), "d", "Alice met Bob in Berlin");
  doc.add_annotation("entities", Annotation::span(0, 5, "PER"));
  doc.add_annotation("entities", Annotation::span(10, 13, "PER"));
  doc.add_annotation("entities", Annotation::span(17, 23, "LOC"));
  doc.seal();
  ReTaskConfig config;
  config.max_pair_distance.reset();
  const auto result = pie::generate_candidates(doc, config);
  REQUIRE(result.pairs.size() == 6);
  // Ordered by head start, then tail start.
  REQUIRE(result.pairs[0] == CandidatePair{0, 1});
  REQUIRE(result.pairs[1] == CandidatePair{0, 2});
  REQUIRE(result.pairs[2] == CandidatePair{1, 0});
  REQUIRE(result.pairs[5] == CandidatePair{2, 1});
}

TEST_CASE("fewer than two entities yield no candidates") {
  Document doc(pie::default_schema(), "d", "Alice sleeps");
  doc.add_annotation("entities", Annotation::span(0, 5, "PER"));
  doc.seal();
  REQUIRE(pie::generate_candidates(doc, ReTaskConfig{}).pairs.empty());
  Document empty(pie::default_schema(), "e", "nothing");
  empty.seal();
  REQUIRE(pie::generate_candidates(empty, ReTaskConfig{}).pairs.empty());
}

TEST_CASE("distance cap skips far pairs and reports lost gold relations") {
  const Document doc = spaced_entities_doc(40);
  ReTaskConfig config;  // cap 30
  const auto result = pie::generate_candidates(doc, config, /*training=*/true);
  REQUIRE(result.pairs.empty());
  bool distance_skip = false;
  bool gold_lost = false;
  for (const pie::ReSkipped& s : result.skipped) {
    if (s.reason.find("distance") != std::string::npos) distance_skip = true;
    if (s.reason.find("gold relation lost") != std::string::npos) gold_lost = true;
  }
  REQUIRE(distance_skip);
  REQUIRE(gold_lost);

  ReTaskConfig unlimited;
  unlimited.max_pair_distance.reset();
  REQUIRE(pie::generate_candidates(doc, unlimited).pairs.size() == 2);
}

TEST_CASE("encode_inputs wraps the arguments in typed markers") {
  const auto [doc, head, tail] = alice_doc();
  const auto result = pie::encode_inputs(doc, {{head, tail}}, ReTaskConfig{});
  REQUIRE(result.encodings.size() == 1);
  const pie::ReEncoding& enc = result.encodings[0];
  REQUIRE(enc.marked_tokens ==
          std::vector<std::string>{"<H:PER>", "Alice", "</H:PER>", "works", "for", "<T:ORG>",
                                   "Acme", "</T:ORG>"});
  REQUIRE(enc.head_open == 0);
  REQUIRE(enc.head_close == 2);
  REQUIRE(enc.tail_open == 5);
  REQUIRE(enc.tail_close == 7);
  REQUIRE_FALSE(enc.target.has_value());
}

TEST_CASE("markers appear in text order when the tail comes first") {
  const auto [doc, head, tail] = alice_doc();
  const auto result = pie::encode_inputs(doc, {{tail, head}}, ReTaskConfig{});
  REQUIRE(result.encodings.size() == 1);
  REQUIRE(result.encodings[0].marked_tokens ==
          std::vector<std::string>{"<T:PER>", "Alice", "</T:PER>", "works", "for", "<H:ORG>",
                                   "Acme", "</H:ORG>"});
}

TEST_CASE("untyped markers") {
  const auto [doc, head, tail] = alice_doc();
  ReTaskConfig config;
  config.typed_markers = false;
  const auto result = pie::encode_inputs(doc, {{head, tail}}, config);
  REQUIRE(result.encodings[0].marked_tokens ==
          std::vector<std::string>{"<H>", "Alice", "</H>", "works", "for", "<T>", "Acme",
                                   "</T>"});
}

TEST_CASE("argument ranges over the token budget are skipped") {
  const Document doc = spaced_entities_doc(200);
  ReTaskConfig config;
  config.max_pair_distance.reset();
  config.max_tokens = 128;
  const auto pairs = pie::generate_candidates(doc, config).pairs;
  REQUIRE(pairs.size() == 2);
  const auto result = pie::encode_inputs(doc, pairs, config);
  REQUIRE(result.encodings.empty());
  REQUIRE(result.skipped.size() == 2);
  REQUIRE(result.skipped[0].reason == "distance_exceeds_budget");
}

TEST_CASE("context extends symmetrically with the leftover budget") {
  // Twenty tokens t0..t19; arguments at tokens 8 and 11.
  std::string text;
  for (int i = 0; i < 20; ++i) {
    if (i > 0) text += ' ';
    text += "t" + std::to_string(i);
  }
  Document doc(pie::default_schema(), "d", text);
  const auto tokens = pie::tokenize(text);
  const auto head =
      doc.add_annotation("entities", Annotation::span(tokens[8].start, tokens[8].end, "PER"));
  const auto tail =
      doc.add_annotation("entities", Annotation::span(tokens[11].start, tokens[11].end, "ORG"));
  doc.seal();
  ReTaskConfig config;
  config.max_tokens = 8;
  const auto result = pie::encode_inputs(doc, {{head, tail}}, config);
  REQUIRE(result.encodings.size() == 1);
  // Argument range [8,12) of size 4, budget 4, split 2/2: context [6,14).
  REQUIRE(result.encodings[0].marked_tokens ==
          std::vector<std::string>{"t6", "t7", "<H:PER>", "t8", "</H:PER>", "t9", "t10",
                                   "<T:ORG>", "t11", "</T:ORG>", "t12", "t13"});
}

TEST_CASE("context extension flows to the open side at document edges") {
  std::string text;
  for (int i = 0; i < 20; ++i) {
    if (i > 0) text += ' ';
    text += "t" + std::to_string(i);
  }
  Document doc(pie::default_schema(), "d", text);
  const auto tokens = pie::tokenize(text);
  const auto head =
      doc.add_annotation("entities", Annotation::span(tokens[0].start, tokens[0].end, "PER"));
  const auto tail =
      doc.add_annotation("entities", Annotation::span(tokens[2].start, tokens[2].end, "ORG"));
  doc.seal();
  ReTaskConfig config;
  config.max_tokens = 8;
  const auto result = pie::encode_inputs(doc, {{head, tail}}, config);
  // Argument range [0,3), budget 5, nothing to the left: context [0,8).
  REQUIRE(result.encodings.size() == 1);
  const auto& toks = result.encodings[0].marked_tokens;
  REQUIRE(toks.size() == 8 + 4);
  REQUIRE(toks.front() == "<H:PER>");
  REQUIRE(toks.back() == "t7");
}

TEST_CASE("marker well-formedness on generated documents") {
  pie_test::Rng rng(53);
  pie_test::GenOptions options;
  options.non_overlapping_spans = true;
  ReTaskConfig config;
  config.max_tokens = 16;
  config.max_pair_distance.reset();
  for (int i = 0; i < 50; ++i) {
    const Document doc = pie_test::random_document(rng, "d" + std::to_string(i), options);
    const std::vector<std::string> doc_tokens = [&] {
      std::vector<std::string> out;
      for (const pie::Token& t : pie::tokenize(doc.text())) out.push_back(t.text);
      return out;
    }();
    const auto candidates = pie::generate_candidates(doc, config);
    const auto result = pie::encode_inputs(doc, candidates.pairs, config);
    for (const pie::ReEncoding& enc : result.encodings) {
      REQUIRE(enc.marked_tokens.size() <= config.max_tokens + 4);
      // Exactly the four marker positions, properly nested.
      REQUIRE(enc.head_open < enc.head_close);
      REQUIRE(enc.tail_open < enc.tail_close);
      const bool disjoint = enc.head_close < enc.tail_open || enc.tail_close < enc.head_open;
      REQUIRE(disjoint);
      // Stripping markers yields a subsequence of the document tokens.
      std::vector<std::string> stripped;
      for (std::size_t idx = 0; idx < enc.marked_tokens.size(); ++idx) {
        if (idx == enc.head_open || idx == enc.head_close || idx == enc.tail_open ||
            idx == enc.tail_close) {
          continue;
        }
        stripped.push_back(enc.marked_tokens[idx]);
      }
      auto it = doc_tokens.begin();
      for (const std::string& token : stripped) {
        it = std::find(it, doc_tokens.end(), token);
        REQUIRE(it != doc_tokens.end());
        ++it;
      }
    }
  }
}

TEST_CASE("encode_inputs never reads the relation layer") {
  pie_test::Rng rng(59);
  pie_test::GenOptions options;
  options.non_overlapping_spans = true;
  ReTaskConfig config;
  for (int i = 0; i < 30; ++i) {
    const Document doc = pie_test::random_document(rng, "d", options);
    Document stripped(pie::default_schema(), "d", doc.text());
    for (pie::AnnotationId id : doc.layer("entities").gold) {
      const Annotation& ann = doc.annotation(id);
      stripped.add_annotation_with_id(id, "entities", ann, false);
    }
    stripped.seal();
    const auto pairs = pie::generate_candidates(doc, config).pairs;
    const auto pairs_stripped = pie::generate_candidates(stripped, config).pairs;
    REQUIRE(pairs == pairs_stripped);
    REQUIRE(pie::encode_inputs(doc, pairs, config).encodings ==
            pie::encode_inputs(stripped, pairs, config).encodings);
  }
}

TEST_CASE("encode_targets resolves the gold label for the exact pair") {
  const auto [doc, head, tail] = alice_doc();
  const auto encodings = pie::encode_inputs(doc, {{head, tail}, {tail, head}}, ReTaskConfig{});
  const auto forward = pie::encode_targets(encodings.encodings[0], doc, ReTaskConfig{});
  REQUIRE(forward.target == "works_for");
  const auto backward = pie::encode_targets(encodings.encodings[1], doc, ReTaskConfig{});
  REQUIRE(backward.target == "no_relation");
}

TEST_CASE("two gold labels on one ordered pair are an error") {
  Document doc(pie::default_schema(), "d", "Alice works for Acme");
  const auto head = doc.add_annotation("entities", Annotation::span(0, 5, "PER"));
  const auto tail = doc.add_annotation("entities", Annotation::span(16, 20, "ORG"));
  doc.add_annotation("relations", Annotation::relation(head, tail, "works_for"));
  doc.add_annotation("relations", Annotation::relation(head, tail, "employed_by"));
  doc.seal();
  const auto encodings = pie::encode_inputs(doc, {{head, tail}}, ReTaskConfig{});
  REQUIRE_ERROR_KIND(pie::encode_targets(encodings.encodings[0], doc, ReTaskConfig{}),
                     ErrorKind::MultiLabelError);
}

TEST_CASE("decode adds non-negative predictions referencing gold entities") {
  const auto [doc, head, tail] = alice_doc();
  const Document base = pie::clear_predictions(doc);
  const auto encodings =
      pie::encode_inputs(base, {{head, tail}, {tail, head}}, ReTaskConfig{});
  const std::vector<std::string> vocabulary = {"no_relation", "works_for"};
  const Document decoded =
      pie::decode(base, encodings.encodings,
                  {{"works_for", 1.5}, {"no_relation", 0.25}}, vocabulary, ReTaskConfig{});
  const auto& predictions = decoded.layer("relations").predictions;
  REQUIRE(predictions.size() == 1);
  const Annotation& rel = decoded.annotation(predictions[0]);
  REQUIRE(rel.head == head);
  REQUIRE(rel.tail == tail);
  REQUIRE(rel.label == "works_for");
  REQUIRE(rel.score == 1.5);
  REQUIRE_ERROR_KIND(pie::decode(base, encodings.encodings,
                                 {{"mystery", 0.0}, {"no_relation", 0.0}}, vocabulary,
                                 ReTaskConfig{}),
                     ErrorKind::UnknownLabel);
}

TEST_CASE("gold labels fed through decode reproduce the gold relations") {
  pie_test::Rng rng(61);
  pie_test::GenOptions options;
  options.non_overlapping_spans = true;
  ReTaskConfig config;
  config.max_pair_distance.reset();
  config.max_tokens = 64;
  int checked = 0;
  for (int i = 0; i < 60; ++i) {
    const Document doc = pie_test::random_document(rng, "d" + std::to_string(i), options);
    const auto candidates = pie::generate_candidates(doc, config, true);
    bool lost = false;
    for (const pie::ReSkipped& s : candidates.skipped) {
      if (s.reason.find("gold relation lost") != std::string::npos) lost = true;
    }
    if (lost) continue;
    const auto encoded = pie::encode_inputs(doc, candidates.pairs, config);
    if (!encoded.skipped.empty()) continue;
    std::vector<pie::ScoredLabel> labels;
    std::vector<std::string> vocabulary = {config.negative_label};
    bool multi = false;
    std::vector<pie::ReEncoding> with_targets;
    for (const pie::ReEncoding& enc : encoded.encodings) {
      try {
        with_targets.push_back(pie::encode_targets(enc, doc, config));
      } catch (const pie::Error&) {
        multi = true;
        break;
      }
    }
    if (multi) continue;
    for (const pie::ReEncoding& enc : with_targets) {
      labels.push_back({*enc.target, 0.75});
      if (std::find(vocabulary.begin(), vocabulary.end(), *enc.target) == vocabulary.end()) {
        vocabulary.push_back(*enc.target);
      }
    }
    const Document base = pie::clear_predictions(doc);
    const Document decoded = pie::decode(base, encoded.encodings, labels, vocabulary, config);
    std::vector<pie::AnnotationValue> gold = decoded.values("relations", false);
    std::vector<pie::AnnotationValue> predicted = decoded.values("relations", true);
    std::sort(gold.begin(), gold.end());
    std::sort(predicted.begin(), predicted.end());
    REQUIRE(gold == predicted);
    ++checked;
  }
  REQUIRE(checked > 20);
}
