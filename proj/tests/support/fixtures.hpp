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

// Synthetic lexicon/pattern corpora: entity labels are a deterministic
// function of closed lexicons and relations follow fixed sentence
// patterns, so a linear model can reach perfect held-out scores.

#ifndef PIE_TESTS_SUPPORT_FIXTURES_HPP
#define PIE_TESTS_SUPPORT_FIXTURES_HPP

#include <sstream>
#include <string>
#include <vector>

#include "pie/document.hpp"
#include "pie/jsonl.hpp"
#include "pie/tokenize.hpp"
#include "support/generators.hpp"

namespace pie_test {

inline const std::vector<std::string>& fixture_names() {
  static const std::vector<std::string> pool = {
      "alice", "bob",   "carol", "david", "erin",   "frank", "grace",
      "henry", "irene", "jack",  "karen", "liam",   "mona",  "nathan",
      "olga",  "peter", "quinn", "rachel", "steve", "tina"};
  return pool;
}

inline const std::vector<std::string>& fixture_companies() {
  static const std::vector<std::string> pool = {"acme",  "globex",   "initech", "umbrella",
                                                "hooli", "cyberdyne", "aperture", "tyrell",
                                                "wonka", "oscorp"};
  return pool;
}

inline const std::vector<std::string>& fixture_cities() {
  static const std::vector<std::string> pool = {"berlin", "paris",  "london", "madrid",
                                                "rome",   "vienna", "oslo",   "dublin",
                                                "prague", "lisbon"};
  return pool;
}

struct FixtureSentence {
  std::string text;
  // (token offset, token count 1, label) relative to the sentence.
  std::vector<std::pair<std::size_t, std::string>> entity_tokens;
  // (head sentence-token, tail sentence-token, label)
  std::vector<std::tuple<std::size_t, std::size_t, std::string>> relations;
};

inline FixtureSentence sentence_works_for(Rng& rng) {
  FixtureSentence s;
  const std::string& name = rng.pick(fixture_names());
  const std::string& company = rng.pick(fixture_companies());
  s.text = name + " works for " + company + " .";
  s.entity_tokens = {{0, "PER"}, {3, "ORG"}};
  s.relations = {{0, 3, "works_for"}};
  return s;
}

inline FixtureSentence sentence_born_in(Rng& rng) {
  FixtureSentence s;
  const std::string& name = rng.pick(fixture_names());
  const std::string& city = rng.pick(fixture_cities());
  s.text = name + " was born in " + city + " .";
  s.entity_tokens = {{0, "PER"}, {4, "LOC"}};
  s.relations = {{0, 4, "born_in"}};
  return s;
}

inline FixtureSentence sentence_visited(Rng& rng) {
  FixtureSentence s;
  const std::string& name = rng.pick(fixture_names());
  const std::string& city = rng.pick(fixture_cities());
  s.text = name + " visited " + city + " yesterday .";
  s.entity_tokens = {{0, "PER"}, {2, "LOC"}};
  return s;
}

inline FixtureSentence sentence_met_at(Rng& rng) {
  FixtureSentence s;
  const std::string& a = rng.pick(fixture_names());
  const std::string& b = rng.pick(fixture_names());
  const std::string& company = rng.pick(fixture_companies());
  s.text = a + " met " + b + " at " + company + " .";
  s.entity_tokens = {{0, "PER"}, {2, "PER"}, {4, "ORG"}};
  return s;
}

/// Assembles sentences into one document with gold entities (and, when
/// with_relations, gold relations per pattern).
inline pie::Document fixture_document(Rng& rng, const std::string& id, bool with_relations) {
  const std::size_t n_sentences = rng.between(1, 3);
  std::vector<FixtureSentence> sentences;
  for (std::size_t i = 0; i < n_sentences; ++i) {
    switch (rng.below(4)) {
      case 0: sentences.push_back(sentence_works_for(rng)); break;
      case 1: sentences.push_back(sentence_born_in(rng)); break;
      case 2: sentences.push_back(sentence_visited(rng)); break;
      default: sentences.push_back(sentence_met_at(rng)); break;
    }
  }
  std::string text;
  for (const FixtureSentence& s : sentences) {
    if (!text.empty()) text += ' ';
    text += s.text;
  }
  pie::Document doc(pie::default_schema(), id, text);
  const std::vector<pie::Token> tokens = pie::tokenize(text);
  std::size_t token_base = 0;
  for (const FixtureSentence& s : sentences) {
    const std::size_t sentence_tokens = pie::tokenize(s.text).size();
    std::map<std::size_t, pie::AnnotationId> ids;
    for (const auto& [offset, label] : s.entity_tokens) {
      const pie::Token& t = tokens[token_base + offset];
      try {
        ids[offset] = doc.add_annotation("entities", pie::Annotation::span(t.start, t.end, label));
      } catch (const pie::Error&) {
        // A duplicate span value (same word annotated twice); reuse it.
        for (pie::AnnotationId existing : doc.layer("entities").gold) {
          const pie::Annotation& ann = doc.annotation(existing);
          if (ann.start == t.start && ann.end == t.end) ids[offset] = existing;
        }
      }
    }
    if (with_relations) {
      for (const auto& [head, tail, label] : s.relations) {
        try {
          doc.add_annotation("relations",
                             pie::Annotation::relation(ids.at(head), ids.at(tail), label));
        } catch (const pie::Error&) {
        }
      }
    }
    token_base += sentence_tokens;
  }
  doc.seal();
  return doc;
}

inline std::vector<pie::Document> fixture_corpus(std::uint64_t seed, std::size_t n_docs,
                                                 bool with_relations,
                                                 const std::string& id_prefix) {
  Rng rng(seed);
  std::vector<pie::Document> docs;
  docs.reserve(n_docs);
  for (std::size_t i = 0; i < n_docs; ++i) {
    docs.push_back(fixture_document(rng, id_prefix + std::to_string(i), with_relations));
  }
  return docs;
}

inline std::string corpus_to_jsonl(const std::vector<pie::Document>& docs) {
  std::ostringstream out;
  pie::write_jsonl(*pie::default_schema(), docs, out);
  return out.str();
}

}  // namespace pie_test

#endif  // PIE_TESTS_SUPPORT_FIXTURES_HPP
