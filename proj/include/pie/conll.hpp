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

// CoNLL2003 column format reader: 4 whitespace-separated columns
// TOKEN POS CHUNK NER, blank line = sentence break, -DOCSTART- = document
// break. Token text is joined with single spaces; NER tags are decoded
// with the lenient BIO rule, which covers both IOB1 and BIO2 inputs.

#ifndef PIE_CONLL_HPP
#define PIE_CONLL_HPP

#include <istream>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pie/bio.hpp"
#include "pie/document.hpp"
#include "pie/io_report.hpp"
#include "pie/jsonl.hpp"
#include "pie/unicode.hpp"

namespace pie {

namespace detail {

inline std::vector<std::string> split_whitespace(const std::string& line) {
  std::vector<std::string> fields;
  std::istringstream iss(line);
  std::string field;
  while (iss >> field) fields.push_back(field);
  return fields;
}

struct ConllSegment {
  std::vector<std::string> tokens;
  std::vector<std::string> tags;
  std::vector<std::size_t> sentence_ends;
  std::size_t start_line = 0;
  bool started = false;
};

inline void finish_conll_segment(ConllSegment& seg,
                                 std::shared_ptr<const DocumentSchema> schema,
                                 const std::string& source, std::vector<Document>& docs,
                                 IoReport& report) {
  if (!seg.started) return;
  ConllSegment segment = std::exchange(seg, ConllSegment{});
  if (segment.tokens.empty()) {
    report.skip(source + ":" + std::to_string(segment.start_line), "empty document");
    return;
  }
  if (segment.sentence_ends.empty() ||
      segment.sentence_ends.back() != segment.tokens.size()) {
    segment.sentence_ends.push_back(segment.tokens.size());
  }
  std::string text;
  std::vector<std::size_t> offsets;  // code point offset of each token
  std::size_t offset = 0;
  for (std::size_t i = 0; i < segment.tokens.size(); ++i) {
    if (i > 0) {
      text += ' ';
      ++offset;
    }
    offsets.push_back(offset);
    text += segment.tokens[i];
    offset += utf8_length(segment.tokens[i]);
  }
  Document doc(std::move(schema), "doc-" + std::to_string(docs.size()), text);
  for (const TokenSpan& span : bio_decode(segment.tags)) {
    const std::size_t char_start = offsets[span.start];
    const std::size_t char_end =
        offsets[span.end - 1] + utf8_length(segment.tokens[span.end - 1]);
    doc.add_annotation("entities", Annotation::span(char_start, char_end, span.label));
    ++report.annotations_read;
  }
  std::string ends;
  for (std::size_t e : segment.sentence_ends) {
    if (!ends.empty()) ends += ' ';
    ends += std::to_string(e);
  }
  doc.set_metadata("sentence_ends", ends);
  doc.seal();
  docs.push_back(std::move(doc));
  ++report.documents_read;
}

}  // namespace detail

inline std::pair<std::vector<Document>, IoReport> read_conll2003(
    std::istream& in, const std::string& source = "conll") {
  const auto schema = default_schema();
  std::vector<Document> docs;
  IoReport report;
  detail::ConllSegment segment;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::vector<std::string> fields = detail::split_whitespace(line);
    if (fields.empty()) {
      // Sentence break.
      if (!segment.tokens.empty() &&
          (segment.sentence_ends.empty() ||
           segment.sentence_ends.back() != segment.tokens.size())) {
        segment.sentence_ends.push_back(segment.tokens.size());
      }
      continue;
    }
    if (fields[0] == "-DOCSTART-") {
      detail::finish_conll_segment(segment, schema, source, docs, report);
      segment.started = true;
      segment.start_line = line_no;
      continue;
    }
    if (!segment.started) {
      // Content before any -DOCSTART- forms its own segment.
      segment.started = true;
      segment.start_line = line_no;
    }
    const std::string location = source + ":" + std::to_string(line_no);
    if (fields.size() != 4) {
      report.skip(location, "expected 4 columns, found " + std::to_string(fields.size()));
      continue;
    }
    if (!is_valid_utf8(fields[0])) {
      report.skip(location, "token is not valid UTF-8");
      continue;
    }
    if (!is_valid_bio_tag(fields[3])) {
      report.skip(location, "malformed NER tag '" + fields[3] + "'");
      continue;
    }
    segment.tokens.push_back(fields[0]);
    segment.tags.push_back(fields[3]);
  }
  detail::finish_conll_segment(segment, schema, source, docs, report);
  return {std::move(docs), std::move(report)};
}

}  // namespace pie

#endif  // PIE_CONLL_HPP
