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

// BRAT standoff format: .txt plus .ann with text-bound (T) and relation
// (R) lines. Offsets count Unicode code points, brat's own convention.
// Discontinuous spans and E/A/M/N/# lines are skipped with report
// entries; the document model has no event kind.

#ifndef PIE_BRAT_HPP
#define PIE_BRAT_HPP

#include <cstddef>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pie/conll.hpp"
#include "pie/document.hpp"
#include "pie/io_report.hpp"
#include "pie/jsonl.hpp"
#include "pie/unicode.hpp"

namespace pie {

namespace detail {

// brat renders newlines in reference text as spaces; compare modulo that.
inline std::string brat_normalize(std::string s) {
  for (char& c : s) {
    if (c == '\n' || c == '\t' || c == '\r') c = ' ';
  }
  return s;
}

inline bool parse_size(const std::string& s, std::size_t& out) {
  if (s.empty()) return false;
  std::size_t value = 0;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
    value = value * 10 + static_cast<std::size_t>(c - '0');
  }
  out = value;
  return true;
}

}  // namespace detail

inline std::pair<Document, IoReport> read_brat(const std::string& txt, const std::string& ann,
                                               const std::string& doc_id) {
  IoReport report;
  Document doc(default_schema(), doc_id, txt);
  const std::size_t text_len = doc.text_cp_length();

  struct AnnLine {
    std::size_t line_no;
    std::string id;
    std::string body;
  };
  std::vector<AnnLine> t_lines;
  std::vector<AnnLine> r_lines;
  {
    std::istringstream in(ann);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      const std::size_t tab = line.find('\t');
      const std::string location = doc_id + ".ann:" + std::to_string(line_no);
      if (tab == std::string::npos) {
        report.skip(location, "malformed line, no tab separator");
        continue;
      }
      const std::string id = line.substr(0, tab);
      const std::string body = line.substr(tab + 1);
      if (id.empty()) {
        report.skip(location, "malformed line, empty id");
        continue;
      }
      switch (id[0]) {
        case 'T':
          t_lines.push_back(AnnLine{line_no, id, body});
          break;
        case 'R':
          r_lines.push_back(AnnLine{line_no, id, body});
          break;
        case 'E': case 'A': case 'M': case 'N': case '#': case '*':
          report.skip(location, std::string("unsupported annotation type '") + id[0] + "'");
          break;
        default:
          report.skip(location, "malformed line, unknown id prefix");
          break;
      }
    }
  }

  std::map<std::string, AnnotationId> span_ids;
  for (const AnnLine& t : t_lines) {
    const std::string location = doc_id + ".ann:" + std::to_string(t.line_no) + " (" + t.id + ")";
    const std::size_t tab = t.body.find('\t');
    const std::string head = tab == std::string::npos ? t.body : t.body.substr(0, tab);
    if (head.find(';') != std::string::npos) {
      report.skip(location, "discontinuous span");
      continue;
    }
    const std::vector<std::string> fields = detail::split_whitespace(head);
    std::size_t start = 0;
    std::size_t end = 0;
    if (fields.size() != 3 || !detail::parse_size(fields[1], start) ||
        !detail::parse_size(fields[2], end)) {
      report.skip(location, "malformed text-bound line");
      continue;
    }
    if (start >= end || end > text_len) {
      report.skip(location, "span offsets (" + fields[1] + "," + fields[2] +
                                ") out of range for text of length " + std::to_string(text_len));
      continue;
    }
    if (tab != std::string::npos) {
      const std::string surface = t.body.substr(tab + 1);
      const std::string slice = utf8_substr(txt, start, end);
      if (detail::brat_normalize(surface) != detail::brat_normalize(slice)) {
        report.skip(location, "surface text '" + surface + "' does not match text slice '" +
                                  slice + "'");
        continue;
      }
    }
    try {
      span_ids[t.id] = doc.add_annotation("entities", Annotation::span(start, end, fields[0]));
      ++report.annotations_read;
    } catch (const Error& e) {
      report.skip(location, e.what());
    }
  }

  for (const AnnLine& r : r_lines) {
    const std::string location = doc_id + ".ann:" + std::to_string(r.line_no) + " (" + r.id + ")";
    const std::vector<std::string> fields = detail::split_whitespace(r.body);
    std::string arg1;
    std::string arg2;
    for (const std::string& field : fields) {
      if (field.rfind("Arg1:", 0) == 0) arg1 = field.substr(5);
      if (field.rfind("Arg2:", 0) == 0) arg2 = field.substr(5);
    }
    if (fields.empty() || arg1.empty() || arg2.empty()) {
      report.skip(location, "malformed relation line");
      continue;
    }
    const auto head_it = span_ids.find(arg1);
    const auto tail_it = span_ids.find(arg2);
    if (head_it == span_ids.end() || tail_it == span_ids.end()) {
      report.skip(location, "relation argument does not resolve to a read span");
      continue;
    }
    try {
      doc.add_annotation("relations",
                         Annotation::relation(head_it->second, tail_it->second, fields[0]));
      ++report.annotations_read;
    } catch (const Error& e) {
      report.skip(location, e.what());
    }
  }

  doc.seal();
  return {std::move(doc), std::move(report)};
}

/// Emits T/R lines for the chosen annotation sets, numbered in
/// serialization order. Relation arguments that live outside the chosen
/// span set (predicted relations over gold entities) are appended as
/// additional T lines so no relation dangles.
inline std::pair<std::string, std::string> write_brat(const Document& doc, bool predictions) {
  const Document::LayerData& entities = doc.layer("entities");
  const Document::LayerData& relations = doc.layer("relations");
  const std::vector<AnnotationId>& span_set = predictions ? entities.predictions : entities.gold;
  const std::vector<AnnotationId>& rel_set = predictions ? relations.predictions : relations.gold;

  std::vector<AnnotationId> span_order(span_set.begin(), span_set.end());
  std::map<AnnotationId, std::size_t> span_numbers;
  for (AnnotationId id : span_order) span_numbers.emplace(id, span_numbers.size() + 1);
  for (AnnotationId id : rel_set) {
    const Annotation& rel = doc.annotation(id);
    for (AnnotationId ref : {rel.head, rel.tail}) {
      if (!span_numbers.count(ref)) {
        span_order.push_back(ref);
        span_numbers.emplace(ref, span_numbers.size() + 1);
      }
    }
  }

  std::string ann;
  for (AnnotationId id : span_order) {
    const Annotation& span = doc.annotation(id);
    ann += "T" + std::to_string(span_numbers[id]) + "\t" + span.label + " " +
           std::to_string(span.start) + " " + std::to_string(span.end) + "\t" +
           detail::brat_normalize(utf8_substr(doc.text(), span.start, span.end)) + "\n";
  }
  std::size_t r_number = 0;
  for (AnnotationId id : rel_set) {
    const Annotation& rel = doc.annotation(id);
    ann += "R" + std::to_string(++r_number) + "\t" + rel.label + " Arg1:T" +
           std::to_string(span_numbers[rel.head]) + " Arg2:T" +
           std::to_string(span_numbers[rel.tail]) + "\n";
  }
  return {doc.text(), std::move(ann)};
}

}  // namespace pie

#endif  // PIE_BRAT_HPP
