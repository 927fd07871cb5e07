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

// JSONL corpus files: line 1 is the schema record, every further line one
// document record.

#ifndef PIE_JSONL_HPP
#define PIE_JSONL_HPP

#include <istream>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pie/document.hpp"
#include "pie/errors.hpp"

namespace pie {

/// The entities/relations document schema used by the corpus converters.
inline std::shared_ptr<const DocumentSchema> default_schema() {
  auto schema = std::make_shared<DocumentSchema>();
  schema->name = "ere";
  schema->layers.push_back(LayerSpec{"entities", AnnotationKind::labeled_span, {kTextField}});
  schema->layers.push_back(LayerSpec{"relations", AnnotationKind::binary_relation, {"entities"}});
  return schema;
}

struct JsonlCorpus {
  std::shared_ptr<const DocumentSchema> schema;
  std::vector<Document> documents;
};

inline JsonlCorpus read_jsonl(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorKind::ParseError, "empty stream, expected a schema record");
  }
  nlohmann::ordered_json first;
  try {
    first = nlohmann::ordered_json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, e.what());
  }
  JsonlCorpus corpus;
  corpus.schema = std::make_shared<DocumentSchema>(detail::schema_from_json(first));
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      corpus.documents.push_back(deserialize_document(line, corpus.schema));
    } catch (const Error& e) {
      throw Error(e.kind(), "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return corpus;
}

inline void write_jsonl(const DocumentSchema& schema, const std::vector<Document>& documents,
                        std::ostream& out) {
  out << detail::schema_to_json(schema).dump() << "\n";
  for (const Document& doc : documents) {
    out << serialize_document(doc) << "\n";
  }
}

}  // namespace pie

#endif  // PIE_JSONL_HPP
