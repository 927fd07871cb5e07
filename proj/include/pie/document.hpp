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

// Typed documents: one text field plus named annotation layers with
// explicit dependencies. Layers hold separate gold and prediction sets.
// Annotations compare structurally (scores and metadata excluded) and
// serialize to canonical one-line JSON records in the topological order
// of the layer graph.

#ifndef PIE_DOCUMENT_HPP
#define PIE_DOCUMENT_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "pie/errors.hpp"
#include "pie/unicode.hpp"

namespace pie {

using AnnotationId = std::uint64_t;

enum class AnnotationKind { labeled_span, binary_relation, document_label };

inline const char* annotation_kind_name(AnnotationKind kind) {
  switch (kind) {
    case AnnotationKind::labeled_span: return "labeled_span";
    case AnnotationKind::binary_relation: return "binary_relation";
    case AnnotationKind::document_label: return "document_label";
  }
  return "unknown";
}

inline std::optional<AnnotationKind> annotation_kind_from_name(std::string_view name) {
  if (name == "labeled_span") return AnnotationKind::labeled_span;
  if (name == "binary_relation") return AnnotationKind::binary_relation;
  if (name == "document_label") return AnnotationKind::document_label;
  return std::nullopt;
}

/// A layer declares its annotation kind and what it references: the data
/// field "text" for spans and document labels, another layer for relations.
struct LayerSpec {
  std::string name;
  AnnotationKind kind;
  std::vector<std::string> targets;
};

struct DocumentSchema {
  std::string name;
  std::vector<LayerSpec> layers;

  const LayerSpec* find_layer(std::string_view layer_name) const {
    for (const LayerSpec& spec : layers) {
      if (spec.name == layer_name) return &spec;
    }
    return nullptr;
  }
};

inline constexpr const char* kTextField = "text";

namespace detail {

// Depth-first search that reports the first layer->layer cycle found.
inline bool find_cycle(const DocumentSchema& schema, std::size_t node,
                       std::vector<int>& color, std::vector<std::string>& stack,
                       std::vector<std::string>& cycle) {
  color[node] = 1;
  stack.push_back(schema.layers[node].name);
  for (const std::string& target : schema.layers[node].targets) {
    if (target == kTextField) continue;
    for (std::size_t k = 0; k < schema.layers.size(); ++k) {
      if (schema.layers[k].name != target) continue;
      if (color[k] == 1) {
        auto it = std::find(stack.begin(), stack.end(), target);
        cycle.assign(it, stack.end());
        return true;
      }
      if (color[k] == 0 && find_cycle(schema, k, color, stack, cycle)) return true;
    }
  }
  stack.pop_back();
  color[node] = 2;
  return false;
}

}  // namespace detail

/// Checks all schema invariants; throws the SchemaError naming the
/// violating layer and rule. Check order: layer names, target existence,
/// acyclicity, kind/target compatibility.
inline void validate_schema(const DocumentSchema& schema) {
  std::set<std::string> seen;
  for (const LayerSpec& spec : schema.layers) {
    if (spec.name.empty()) {
      throw Error(ErrorKind::InvalidLayerName, "layer with empty name");
    }
    if (spec.name == kTextField) {
      throw Error(ErrorKind::InvalidLayerName,
                  "layer name '" + spec.name + "' shadows the data field");
    }
    if (!seen.insert(spec.name).second) {
      throw Error(ErrorKind::DuplicateLayerError, "duplicate layer '" + spec.name + "'");
    }
  }
  for (const LayerSpec& spec : schema.layers) {
    for (const std::string& target : spec.targets) {
      if (target != kTextField && schema.find_layer(target) == nullptr) {
        throw Error(ErrorKind::UnknownTargetError,
                    "layer '" + spec.name + "' targets unknown '" + target + "'");
      }
    }
  }
  std::vector<int> color(schema.layers.size(), 0);
  for (std::size_t i = 0; i < schema.layers.size(); ++i) {
    if (color[i] != 0) continue;
    std::vector<std::string> stack;
    std::vector<std::string> cycle;
    if (detail::find_cycle(schema, i, color, stack, cycle)) {
      std::string names;
      for (const std::string& n : cycle) names += (names.empty() ? "" : ", ") + n;
      throw Error(ErrorKind::CycleError, "layer cycle [" + names + "]");
    }
  }
  for (const LayerSpec& spec : schema.layers) {
    switch (spec.kind) {
      case AnnotationKind::labeled_span:
      case AnnotationKind::document_label:
        if (spec.targets.size() != 1 || spec.targets[0] != kTextField) {
          throw Error(ErrorKind::KindTargetMismatchError,
                      "layer '" + spec.name + "' of kind " +
                          annotation_kind_name(spec.kind) + " must target exactly [text]");
        }
        break;
      case AnnotationKind::binary_relation: {
        const LayerSpec* target =
            spec.targets.size() == 1 ? schema.find_layer(spec.targets[0]) : nullptr;
        if (target == nullptr || target->kind != AnnotationKind::labeled_span) {
          throw Error(ErrorKind::KindTargetMismatchError,
                      "layer '" + spec.name +
                          "' of kind binary_relation must target exactly one labeled_span layer");
        }
        break;
      }
    }
  }
}

/// Layer names ordered so every layer appears after all layers it targets;
/// ties resolved by declaration order. Precondition: schema is valid.
inline std::vector<std::string> topological_layer_order(const DocumentSchema& schema) {
  std::vector<std::string> order;
  std::set<std::string> done;
  while (order.size() < schema.layers.size()) {
    bool advanced = false;
    for (const LayerSpec& spec : schema.layers) {
      if (done.count(spec.name)) continue;
      bool ready = true;
      for (const std::string& target : spec.targets) {
        if (target != kTextField && !done.count(target)) {
          ready = false;
          break;
        }
      }
      if (ready) {
        order.push_back(spec.name);
        done.insert(spec.name);
        advanced = true;
        break;
      }
    }
    if (!advanced) {
      throw Error(ErrorKind::CycleError, "schema '" + schema.name + "' is cyclic");
    }
  }
  return order;
}

/// Kind-discriminated annotation. Only the fields of the active kind are
/// meaningful; score and metadata never participate in equality.
struct Annotation {
  AnnotationKind kind = AnnotationKind::labeled_span;
  std::size_t start = 0;
  std::size_t end = 0;
  AnnotationId head = 0;
  AnnotationId tail = 0;
  std::string label;
  std::optional<double> score;
  std::map<std::string, std::string> metadata;

  static Annotation span(std::size_t start, std::size_t end, std::string label,
                         std::optional<double> score = std::nullopt,
                         std::map<std::string, std::string> metadata = {}) {
    Annotation a;
    a.kind = AnnotationKind::labeled_span;
    a.start = start;
    a.end = end;
    a.label = std::move(label);
    a.score = score;
    a.metadata = std::move(metadata);
    return a;
  }

  static Annotation relation(AnnotationId head, AnnotationId tail, std::string label,
                             std::optional<double> score = std::nullopt,
                             std::map<std::string, std::string> metadata = {}) {
    Annotation a;
    a.kind = AnnotationKind::binary_relation;
    a.head = head;
    a.tail = tail;
    a.label = std::move(label);
    a.score = score;
    a.metadata = std::move(metadata);
    return a;
  }

  static Annotation document_label(std::string label,
                                   std::optional<double> score = std::nullopt,
                                   std::map<std::string, std::string> metadata = {}) {
    Annotation a;
    a.kind = AnnotationKind::document_label;
    a.label = std::move(label);
    a.score = score;
    a.metadata = std::move(metadata);
    return a;
  }
};

// Fully resolved structural values: relations carry their argument spans
// by value, so annotations from different documents compare correctly.
struct SpanValue {
  std::size_t start;
  std::size_t end;
  std::string label;
  auto operator<=>(const SpanValue&) const = default;
};

struct RelationValue {
  SpanValue head;
  SpanValue tail;
  std::string label;
  auto operator<=>(const RelationValue&) const = default;
};

struct LabelValue {
  std::string label;
  auto operator<=>(const LabelValue&) const = default;
};

using AnnotationValue = std::variant<SpanValue, RelationValue, LabelValue>;

class Document {
 public:
  struct LayerData {
    std::vector<AnnotationId> gold;
    std::vector<AnnotationId> predictions;
  };

  Document(std::shared_ptr<const DocumentSchema> schema, std::string id, std::string text)
      : schema_(std::move(schema)), id_(std::move(id)), text_(std::move(text)) {
    validate_schema(*schema_);
    text_cp_len_ = utf8_length(text_);
    for (const LayerSpec& spec : schema_->layers) layers_[spec.name];
  }

  const DocumentSchema& schema() const { return *schema_; }
  std::shared_ptr<const DocumentSchema> schema_ptr() const { return schema_; }
  const std::string& id() const { return id_; }
  const std::string& text() const { return text_; }
  std::size_t text_cp_length() const { return text_cp_len_; }
  const std::map<std::string, std::string>& metadata() const { return metadata_; }
  bool sealed() const { return sealed_; }

  void set_metadata(const std::string& key, const std::string& value) {
    require_unsealed();
    metadata_[key] = value;
  }

  void seal() { sealed_ = true; }

  /// Unsealed deep copy; the only way to derive a mutable document from a
  /// sealed one.
  Document thawed() const {
    Document copy(*this);
    copy.sealed_ = false;
    return copy;
  }

  const LayerData& layer(const std::string& name) const {
    auto it = layers_.find(name);
    if (it == layers_.end()) {
      throw Error(ErrorKind::UnknownLayer, "no layer '" + name + "' in document '" + id_ + "'");
    }
    return it->second;
  }

  bool has_layer(const std::string& name) const { return layers_.count(name) != 0; }

  bool has_annotation(AnnotationId id) const { return annotations_.count(id) != 0; }

  const Annotation& annotation(AnnotationId id) const {
    auto it = annotations_.find(id);
    if (it == annotations_.end()) {
      throw Error(ErrorKind::DanglingReference,
                  "annotation id " + std::to_string(id) + " not in document '" + id_ + "'");
    }
    return it->second.ann;
  }

  const std::string& annotation_layer(AnnotationId id) const {
    auto it = annotations_.find(id);
    if (it == annotations_.end()) {
      throw Error(ErrorKind::DanglingReference,
                  "annotation id " + std::to_string(id) + " not in document '" + id_ + "'");
    }
    return it->second.layer;
  }

  bool is_prediction(AnnotationId id) const {
    auto it = annotations_.find(id);
    if (it == annotations_.end()) {
      throw Error(ErrorKind::DanglingReference,
                  "annotation id " + std::to_string(id) + " not in document '" + id_ + "'");
    }
    return it->second.prediction;
  }

  /// Resolved structural value: relations resolve head/tail to span values.
  AnnotationValue value(AnnotationId id) const {
    const Annotation& a = annotation(id);
    switch (a.kind) {
      case AnnotationKind::labeled_span:
        return SpanValue{a.start, a.end, a.label};
      case AnnotationKind::binary_relation: {
        const Annotation& head = annotation(a.head);
        const Annotation& tail = annotation(a.tail);
        return RelationValue{SpanValue{head.start, head.end, head.label},
                             SpanValue{tail.start, tail.end, tail.label}, a.label};
      }
      case AnnotationKind::document_label:
        return LabelValue{a.label};
    }
    throw Error(ErrorKind::KindMismatch, "unhandled annotation kind");
  }

  std::vector<AnnotationValue> values(const std::string& layer_name, bool predictions) const {
    const LayerData& data = layer(layer_name);
    const std::vector<AnnotationId>& ids = predictions ? data.predictions : data.gold;
    std::vector<AnnotationValue> out;
    out.reserve(ids.size());
    for (AnnotationId id : ids) out.push_back(value(id));
    return out;
  }

  /// Stores the annotation in the layer's gold or prediction set and
  /// returns a fresh id. Gold annotations may only reference gold
  /// annotations; predictions may reference either set.
  AnnotationId add_annotation(const std::string& layer_name, const Annotation& ann,
                              bool as_prediction = false) {
    require_unsealed();
    validate_annotation(layer_name, ann, as_prediction);
    const AnnotationId id = next_id_++;
    store(id, layer_name, ann, as_prediction);
    return id;
  }

  /// Deserialization path: stores under a caller-supplied id.
  AnnotationId add_annotation_with_id(AnnotationId id, const std::string& layer_name,
                                      const Annotation& ann, bool as_prediction) {
    require_unsealed();
    if (annotations_.count(id)) {
      throw Error(ErrorKind::ParseError, "duplicate annotation id " + std::to_string(id));
    }
    validate_annotation(layer_name, ann, as_prediction);
    store(id, layer_name, ann, as_prediction);
    if (id >= next_id_) next_id_ = id + 1;
    return id;
  }

  /// Drops the given annotations wholesale. Internal to clear_predictions;
  /// ids are never reused afterwards.
  void remove_annotations(const std::set<AnnotationId>& ids) {
    require_unsealed();
    for (auto& [name, data] : layers_) {
      std::erase_if(data.gold, [&](AnnotationId id) { return ids.count(id) != 0; });
      std::erase_if(data.predictions, [&](AnnotationId id) { return ids.count(id) != 0; });
    }
    for (AnnotationId id : ids) annotations_.erase(id);
  }

 private:
  struct StoredAnnotation {
    Annotation ann;
    std::string layer;
    bool prediction;
  };

  void require_unsealed() const {
    if (sealed_) {
      throw Error(ErrorKind::InvalidState, "document '" + id_ + "' is sealed");
    }
  }

  void validate_annotation(const std::string& layer_name, const Annotation& ann,
                           bool as_prediction) const {
    auto it = layers_.find(layer_name);
    if (it == layers_.end()) {
      throw Error(ErrorKind::UnknownLayer, "no layer '" + layer_name + "'");
    }
    const LayerSpec& spec = *schema_->find_layer(layer_name);
    if (ann.kind != spec.kind) {
      throw Error(ErrorKind::KindMismatch,
                  "annotation of kind " + std::string(annotation_kind_name(ann.kind)) +
                      " in layer '" + layer_name + "' of kind " +
                      annotation_kind_name(spec.kind));
    }
    switch (ann.kind) {
      case AnnotationKind::labeled_span:
        if (ann.start >= ann.end || ann.end > text_cp_len_) {
          throw Error(ErrorKind::OffsetOutOfBounds,
                      "span (" + std::to_string(ann.start) + "," + std::to_string(ann.end) +
                          ") over text of length " + std::to_string(text_cp_len_));
        }
        break;
      case AnnotationKind::binary_relation: {
        if (ann.head == ann.tail) {
          throw Error(ErrorKind::SelfReference,
                      "relation head and tail are both id " + std::to_string(ann.head));
        }
        for (AnnotationId ref : {ann.head, ann.tail}) {
          auto ref_it = annotations_.find(ref);
          if (ref_it == annotations_.end() || ref_it->second.layer != spec.targets[0]) {
            throw Error(ErrorKind::DanglingReference,
                        "relation argument id " + std::to_string(ref) +
                            " does not resolve into layer '" + spec.targets[0] + "'");
          }
          if (!as_prediction && ref_it->second.prediction) {
            throw Error(ErrorKind::DanglingReference,
                        "gold relation references predicted annotation id " +
                            std::to_string(ref));
          }
        }
        break;
      }
      case AnnotationKind::document_label:
        break;
    }
    const AnnotationValue fresh = value_of(ann);
    const std::vector<AnnotationId>& ids =
        as_prediction ? it->second.predictions : it->second.gold;
    for (AnnotationId id : ids) {
      if (value(id) == fresh) {
        throw Error(ErrorKind::DuplicateAnnotation,
                    "structural duplicate in layer '" + layer_name + "' " +
                        (as_prediction ? "predictions" : "gold"));
      }
    }
  }

  AnnotationValue value_of(const Annotation& ann) const {
    switch (ann.kind) {
      case AnnotationKind::labeled_span:
        return SpanValue{ann.start, ann.end, ann.label};
      case AnnotationKind::binary_relation: {
        const Annotation& head = annotation(ann.head);
        const Annotation& tail = annotation(ann.tail);
        return RelationValue{SpanValue{head.start, head.end, head.label},
                             SpanValue{tail.start, tail.end, tail.label}, ann.label};
      }
      case AnnotationKind::document_label:
        return LabelValue{ann.label};
    }
    throw Error(ErrorKind::KindMismatch, "unhandled annotation kind");
  }

  void store(AnnotationId id, const std::string& layer_name, const Annotation& ann,
             bool as_prediction) {
    annotations_.emplace(id, StoredAnnotation{ann, layer_name, as_prediction});
    LayerData& data = layers_[layer_name];
    (as_prediction ? data.predictions : data.gold).push_back(id);
  }

  std::shared_ptr<const DocumentSchema> schema_;
  std::string id_;
  std::string text_;
  std::size_t text_cp_len_ = 0;
  std::map<std::string, std::string> metadata_;
  std::map<std::string, LayerData> layers_;
  std::map<AnnotationId, StoredAnnotation> annotations_;
  AnnotationId next_id_ = 0;
  bool sealed_ = false;
};

/// Structural equality across documents: kinds match and values match,
/// with relation arguments resolved to span values. Scores and metadata
/// are ignored.
inline bool annotations_equal(const Document& doc_a, AnnotationId a, const Document& doc_b,
                              AnnotationId b) {
  return doc_a.value(a) == doc_b.value(b);
}

/// Empties the prediction sets of the named layers (all layers when
/// omitted) and cascades: predictions elsewhere that reference a removed
/// annotation are removed too. Gold sets are untouched.
inline Document clear_predictions(
    const Document& doc, const std::optional<std::vector<std::string>>& layer_names = std::nullopt) {
  std::set<std::string> targets;
  if (layer_names.has_value()) {
    for (const std::string& name : *layer_names) {
      if (!doc.has_layer(name)) {
        throw Error(ErrorKind::UnknownLayer, "no layer '" + name + "' in document '" + doc.id() + "'");
      }
      targets.insert(name);
    }
  } else {
    for (const LayerSpec& spec : doc.schema().layers) targets.insert(spec.name);
  }

  std::set<AnnotationId> removed;
  for (const std::string& name : targets) {
    for (AnnotationId id : doc.layer(name).predictions) removed.insert(id);
  }
  // Cascade along the annotation graph until no prediction references a
  // removed annotation. Gold never references predictions by construction.
  bool changed = true;
  while (changed) {
    changed = false;
    for (const LayerSpec& spec : doc.schema().layers) {
      if (spec.kind != AnnotationKind::binary_relation) continue;
      for (AnnotationId id : doc.layer(spec.name).predictions) {
        if (removed.count(id)) continue;
        const Annotation& ann = doc.annotation(id);
        if (removed.count(ann.head) || removed.count(ann.tail)) {
          removed.insert(id);
          changed = true;
        }
      }
    }
  }

  Document out = doc.thawed();
  out.remove_annotations(removed);
  out.seal();
  return out;
}

namespace detail {

inline nlohmann::ordered_json annotation_to_json(AnnotationId id, const Annotation& ann) {
  nlohmann::ordered_json j;
  j["_id"] = id;
  switch (ann.kind) {
    case AnnotationKind::labeled_span:
      j["start"] = ann.start;
      j["end"] = ann.end;
      j["label"] = ann.label;
      break;
    case AnnotationKind::binary_relation:
      j["head"] = ann.head;
      j["tail"] = ann.tail;
      j["label"] = ann.label;
      break;
    case AnnotationKind::document_label:
      j["label"] = ann.label;
      break;
  }
  if (ann.score.has_value()) {
    j["score"] = *ann.score;
  } else {
    j["score"] = nullptr;
  }
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  for (const auto& [k, v] : ann.metadata) meta[k] = v;
  j["metadata"] = std::move(meta);
  return j;
}

inline nlohmann::ordered_json schema_to_json(const DocumentSchema& schema) {
  nlohmann::ordered_json j;
  j["kind"] = "schema";
  j["name"] = schema.name;
  nlohmann::ordered_json layers = nlohmann::ordered_json::array();
  for (const LayerSpec& spec : schema.layers) {
    nlohmann::ordered_json l;
    l["name"] = spec.name;
    l["kind"] = annotation_kind_name(spec.kind);
    l["targets"] = spec.targets;
    layers.push_back(std::move(l));
  }
  j["layers"] = std::move(layers);
  return j;
}

inline DocumentSchema schema_from_json(const nlohmann::ordered_json& j) {
  if (!j.is_object() || j.value("kind", "") != "schema") {
    throw Error(ErrorKind::ParseError, "expected a schema record");
  }
  if (!j.contains("name") || !j["name"].is_string() || !j.contains("layers") ||
      !j["layers"].is_array()) {
    throw Error(ErrorKind::ParseError, "schema record missing name or layers");
  }
  if (j.contains("data_fields")) {
    const auto& fields = j["data_fields"];
    if (!fields.is_array() || fields.size() != 1 || fields[0] != kTextField) {
      throw Error(ErrorKind::SchemaMismatch, "only the single data field 'text' is supported");
    }
  }
  DocumentSchema schema;
  schema.name = j["name"].get<std::string>();
  for (const auto& l : j["layers"]) {
    if (!l.is_object() || !l.contains("name") || !l["name"].is_string() ||
        !l.contains("kind") || !l["kind"].is_string() || !l.contains("targets") ||
        !l["targets"].is_array()) {
      throw Error(ErrorKind::ParseError, "malformed layer spec in schema record");
    }
    const auto kind = annotation_kind_from_name(l["kind"].get<std::string>());
    if (!kind.has_value()) {
      throw Error(ErrorKind::SchemaMismatch,
                  "unknown annotation kind '" + l["kind"].get<std::string>() + "'");
    }
    LayerSpec spec;
    spec.name = l["name"].get<std::string>();
    spec.kind = *kind;
    for (const auto& t : l["targets"]) {
      if (!t.is_string()) throw Error(ErrorKind::ParseError, "layer target must be a string");
      spec.targets.push_back(t.get<std::string>());
    }
    schema.layers.push_back(std::move(spec));
  }
  validate_schema(schema);
  return schema;
}

}  // namespace detail

/// Canonical one-line JSON record. Layers appear in topological order,
/// gold before predictions, both in insertion order; metadata keys are
/// sorted; no insignificant whitespace. Equal documents serialize to
/// identical bytes.
inline std::string serialize_document(const Document& doc) {
  if (!doc.sealed()) {
    throw Error(ErrorKind::InvalidState, "document '" + doc.id() + "' must be sealed");
  }
  nlohmann::ordered_json j;
  j["kind"] = "document";
  j["id"] = doc.id();
  j["data"] = nlohmann::ordered_json::object();
  j["data"][kTextField] = doc.text();
  nlohmann::ordered_json annotations = nlohmann::ordered_json::object();
  for (const std::string& layer_name : topological_layer_order(doc.schema())) {
    const Document::LayerData& data = doc.layer(layer_name);
    nlohmann::ordered_json layer_json;
    nlohmann::ordered_json gold = nlohmann::ordered_json::array();
    for (AnnotationId id : data.gold) {
      gold.push_back(detail::annotation_to_json(id, doc.annotation(id)));
    }
    nlohmann::ordered_json preds = nlohmann::ordered_json::array();
    for (AnnotationId id : data.predictions) {
      preds.push_back(detail::annotation_to_json(id, doc.annotation(id)));
    }
    layer_json["gold"] = std::move(gold);
    layer_json["predictions"] = std::move(preds);
    annotations[layer_name] = std::move(layer_json);
  }
  j["annotations"] = std::move(annotations);
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  for (const auto& [k, v] : doc.metadata()) meta[k] = v;
  j["metadata"] = std::move(meta);
  return j.dump();
}

namespace detail {

inline Annotation annotation_from_json(const nlohmann::ordered_json& j, AnnotationKind kind,
                                       AnnotationId& id_out,
                                       const std::set<AnnotationId>& defined) {
  if (!j.is_object() || !j.contains("_id") || !j["_id"].is_number_unsigned()) {
    throw Error(ErrorKind::ParseError, "annotation record missing unsigned _id");
  }
  id_out = j["_id"].get<AnnotationId>();
  Annotation ann;
  ann.kind = kind;
  const auto require_unsigned = [&](const char* field) -> std::uint64_t {
    if (!j.contains(field) || !j[field].is_number_unsigned()) {
      throw Error(ErrorKind::SchemaMismatch,
                  "annotation " + std::to_string(id_out) + " lacks unsigned field '" + field +
                      "' required by kind " + annotation_kind_name(kind));
    }
    return j[field].get<std::uint64_t>();
  };
  const auto require_string = [&](const char* field) -> std::string {
    if (!j.contains(field) || !j[field].is_string()) {
      throw Error(ErrorKind::SchemaMismatch,
                  "annotation " + std::to_string(id_out) + " lacks string field '" + field +
                      "' required by kind " + annotation_kind_name(kind));
    }
    return j[field].get<std::string>();
  };
  switch (kind) {
    case AnnotationKind::labeled_span:
      ann.start = require_unsigned("start");
      ann.end = require_unsigned("end");
      ann.label = require_string("label");
      break;
    case AnnotationKind::binary_relation:
      ann.head = require_unsigned("head");
      ann.tail = require_unsigned("tail");
      ann.label = require_string("label");
      for (AnnotationId ref : {ann.head, ann.tail}) {
        if (!defined.count(ref)) {
          throw Error(ErrorKind::ForwardReference,
                      "annotation " + std::to_string(id_out) + " references id " +
                          std::to_string(ref) + " before its definition");
        }
      }
      break;
    case AnnotationKind::document_label:
      ann.label = require_string("label");
      break;
  }
  if (j.contains("score") && !j["score"].is_null()) {
    if (!j["score"].is_number()) {
      throw Error(ErrorKind::ParseError,
                  "annotation " + std::to_string(id_out) + " score must be a number or null");
    }
    ann.score = j["score"].get<double>();
  }
  if (j.contains("metadata")) {
    if (!j["metadata"].is_object()) {
      throw Error(ErrorKind::ParseError, "annotation metadata must be an object");
    }
    for (const auto& [k, v] : j["metadata"].items()) {
      if (!v.is_string()) {
        throw Error(ErrorKind::ParseError, "annotation metadata values must be strings");
      }
      ann.metadata[k] = v.get<std::string>();
    }
  }
  return ann;
}

}  // namespace detail

/// Inverse of serialize_document. Validates every annotation invariant
/// while rebuilding; references must point at already-defined ids.
inline Document deserialize_document(const std::string& line,
                                     std::shared_ptr<const DocumentSchema> schema) {
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, e.what());
  }
  if (!j.is_object() || j.value("kind", "") != "document") {
    throw Error(ErrorKind::ParseError, "expected a document record");
  }
  if (!j.contains("id") || !j["id"].is_string()) {
    throw Error(ErrorKind::ParseError, "document record missing string id");
  }
  if (!j.contains("data") || !j["data"].is_object() || !j["data"].contains(kTextField) ||
      !j["data"][kTextField].is_string()) {
    throw Error(ErrorKind::ParseError, "document record missing data.text");
  }
  Document doc(schema, j["id"].get<std::string>(), j["data"][kTextField].get<std::string>());
  std::set<AnnotationId> defined;
  if (j.contains("annotations")) {
    if (!j["annotations"].is_object()) {
      throw Error(ErrorKind::ParseError, "annotations must be an object");
    }
    for (const auto& [layer_name, layer_json] : j["annotations"].items()) {
      const LayerSpec* spec = schema->find_layer(layer_name);
      if (spec == nullptr) {
        throw Error(ErrorKind::SchemaMismatch, "unknown layer '" + layer_name + "'");
      }
      if (!layer_json.is_object()) {
        throw Error(ErrorKind::ParseError, "layer '" + layer_name + "' must be an object");
      }
      for (const bool as_prediction : {false, true}) {
        const char* key = as_prediction ? "predictions" : "gold";
        if (!layer_json.contains(key)) continue;
        if (!layer_json[key].is_array()) {
          throw Error(ErrorKind::ParseError,
                      "layer '" + layer_name + "' field '" + key + "' must be an array");
        }
        for (const auto& ann_json : layer_json[key]) {
          AnnotationId id = 0;
          const Annotation ann =
              detail::annotation_from_json(ann_json, spec->kind, id, defined);
          doc.add_annotation_with_id(id, layer_name, ann, as_prediction);
          defined.insert(id);
        }
      }
    }
  }
  if (j.contains("metadata")) {
    if (!j["metadata"].is_object()) {
      throw Error(ErrorKind::ParseError, "document metadata must be an object");
    }
    for (const auto& [k, v] : j["metadata"].items()) {
      if (!v.is_string()) {
        throw Error(ErrorKind::ParseError, "document metadata values must be strings");
      }
      doc.set_metadata(k, v.get<std::string>());
    }
  }
  doc.seal();
  return doc;
}

}  // namespace pie

#endif  // PIE_DOCUMENT_HPP
