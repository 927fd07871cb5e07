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

// Deterministic trainable models: an averaged-perceptron sequence tagger
// for NER encodings and an averaged-perceptron multiclass classifier for
// RE encodings. Everything is reproducible bit for bit: seeded shuffles,
// lexicographic tie-breaking, and a canonical text model format.

#ifndef PIE_PERCEPTRON_HPP
#define PIE_PERCEPTRON_HPP

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "pie/errors.hpp"
#include "pie/taskmodule_ner.hpp"
#include "pie/taskmodule_re.hpp"
#include "pie/unicode.hpp"

namespace pie {

inline constexpr const char* kModelFormatHeader = "pie-linear-model v1";
inline constexpr const char* kBosMarker = "<BOS>";
inline constexpr const char* kEosMarker = "<EOS>";

struct TrainConfig {
  std::size_t epochs = 5;
  std::uint64_t seed = 42;
  bool shuffle = true;

  void validate() const {
    if (epochs < 1) throw Error(ErrorKind::InvalidConfig, "epochs must be at least 1");
  }
};

struct TrainingMeta {
  std::size_t epochs = 0;
  std::uint64_t seed = 0;
  std::size_t feature_count = 0;
};

/// Label set plus feature->weight maps. Prediction depends only on labels
/// and weights; training_meta and warnings are provenance.
struct LinearModel {
  std::vector<std::string> labels;  // sorted
  std::map<std::string, std::map<std::string, double>> weights;  // feature -> label -> weight
  TrainingMeta training_meta;
  std::vector<std::string> warnings;

  /// Argmax of summed feature weights; ties go to the lexicographically
  /// smallest label. Unseen features contribute nothing.
  std::pair<std::string, double> predict(const std::vector<std::string>& features) const {
    if (labels.empty()) {
      throw Error(ErrorKind::InvalidState, "model has no labels");
    }
    std::vector<double> scores(labels.size(), 0.0);
    for (const std::string& feature : features) {
      const auto it = weights.find(feature);
      if (it == weights.end()) continue;
      for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto w = it->second.find(labels[i]);
        if (w != it->second.end()) scores[i] += w->second;
      }
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i) {
      if (scores[i] > scores[best]) best = i;
    }
    return {labels[best], scores[best]};
  }
};

namespace detail {

inline std::string utf8_suffix(const std::string& token, std::size_t n) {
  const std::vector<CodePoint> cps = decode_utf8(token);
  if (cps.size() <= n) return token;
  return token.substr(cps[cps.size() - n].byte_start);
}

inline std::string token_shape(const std::string& token) {
  std::string shape;
  for (const CodePoint& cp : decode_utf8(token)) {
    char cls = 'o';
    if (is_upper(cp.value)) {
      cls = 'X';
    } else if (is_letter(cp.value)) {
      cls = 'x';
    } else if (is_number(cp.value)) {
      cls = 'd';
    }
    if (shape.empty() || shape.back() != cls) shape.push_back(cls);
  }
  return shape;
}

// Deterministic bounded draw; the tiny modulo bias is irrelevant here.
inline std::size_t bounded_draw(std::mt19937& rng, std::size_t n) {
  return static_cast<std::size_t>(rng()) % n;
}

inline void seeded_shuffle(std::vector<std::size_t>& order, std::mt19937& rng) {
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[bounded_draw(rng, i)]);
  }
}

// Averaged-perceptron bookkeeping with update timestamps: acc holds the
// sum of the weight's value over all completed steps.
class AveragedTrainer {
 public:
  explicit AveragedTrainer(std::vector<std::string> labels) : labels_(std::move(labels)) {}

  const std::vector<std::string>& labels() const { return labels_; }

  std::size_t predict(const std::vector<std::string>& features) const {
    std::vector<double> scores(labels_.size(), 0.0);
    for (const std::string& feature : features) {
      const auto it = weights_.find(feature);
      if (it == weights_.end()) continue;
      for (std::size_t i = 0; i < labels_.size(); ++i) scores[i] += it->second.current[i];
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i) {
      if (scores[i] > scores[best]) best = i;
    }
    return best;
  }

  void begin_step() { ++step_; }

  void update(const std::vector<std::string>& features, std::size_t gold, std::size_t predicted) {
    for (const std::string& feature : features) {
      adjust(feature, gold, +1.0);
      adjust(feature, predicted, -1.0);
    }
  }

  LinearModel finalize() const {
    LinearModel model;
    model.labels = labels_;
    for (const auto& [feature, row] : weights_) {
      for (std::size_t i = 0; i < labels_.size(); ++i) {
        const double total =
            row.accumulated[i] +
            row.current[i] * static_cast<double>(step_ - row.updated_at[i]);
        const double averaged = total / static_cast<double>(step_);
        if (averaged != 0.0) model.weights[feature][labels_[i]] = averaged;
      }
    }
    model.training_meta.feature_count = weights_.size();
    return model;
  }

 private:
  struct Row {
    std::vector<double> current;
    std::vector<double> accumulated;
    std::vector<std::uint64_t> updated_at;
  };

  void adjust(const std::string& feature, std::size_t label, double delta) {
    auto it = weights_.find(feature);
    if (it == weights_.end()) {
      it = weights_
               .emplace(feature, Row{std::vector<double>(labels_.size(), 0.0),
                                     std::vector<double>(labels_.size(), 0.0),
                                     std::vector<std::uint64_t>(labels_.size(), 0)})
               .first;
    }
    Row& row = it->second;
    if (row.updated_at[label] < step_) {
      row.accumulated[label] +=
          row.current[label] * static_cast<double>(step_ - 1 - row.updated_at[label]);
      row.updated_at[label] = step_;
    } else {
      // A feature occurring twice in one instance adjusts twice within the
      // same step; replace this step's snapshot contribution.
      row.accumulated[label] -= row.current[label];
    }
    row.current[label] += delta;
    row.accumulated[label] += row.current[label];
  }

  std::vector<std::string> labels_;
  std::map<std::string, Row> weights_;
  std::uint64_t step_ = 0;
};

}  // namespace detail

/// The fixed ten-feature template for one tagging decision. prev_tag is
/// the previously predicted tag (<BOS> at position 0). Marker
/// pseudo-tokens pass through as ordinary tokens.
inline std::vector<std::string> tagger_features(const std::vector<std::string>& tokens,
                                                std::size_t position,
                                                const std::string& prev_tag) {
  if (position >= tokens.size()) {
    throw Error(ErrorKind::IndexOutOfRange,
                "position " + std::to_string(position) + " over " +
                    std::to_string(tokens.size()) + " tokens");
  }
  const std::string lower = ascii_lower(tokens[position]);
  std::vector<std::string> features;
  features.reserve(10);
  features.push_back("bias");
  features.push_back("w=" + lower);
  features.push_back("suf3=" + detail::utf8_suffix(tokens[position], 3));
  features.push_back("suf2=" + detail::utf8_suffix(tokens[position], 2));
  features.push_back("shape=" + detail::token_shape(tokens[position]));
  features.push_back(position == 0 ? "first" : "not_first");
  features.push_back("prev_w=" +
                     (position == 0 ? std::string(kBosMarker) : ascii_lower(tokens[position - 1])));
  features.push_back("next_w=" + (position + 1 == tokens.size()
                                      ? std::string(kEosMarker)
                                      : ascii_lower(tokens[position + 1])));
  features.push_back("prev_t=" + prev_tag);
  features.push_back("prev_t+w=" + prev_tag + "|" + lower);
  return features;
}

/// Greedy left-to-right tagging with the previously predicted tag feeding
/// the next decision's features.
inline std::vector<std::string> predict_tags(const LinearModel& model,
                                             const NerEncoding& encoding) {
  const std::vector<std::string> texts = encoding.token_texts();
  std::vector<std::string> tags;
  tags.reserve(texts.size());
  std::string prev = kBosMarker;
  for (std::size_t pos = 0; pos < texts.size(); ++pos) {
    const auto [tag, score] = model.predict(tagger_features(texts, pos, prev));
    tags.push_back(tag);
    prev = tag;
  }
  return tags;
}

inline LinearModel train_tagger(const std::vector<NerEncoding>& encodings,
                                const TrainConfig& config) {
  config.validate();
  std::set<std::string> vocabulary;
  std::size_t total_tokens = 0;
  for (const NerEncoding& enc : encodings) {
    if (!enc.target.has_value()) {
      throw Error(ErrorKind::InvalidConfig, "training encoding without target");
    }
    for (const std::string& tag : *enc.target) vocabulary.insert(tag);
    total_tokens += enc.tokens.size();
  }
  if (encodings.empty() || total_tokens == 0) {
    throw Error(ErrorKind::EmptyTrainingSet, "no training tokens");
  }
  detail::AveragedTrainer trainer(
      std::vector<std::string>(vocabulary.begin(), vocabulary.end()));
  std::map<std::string, std::size_t> tag_index;
  for (std::size_t i = 0; i < trainer.labels().size(); ++i) tag_index[trainer.labels()[i]] = i;

  std::mt19937 rng(static_cast<std::uint32_t>(config.seed));
  std::vector<std::size_t> order(encodings.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    if (config.shuffle) detail::seeded_shuffle(order, rng);
    for (std::size_t idx : order) {
      const NerEncoding& enc = encodings[idx];
      const std::vector<std::string> texts = enc.token_texts();
      std::string prev = kBosMarker;
      for (std::size_t pos = 0; pos < texts.size(); ++pos) {
        trainer.begin_step();
        const std::vector<std::string> features = tagger_features(texts, pos, prev);
        const std::size_t predicted = trainer.predict(features);
        const std::size_t gold = tag_index.at((*enc.target)[pos]);
        if (predicted != gold) trainer.update(features, gold, predicted);
        prev = trainer.labels()[predicted];
      }
    }
  }
  LinearModel model = trainer.finalize();
  model.training_meta.epochs = config.epochs;
  model.training_meta.seed = config.seed;
  return model;
}

/// Features for one relation candidate: argument surfaces, zone unigrams
/// split at the marker positions, a bucketed argument distance, argument
/// order, and the four marker-adjacent slots.
inline std::vector<std::string> classifier_features(const ReEncoding& encoding) {
  const std::vector<std::string>& toks = encoding.marked_tokens;
  const auto is_marker_position = [&](std::size_t i) {
    return i == encoding.head_open || i == encoding.head_close || i == encoding.tail_open ||
           i == encoding.tail_close;
  };
  const auto joined_lower = [&](std::size_t from, std::size_t to) {
    std::string out;
    for (std::size_t i = from; i < to; ++i) {
      if (!out.empty()) out += '_';
      out += ascii_lower(toks[i]);
    }
    return out;
  };
  const std::size_t first_open = std::min(encoding.head_open, encoding.tail_open);
  const std::size_t first_close = std::min(encoding.head_close, encoding.tail_close);
  const std::size_t second_open = std::max(encoding.head_open, encoding.tail_open);
  const std::size_t last_close = std::max(encoding.head_close, encoding.tail_close);

  std::vector<std::string> features;
  features.push_back("bias");
  features.push_back("head=" + joined_lower(encoding.head_open + 1, encoding.head_close));
  features.push_back("tail=" + joined_lower(encoding.tail_open + 1, encoding.tail_close));
  for (std::size_t i = 0; i < first_open; ++i) {
    features.push_back("before:w=" + ascii_lower(toks[i]));
  }
  for (std::size_t i = first_close + 1; i < second_open; ++i) {
    features.push_back("between:w=" + ascii_lower(toks[i]));
  }
  for (std::size_t i = last_close + 1; i < toks.size(); ++i) {
    features.push_back("after:w=" + ascii_lower(toks[i]));
  }
  const std::size_t between = second_open - first_close - 1;
  std::string bucket;
  if (between <= 2) {
    bucket = std::to_string(between);
  } else if (between <= 5) {
    bucket = "3-5";
  } else if (between <= 10) {
    bucket = "6-10";
  } else {
    bucket = ">10";
  }
  features.push_back("dist=" + bucket);
  features.push_back(encoding.head_open < encoding.tail_open ? "order=head_first"
                                                             : "order=tail_first");
  // Marker strings stay verbatim in adjacency slots; plain tokens lower.
  const auto adjacent = [&](std::size_t idx) -> std::string {
    return is_marker_position(idx) ? toks[idx] : ascii_lower(toks[idx]);
  };
  features.push_back("h-1=" + (encoding.head_open == 0 ? std::string(kBosMarker)
                                                       : adjacent(encoding.head_open - 1)));
  features.push_back("h+1=" + (encoding.head_close + 1 >= toks.size()
                                   ? std::string(kEosMarker)
                                   : adjacent(encoding.head_close + 1)));
  features.push_back("t-1=" + (encoding.tail_open == 0 ? std::string(kBosMarker)
                                                       : adjacent(encoding.tail_open - 1)));
  features.push_back("t+1=" + (encoding.tail_close + 1 >= toks.size()
                                   ? std::string(kEosMarker)
                                   : adjacent(encoding.tail_close + 1)));
  return features;
}

inline LinearModel train_classifier(const std::vector<ReEncoding>& encodings,
                                    const TrainConfig& config) {
  config.validate();
  std::set<std::string> vocabulary;
  for (const ReEncoding& enc : encodings) {
    if (!enc.target.has_value()) {
      throw Error(ErrorKind::InvalidConfig, "training encoding without target");
    }
    vocabulary.insert(*enc.target);
  }
  if (encodings.empty()) {
    throw Error(ErrorKind::EmptyTrainingSet, "no training encodings");
  }
  detail::AveragedTrainer trainer(
      std::vector<std::string>(vocabulary.begin(), vocabulary.end()));
  std::map<std::string, std::size_t> label_index;
  for (std::size_t i = 0; i < trainer.labels().size(); ++i) {
    label_index[trainer.labels()[i]] = i;
  }
  std::mt19937 rng(static_cast<std::uint32_t>(config.seed));
  std::vector<std::size_t> order(encodings.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    if (config.shuffle) detail::seeded_shuffle(order, rng);
    for (std::size_t idx : order) {
      trainer.begin_step();
      const std::vector<std::string> features = classifier_features(encodings[idx]);
      const std::size_t predicted = trainer.predict(features);
      const std::size_t gold = label_index.at(*encodings[idx].target);
      if (predicted != gold) trainer.update(features, gold, predicted);
    }
  }
  LinearModel model = trainer.finalize();
  model.training_meta.epochs = config.epochs;
  model.training_meta.seed = config.seed;
  if (vocabulary.size() == 1) {
    model.warnings.push_back("SingleClassWarning: training set has a single label '" +
                             *vocabulary.begin() + "'");
  }
  return model;
}

inline ScoredLabel predict_label(const LinearModel& model, const ReEncoding& encoding) {
  const auto [label, score] = model.predict(classifier_features(encoding));
  return ScoredLabel{label, score};
}

namespace detail {

// Locale-independent rendering at 12 significant digits.
inline std::string format_weight(double value) {
  char buffer[64];
  const auto result =
      std::to_chars(buffer, buffer + sizeof(buffer), value, std::chars_format::general, 12);
  return std::string(buffer, result.ptr);
}

inline double parse_weight(const std::string& text) {
  double value = 0.0;
  const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
  if (result.ec != std::errc() || result.ptr != text.data() + text.size()) {
    throw Error(ErrorKind::ParseError, "malformed weight '" + text + "'");
  }
  return value;
}

inline std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

}  // namespace detail

/// Canonical text format: header, one label list line, one
/// feature<TAB>label<TAB>weight line per nonzero weight, sorted.
inline void save_model(const LinearModel& model, std::ostream& out) {
  out << kModelFormatHeader << "\n";
  std::string labels_line;
  for (const std::string& label : model.labels) {
    if (!labels_line.empty()) labels_line += '\t';
    labels_line += label;
  }
  out << labels_line << "\n";
  for (const auto& [feature, row] : model.weights) {
    for (const auto& [label, weight] : row) {
      if (weight == 0.0) continue;
      out << feature << "\t" << label << "\t" << detail::format_weight(weight) << "\n";
    }
  }
}

inline LinearModel load_model(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorKind::ParseError, "empty model file");
  }
  if (line != kModelFormatHeader) {
    if (line.rfind("pie-linear-model", 0) == 0) {
      throw Error(ErrorKind::VersionMismatch,
                  "model format '" + line + "', expected '" + kModelFormatHeader + "'");
    }
    throw Error(ErrorKind::ParseError, "not a model file");
  }
  LinearModel model;
  if (!std::getline(in, line)) {
    throw Error(ErrorKind::ParseError, "model file missing label line");
  }
  if (!line.empty()) {
    model.labels = detail::split_tabs(line);
  }
  std::set<std::string> label_set(model.labels.begin(), model.labels.end());
  if (label_set.size() != model.labels.size()) {
    throw Error(ErrorKind::ParseError, "duplicate labels in model file");
  }
  std::size_t line_no = 2;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> fields = detail::split_tabs(line);
    if (fields.size() != 3) {
      throw Error(ErrorKind::ParseError,
                  "line " + std::to_string(line_no) + ": expected feature\\tlabel\\tweight");
    }
    if (!label_set.count(fields[1])) {
      throw Error(ErrorKind::ParseError,
                  "line " + std::to_string(line_no) + ": unknown label '" + fields[1] + "'");
    }
    model.weights[fields[0]][fields[1]] = detail::parse_weight(fields[2]);
  }
  model.training_meta.feature_count = model.weights.size();
  return model;
}

}  // namespace pie

#endif  // PIE_PERCEPTRON_HPP
