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

// Set-semantics evaluation: per layer, true positives are the structural
// intersection of gold and prediction sets, so scores and metadata never
// influence a match. Also dataset statistics over labels and lengths.

#ifndef PIE_METRICS_HPP
#define PIE_METRICS_HPP

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "pie/document.hpp"
#include "pie/errors.hpp"
#include "pie/tokenize.hpp"

namespace pie {

struct PRFScore {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  double precision() const { return tp + fp == 0 ? 0.0 : static_cast<double>(tp) / (tp + fp); }
  double recall() const { return tp + fn == 0 ? 0.0 : static_cast<double>(tp) / (tp + fn); }
  double f1() const {
    const double p = precision();
    const double r = recall();
    return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
  }

  bool operator==(const PRFScore&) const = default;
};

enum class MatchMode { labeled, unlabeled };

struct MacroScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct LayerF1 {
  MatchMode match = MatchMode::labeled;
  std::map<std::string, PRFScore> per_label;  // labeled mode only
  PRFScore micro;
  // Unweighted mean over labels present in gold; absent in unlabeled mode.
  std::optional<MacroScore> macro;
};

namespace detail {

inline const std::string& value_label(const AnnotationValue& value) {
  if (const auto* span = std::get_if<SpanValue>(&value)) return span->label;
  if (const auto* rel = std::get_if<RelationValue>(&value)) return rel->label;
  return std::get<LabelValue>(value).label;
}

inline AnnotationValue strip_labels(const AnnotationValue& value) {
  if (const auto* span = std::get_if<SpanValue>(&value)) {
    return SpanValue{span->start, span->end, ""};
  }
  if (const auto* rel = std::get_if<RelationValue>(&value)) {
    return RelationValue{SpanValue{rel->head.start, rel->head.end, ""},
                         SpanValue{rel->tail.start, rel->tail.end, ""}, ""};
  }
  return LabelValue{""};
}

inline void count_sets(const std::set<AnnotationValue>& gold,
                       const std::set<AnnotationValue>& predictions, PRFScore& score) {
  for (const AnnotationValue& v : gold) {
    if (predictions.count(v)) {
      ++score.tp;
    } else {
      ++score.fn;
    }
  }
  for (const AnnotationValue& v : predictions) {
    if (!gold.count(v)) ++score.fp;
  }
}

}  // namespace detail

/// Per-label, micro and macro precision/recall/F1 for one layer over a
/// corpus. match=unlabeled drops all labels from the comparison and
/// reports micro only.
inline LayerF1 layer_f1(const std::vector<Document>& docs, const std::string& layer,
                        MatchMode match = MatchMode::labeled) {
  LayerF1 result;
  result.match = match;
  std::set<std::string> gold_labels;
  for (const Document& doc : docs) {
    if (!doc.has_layer(layer)) {
      throw Error(ErrorKind::UnknownLayer,
                  "no layer '" + layer + "' in document '" + doc.id() + "'");
    }
    const std::vector<AnnotationValue> gold = doc.values(layer, false);
    const std::vector<AnnotationValue> predictions = doc.values(layer, true);
    if (match == MatchMode::unlabeled) {
      std::set<AnnotationValue> gold_set;
      std::set<AnnotationValue> pred_set;
      for (const AnnotationValue& v : gold) gold_set.insert(detail::strip_labels(v));
      for (const AnnotationValue& v : predictions) pred_set.insert(detail::strip_labels(v));
      detail::count_sets(gold_set, pred_set, result.micro);
      continue;
    }
    std::map<std::string, std::set<AnnotationValue>> gold_by_label;
    std::map<std::string, std::set<AnnotationValue>> pred_by_label;
    for (const AnnotationValue& v : gold) {
      gold_by_label[detail::value_label(v)].insert(v);
      gold_labels.insert(detail::value_label(v));
    }
    for (const AnnotationValue& v : predictions) {
      pred_by_label[detail::value_label(v)].insert(v);
    }
    std::set<std::string> labels;
    for (const auto& [label, values] : gold_by_label) labels.insert(label);
    for (const auto& [label, values] : pred_by_label) labels.insert(label);
    for (const std::string& label : labels) {
      detail::count_sets(gold_by_label[label], pred_by_label[label], result.per_label[label]);
    }
  }
  if (match == MatchMode::labeled) {
    for (const auto& [label, score] : result.per_label) {
      result.micro.tp += score.tp;
      result.micro.fp += score.fp;
      result.micro.fn += score.fn;
    }
    MacroScore macro;
    std::size_t n = 0;
    for (const std::string& label : gold_labels) {
      const PRFScore& score = result.per_label[label];
      macro.precision += score.precision();
      macro.recall += score.recall();
      macro.f1 += score.f1();
      ++n;
    }
    if (n > 0) {
      macro.precision /= static_cast<double>(n);
      macro.recall /= static_cast<double>(n);
      macro.f1 /= static_cast<double>(n);
    }
    result.macro = macro;
  }
  return result;
}

struct LengthStats {
  std::size_t count = 0;
  std::size_t min = 0;
  std::size_t max = 0;
  double mean = 0.0;
  std::size_t median = 0;  // lower middle for even counts
  std::size_t bin_width = 0;
  std::vector<std::size_t> histogram;

  bool defined() const { return count > 0; }
};

struct StatsReport {
  std::size_t documents = 0;
  // layer -> label -> gold annotation count.
  std::map<std::string, std::map<std::string, std::size_t>> label_counts;
  LengthStats chars;
  LengthStats tokens;
};

namespace detail {

inline LengthStats length_stats(std::vector<std::size_t> lengths, std::size_t bin_width) {
  LengthStats stats;
  stats.bin_width = bin_width;
  stats.count = lengths.size();
  if (lengths.empty()) return stats;
  std::sort(lengths.begin(), lengths.end());
  stats.min = lengths.front();
  stats.max = lengths.back();
  double sum = 0.0;
  for (std::size_t v : lengths) sum += static_cast<double>(v);
  stats.mean = sum / static_cast<double>(lengths.size());
  stats.median = lengths[(lengths.size() - 1) / 2];
  stats.histogram.assign(stats.max / bin_width + 1, 0);
  for (std::size_t v : lengths) ++stats.histogram[v / bin_width];
  return stats;
}

}  // namespace detail

inline constexpr std::size_t kCharHistogramBin = 250;
inline constexpr std::size_t kTokenHistogramBin = 50;

/// Gold label distribution per layer plus char/token length statistics.
inline StatsReport dataset_stats(const std::vector<Document>& docs,
                                 const std::vector<std::string>& layers) {
  StatsReport report;
  report.documents = docs.size();
  std::vector<std::size_t> char_lengths;
  std::vector<std::size_t> token_lengths;
  for (const Document& doc : docs) {
    char_lengths.push_back(doc.text_cp_length());
    token_lengths.push_back(tokenize(doc.text()).size());
    for (const std::string& layer : layers) {
      auto& counts = report.label_counts[layer];
      for (const AnnotationValue& v : doc.values(layer, false)) {
        ++counts[detail::value_label(v)];
      }
    }
  }
  for (const std::string& layer : layers) report.label_counts[layer];
  report.chars = detail::length_stats(std::move(char_lengths), kCharHistogramBin);
  report.tokens = detail::length_stats(std::move(token_lengths), kTokenHistogramBin);
  return report;
}

}  // namespace pie

#endif  // PIE_METRICS_HPP
