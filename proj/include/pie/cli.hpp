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

// The pie command line: convert | stats | train | predict | evaluate.
// A trained model lives in a model directory (config.json + model.txt +
// meta.json) and is re-instantiated from it in one call, dispatching on
// the task kind recorded in config.json. Output files are written to a
// temporary name and renamed, so a failed run never leaves torn output.

#ifndef PIE_CLI_HPP
#define PIE_CLI_HPP

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pie/brat.hpp"
#include "pie/conll.hpp"
#include "pie/document.hpp"
#include "pie/errors.hpp"
#include "pie/jsonl.hpp"
#include "pie/metrics.hpp"
#include "pie/perceptron.hpp"
#include "pie/taskmodule_ner.hpp"
#include "pie/taskmodule_re.hpp"

namespace pie::cli {

inline constexpr const char* kFrameworkName = "pie";
inline constexpr const char* kFrameworkVersion = "0.1.0";
inline constexpr int kMetaFormatVersion = 1;

inline constexpr int kExitOk = 0;
inline constexpr int kExitHardError = 2;
inline constexpr int kExitEmptyTrainingSet = 3;

namespace detail {

inline std::string fmt_fixed(double value, int digits) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value,
                                    std::chars_format::fixed, digits);
  return std::string(buffer, result.ptr);
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::ParseError, "cannot open '" + path.string() + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error(ErrorKind::ParseError, "cannot write '" + tmp.string() + "'");
    }
    out << content;
    if (!out.good()) {
      throw Error(ErrorKind::ParseError, "short write to '" + tmp.string() + "'");
    }
  }
  std::filesystem::rename(tmp, path);
}

inline std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t hash = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  return hash;
}

inline std::string fingerprint(const std::string& bytes) {
  char buffer[32];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), fnv1a64(bytes), 16);
  return "fnv1a64:" + std::string(buffer, result.ptr);
}

inline std::string sanitize_stem(const std::string& id) {
  std::string out;
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '-' || c == '_' || c == '.';
    out.push_back(ok ? c : '_');
  }
  return out.empty() ? "doc" : out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Report rendering

inline nlohmann::ordered_json f1_to_json(const LayerF1& result, const std::string& layer) {
  nlohmann::ordered_json j;
  j["layer"] = layer;
  j["match"] = result.match == MatchMode::labeled ? "labeled" : "unlabeled";
  nlohmann::ordered_json labels = nlohmann::ordered_json::object();
  for (const auto& [label, score] : result.per_label) {
    nlohmann::ordered_json s;
    s["tp"] = score.tp;
    s["fp"] = score.fp;
    s["fn"] = score.fn;
    s["precision"] = score.precision();
    s["recall"] = score.recall();
    s["f1"] = score.f1();
    labels[label] = std::move(s);
  }
  j["labels"] = std::move(labels);
  nlohmann::ordered_json micro;
  micro["tp"] = result.micro.tp;
  micro["fp"] = result.micro.fp;
  micro["fn"] = result.micro.fn;
  micro["precision"] = result.micro.precision();
  micro["recall"] = result.micro.recall();
  micro["f1"] = result.micro.f1();
  j["micro"] = std::move(micro);
  if (result.macro.has_value()) {
    nlohmann::ordered_json macro;
    macro["precision"] = result.macro->precision;
    macro["recall"] = result.macro->recall;
    macro["f1"] = result.macro->f1;
    j["macro"] = std::move(macro);
  } else {
    j["macro"] = nullptr;
  }
  return j;
}

inline void print_f1_table(const LayerF1& result, const std::string& layer, std::ostream& out) {
  out << "layer '" << layer << "' ("
      << (result.match == MatchMode::labeled ? "labeled" : "unlabeled") << ")\n";
  std::size_t width = std::string("micro").size();
  for (const auto& [label, score] : result.per_label) width = std::max(width, label.size());
  const auto row = [&](const std::string& name, const PRFScore& score) {
    out << "  " << name << std::string(width - name.size(), ' ') << "  tp " << score.tp
        << "  fp " << score.fp << "  fn " << score.fn << "  P "
        << detail::fmt_fixed(score.precision(), 6) << "  R "
        << detail::fmt_fixed(score.recall(), 6) << "  F1 "
        << detail::fmt_fixed(score.f1(), 6) << "\n";
  };
  for (const auto& [label, score] : result.per_label) row(label, score);
  row("micro", result.micro);
  if (result.macro.has_value()) {
    out << "  macro" << std::string(width - 5, ' ') << "  P "
        << detail::fmt_fixed(result.macro->precision, 6) << "  R "
        << detail::fmt_fixed(result.macro->recall, 6) << "  F1 "
        << detail::fmt_fixed(result.macro->f1, 6) << "\n";
  }
}

inline nlohmann::ordered_json length_stats_to_json(const LengthStats& stats) {
  nlohmann::ordered_json j;
  j["count"] = stats.count;
  if (!stats.defined()) {
    j["min"] = nullptr;
    j["max"] = nullptr;
    j["mean"] = nullptr;
    j["median"] = nullptr;
  } else {
    j["min"] = stats.min;
    j["max"] = stats.max;
    j["mean"] = stats.mean;
    j["median"] = stats.median;
  }
  j["bin_width"] = stats.bin_width;
  j["histogram"] = stats.histogram;
  return j;
}

inline nlohmann::ordered_json stats_to_json(const StatsReport& report) {
  nlohmann::ordered_json j;
  j["documents"] = report.documents;
  nlohmann::ordered_json layers = nlohmann::ordered_json::object();
  for (const auto& [layer, counts] : report.label_counts) {
    nlohmann::ordered_json labels = nlohmann::ordered_json::object();
    std::size_t total = 0;
    for (const auto& [label, count] : counts) {
      labels[label] = count;
      total += count;
    }
    nlohmann::ordered_json entry;
    entry["labels"] = std::move(labels);
    entry["total"] = total;
    layers[layer] = std::move(entry);
  }
  j["layers"] = std::move(layers);
  j["chars"] = length_stats_to_json(report.chars);
  j["tokens"] = length_stats_to_json(report.tokens);
  return j;
}

inline void print_stats_table(const StatsReport& report, std::ostream& out) {
  out << "corpus: " << report.documents << " documents\n";
  for (const auto& [layer, counts] : report.label_counts) {
    std::size_t total = 0;
    for (const auto& [label, count] : counts) total += count;
    out << "layer '" << layer << "': " << total << " gold annotations\n";
    for (const auto& [label, count] : counts) {
      out << "  " << label << "  " << count << "\n";
    }
  }
  const auto length_row = [&](const std::string& name, const LengthStats& stats) {
    out << name << "  ";
    if (!stats.defined()) {
      out << "undefined (empty corpus)\n";
      return;
    }
    out << "min " << stats.min << "  max " << stats.max << "  mean "
        << detail::fmt_fixed(stats.mean, 2) << "  median " << stats.median << "\n";
    out << "  histogram (bin " << stats.bin_width << "):";
    for (std::size_t b = 0; b < stats.histogram.size(); ++b) {
      if (stats.histogram[b] == 0) continue;
      out << " [" << b * stats.bin_width << "," << (b + 1) * stats.bin_width
          << "):" << stats.histogram[b];
    }
    out << "\n";
  };
  length_row("chars ", report.chars);
  length_row("tokens", report.tokens);
}

// ---------------------------------------------------------------------------
// Model directory

struct ModelDir {
  std::string task;  // "ner" or "re"
  NerTaskConfig ner;
  ReTaskConfig re;
  std::vector<std::string> vocabulary;
  LinearModel model;
};

inline nlohmann::ordered_json ner_config_to_json(const NerTaskConfig& config,
                                                 const std::vector<std::string>& vocabulary) {
  nlohmann::ordered_json j;
  j["task"] = "ner";
  j["layer"] = config.layer;
  j["max_tokens"] = config.max_tokens;
  j["stride"] = config.effective_stride();
  j["tag_vocabulary"] = vocabulary;
  return j;
}

inline nlohmann::ordered_json re_config_to_json(const ReTaskConfig& config,
                                                const std::vector<std::string>& vocabulary) {
  nlohmann::ordered_json j;
  j["task"] = "re";
  j["entity_layer"] = config.entity_layer;
  j["relation_layer"] = config.relation_layer;
  j["negative_label"] = config.negative_label;
  j["max_tokens"] = config.max_tokens;
  if (config.max_pair_distance.has_value()) {
    j["max_pair_distance"] = *config.max_pair_distance;
  } else {
    j["max_pair_distance"] = nullptr;
  }
  j["typed_markers"] = config.typed_markers;
  j["label_vocabulary"] = vocabulary;
  return j;
}

inline ModelDir load_model_dir(const std::filesystem::path& dir) {
  nlohmann::ordered_json meta;
  nlohmann::ordered_json config;
  try {
    meta = nlohmann::ordered_json::parse(detail::read_file(dir / "meta.json"));
    config = nlohmann::ordered_json::parse(detail::read_file(dir / "config.json"));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, "model dir '" + dir.string() + "': " + e.what());
  }
  if (!meta.contains("format_version") || meta["format_version"] != kMetaFormatVersion) {
    throw Error(ErrorKind::VersionMismatch,
                "model dir '" + dir.string() + "' has an unsupported meta format version");
  }
  ModelDir loaded;
  if (!config.contains("task") || !config["task"].is_string()) {
    throw Error(ErrorKind::ParseError, "config.json missing task kind");
  }
  loaded.task = config["task"].get<std::string>();
  if (loaded.task == "ner") {
    loaded.ner.layer = config.value("layer", loaded.ner.layer);
    loaded.ner.max_tokens = config.value("max_tokens", loaded.ner.max_tokens);
    loaded.ner.stride = config.value("stride", loaded.ner.stride);
    loaded.vocabulary = config.value("tag_vocabulary", std::vector<std::string>{});
  } else if (loaded.task == "re") {
    loaded.re.entity_layer = config.value("entity_layer", loaded.re.entity_layer);
    loaded.re.relation_layer = config.value("relation_layer", loaded.re.relation_layer);
    loaded.re.negative_label = config.value("negative_label", loaded.re.negative_label);
    loaded.re.max_tokens = config.value("max_tokens", loaded.re.max_tokens);
    if (config.contains("max_pair_distance") && !config["max_pair_distance"].is_null()) {
      loaded.re.max_pair_distance = config["max_pair_distance"].get<std::size_t>();
    } else {
      loaded.re.max_pair_distance.reset();
    }
    loaded.re.typed_markers = config.value("typed_markers", loaded.re.typed_markers);
    loaded.vocabulary = config.value("label_vocabulary", std::vector<std::string>{});
  } else {
    throw Error(ErrorKind::ParseError, "unknown task kind '" + loaded.task + "'");
  }
  std::ifstream model_in(dir / "model.txt", std::ios::binary);
  if (!model_in) {
    throw Error(ErrorKind::ParseError, "model dir missing model.txt");
  }
  loaded.model = load_model(model_in);
  return loaded;
}

inline void write_model_dir(const std::filesystem::path& dir,
                            const nlohmann::ordered_json& config, const LinearModel& model,
                            const TrainConfig& train_config,
                            const std::string& corpus_fingerprint) {
  std::filesystem::create_directories(dir);
  detail::atomic_write(dir / "config.json", config.dump() + "\n");
  std::ostringstream model_text;
  save_model(model, model_text);
  detail::atomic_write(dir / "model.txt", model_text.str());
  nlohmann::ordered_json meta;
  meta["format_version"] = kMetaFormatVersion;
  meta["framework"] = kFrameworkName;
  meta["framework_version"] = kFrameworkVersion;
  meta["task"] = config["task"];
  nlohmann::ordered_json tc;
  tc["epochs"] = train_config.epochs;
  tc["seed"] = train_config.seed;
  tc["shuffle"] = train_config.shuffle;
  meta["train_config"] = std::move(tc);
  meta["corpus_fingerprint"] = corpus_fingerprint;
  meta["feature_count"] = model.training_meta.feature_count;
  detail::atomic_write(dir / "meta.json", meta.dump() + "\n");
}

// ---------------------------------------------------------------------------
// Prediction core, shared by cmd_predict and the dev evaluation in train.

inline Document predict_document(const ModelDir& model_dir, const Document& doc) {
  if (model_dir.task == "ner") {
    const Document cleared = clear_predictions(doc, std::vector<std::string>{model_dir.ner.layer});
    const NerEncodeResult encoded = encode_inputs(cleared, model_dir.ner);
    std::vector<std::vector<std::string>> tags;
    tags.reserve(encoded.encodings.size());
    for (const NerEncoding& enc : encoded.encodings) {
      tags.push_back(predict_tags(model_dir.model, enc));
    }
    return decode(cleared, encoded.encodings, tags, model_dir.ner);
  }
  const Document cleared =
      clear_predictions(doc, std::vector<std::string>{model_dir.re.relation_layer});
  const ReCandidateResult candidates = generate_candidates(cleared, model_dir.re, false);
  const ReEncodeResult encoded = encode_inputs(cleared, candidates.pairs, model_dir.re);
  std::vector<ScoredLabel> predictions;
  predictions.reserve(encoded.encodings.size());
  for (const ReEncoding& enc : encoded.encodings) {
    predictions.push_back(predict_label(model_dir.model, enc));
  }
  return decode(cleared, encoded.encodings, predictions, model_dir.vocabulary, model_dir.re);
}

// ---------------------------------------------------------------------------
// Commands. Each throws pie::Error on hard failures; run() maps those to
// exit codes.

struct ConvertOptions {
  std::string input_format;
  std::string output_format;
  std::string input_path;
  std::string output_path;
  bool which_predictions = false;
};

inline void cmd_convert(const ConvertOptions& options, std::ostream& err) {
  std::shared_ptr<const DocumentSchema> schema;
  std::vector<Document> docs;
  IoReport report;

  if (options.input_format == "conll2003") {
    std::ifstream in(options.input_path, std::ios::binary);
    if (!in) throw Error(ErrorKind::ParseError, "cannot open '" + options.input_path + "'");
    auto [read_docs, read_report] = read_conll2003(in, options.input_path);
    docs = std::move(read_docs);
    report = std::move(read_report);
    schema = default_schema();
  } else if (options.input_format == "brat") {
    schema = default_schema();
    std::vector<std::filesystem::path> txt_files;
    for (const auto& entry : std::filesystem::directory_iterator(options.input_path)) {
      if (entry.path().extension() == ".txt") txt_files.push_back(entry.path());
    }
    std::sort(txt_files.begin(), txt_files.end());
    for (const std::filesystem::path& txt_path : txt_files) {
      std::filesystem::path ann_path = txt_path;
      ann_path.replace_extension(".ann");
      if (!std::filesystem::exists(ann_path)) {
        report.skip(txt_path.string(), "no matching .ann file");
        continue;
      }
      auto [doc, doc_report] = read_brat(detail::read_file(txt_path),
                                         detail::read_file(ann_path), txt_path.stem().string());
      docs.push_back(std::move(doc));
      ++doc_report.documents_read;
      report += doc_report;
    }
  } else if (options.input_format == "jsonl") {
    std::ifstream in(options.input_path, std::ios::binary);
    if (!in) throw Error(ErrorKind::ParseError, "cannot open '" + options.input_path + "'");
    JsonlCorpus corpus = read_jsonl(in);
    schema = corpus.schema;
    docs = std::move(corpus.documents);
    report.documents_read = docs.size();
    for (const Document& doc : docs) {
      for (const LayerSpec& spec : schema->layers) {
        report.annotations_read +=
            doc.layer(spec.name).gold.size() + doc.layer(spec.name).predictions.size();
      }
    }
  } else {
    throw Error(ErrorKind::InvalidConfig,
                "unknown input format '" + options.input_format +
                    "' (expected conll2003, brat or jsonl)");
  }

  if (options.output_format == "jsonl") {
    std::ostringstream out;
    write_jsonl(*schema, docs, out);
    detail::atomic_write(options.output_path, out.str());
  } else if (options.output_format == "brat") {
    std::filesystem::create_directories(options.output_path);
    std::map<std::string, std::size_t> used;
    for (const Document& doc : docs) {
      std::string stem = detail::sanitize_stem(doc.id());
      const std::size_t n = used[stem]++;
      if (n > 0) stem += "-" + std::to_string(n);
      const auto [txt, ann] = write_brat(doc, options.which_predictions);
      detail::atomic_write(std::filesystem::path(options.output_path) / (stem + ".txt"), txt);
      detail::atomic_write(std::filesystem::path(options.output_path) / (stem + ".ann"), ann);
    }
  } else {
    throw Error(ErrorKind::InvalidConfig,
                "unknown output format '" + options.output_format + "' (expected jsonl or brat)");
  }
  report.print(err);
}

struct StatsOptions {
  std::string input_path;
  std::vector<std::string> layers;
  bool json = false;
};

inline void cmd_stats(const StatsOptions& options, std::ostream& out) {
  std::ifstream in(options.input_path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open '" + options.input_path + "'");
  const JsonlCorpus corpus = read_jsonl(in);
  std::vector<std::string> layers = options.layers;
  if (layers.empty()) {
    for (const LayerSpec& spec : corpus.schema->layers) layers.push_back(spec.name);
  }
  for (const std::string& layer : layers) {
    if (corpus.schema->find_layer(layer) == nullptr) {
      throw Error(ErrorKind::UnknownLayer, "no layer '" + layer + "' in corpus schema");
    }
  }
  const StatsReport report = dataset_stats(corpus.documents, layers);
  if (options.json) {
    out << stats_to_json(report).dump() << "\n";
  } else {
    print_stats_table(report, out);
  }
}

struct TrainOptions {
  std::string task;  // "ner" or "re"
  std::string train_path;
  std::string dev_path;
  std::string model_dir;
  TrainConfig train_config;
  NerTaskConfig ner;
  ReTaskConfig re;
};

namespace detail {

struct SkipSummary {
  std::map<std::string, std::size_t> by_reason;

  void add(const std::string& reason) { ++by_reason[reason]; }

  void print(std::ostream& err) const {
    std::size_t total = 0;
    for (const auto& [reason, count] : by_reason) total += count;
    err << "skipped annotations/pairs: " << total << "\n";
    for (const auto& [reason, count] : by_reason) {
      err << "  " << count << " x " << reason << "\n";
    }
  }

  // Collapse per-instance detail so the summary groups by rule.
  static std::string normalize(const std::string& reason) {
    if (reason.find("AlignmentError") != std::string::npos) return "alignment failure";
    if (reason.find("ownership") != std::string::npos) return "span crosses window boundary";
    if (reason.find("distance") != std::string::npos) return "argument distance over cap";
    if (reason.find("gold relation lost") != std::string::npos) return "gold relation lost";
    if (reason.find("overlap") != std::string::npos) return "overlapping arguments";
    return reason;
  }
};

}  // namespace detail

inline void cmd_train(const TrainOptions& options, std::ostream& out, std::ostream& err) {
  const std::string train_bytes = detail::read_file(options.train_path);
  std::istringstream train_stream(train_bytes);
  const JsonlCorpus corpus = read_jsonl(train_stream);
  detail::SkipSummary skips;
  LinearModel model;
  nlohmann::ordered_json config_json;
  std::string eval_layer;

  if (options.task == "ner") {
    options.ner.validate();
    eval_layer = options.ner.layer;
    std::vector<NerEncoding> training;
    for (const Document& doc : corpus.documents) {
      NerEncodeResult encoded = encode_inputs(doc, options.ner);
      for (const NerSkipped& s : encoded.skipped) {
        skips.add(detail::SkipSummary::normalize(s.reason));
      }
      try {
        std::vector<NerEncoding> with_targets;
        with_targets.reserve(encoded.encodings.size());
        for (const NerEncoding& enc : encoded.encodings) {
          with_targets.push_back(encode_targets(enc, doc, options.ner));
        }
        training.insert(training.end(), with_targets.begin(), with_targets.end());
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::OverlapError) throw;
        skips.add("document rejected: overlapping gold spans");
      }
    }
    model = train_tagger(training, options.train_config);
    config_json = ner_config_to_json(options.ner, model.labels);
  } else if (options.task == "re") {
    options.re.validate();
    eval_layer = options.re.relation_layer;
    for (const Document& doc : corpus.documents) {
      for (const AnnotationValue& v : doc.values(options.re.relation_layer, false)) {
        if (std::get<RelationValue>(v).label == options.re.negative_label) {
          throw Error(ErrorKind::InvalidConfig,
                      "negative label '" + options.re.negative_label +
                          "' occurs among gold relation labels");
        }
      }
    }
    std::vector<ReEncoding> training;
    for (const Document& doc : corpus.documents) {
      const ReCandidateResult candidates = generate_candidates(doc, options.re, true);
      ReEncodeResult encoded = encode_inputs(doc, candidates.pairs, options.re);
      for (const ReSkipped& s : candidates.skipped) {
        skips.add(detail::SkipSummary::normalize(s.reason));
      }
      for (const ReSkipped& s : encoded.skipped) {
        skips.add(detail::SkipSummary::normalize(s.reason));
      }
      try {
        std::vector<ReEncoding> with_targets;
        with_targets.reserve(encoded.encodings.size());
        for (const ReEncoding& enc : encoded.encodings) {
          with_targets.push_back(encode_targets(enc, doc, options.re));
        }
        training.insert(training.end(), with_targets.begin(), with_targets.end());
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::MultiLabelError) throw;
        skips.add("document rejected: multiple gold labels on one pair");
      }
    }
    training = subsample_negatives(std::move(training), options.re, options.train_config.seed);
    model = train_classifier(training, options.train_config);
    config_json = re_config_to_json(options.re, model.labels);
  } else {
    throw Error(ErrorKind::InvalidConfig, "unknown task '" + options.task + "'");
  }

  for (const std::string& warning : model.warnings) err << warning << "\n";
  write_model_dir(options.model_dir, config_json, model, options.train_config,
                  detail::fingerprint(train_bytes));
  out << "trained " << options.task << " model: " << model.labels.size() << " labels, "
      << model.training_meta.feature_count << " features -> " << options.model_dir << "\n";
  skips.print(err);

  if (!options.dev_path.empty()) {
    // Evaluate with the saved artifact, so the printed dev score matches
    // what a later predict run reproduces.
    const ModelDir saved = load_model_dir(options.model_dir);
    std::ifstream dev_in(options.dev_path, std::ios::binary);
    if (!dev_in) throw Error(ErrorKind::ParseError, "cannot open '" + options.dev_path + "'");
    const JsonlCorpus dev = read_jsonl(dev_in);
    std::vector<Document> predicted;
    predicted.reserve(dev.documents.size());
    for (const Document& doc : dev.documents) {
      predicted.push_back(predict_document(saved, doc));
    }
    const LayerF1 scores = layer_f1(predicted, eval_layer, MatchMode::labeled);
    out << "dev ";
    print_f1_table(scores, eval_layer, out);
  }
}

struct PredictOptions {
  std::string model_dir;
  std::string input_path;
  std::string output_path;
};

inline void cmd_predict(const PredictOptions& options, std::ostream& err) {
  const ModelDir model_dir = load_model_dir(options.model_dir);
  std::ifstream in(options.input_path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open '" + options.input_path + "'");
  const JsonlCorpus corpus = read_jsonl(in);
  std::vector<Document> predicted;
  predicted.reserve(corpus.documents.size());
  for (const Document& doc : corpus.documents) {
    predicted.push_back(predict_document(model_dir, doc));
  }
  std::ostringstream out;
  write_jsonl(*corpus.schema, predicted, out);
  detail::atomic_write(options.output_path, out.str());
  err << "predicted " << predicted.size() << " documents -> " << options.output_path << "\n";
}

struct EvaluateOptions {
  std::string input_path;
  std::string layer;
  MatchMode match = MatchMode::labeled;
  bool errors = false;
  bool json = false;
};

namespace detail {

inline std::string render_value(const Document& doc, const AnnotationValue& value) {
  if (const auto* span = std::get_if<SpanValue>(&value)) {
    return "(" + std::to_string(span->start) + "," + std::to_string(span->end) + "," +
           span->label + ") \"" + utf8_substr(doc.text(), span->start, span->end) + "\"";
  }
  if (const auto* rel = std::get_if<RelationValue>(&value)) {
    const auto arg = [&](const SpanValue& s) {
      return "(" + std::to_string(s.start) + "," + std::to_string(s.end) + "," + s.label +
             ") \"" + utf8_substr(doc.text(), s.start, s.end) + "\"";
    };
    return rel->label + "[head=" + arg(rel->head) + " tail=" + arg(rel->tail) + "]";
  }
  return "label(" + std::get<LabelValue>(value).label + ")";
}

}  // namespace detail

inline void cmd_evaluate(const EvaluateOptions& options, std::ostream& out) {
  std::ifstream in(options.input_path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open '" + options.input_path + "'");
  const JsonlCorpus corpus = read_jsonl(in);
  const LayerF1 result = layer_f1(corpus.documents, options.layer, options.match);
  if (options.json) {
    out << f1_to_json(result, options.layer).dump() << "\n";
  } else {
    print_f1_table(result, options.layer, out);
  }
  if (!options.errors) return;
  for (const Document& doc : corpus.documents) {
    std::set<AnnotationValue> gold;
    std::set<AnnotationValue> predictions;
    for (const AnnotationValue& v : doc.values(options.layer, false)) {
      gold.insert(options.match == MatchMode::unlabeled ? pie::detail::strip_labels(v) : v);
    }
    for (const AnnotationValue& v : doc.values(options.layer, true)) {
      predictions.insert(options.match == MatchMode::unlabeled ? pie::detail::strip_labels(v)
                                                               : v);
    }
    for (const AnnotationValue& v : gold) {
      if (!predictions.count(v)) {
        out << doc.id() << " FN " << detail::render_value(doc, v) << "\n";
      }
    }
    for (const AnnotationValue& v : predictions) {
      if (!gold.count(v)) {
        out << doc.id() << " FP " << detail::render_value(doc, v) << "\n";
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Argument parsing

namespace detail {

inline std::uint64_t resolve_seed(const std::string& seed_flag) {
  std::string raw = seed_flag;
  if (raw.empty()) {
    if (const char* env = std::getenv("PIE_SEED")) raw = env;
  }
  if (raw.empty()) return 42;
  std::uint64_t seed = 0;
  const auto result = std::from_chars(raw.data(), raw.data() + raw.size(), seed);
  if (result.ec != std::errc() || result.ptr != raw.data() + raw.size()) {
    throw Error(ErrorKind::InvalidConfig, "seed '" + raw + "' is not an unsigned integer");
  }
  return seed;
}

}  // namespace detail

}  // namespace pie::cli

#endif  // PIE_CLI_HPP
