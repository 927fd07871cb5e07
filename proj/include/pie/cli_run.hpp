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

// Argument parsing and dispatch for the pie executable. Separate from
// cli.hpp so translation units that drive commands programmatically do
// not pull in the option parser.

#ifndef PIE_CLI_RUN_HPP
#define PIE_CLI_RUN_HPP

#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pie/cli.hpp"

namespace pie::cli {

/// Parses and dispatches one invocation. Returns the process exit code:
/// 0 on success, 2 on hard errors, 3 on an empty training set.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"pie - information extraction pipelines: read, encode, train, predict, evaluate"};
  app.name("pie");
  app.require_subcommand(1);

  ConvertOptions convert_options;
  CLI::App* convert = app.add_subcommand("convert", "Convert between corpus formats");
  convert->add_option("input_format", convert_options.input_format, "conll2003, brat or jsonl")
      ->required()
      ->check(CLI::IsMember({"conll2003", "brat", "jsonl"}));
  convert->add_option("output_format", convert_options.output_format, "jsonl or brat")
      ->required()
      ->check(CLI::IsMember({"jsonl", "brat"}));
  convert->add_option("input_path", convert_options.input_path,
                      "input file (directory for brat)")
      ->required();
  convert->add_option("output_path", convert_options.output_path,
                      "output file (directory for brat)")
      ->required();
  convert->add_flag("--predictions", convert_options.which_predictions,
                    "write prediction sets instead of gold (brat output)");

  StatsOptions stats_options;
  CLI::App* stats = app.add_subcommand("stats", "Label and length statistics of a corpus");
  stats->add_option("input", stats_options.input_path, "jsonl corpus")->required();
  stats->add_option("--layer", stats_options.layers, "layers to count (default: all)");
  stats->add_flag("--json", stats_options.json, "machine-readable output");

  TrainOptions train_options;
  std::string seed_flag;
  bool no_shuffle = false;
  long long max_pair_distance = 30;
  bool untyped_markers = false;
  CLI::App* train = app.add_subcommand("train", "Train a model into a model directory");
  train->add_option("task", train_options.task, "ner or re")
      ->required()
      ->check(CLI::IsMember({"ner", "re"}));
  train->add_option("--train", train_options.train_path, "training corpus (jsonl)")->required();
  train->add_option("--dev", train_options.dev_path, "held-out corpus for evaluation");
  train->add_option("--model-dir", train_options.model_dir, "output model directory")
      ->required();
  train->add_option("--epochs", train_options.train_config.epochs, "training epochs");
  train->add_option("--seed", seed_flag, "RNG seed (fallback: PIE_SEED, then 42)");
  train->add_flag("--no-shuffle", no_shuffle, "keep the corpus order between epochs");
  train->add_option("--layer", train_options.ner.layer, "span layer (ner)");
  train->add_option("--max-tokens", train_options.ner.max_tokens,
                    "window budget in tokens (ner)");
  train->add_option("--stride", train_options.ner.stride,
                    "window stride (ner; 0 = max-tokens/2)");
  train->add_option("--entity-layer", train_options.re.entity_layer, "entity layer (re)");
  train->add_option("--relation-layer", train_options.re.relation_layer, "relation layer (re)");
  train->add_option("--negative-label", train_options.re.negative_label,
                    "label for non-related pairs (re)");
  train->add_option("--re-max-tokens", train_options.re.max_tokens, "context budget (re)");
  train->add_option("--max-pair-distance", max_pair_distance,
                    "token distance cap between arguments, -1 = unlimited (re)");
  train->add_flag("--untyped-markers", untyped_markers,
                  "plain <H>/<T> markers without entity types (re)");

  PredictOptions predict_options;
  CLI::App* predict = app.add_subcommand("predict", "Predict annotations with a trained model");
  predict->add_option("--model-dir", predict_options.model_dir, "model directory")->required();
  predict->add_option("--input", predict_options.input_path, "jsonl corpus")->required();
  predict->add_option("--output", predict_options.output_path, "output jsonl")->required();

  EvaluateOptions evaluate_options;
  std::string match_flag = "labeled";
  CLI::App* evaluate = app.add_subcommand("evaluate", "Score predictions against gold");
  evaluate->add_option("input", evaluate_options.input_path, "jsonl corpus with predictions")
      ->required();
  evaluate->add_option("--layer", evaluate_options.layer, "layer to score")->required();
  evaluate->add_option("--match", match_flag, "labeled or unlabeled")
      ->check(CLI::IsMember({"labeled", "unlabeled"}));
  evaluate->add_flag("--errors", evaluate_options.errors,
                     "list false positives/negatives with text slices");
  evaluate->add_flag("--json", evaluate_options.json, "machine-readable output");

  std::vector<std::string> argv_strings;
  argv_strings.push_back("pie");
  argv_strings.insert(argv_strings.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  argv.reserve(argv_strings.size());
  for (const std::string& s : argv_strings) argv.push_back(s.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitHardError;
  }

  try {
    if (*convert) {
      cmd_convert(convert_options, err);
    } else if (*stats) {
      cmd_stats(stats_options, out);
    } else if (*train) {
      train_options.train_config.seed = detail::resolve_seed(seed_flag);
      train_options.train_config.shuffle = !no_shuffle;
      if (max_pair_distance < 0) {
        train_options.re.max_pair_distance.reset();
      } else {
        train_options.re.max_pair_distance = static_cast<std::size_t>(max_pair_distance);
      }
      train_options.re.typed_markers = !untyped_markers;
      cmd_train(train_options, out, err);
    } else if (*predict) {
      cmd_predict(predict_options, err);
    } else if (*evaluate) {
      evaluate_options.match =
          match_flag == "unlabeled" ? MatchMode::unlabeled : MatchMode::labeled;
      cmd_evaluate(evaluate_options, out);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::EmptyTrainingSet ? kExitEmptyTrainingSet : kExitHardError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitHardError;
  }
  return kExitOk;
}

}  // namespace pie::cli

#endif  // PIE_CLI_RUN_HPP
