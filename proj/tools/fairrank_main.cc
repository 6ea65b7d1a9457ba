// Copyright 2026 The FairRank Authors.
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

// Command-line front end: prepare, train, infer, sweep and report.
// Exit codes: 0 success, 1 some sweep cells failed, 2 configuration or data
// error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "fairrank/dataprep.h"
#include "fairrank/experiment.h"
#include "fairrank/inference.h"
#include "fairrank/keyvalue.h"
#include "fairrank/trainer.h"

namespace fs = std::filesystem;
using namespace fairrank;

namespace {

constexpr int kExitPartial = 1;
constexpr int kExitConfig = 2;

struct CommonFlags {
  std::string config;
  std::optional<uint64_t> seed;
  std::string dataset;
  std::optional<int> jobs;
};

ExperimentConfig LoadConfig(const CommonFlags& flags) {
  ExperimentConfig config = flags.config.empty()
                                ? ExperimentConfig{}
                                : ExperimentConfig::Load(flags.config);
  if (flags.seed) config.seed = *flags.seed;
  if (!flags.dataset.empty()) config.dataset = flags.dataset;
  if (flags.jobs) config.jobs = *flags.jobs;
  config.Validate();
  return config;
}

void AddCommon(CLI::App* app, CommonFlags& flags) {
  app->add_option("--config", flags.config, "Experiment config file");
  app->add_option("--seed", flags.seed, "Override the base seed");
  app->add_option("--dataset", flags.dataset,
                  "Override the dataset name (german, adult, compas)");
}

void WriteText(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

std::string Fixed(double x) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.6f", x);
  return buffer;
}

int Prepare(const CommonFlags& flags, const std::string& out, int repeat) {
  const ExperimentConfig config = LoadConfig(flags);
  const TabularDataset dataset =
      LoadCsv(config.DataPath(), DatasetSchema::Load(config.SchemaPath()));
  const RepeatData data = PrepareRepeat(config, dataset, repeat);
  WriteTaskSet(data.train, fs::path(out) / "train");
  WriteTaskSet(data.test, fs::path(out) / "test");
  std::cout << dataset.rows() << " rows, " << dataset.features.cols()
            << " features; wrote " << data.train.problems.size()
            << " train and " << data.test.problems.size()
            << " test queries to " << out << "\n";
  return 0;
}

int TrainCommand(const CommonFlags& flags, const std::string& tasks,
                 const std::string& out, double lambda,
                 std::optional<double> gamma, std::optional<double> mu) {
  const ExperimentConfig config = LoadConfig(flags);
  const RankingTaskSet train = ReadTaskSet(tasks);
  Hyperparams hp = config.BaseHyperparams();
  if (gamma && mu) {
    hp.gamma = *gamma;
    hp.mu = *mu;
  } else {
    hp.lambda = 0.0;
    const CrossValidationResult cv = CrossValidate(
        train.problems, config.gamma_grid, config.mu_grid, config.folds, hp);
    hp.gamma = gamma.value_or(cv.gamma);
    hp.mu = mu.value_or(cv.mu);
    std::cerr << "cross-validation chose gamma=" << hp.gamma
              << " mu=" << hp.mu << "\n";
  }
  hp.lambda = lambda;
  const TrainResult result = Train(train.problems, hp);
  WriteText(out, SerializeModel(result.params));
  std::cerr << "iterations=" << result.diagnostics.iterations
            << " converged=" << result.diagnostics.converged
            << " projected_grad=" << result.diagnostics.projected_grad_norm
            << "\n";
  return 0;
}

int InferCommand(const std::string& model_path, const std::string& tasks,
                 const std::string& out) {
  if (!fs::exists(model_path)) throw DataError("model file not found: " + model_path);
  const ModelParams params = ParseModel(ReadFile(model_path));
  const RankingTaskSet test = ReadTaskSet(tasks);
  std::string table = "query\tndcg\tdp\tranking\n";
  double ndcg_sum = 0.0, dp_sum = 0.0;
  int dp_count = 0;
  for (const auto& problem : test.problems) {
    const InferenceResult result = Infer(problem.Unlabeled(), params);
    const double ndcg = Ndcg(problem.relevance, result.ranking);
    const auto dp = DpViolation(result.p_star, problem.groups,
                                PositionBias(problem.size()));
    ndcg_sum += ndcg;
    if (dp) {
      dp_sum += *dp;
      ++dp_count;
    }
    table += problem.query_id + "\t" + Fixed(ndcg) + "\t" +
             (dp ? Fixed(*dp) : std::string("NA")) + "\t";
    const auto order = result.ranking.Order();
    for (size_t r = 0; r < order.size(); ++r) {
      table += (r > 0 ? "," : "") + std::to_string(order[r]);
    }
    table += "\n";
  }
  if (out.empty()) {
    std::cout << table;
  } else {
    WriteText(out, table);
  }
  std::cerr << "mean ndcg=" << Fixed(ndcg_sum / test.problems.size())
            << " mean dp=" << Fixed(dp_count ? dp_sum / dp_count : 0.0)
            << "\n";
  return 0;
}

int Sweep(const CommonFlags& flags, const std::string& out,
          const std::string& method, std::optional<double> lambda) {
  ExperimentConfig config = LoadConfig(flags);
  if (!method.empty()) config.methods = {method};
  if (lambda) {
    config.robust_lambdas = {*lambda};
    config.postproc_lambdas = {*lambda};
  }
  config.Validate();
  const SweepResult result = RunSweep(config, &std::cerr);
  WriteSweep(config, result, out);
  std::cout << FormatAggregate(result.aggregate);
  if (result.failed_cells > 0) {
    std::cerr << result.failed_cells << " cell(s) failed; see "
              << (fs::path(out) / "diagnostics.log").string() << "\n";
    return kExitPartial;
  }
  return 0;
}

int Report(const std::string& in, const std::string& out) {
  fs::path path = in;
  if (fs::is_directory(path)) path /= "aggregate.tsv";
  if (!fs::exists(path)) throw DataError("no aggregate table at " + path.string());
  const std::string table =
      FormatFairest(FairestPoints(ParseAggregate(ReadFile(path))));
  if (out.empty()) {
    std::cout << table;
  } else {
    WriteText(out, table);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fair, distributionally robust learning to rank"};
  app.require_subcommand(1);

  CommonFlags common;
  std::string out, tasks, model, method, in;
  std::optional<double> lambda, gamma, mu;
  int repeat = 0;

  CLI::App* prepare = app.add_subcommand(
      "prepare", "Build train and test task sets from a CSV and its schema");
  AddCommon(prepare, common);
  prepare->add_option("--out", out, "Output directory")->required();
  prepare->add_option("--repeat", repeat, "Repeat index whose split to use")
      ->check(CLI::NonNegativeNumber);

  CLI::App* train = app.add_subcommand("train", "Train the robust ranker");
  AddCommon(train, common);
  train->add_option("--tasks", tasks, "Training task-set directory")->required();
  train->add_option("--out", out, "Model file to write")->required();
  train->add_option("--lambda", lambda, "Fairness penalty")
      ->check(CLI::NonNegativeNumber);
  train->add_option("--gamma", gamma, "Skip cross-validation for gamma");
  train->add_option("--mu", mu, "Skip cross-validation for mu");

  CLI::App* infer = app.add_subcommand("infer", "Rank test queries");
  infer->add_option("--model", model, "Model file")->required();
  infer->add_option("--tasks", tasks, "Test task-set directory")->required();
  infer->add_option("--out", out, "Per-query table (default stdout)");

  CLI::App* sweep = app.add_subcommand("sweep", "Run the lambda sweep");
  AddCommon(sweep, common);
  sweep->add_option("--out", out, "Output directory")->required();
  sweep->add_option("--method", method, "Restrict to one method")
      ->check(CLI::IsMember({std::string(kRobust), std::string(kPostProc),
                             std::string(kRandom)}));
  sweep->add_option("--lambda", lambda, "Restrict to one lambda")
      ->check(CLI::NonNegativeNumber);
  sweep->add_option("--jobs", common.jobs, "Worker threads")
      ->check(CLI::PositiveNumber);

  CLI::App* report =
      app.add_subcommand("report", "Fairest point per method from a sweep");
  report->add_option("--in", in, "Sweep directory or aggregate.tsv")->required();
  report->add_option("--out", out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*prepare) return Prepare(common, out, repeat);
    if (*train) {
      return TrainCommand(common, tasks, out, lambda.value_or(0.0), gamma, mu);
    }
    if (*infer) return InferCommand(model, tasks, out);
    if (*sweep) return Sweep(common, out, method, lambda);
    if (*report) return Report(in, out);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InvalidInputError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPartial;
  }
  return 0;
}
