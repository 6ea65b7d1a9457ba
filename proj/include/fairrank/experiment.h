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

// Lambda sweeps over repeats and methods, confidence intervals and the
// fairest-point table.
//
// Per repeat r the dataset is split, standardized on the training part, and
// turned into n_train training and n_test test queries. (gamma, mu) for the
// robust ranker is chosen by cross-validation on that repeat's training
// queries. By default this runs once per repeat at lambda = 0 and the chosen
// pair is used across the lambda grid; cv_scope = lambda repeats it at every
// lambda of the grid, at roughly seven times the cost. Every random choice
// draws from a stream derived from (seed, r), so any row can be reproduced
// from the config and seed alone.
//
// NDCG and `dp` are both scored on each method's deterministic ranking.
// `dp_matrix` is the exposure gap of the probability matrix the method
// returns before rounding (P* for the robust and post-processing rankers, the
// permutation itself for the random ranker). Queries with only one group
// present are left out of both DP means.

#ifndef FAIRRANK_EXPERIMENT_H_
#define FAIRRANK_EXPERIMENT_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fairrank/core.h"
#include "fairrank/dataprep.h"
#include "fairrank/trainer.h"

namespace fairrank {

// Bad or inconsistent configuration; the CLI maps it to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kRobust = "robust";
inline constexpr const char* kPostProc = "postproc";
inline constexpr const char* kRandom = "random";

// Where (gamma, mu) cross-validation runs: once per repeat at lambda = 0, or
// once per (repeat, lambda) at that lambda.
enum class CvScope { kRepeat, kLambda };

struct ExperimentConfig {
  std::string dataset = "german";
  // <data_dir>/<dataset>.csv and <data_dir>/schemas/<dataset>.schema.
  std::filesystem::path data_dir = "data";
  uint64_t seed = 1;
  int items_per_query = 10;
  int n_train = 500;
  int n_test = 100;
  int repeats = 10;
  int folds = 3;
  double test_fraction = 0.2;
  double relevance_probability = 0.4;
  std::vector<std::string> methods = {kRobust, kPostProc, kRandom};
  std::vector<double> robust_lambdas = {0, 0.1, 0.5, 1, 2, 5, 10};
  std::vector<double> postproc_lambdas = {0, 0.01, 0.05, 0.1, 0.2};
  std::vector<double> gamma_grid = {0.01, 0.1, 1};
  std::vector<double> mu_grid = {3, 10, 30};
  CvScope cv_scope = CvScope::kRepeat;
  FairnessWeighting fairness_weighting = FairnessWeighting::kUniform;
  double ridge = 1.0;
  double postproc_mu = 1e-2;
  AdmmOptions admm;
  int max_outer_iter = 300;
  double grad_tol = 1e-4;
  int jobs = 1;

  std::filesystem::path DataPath() const;
  std::filesystem::path SchemaPath() const;
  // Lambda grid of `method`; the random ranker has the single point 0.
  std::vector<double> Lambdas(const std::string& method) const;
  Hyperparams BaseHyperparams() const;

  // Unknown keys, malformed values and failed validation throw ConfigError.
  // A relative data_dir is resolved against `base_dir`.
  static ExperimentConfig Parse(const std::string& text,
                                const std::filesystem::path& base_dir = {});
  static ExperimentConfig Load(const std::filesystem::path& path);
  void Validate() const;
  // Canonical key = value text that Parse reads back to the same config.
  std::string Serialize() const;
};

struct MeanCi {
  double mean = 0.0;
  double halfwidth = 0.0;
};

// Mean and t_{n-1, 0.975} * s / sqrt(n). Throws InvalidInputError for fewer
// than two values.
MeanCi AggregateCi(const std::vector<double>& values);

struct ResultRow {
  std::string method;
  double lambda = 0.0;
  int repeat = 0;
  double ndcg = 0.0;
  double dp = 0.0;
  double dp_matrix = 0.0;
  bool ok = true;
  std::string error;
};

struct AggregateRow {
  std::string method;
  double lambda = 0.0;
  int count = 0;  // Successful repeats.
  MeanCi ndcg;
  MeanCi dp;
  MeanCi dp_matrix;
};

struct SweepResult {
  std::vector<ResultRow> rows;  // Method order, then lambda, then repeat.
  std::vector<AggregateRow> aggregate;
  std::vector<std::string> diagnostics;  // One line per training or CV run.
  int failed_cells = 0;
};

// The splits and task sets of one repeat.
struct RepeatData {
  RankingTaskSet train;
  RankingTaskSet test;
};
RepeatData PrepareRepeat(const ExperimentConfig& config,
                         const TabularDataset& dataset, int repeat);

// Runs the whole grid; per-cell failures are recorded, not thrown. Data and
// configuration errors are thrown before any cell runs.
SweepResult RunSweep(const ExperimentConfig& config,
                     std::ostream* progress = nullptr);

// Groups successful rows by (method, lambda) keeping first-seen order.
std::vector<AggregateRow> Aggregate(const std::vector<ResultRow>& rows);

struct FairestRow {
  std::string method;
  AggregateRow fairest;  // Minimum mean dp.
  // Highest mean NDCG among rows with mean dp below the threshold.
  std::optional<AggregateRow> best_below_threshold;
};
inline constexpr double kFairnessThreshold = 0.1;

// Throws InvalidInputError on empty input.
std::vector<FairestRow> FairestPoints(const std::vector<AggregateRow>& rows);

// results.tsv, aggregate.tsv, fairest.tsv, manifest.txt, diagnostics.log.
void WriteSweep(const ExperimentConfig& config, const SweepResult& result,
                const std::filesystem::path& out_dir);

std::string FormatResults(const std::vector<ResultRow>& rows);
std::string FormatAggregate(const std::vector<AggregateRow>& rows);
std::string FormatFairest(const std::vector<FairestRow>& rows);
std::vector<AggregateRow> ParseAggregate(const std::string& text);

// Model files: key = value, theta as a comma-separated list.
std::string SerializeModel(const ModelParams& params);
ModelParams ParseModel(const std::string& text);

}  // namespace fairrank

#endif  // FAIRRANK_EXPERIMENT_H_
