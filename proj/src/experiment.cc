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

#include "fairrank/experiment.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <boost/math/distributions/students_t.hpp>

#include "fairrank/baselines.h"
#include "fairrank/inference.h"
#include "fairrank/keyvalue.h"

namespace fairrank {
namespace {

std::string Num(double x) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", x);
  return buffer;
}

std::string Fixed(double x) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.6f", x);
  return buffer;
}

std::string Short(double x) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%g", x);
  return buffer;
}

std::string JoinNumbers(const std::vector<double>& xs) {
  std::string out;
  for (size_t i = 0; i < xs.size(); ++i) {
    if (i > 0) out += ", ";
    out += Num(xs[i]);
  }
  return out;
}

std::vector<double> ParseNumbers(const std::string& value,
                                 const std::string& key) {
  std::vector<double> out;
  for (const auto& item : SplitList(value)) out.push_back(ParseDouble(item, key));
  return out;
}

const char* WeightingName(FairnessWeighting w) {
  return w == FairnessWeighting::kUniform ? "uniform" : "relevance";
}

const char* CvScopeName(CvScope scope) {
  return scope == CvScope::kRepeat ? "repeat" : "lambda";
}

CvScope ParseCvScope(const std::string& value) {
  if (value == "repeat") return CvScope::kRepeat;
  if (value == "lambda") return CvScope::kLambda;
  throw std::invalid_argument("cv_scope must be repeat or lambda");
}

FairnessWeighting ParseWeighting(const std::string& value) {
  if (value == "uniform") return FairnessWeighting::kUniform;
  if (value == "relevance") return FairnessWeighting::kRelevance;
  throw std::invalid_argument("fairness_weighting must be uniform or relevance");
}

}  // namespace

std::filesystem::path ExperimentConfig::DataPath() const {
  return data_dir / (dataset + ".csv");
}

std::filesystem::path ExperimentConfig::SchemaPath() const {
  return data_dir / "schemas" / (dataset + ".schema");
}

std::vector<double> ExperimentConfig::Lambdas(const std::string& method) const {
  if (method == kRobust) return robust_lambdas;
  if (method == kPostProc) return postproc_lambdas;
  return {0.0};
}

Hyperparams ExperimentConfig::BaseHyperparams() const {
  Hyperparams hp;
  hp.fairness_weighting = fairness_weighting;
  hp.admm = admm;
  hp.max_outer_iter = max_outer_iter;
  hp.grad_tol = grad_tol;
  return hp;
}

ExperimentConfig ExperimentConfig::Parse(const std::string& text,
                                         const std::filesystem::path& base_dir) {
  ExperimentConfig config;
  try {
    for (const auto& [key, value] : ParseKeyValue(text)) {
      auto integer = [&] { return static_cast<int>(ParseInt(value, key)); };
      auto real = [&] { return ParseDouble(value, key); };
      if (key == "dataset") {
        config.dataset = value;
      } else if (key == "data_dir") {
        config.data_dir = value;
      } else if (key == "seed") {
        config.seed = static_cast<uint64_t>(ParseInt(value, key));
      } else if (key == "items_per_query") {
        config.items_per_query = integer();
      } else if (key == "n_train") {
        config.n_train = integer();
      } else if (key == "n_test") {
        config.n_test = integer();
      } else if (key == "repeats") {
        config.repeats = integer();
      } else if (key == "folds") {
        config.folds = integer();
      } else if (key == "test_fraction") {
        config.test_fraction = real();
      } else if (key == "relevance_probability") {
        config.relevance_probability = real();
      } else if (key == "methods") {
        config.methods = SplitList(value);
      } else if (key == "robust_lambdas") {
        config.robust_lambdas = ParseNumbers(value, key);
      } else if (key == "postproc_lambdas") {
        config.postproc_lambdas = ParseNumbers(value, key);
      } else if (key == "gamma_grid") {
        config.gamma_grid = ParseNumbers(value, key);
      } else if (key == "mu_grid") {
        config.mu_grid = ParseNumbers(value, key);
      } else if (key == "fairness_weighting") {
        config.fairness_weighting = ParseWeighting(value);
      } else if (key == "cv_scope") {
        config.cv_scope = ParseCvScope(value);
      } else if (key == "ridge") {
        config.ridge = real();
      } else if (key == "postproc_mu") {
        config.postproc_mu = real();
      } else if (key == "admm_rho") {
        config.admm.rho = real();
      } else if (key == "admm_tol_abs") {
        config.admm.tol_abs = real();
      } else if (key == "admm_tol_rel") {
        config.admm.tol_rel = real();
      } else if (key == "admm_max_iter") {
        config.admm.max_iter = integer();
      } else if (key == "max_outer_iter") {
        config.max_outer_iter = integer();
      } else if (key == "grad_tol") {
        config.grad_tol = real();
      } else if (key == "jobs") {
        config.jobs = integer();
      } else {
        throw ConfigError("unknown config key '" + key + "'");
      }
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (config.data_dir.is_relative() && !base_dir.empty()) {
    config.data_dir = base_dir / config.data_dir;
  }
  config.Validate();
  return config;
}

ExperimentConfig ExperimentConfig::Load(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw ConfigError("config file not found: " + path.string());
  }
  return Parse(ReadFile(path), path.parent_path());
}

void ExperimentConfig::Validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError("invalid config: " + what);
  };
  require(!dataset.empty(), "dataset is empty");
  require(items_per_query >= 2, "items_per_query must be >= 2");
  require(n_train >= 1 && n_test >= 1, "n_train and n_test must be >= 1");
  require(repeats >= 2, "repeats must be >= 2 for a confidence interval");
  require(folds >= 2 && folds <= n_train, "folds must lie in [2, n_train]");
  require(test_fraction > 0.0 && test_fraction < 1.0,
          "test_fraction must lie in (0, 1)");
  require(relevance_probability > 0.0 && relevance_probability < 1.0,
          "relevance_probability must lie in (0, 1)");
  require(!methods.empty(), "methods is empty");
  for (const auto& m : methods) {
    require(m == kRobust || m == kPostProc || m == kRandom,
            "unknown method '" + m + "'");
  }
  for (size_t i = 0; i < methods.size(); ++i) {
    for (size_t j = 0; j < i; ++j) {
      require(methods[i] != methods[j], "method listed twice");
    }
  }
  require(!robust_lambdas.empty() && !postproc_lambdas.empty(),
          "lambda grids must be non-empty");
  for (double l : robust_lambdas) require(l >= 0.0, "lambda must be >= 0");
  for (double l : postproc_lambdas) require(l >= 0.0, "lambda must be >= 0");
  require(!gamma_grid.empty() && !mu_grid.empty(),
          "gamma and mu grids must be non-empty");
  for (double g : gamma_grid) require(g > 0.0, "gamma must be > 0");
  for (double m : mu_grid) require(m > 0.0, "mu must be > 0");
  require(ridge >= 0.0, "ridge must be >= 0");
  require(postproc_mu > 0.0, "postproc_mu must be > 0");
  require(admm.rho > 0.0 && admm.max_iter >= 1 && admm.tol_abs > 0.0 &&
              admm.tol_rel >= 0.0,
          "ADMM settings");
  require(max_outer_iter >= 0 && grad_tol > 0.0, "outer solver settings");
  require(jobs >= 1, "jobs must be >= 1");
}

std::string ExperimentConfig::Serialize() const {
  std::ostringstream out;
  out << "dataset = " << dataset << "\n";
  out << "data_dir = " << data_dir.string() << "\n";
  out << "seed = " << seed << "\n";
  out << "items_per_query = " << items_per_query << "\n";
  out << "n_train = " << n_train << "\n";
  out << "n_test = " << n_test << "\n";
  out << "repeats = " << repeats << "\n";
  out << "folds = " << folds << "\n";
  out << "test_fraction = " << Num(test_fraction) << "\n";
  out << "relevance_probability = " << Num(relevance_probability) << "\n";
  out << "methods = ";
  for (size_t i = 0; i < methods.size(); ++i) {
    out << (i > 0 ? ", " : "") << methods[i];
  }
  out << "\n";
  out << "robust_lambdas = " << JoinNumbers(robust_lambdas) << "\n";
  out << "postproc_lambdas = " << JoinNumbers(postproc_lambdas) << "\n";
  out << "gamma_grid = " << JoinNumbers(gamma_grid) << "\n";
  out << "mu_grid = " << JoinNumbers(mu_grid) << "\n";
  out << "cv_scope = " << CvScopeName(cv_scope) << "\n";
  out << "fairness_weighting = " << WeightingName(fairness_weighting) << "\n";
  out << "ridge = " << Num(ridge) << "\n";
  out << "postproc_mu = " << Num(postproc_mu) << "\n";
  out << "admm_rho = " << Num(admm.rho) << "\n";
  out << "admm_tol_abs = " << Num(admm.tol_abs) << "\n";
  out << "admm_tol_rel = " << Num(admm.tol_rel) << "\n";
  out << "admm_max_iter = " << admm.max_iter << "\n";
  out << "max_outer_iter = " << max_outer_iter << "\n";
  out << "grad_tol = " << Num(grad_tol) << "\n";
  out << "jobs = " << jobs << "\n";
  return out.str();
}

MeanCi AggregateCi(const std::vector<double>& values) {
  const size_t n = values.size();
  if (n < 2) {
    throw InvalidInputError("AggregateCi: need at least two values");
  }
  double sum = 0.0;
  for (double x : values) sum += x;
  const double mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (double x : values) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  const boost::math::students_t dist(static_cast<double>(n - 1));
  const double t = boost::math::quantile(dist, 0.975);
  return {mean, t * sd / std::sqrt(static_cast<double>(n))};
}

RepeatData PrepareRepeat(const ExperimentConfig& config,
                         const TabularDataset& dataset, int repeat) {
  const uint64_t base = DeriveSeed(config.seed, static_cast<uint64_t>(repeat));
  auto [train_rows, test_rows] =
      Split(dataset, config.test_fraction, DeriveSeed(base, 0));
  StandardizedSplits standardized = Standardize(train_rows, {test_rows});
  RepeatData out;
  out.train = MakeRankingProblems(standardized.train, config.n_train,
                                  config.items_per_query,
                                  config.relevance_probability,
                                  DeriveSeed(base, 1));
  out.test = MakeRankingProblems(standardized.others[0], config.n_test,
                                 config.items_per_query,
                                 config.relevance_probability,
                                 DeriveSeed(base, 2));
  return out;
}

namespace {

struct QueryScore {
  double ndcg_sum = 0.0;
  double dp_sum = 0.0;
  double dp_matrix_sum = 0.0;
  int queries = 0;
  int dp_queries = 0;

  void Add(const RankingProblem& problem, const Permutation& ranking,
           const DoublyStochasticMatrix& p, const PositionBias& bias) {
    ndcg_sum += Ndcg(problem.relevance, ranking);
    ++queries;
    const std::optional<double> dp =
        DpViolation(ranking, problem.groups, bias);
    if (dp) {
      dp_sum += *dp;
      dp_matrix_sum += *DpViolation(p, problem.groups, bias);
      ++dp_queries;
    }
  }

  void Fill(ResultRow& row) const {
    row.ndcg = ndcg_sum / queries;
    row.dp = dp_queries > 0 ? dp_sum / dp_queries : 0.0;
    row.dp_matrix = dp_queries > 0 ? dp_matrix_sum / dp_queries : 0.0;
  }
};

std::string DescribeTraining(const std::string& prefix,
                             const TrainDiagnostics& d) {
  std::ostringstream out;
  out << prefix << " iterations=" << d.iterations
      << " evaluations=" << d.evaluations
      << " converged=" << (d.converged ? 1 : 0)
      << " line_search_failed=" << (d.line_search_failed ? 1 : 0)
      << " projected_grad=" << Short(d.projected_grad_norm)
      << " objective=" << Short(d.final_objective)
      << " admm_iterations=" << d.admm_iterations;
  return out.str();
}

// All cells of one repeat. rows[c] receives the row of cell c, where cells
// are enumerated method-major then lambda.
void RunRepeat(const ExperimentConfig& config, const TabularDataset& dataset,
               int repeat, std::vector<ResultRow>& rows,
               std::vector<std::string>& diagnostics) {
  const std::string tag = "repeat=" + std::to_string(repeat);
  std::vector<std::pair<std::string, double>> cells;
  for (const auto& method : config.methods) {
    for (double lambda : config.Lambdas(method)) cells.emplace_back(method, lambda);
  }
  rows.assign(cells.size(), ResultRow{});
  for (size_t c = 0; c < cells.size(); ++c) {
    rows[c].method = cells[c].first;
    rows[c].lambda = cells[c].second;
    rows[c].repeat = repeat;
  }

  RepeatData data;
  try {
    data = PrepareRepeat(config, dataset, repeat);
  } catch (const std::exception& e) {
    for (auto& row : rows) {
      row.ok = false;
      row.error = std::string("data preparation: ") + e.what();
    }
    diagnostics.push_back(tag + " failed: " + rows.front().error);
    return;
  }
  const PositionBias bias(config.items_per_query);
  const uint64_t base = DeriveSeed(config.seed, static_cast<uint64_t>(repeat));

  std::optional<RegressionModel> ridge;
  std::optional<CrossValidationResult> cv;
  for (size_t c = 0; c < cells.size(); ++c) {
    ResultRow& row = rows[c];
    if (!row.ok) continue;
    const std::string cell_tag = tag + " method=" + row.method +
                                 " lambda=" + Short(row.lambda);
    try {
      QueryScore score;
      if (row.method == kRobust) {
        Hyperparams hp = config.BaseHyperparams();
        const bool per_lambda = config.cv_scope == CvScope::kLambda;
        if (!cv || per_lambda) {
          hp.lambda = per_lambda ? row.lambda : 0.0;
          cv = CrossValidate(data.train.problems, config.gamma_grid,
                             config.mu_grid, config.folds, hp);
          std::ostringstream line;
          line << (per_lambda ? cell_tag : tag) << " cv lambda="
               << Short(hp.lambda) << " gamma=" << Short(cv->gamma)
               << " mu=" << Short(cv->mu) << " scores=";
          for (size_t i = 0; i < cv->scores.size(); ++i) {
            line << (i > 0 ? "," : "") << Fixed(cv->scores[i]);
          }
          diagnostics.push_back(line.str());
        }
        hp.lambda = row.lambda;
        hp.gamma = cv->gamma;
        hp.mu = cv->mu;
        const TrainResult trained = Train(data.train.problems, hp);
        diagnostics.push_back(DescribeTraining(cell_tag, trained.diagnostics));
        for (const auto& problem : data.test.problems) {
          const InferenceResult inferred =
              Infer(problem.Unlabeled(), trained.params);
          score.Add(problem, inferred.ranking, inferred.p_star, bias);
        }
      } else if (row.method == kPostProc) {
        if (!ridge) ridge = RidgeFit(data.train.problems, config.ridge);
        for (const auto& problem : data.test.problems) {
          const InferenceResult ranked =
              PostProcessRank(ridge->Predict(problem.features), problem.groups,
                              row.lambda, config.postproc_mu, config.admm);
          score.Add(problem, ranked.ranking, ranked.p_star, bias);
        }
      } else {
        const uint64_t stream = DeriveSeed(base, 3);
        for (size_t q = 0; q < data.test.problems.size(); ++q) {
          const auto& problem = data.test.problems[q];
          const Permutation ranking =
              RandomRank(problem.size(), DeriveSeed(stream, q));
          score.Add(problem, ranking,
                    DoublyStochasticMatrix::FromPermutation(ranking), bias);
        }
      }
      score.Fill(row);
    } catch (const std::exception& e) {
      row.ok = false;
      row.error = e.what();
      diagnostics.push_back(cell_tag + " failed: " + row.error);
    }
  }
}

}  // namespace

SweepResult RunSweep(const ExperimentConfig& config, std::ostream* progress) {
  config.Validate();
  const DatasetSchema schema = DatasetSchema::Load(config.SchemaPath());
  const TabularDataset dataset = LoadCsv(config.DataPath(), schema);

  const int repeats = config.repeats;
  std::vector<std::vector<ResultRow>> per_repeat(repeats);
  std::vector<std::vector<std::string>> per_repeat_log(repeats);
  std::atomic<int> next{0};
  std::mutex progress_mutex;
  auto worker = [&] {
    for (int r = next++; r < repeats; r = next++) {
      RunRepeat(config, dataset, r, per_repeat[r], per_repeat_log[r]);
      if (progress != nullptr) {
        std::lock_guard<std::mutex> lock(progress_mutex);
        *progress << "repeat " << r << " done" << std::endl;
      }
    }
  };
  const int threads = std::min(config.jobs, repeats);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  SweepResult result;
  const size_t cells = per_repeat.empty() ? 0 : per_repeat[0].size();
  for (size_t c = 0; c < cells; ++c) {
    for (int r = 0; r < repeats; ++r) {
      result.rows.push_back(per_repeat[r][c]);
      if (!per_repeat[r][c].ok) ++result.failed_cells;
    }
  }
  for (const auto& log : per_repeat_log) {
    result.diagnostics.insert(result.diagnostics.end(), log.begin(), log.end());
  }
  result.aggregate = Aggregate(result.rows);
  return result;
}

std::vector<AggregateRow> Aggregate(const std::vector<ResultRow>& rows) {
  std::vector<AggregateRow> out;
  std::vector<std::vector<const ResultRow*>> members;
  for (const auto& row : rows) {
    if (!row.ok) continue;
    size_t k = 0;
    while (k < out.size() &&
           !(out[k].method == row.method && out[k].lambda == row.lambda)) {
      ++k;
    }
    if (k == out.size()) {
      AggregateRow fresh;
      fresh.method = row.method;
      fresh.lambda = row.lambda;
      out.push_back(fresh);
      members.emplace_back();
    }
    members[k].push_back(&row);
  }
  for (size_t k = 0; k < out.size(); ++k) {
    std::vector<double> ndcg, dp, dp_matrix;
    for (const ResultRow* row : members[k]) {
      ndcg.push_back(row->ndcg);
      dp.push_back(row->dp);
      dp_matrix.push_back(row->dp_matrix);
    }
    out[k].count = static_cast<int>(ndcg.size());
    if (ndcg.size() >= 2) {
      out[k].ndcg = AggregateCi(ndcg);
      out[k].dp = AggregateCi(dp);
      out[k].dp_matrix = AggregateCi(dp_matrix);
    } else {
      out[k].ndcg = {ndcg[0], 0.0};
      out[k].dp = {dp[0], 0.0};
      out[k].dp_matrix = {dp_matrix[0], 0.0};
    }
  }
  return out;
}

std::vector<FairestRow> FairestPoints(const std::vector<AggregateRow>& rows) {
  if (rows.empty()) throw InvalidInputError("FairestPoints: no results");
  std::vector<FairestRow> out;
  for (const auto& row : rows) {
    auto it = std::find_if(out.begin(), out.end(), [&](const FairestRow& f) {
      return f.method == row.method;
    });
    if (it == out.end()) {
      out.push_back(FairestRow{row.method, row, std::nullopt});
      it = out.end() - 1;
    } else if (row.dp.mean < it->fairest.dp.mean ||
               (row.dp.mean == it->fairest.dp.mean &&
                row.lambda > it->fairest.lambda)) {
      it->fairest = row;
    }
    if (row.dp.mean < kFairnessThreshold &&
        (!it->best_below_threshold ||
         row.ndcg.mean > it->best_below_threshold->ndcg.mean)) {
      it->best_below_threshold = row;
    }
  }
  return out;
}

std::string FormatResults(const std::vector<ResultRow>& rows) {
  std::ostringstream out;
  out << "method\tlambda\trepeat\tndcg\tdp\tdp_matrix\tstatus\n";
  for (const auto& row : rows) {
    out << row.method << '\t' << Short(row.lambda) << '\t' << row.repeat;
    if (row.ok) {
      out << '\t' << Fixed(row.ndcg) << '\t' << Fixed(row.dp) << '\t'
          << Fixed(row.dp_matrix) << "\tok\n";
    } else {
      out << "\tNA\tNA\tNA\tfailed\n";
    }
  }
  return out.str();
}

std::string FormatAggregate(const std::vector<AggregateRow>& rows) {
  std::ostringstream out;
  out << "method\tlambda\tn\tndcg_mean\tndcg_ci95\tdp_mean\tdp_ci95"
         "\tdp_matrix_mean\tdp_matrix_ci95\n";
  for (const auto& row : rows) {
    out << row.method << '\t' << Short(row.lambda) << '\t' << row.count << '\t'
        << Fixed(row.ndcg.mean) << '\t' << Fixed(row.ndcg.halfwidth) << '\t'
        << Fixed(row.dp.mean) << '\t' << Fixed(row.dp.halfwidth) << '\t'
        << Fixed(row.dp_matrix.mean) << '\t'
        << Fixed(row.dp_matrix.halfwidth) << '\n';
  }
  return out.str();
}

std::vector<AggregateRow> ParseAggregate(const std::string& text) {
  std::vector<AggregateRow> out;
  std::istringstream in(text);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (Trim(line).empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    const auto f = SplitList(line, '\t');
    if (f.size() != 9) {
      throw InvalidInputError("aggregate table: expected 9 columns");
    }
    AggregateRow row;
    row.method = f[0];
    row.lambda = ParseDouble(f[1], "lambda");
    row.count = static_cast<int>(ParseInt(f[2], "n"));
    row.ndcg = {ParseDouble(f[3], "ndcg"), ParseDouble(f[4], "ndcg ci")};
    row.dp = {ParseDouble(f[5], "dp"), ParseDouble(f[6], "dp ci")};
    row.dp_matrix = {ParseDouble(f[7], "dp_matrix"),
                      ParseDouble(f[8], "dp_matrix ci")};
    out.push_back(row);
  }
  return out;
}

std::string FormatFairest(const std::vector<FairestRow>& rows) {
  std::ostringstream out;
  out << "method\tselection\tlambda\tndcg_mean\tndcg_ci95\tdp_mean\tdp_ci95\n";
  auto emit = [&](const std::string& method, const char* selection,
                  const AggregateRow& row) {
    out << method << '\t' << selection << '\t' << Short(row.lambda) << '\t'
        << Fixed(row.ndcg.mean) << '\t' << Fixed(row.ndcg.halfwidth) << '\t'
        << Fixed(row.dp.mean) << '\t' << Fixed(row.dp.halfwidth) << '\n';
  };
  for (const auto& row : rows) {
    emit(row.method, "fairest", row.fairest);
    if (row.best_below_threshold) {
      emit(row.method, "best_ndcg_dp_below_0.1", *row.best_below_threshold);
    }
  }
  return out.str();
}

namespace {

void WriteText(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

}  // namespace

void WriteSweep(const ExperimentConfig& config, const SweepResult& result,
                const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  WriteText(out_dir / "results.tsv", FormatResults(result.rows));
  WriteText(out_dir / "aggregate.tsv", FormatAggregate(result.aggregate));
  if (!result.aggregate.empty()) {
    WriteText(out_dir / "fairest.tsv",
              FormatFairest(FairestPoints(result.aggregate)));
  }
  std::string log;
  for (const auto& line : result.diagnostics) log += line + "\n";
  for (const auto& row : result.rows) {
    if (!row.ok) {
      log += "failed method=" + row.method + " lambda=" + Short(row.lambda) +
             " repeat=" + std::to_string(row.repeat) + ": " + row.error + "\n";
    }
  }
  WriteText(out_dir / "diagnostics.log", log);
  std::string manifest = "# Everything needed to reproduce results.tsv.\n";
  manifest += config.Serialize();
  manifest += "rows = " + std::to_string(result.rows.size()) + "\n";
  manifest += "failed_cells = " + std::to_string(result.failed_cells) + "\n";
  WriteText(out_dir / "manifest.txt", manifest);
}

std::string SerializeModel(const ModelParams& params) {
  std::ostringstream out;
  out << "theta = ";
  for (int i = 0; i < params.theta.size(); ++i) {
    out << (i > 0 ? ", " : "") << Num(params.theta[i]);
  }
  out << "\n";
  out << "lambda = " << Num(params.lambda) << "\n";
  out << "gamma = " << Num(params.gamma) << "\n";
  out << "mu = " << Num(params.mu) << "\n";
  out << "fairness_weighting = " << WeightingName(params.fairness_weighting)
      << "\n";
  out << "admm_rho = " << Num(params.admm.rho) << "\n";
  out << "admm_tol_abs = " << Num(params.admm.tol_abs) << "\n";
  out << "admm_tol_rel = " << Num(params.admm.tol_rel) << "\n";
  out << "admm_max_iter = " << params.admm.max_iter << "\n";
  out << "max_outer_iter = " << params.max_outer_iter << "\n";
  out << "grad_tol = " << Num(params.grad_tol) << "\n";
  return out.str();
}

ModelParams ParseModel(const std::string& text) {
  ModelParams params;
  bool has_theta = false;
  try {
    for (const auto& [key, value] : ParseKeyValue(text)) {
      if (key == "theta") {
        const auto xs = ParseNumbers(value, key);
        params.theta = Eigen::Map<const Vector>(xs.data(), xs.size());
        has_theta = true;
      } else if (key == "lambda") {
        params.lambda = ParseDouble(value, key);
      } else if (key == "gamma") {
        params.gamma = ParseDouble(value, key);
      } else if (key == "mu") {
        params.mu = ParseDouble(value, key);
      } else if (key == "fairness_weighting") {
        params.fairness_weighting = ParseWeighting(value);
      } else if (key == "admm_rho") {
        params.admm.rho = ParseDouble(value, key);
      } else if (key == "admm_tol_abs") {
        params.admm.tol_abs = ParseDouble(value, key);
      } else if (key == "admm_tol_rel") {
        params.admm.tol_rel = ParseDouble(value, key);
      } else if (key == "admm_max_iter") {
        params.admm.max_iter = static_cast<int>(ParseInt(value, key));
      } else if (key == "max_outer_iter") {
        params.max_outer_iter = static_cast<int>(ParseInt(value, key));
      } else if (key == "grad_tol") {
        params.grad_tol = ParseDouble(value, key);
      } else {
        throw InvalidInputError("model file: unknown key '" + key + "'");
      }
    }
  } catch (const InvalidInputError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw InvalidInputError(std::string("model file: ") + e.what());
  }
  if (!has_theta) throw InvalidInputError("model file: theta is missing");
  params.Validate();
  return params;
}

}  // namespace fairrank
