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

// Acceptance checks. Prints one PASS/FAIL line per criterion with the
// measured quantity and the pinned tolerance, and exits non-zero if any
// criterion fails.
//
//   acceptance [--only N[,N...]] [--results DIR] [--configs DIR]
//
// Criteria 6 and 7 run the full lambda sweep for every dataset with the
// configs in --configs and keep the output under --results.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fairrank/baselines.h"
#include "fairrank/dataprep.h"
#include "fairrank/experiment.h"
#include "fairrank/inference.h"
#include "fairrank/keyvalue.h"
#include "fairrank/numkernels.h"
#include "fairrank/trainer.h"
#include "test_util.h"

namespace fs = std::filesystem;
using namespace fairrank;
using fairrank::testing::RandomMatrix;
using fairrank::testing::RandomVector;

namespace {

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

bool failed_any = false;

void Report(int criterion, const std::string& label, bool pass,
            const std::string& detail) {
  std::printf("[%s] criterion %d (%s): %s\n", pass ? "PASS" : "FAIL",
              criterion, label.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) failed_any = true;
}

std::string Fmt(const char* format, double a) {
  char buffer[128];
  std::snprintf(buffer, sizeof(buffer), format, a);
  return buffer;
}

// 1. Kernel oracle equivalence.
void KernelOracles() {
  const auto start = Clock::now();
  std::mt19937_64 rng(101);
  double ds_error = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix r2 = RandomMatrix(2, 2, rng, -2.0, 2.0);
    ds_error = std::max(
        ds_error, (ProjectDoublyStochastic(r2).matrix() - testing::DsProject2x2(r2))
                      .cwiseAbs()
                      .maxCoeff());
    const Matrix r3 = RandomMatrix(3, 3, rng, -1.5, 1.5);
    ds_error = std::max(
        ds_error, (ProjectDoublyStochastic(r3).matrix() - testing::DsProject3x3(r3))
                      .cwiseAbs()
                      .maxCoeff());
  }
  int hungarian_mismatch = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int m = 1 + trial % 6;
    const Matrix score = RandomMatrix(m, m, rng);
    if (HungarianMax(score).positions() != testing::BruteForceAssignment(score)) {
      ++hungarian_mismatch;
    }
  }
  int simplex_mismatch = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const Vector x = RandomVector(1 + trial % 12, rng, -2.0, 2.0);
    if (ProjectOntoSimplex(x) != testing::SimplexSortThreshold(x)) {
      ++simplex_mismatch;
    }
  }
  const double elapsed = Seconds(start);
  std::ostringstream detail;
  detail << "ds_project max error " << Fmt("%.2e", ds_error)
         << " (tol 1e-4); hungarian mismatches " << hungarian_mismatch
         << "/200; simplex mismatches " << simplex_mismatch << "/200; "
         << Fmt("%.1f", elapsed) << " s (limit 60 s)";
  Report(1, "kernel oracle equivalence",
         ds_error <= 1e-4 && hungarian_mismatch == 0 && simplex_mismatch == 0 &&
             elapsed < 60.0,
         detail.str());
}

// 2. Feasibility of every P across a German run.
struct FeasibilityTally {
  long matrices = 0;
  double worst_marginal = 0.0;
  double worst_negative = 0.0;
  long decompositions = 0;
  double worst_weight_sum = 0.0;
  double worst_reconstruction = 0.0;

  void Check(const DoublyStochasticMatrix& p, bool decompose) {
    ++matrices;
    worst_marginal = std::max(worst_marginal, p.MaxMarginalError());
    worst_negative = std::max(worst_negative, -p.matrix().minCoeff());
    if (!decompose) return;
    const BvnDecomposition d = BvnDecompose(p);
    double total = 0.0;
    for (const auto& t : d.terms) total += t.weight;
    ++decompositions;
    worst_weight_sum = std::max(worst_weight_sum, std::abs(total - 1.0));
    worst_reconstruction =
        std::max(worst_reconstruction,
                 (d.Reconstruct() - p.matrix()).cwiseAbs().maxCoeff());
  }
};

void Feasibility(const fs::path& configs) {
  const auto start = Clock::now();
  const ExperimentConfig config = ExperimentConfig::Load(configs / "german.conf");
  const TabularDataset data =
      LoadCsv(config.DataPath(), DatasetSchema::Load(config.SchemaPath()));
  FeasibilityTally tally;
  for (int r = 0; r < config.repeats; ++r) {
    const RepeatData split = PrepareRepeat(config, data, r);
    for (double lambda : config.robust_lambdas) {
      Hyperparams hp = config.BaseHyperparams();
      hp.lambda = lambda;
      hp.gamma = 0.01;
      hp.mu = 10.0;
      const TrainResult trained = Train(split.train.problems, hp);
      for (const auto& p : trained.p_star) tally.Check(p, false);
      for (const auto& problem : split.test.problems) {
        tally.Check(Infer(problem.Unlabeled(), trained.params).p_star, true);
      }
    }
    const RegressionModel ridge = RidgeFit(split.train.problems, config.ridge);
    for (double lambda : config.postproc_lambdas) {
      for (const auto& problem : split.test.problems) {
        tally.Check(PostProcessRank(ridge.Predict(problem.features),
                                    problem.groups, lambda, config.postproc_mu,
                                    config.admm)
                        .p_star,
                    true);
      }
    }
  }
  std::ostringstream detail;
  detail << tally.matrices << " matrices: worst marginal error "
         << Fmt("%.2e", tally.worst_marginal) << " (tol 1e-6), most negative "
         << Fmt("%.2e", -tally.worst_negative) << " (tol -1e-9); "
         << tally.decompositions << " BvN decompositions: weight-sum error "
         << Fmt("%.2e", tally.worst_weight_sum) << " (tol 1e-8), reconstruction "
         << Fmt("%.2e", tally.worst_reconstruction) << " (tol 1e-6); "
         << Fmt("%.0f", Seconds(start)) << " s";
  Report(2, "feasibility invariants",
         tally.worst_marginal <= 1e-6 && tally.worst_negative <= 1e-9 &&
             tally.worst_weight_sum <= 1e-8 &&
             tally.worst_reconstruction < 1e-6,
         detail.str());
}

AdmmOptions TightAdmm() {
  AdmmOptions admm;
  admm.tol_abs = 1e-13;
  admm.tol_rel = 1e-13;
  admm.feasibility_tol = 1e-13;
  admm.max_iter = 200000;
  return admm;
}

RankingProblem RandomProblem(int m, int l, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(0.5);
  RankingProblem p;
  p.features = RandomMatrix(m, l, rng);
  p.relevance = Vector(m);
  p.groups.resize(m);
  for (int j = 0; j < m; ++j) {
    p.relevance[j] = coin(rng) ? 1.0 : 0.0;
    p.groups[j] = coin(rng) ? 1 : 0;
  }
  return p;
}

// 3. Gradient against central differences.
void GradientCheck() {
  const auto start = Clock::now();
  std::mt19937_64 rng(103);
  const int m = 5;
  const PositionBias bias(m);
  double worst = 0.0;
  int instances = 0;
  const double lambdas[] = {0.0, 1.0};
  const double mus[] = {0.1, 1.0};
  for (int k = 0; k < 50; ++k, ++instances) {
    const double lambda = lambdas[k % 2];
    const double mu = mus[(k / 2) % 2];
    const RankingProblem problem = RandomProblem(m, 3, rng);
    const Vector theta = RandomVector(3, rng);
    const Vector f = RandomVector(m, rng);
    const Vector q = RandomVector(m, rng, 0.05, 0.95);
    const Vector grad =
        QObjectiveGrad(q, problem, theta, f, bias, lambda, mu, TightAdmm()).grad;
    Vector fd(m);
    const double h = 1e-5;
    for (int j = 0; j < m; ++j) {
      Vector qp = q, qm = q;
      qp[j] += h;
      qm[j] -= h;
      fd[j] = (QObjectiveGrad(qp, problem, theta, f, bias, lambda, mu,
                              TightAdmm()).value -
               QObjectiveGrad(qm, problem, theta, f, bias, lambda, mu,
                              TightAdmm()).value) /
              (2.0 * h);
    }
    worst = std::max(worst, (grad - fd).norm() / std::max(fd.norm(), 1e-8));
  }
  const double elapsed = Seconds(start);
  Report(3, "gradient correctness", worst < 1e-4 && elapsed < 120.0,
         std::to_string(instances) + " instances, worst relative error " +
             Fmt("%.2e", worst) + " (tol 1e-4); " + Fmt("%.1f", elapsed) +
             " s (limit 120 s)");
}

// 4. Closed-form theta against numerical maximization.
void ThetaCheck() {
  std::mt19937_64 rng(104);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 4, m = 5, l = 3;
    std::vector<RankingProblem> problems;
    std::vector<Vector> beliefs;
    for (int i = 0; i < n; ++i) {
      problems.push_back(RandomProblem(m, l, rng));
      beliefs.push_back(RandomVector(m, rng, 0.0, 1.0));
    }
    const double gamma = trial % 2 == 0 ? 0.5 : 2.0;
    auto h = [&](const Vector& theta) {
      double value = 0.0;
      for (int i = 0; i < n; ++i) {
        value -= (beliefs[i] - problems[i].relevance)
                     .dot(problems[i].features * theta);
      }
      return value / n - 0.5 * gamma * theta.squaredNorm();
    };
    Vector theta = Vector::Zero(l);
    for (int it = 0; it < 2000; ++it) {
      Vector g(l);
      for (int c = 0; c < l; ++c) {
        Vector tp = theta, tm = theta;
        tp[c] += 1e-6;
        tm[c] -= 1e-6;
        g[c] = (h(tp) - h(tm)) / 2e-6;
      }
      theta += 0.25 / gamma * g;
    }
    worst = std::max(worst, (ThetaStar(beliefs, problems, gamma) - theta)
                                .cwiseAbs()
                                .maxCoeff());
  }
  Report(4, "closed-form theta", worst <= 1e-5,
         "20 instances, worst coordinate difference " + Fmt("%.2e", worst) +
             " (tol 1e-5)");
}

// 5. Utility optimality of the lambda = 0, small-mu ranker.
void UtilityCheck() {
  std::mt19937_64 rng(105);
  std::bernoulli_distribution coin(0.5);
  int mismatches = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const int m = 2 + trial % 4;
    const PositionBias bias(m);
    Vector u(m);
    for (int j = 0; j < m; ++j) u[j] = coin(rng) ? 1.0 : 0.0;
    const Permutation ranked =
        HungarianMax(SolvePStar(u, Vector::Zero(m), bias, 0.0, 1e-3).matrix());
    const auto best =
        testing::BruteForceAssignment(u * bias.values().transpose());
    const double got = u.dot(ranked.ToMatrix() * bias.values());
    const double want =
        u.dot(Permutation::FromPositions(best).ToMatrix() * bias.values());
    if (std::abs(got - want) > 1e-12) ++mismatches;
  }
  Report(5, "utility optimality", mismatches == 0,
         std::to_string(mismatches) +
             "/500 rankings below the brute-force optimal utility (tol 1e-12)");
}

struct TargetRow {
  const char* dataset;
  double ndcg;
  double dp;
};
constexpr TargetRow kTargets[] = {
    {"german", 0.912, 0.029}, {"adult", 0.839, 0.031}, {"compas", 0.789, 0.032}};

const AggregateRow* Find(const std::vector<AggregateRow>& rows,
                         const std::string& method, double lambda) {
  for (const auto& r : rows) {
    if (r.method == method && r.lambda == lambda) return &r;
  }
  return nullptr;
}

// 6 and 7 share the sweeps.
void Reproduction(const fs::path& configs, const fs::path& results) {
  for (const TargetRow& target : kTargets) {
    const ExperimentConfig config =
        ExperimentConfig::Load(configs / (std::string(target.dataset) + ".conf"));
    const auto start = Clock::now();
    const SweepResult sweep = RunSweep(config, nullptr);
    const double minutes = Seconds(start) / 60.0;
    WriteSweep(config, sweep, results / target.dataset);

    const auto fairest = FairestPoints(sweep.aggregate);
    const AggregateRow* robust_fair = nullptr;
    for (const auto& f : fairest) {
      if (f.method == kRobust) robust_fair = &f.fairest;
    }
    std::ostringstream detail6;
    bool pass6 = robust_fair != nullptr && sweep.failed_cells == 0;
    detail6 << target.dataset << ": ";
    if (robust_fair != nullptr) {
      const double gap = std::abs(robust_fair->ndcg.mean - target.ndcg);
      pass6 = pass6 && robust_fair->dp.mean <= 0.06 && gap <= 0.06 &&
              minutes <= 60.0;
      detail6 << "fairest robust lambda " << robust_fair->lambda << " NDCG "
              << Fmt("%.4f", robust_fair->ndcg.mean) << " +- "
              << Fmt("%.4f", robust_fair->ndcg.halfwidth) << " (target "
              << target.ndcg << ", allowed gap 0.06, gap " << Fmt("%.4f", gap)
              << "), DP " << Fmt("%.4f", robust_fair->dp.mean) << " +- "
              << Fmt("%.4f", robust_fair->dp.halfwidth) << " (limit 0.06)";
    }
    detail6 << ", failed cells " << sweep.failed_cells << ", "
            << Fmt("%.1f", minutes) << " min (limit 60)";
    Report(6, "fairest-point magnitude", pass6, detail6.str());

    const double largest = config.robust_lambdas.back();
    const AggregateRow* r0 = Find(sweep.aggregate, kRobust, 0.0);
    const AggregateRow* rmax = Find(sweep.aggregate, kRobust, largest);
    const AggregateRow* p0 = Find(sweep.aggregate, kPostProc, 0.0);
    const AggregateRow* p02 = Find(sweep.aggregate, kPostProc, 0.2);
    std::ostringstream detail7;
    detail7 << target.dataset << ": ";
    bool pass7 = r0 && rmax && p0 && p02 && robust_fair;
    if (pass7) {
      const bool ratio = rmax->dp.mean <= r0->dp.mean / 3.0;
      const bool ndcg_close = std::abs(r0->ndcg.mean - p0->ndcg.mean) <= 0.05;
      const bool pp_down = p02->dp.mean < p0->dp.mean;
      const bool pp_above = p02->dp.mean > robust_fair->dp.mean;
      pass7 = ratio && ndcg_close && pp_down && pp_above;
      detail7 << "robust DP lambda=0 " << Fmt("%.4f", r0->dp.mean)
              << " vs lambda=" << largest << " " << Fmt("%.4f", rmax->dp.mean)
              << " (needs <= 1/3: " << (ratio ? "yes" : "no")
              << "); robust vs postproc NDCG at lambda=0 "
              << Fmt("%.4f", r0->ndcg.mean) << " vs "
              << Fmt("%.4f", p0->ndcg.mean) << " (within 0.05: "
              << (ndcg_close ? "yes" : "no") << "); postproc DP "
              << Fmt("%.4f", p0->dp.mean) << " -> " << Fmt("%.4f", p02->dp.mean)
              << " (decreases: " << (pp_down ? "yes" : "no")
              << ", above robust fairest " << Fmt("%.4f", robust_fair->dp.mean)
              << ": " << (pp_above ? "yes" : "no") << ")";
    } else {
      detail7 << "missing sweep cells";
    }
    Report(7, "trade-off direction", pass7, detail7.str());
  }
}

// 8. Byte-identical results for identical config and seed.
void Determinism(const fs::path& configs, const fs::path& results) {
  ExperimentConfig config = ExperimentConfig::Load(configs / "german.conf");
  config.repeats = 3;
  config.n_train = 100;
  config.n_test = 50;
  config.jobs = 1;
  const fs::path a = results / "determinism_a", b = results / "determinism_b";
  WriteSweep(config, RunSweep(config), a);
  config.jobs = 3;
  WriteSweep(config, RunSweep(config), b);
  bool same = true;
  for (const char* f : {"results.tsv", "aggregate.tsv", "fairest.tsv",
                        "diagnostics.log"}) {
    same = same && ReadFile(a / f) == ReadFile(b / f);
  }
  Report(8, "protocol determinism", same,
         std::string("German, 3 repeats, 1 vs 3 worker threads: tables ") +
             (same ? "byte-identical" : "differ"));
}

// 9. Birkhoff sampling frequencies.
void MonteCarlo() {
  std::mt19937_64 rng(109);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const DoublyStochasticMatrix p = DoublyStochasticMatrix::FromMatrix(
        testing::RandomDoublyStochastic(4, 6, rng));
    Matrix counts = Matrix::Zero(4, 4);
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) {
      counts += RankStochastic(p, DeriveSeed(900 + trial, i)).ToMatrix();
    }
    worst = std::max(worst, (counts / draws - p.matrix()).cwiseAbs().maxCoeff());
  }
  Report(9, "Monte-Carlo consistency", worst <= 0.01,
         "10 random 4x4 matrices, 1e5 draws each, worst frequency error " +
             Fmt("%.4f", worst) + " (tol 0.01)");
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  fs::path results = "acceptance_results";
  fs::path configs = FAIRRANK_CONFIG_DIR;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--only" && i + 1 < argc) {
      for (const auto& item : SplitList(argv[++i])) {
        only.insert(static_cast<int>(ParseInt(item, "--only")));
      }
    } else if (arg == "--results" && i + 1 < argc) {
      results = argv[++i];
    } else if (arg == "--configs" && i + 1 < argc) {
      configs = argv[++i];
    } else {
      std::cerr << "usage: acceptance [--only N,...] [--results DIR] "
                   "[--configs DIR]\n";
      return 2;
    }
  }
  auto wanted = [&](int c) { return only.empty() || only.count(c) > 0; };
  fs::create_directories(results);
  try {
    if (wanted(1)) KernelOracles();
    if (wanted(2)) Feasibility(configs);
    if (wanted(3)) GradientCheck();
    if (wanted(4)) ThetaCheck();
    if (wanted(5)) UtilityCheck();
    if (wanted(6) || wanted(7)) Reproduction(configs, results);
    if (wanted(8)) Determinism(configs, results);
    if (wanted(9)) MonteCarlo();
  } catch (const std::exception& e) {
    std::printf("[FAIL] aborted: %s\n", e.what());
    return 1;
  }
  return failed_any ? 1 : 0;
}
