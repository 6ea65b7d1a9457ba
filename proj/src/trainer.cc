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

#include "fairrank/trainer.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "fairrank/inference.h"
#include "inner_solve.h"
#include "projected_gradient.h"

namespace fairrank {

namespace internal {

InnerSolution SolveInner(const Vector& q, const Vector& f, const Vector& v,
                         double lambda, double mu, const AdmmOptions& admm,
                         const AdmmState* warm_start) {
  const Vector weights = q + lambda * f;
  const Matrix r = weights * v.transpose() / mu;
  AdmmResult admm_result = RunDsProjection(r, admm, warm_start);
  if (!admm_result.converged) {
    throw ConvergenceError("P* projection did not converge after " +
                               std::to_string(admm_result.iterations) +
                               " ADMM iterations",
                           admm_result.iterations, admm_result.primal_residual,
                           admm_result.dual_residual);
  }
  InnerSolution out;
  out.multiplier = lambda;
  out.p = std::move(admm_result.projection);
  out.value = weights.dot(out.p * v) - 0.5 * mu * out.p.squaredNorm();
  out.state = std::move(admm_result.state);
  out.admm_iterations = admm_result.iterations;
  out.primal_residual = admm_result.primal_residual;
  out.dual_residual = admm_result.dual_residual;
  return out;
}

InnerSolution SolveBalancedInner(const Vector& q, const Vector& f,
                                 const Vector& v, double lambda, double mu,
                                 const AdmmOptions& admm,
                                 const InnerSolution* warm) {
  const AdmmState* state = warm != nullptr && warm->p.size() > 0
                               ? &warm->state
                               : nullptr;
  if (lambda == 0.0 || f.isZero()) {
    InnerSolution out = SolveInner(q, f, v, 0.0, mu, admm, state);
    return out;
  }
  constexpr double kGapTol = 1e-9;
  constexpr int kMaxSteps = 60;

  double t = 0.0;
  if (warm != nullptr) t = std::clamp(warm->multiplier, -lambda, lambda);
  InnerSolution a = SolveInner(q, f, v, t, mu, admm, state);
  int admm_total = a.admm_iterations;
  double gap_a = f.dot(a.p * v);
  auto finish = [&](InnerSolution sol) {
    sol.admm_iterations = admm_total;
    return sol;
  };
  if (std::abs(gap_a) <= kGapTol) return finish(std::move(a));

  // A positive gap is lowered by decreasing t.
  const double bound = gap_a > 0.0 ? -lambda : lambda;
  if (t == bound) return finish(std::move(a));
  InnerSolution b = SolveInner(q, f, v, bound, mu, admm, &a.state);
  admm_total += b.admm_iterations;
  double gap_b = f.dot(b.p * v);
  if (std::abs(gap_b) <= kGapTol || (gap_b > 0.0) == (gap_a > 0.0)) {
    return finish(std::move(b));
  }

  // Illinois regula falsi on the bracket [a, b].
  int stale_side = 0;
  for (int step = 0; step < kMaxSteps; ++step) {
    const double ta = a.multiplier;
    const double tb = b.multiplier;
    double tc = (ta * gap_b - tb * gap_a) / (gap_b - gap_a);
    if (!(tc > std::min(ta, tb) && tc < std::max(ta, tb))) tc = 0.5 * (ta + tb);
    InnerSolution c = SolveInner(q, f, v, tc, mu, admm, &b.state);
    admm_total += c.admm_iterations;
    const double gap_c = f.dot(c.p * v);
    if (std::abs(gap_c) <= kGapTol ||
        std::abs(tb - ta) <= 1e-12 * (1.0 + lambda)) {
      return finish(std::move(c));
    }
    if ((gap_c > 0.0) == (gap_b > 0.0)) {
      b = std::move(c);
      gap_b = gap_c;
      if (stale_side == -1) gap_a *= 0.5;
      stale_side = -1;
    } else {
      a = std::move(b);
      gap_a = gap_b;
      b = std::move(c);
      gap_b = gap_c;
      stale_side = 1;
    }
  }
  return finish(std::abs(gap_a) < std::abs(gap_b) ? std::move(a)
                                                   : std::move(b));
}

}  // namespace internal

void Hyperparams::Validate() const {
  if (!(gamma > 0.0) || !(mu > 0.0) || !(lambda >= 0.0)) {
    throw InvalidInputError(
        "Hyperparams: need gamma > 0, mu > 0 and lambda >= 0");
  }
  if (max_outer_iter < 0 || !(grad_tol > 0.0) || !(backtrack > 0.0) ||
      !(backtrack < 1.0) || !(initial_step > 0.0)) {
    throw InvalidInputError("Hyperparams: invalid optimizer settings");
  }
}

namespace {

void CheckDataset(const std::vector<RankingProblem>& dataset) {
  if (dataset.empty()) throw InvalidInputError("empty dataset");
  const int m = dataset.front().size();
  const int l = dataset.front().num_features();
  for (const RankingProblem& problem : dataset) {
    problem.Validate();
    if (problem.size() != m || problem.num_features() != l) {
      throw InvalidInputError(
          "all ranking problems must share the item and feature counts");
    }
  }
}

}  // namespace

Vector ThetaStar(const std::vector<Vector>& beliefs,
                 const std::vector<RankingProblem>& dataset, double gamma) {
  if (dataset.empty()) throw InvalidInputError("ThetaStar: empty dataset");
  if (beliefs.size() != dataset.size()) {
    throw InvalidInputError("ThetaStar: one belief per query required");
  }
  if (!(gamma > 0.0)) throw InvalidInputError("ThetaStar: gamma must be > 0");
  Vector theta = Vector::Zero(dataset.front().num_features());
  for (size_t i = 0; i < dataset.size(); ++i) {
    const RankingProblem& problem = dataset[i];
    if (beliefs[i].size() != problem.size() ||
        problem.num_features() != theta.size()) {
      throw InvalidInputError("ThetaStar: dimension mismatch");
    }
    theta.noalias() +=
        problem.features.transpose() * (beliefs[i] - problem.relevance);
  }
  return theta * (-1.0 / (gamma * static_cast<double>(dataset.size())));
}

DoublyStochasticMatrix SolvePStar(const Vector& q, const Vector& f,
                                  const PositionBias& bias, double lambda,
                                  double mu, const AdmmOptions& admm) {
  if (q.size() != bias.size() || f.size() != bias.size()) {
    throw InvalidInputError("SolvePStar: q, f and bias lengths differ");
  }
  if (!(mu > 0.0)) throw InvalidInputError("SolvePStar: mu must be > 0");
  internal::InnerSolution sol =
      internal::SolveInner(q, f, bias.values(), lambda, mu, admm, nullptr);
  return DoublyStochasticMatrix::FromMatrix(std::move(sol.p));
}

QObjective QObjectiveGrad(const Vector& q, const RankingProblem& problem,
                          const Vector& theta, const Vector& f,
                          const PositionBias& bias, double lambda, double mu,
                          const AdmmOptions& admm) {
  const int m = problem.size();
  if (q.size() != m || f.size() != m || bias.size() != m ||
      problem.relevance.size() != m || theta.size() != problem.num_features()) {
    throw InvalidInputError("QObjectiveGrad: dimension mismatch");
  }
  if (!(mu > 0.0)) throw InvalidInputError("QObjectiveGrad: mu must be > 0");
  internal::InnerSolution sol =
      internal::SolveInner(q, f, bias.values(), lambda, mu, admm, nullptr);
  const Vector score = problem.features * theta;
  QObjective out;
  out.value = sol.value - (q - problem.relevance).dot(score) +
              0.5 * mu * q.squaredNorm();
  out.grad = sol.p * bias.values() - score + mu * q;
  out.p_star = DoublyStochasticMatrix::FromMatrix(std::move(sol.p));
  return out;
}

TrainResult Train(const std::vector<RankingProblem>& dataset,
                  const Hyperparams& hp) {
  hp.Validate();
  CheckDataset(dataset);
  const int n = static_cast<int>(dataset.size());
  const int m = dataset.front().size();
  const int l = dataset.front().num_features();
  const PositionBias bias(m);
  const Vector& v = bias.values();

  struct QueryState {
    Vector f;
    internal::InnerSolution committed;
    internal::InnerSolution trial;
  };
  std::vector<QueryState> queries(n);
  for (QueryState& qs : queries) qs.f = Vector::Zero(m);
  Vector theta = Vector::Zero(l);
  Vector trial_theta = Vector::Zero(l);
  long admm_iterations = 0;
  bool fairness_built = false;

  auto segment = [m](const Vector& x, int i) { return x.segment(i * m, m); };

  AdmmOptions admm = hp.admm;
  internal::BoxObjective objective;
  objective.refresh = [&](const Vector& x) {
    if (hp.lambda == 0.0 && fairness_built) return false;
    bool changed = !fairness_built;
    for (int i = 0; i < n; ++i) {
      Vector f = BuildFairnessVector(Vector(segment(x, i)), dataset[i].groups,
                              hp.fairness_weighting)
                .f;
      if (f != queries[i].f) {
        queries[i].f = std::move(f);
        changed = true;
      }
    }
    fairness_built = true;
    return changed;
  };
  objective.evaluate = [&](const Vector& x, Vector& grad) {
    trial_theta.setZero();
    for (int i = 0; i < n; ++i) {
      trial_theta.noalias() += dataset[i].features.transpose() *
                               (segment(x, i) - dataset[i].relevance);
    }
    trial_theta *= -1.0 / (hp.gamma * n);

    double total = 0.5 * hp.gamma * n * trial_theta.squaredNorm();
    grad.resize(x.size());
    for (int i = 0; i < n; ++i) {
      QueryState& qs = queries[i];
      const Vector q = segment(x, i);
      qs.trial = internal::SolveBalancedInner(q, qs.f, v, hp.lambda, hp.mu,
                                              admm, &qs.committed);
      admm_iterations += qs.trial.admm_iterations;
      total += qs.trial.value + 0.5 * hp.mu * q.squaredNorm();
      grad.segment(i * m, m) = qs.trial.p * v -
                               dataset[i].features * trial_theta + hp.mu * q;
    }
    return total;
  };
  objective.commit = [&]() {
    for (QueryState& qs : queries) std::swap(qs.committed, qs.trial);
    theta = trial_theta;
  };
  objective.tighten = [&]() { return internal::TightenAdmm(admm); };

  internal::BoxMinimizerOptions options;
  options.max_iter = hp.max_outer_iter;
  options.grad_tol = hp.grad_tol;
  options.armijo_c = hp.armijo_c;
  options.backtrack = hp.backtrack;
  options.max_backtracks = hp.max_backtracks;
  options.initial_step = hp.initial_step;

  const internal::BoxMinimizerResult pg = internal::MinimizeOverUnitBox(
      Vector::Constant(static_cast<Eigen::Index>(n) * m, 0.5), objective,
      options);

  TrainResult result;
  result.params.theta = theta;
  result.params.lambda = hp.lambda;
  result.params.gamma = hp.gamma;
  result.params.mu = hp.mu;
  result.params.fairness_weighting = hp.fairness_weighting;
  result.params.admm = hp.admm;
  result.params.max_outer_iter = hp.max_outer_iter;
  result.params.grad_tol = hp.grad_tol;

  TrainDiagnostics& diag = result.diagnostics;
  diag.iterations = pg.iterations;
  diag.evaluations = pg.evaluations;
  diag.converged = pg.converged;
  diag.line_search_failed = pg.line_search_failed;
  diag.projected_grad_norm = pg.projected_grad_norm;
  for (const internal::AcceptedStep& step : pg.steps) {
    diag.accepted_steps.emplace_back(step.value_before / n,
                                     step.value_after / n);
  }
  diag.admm_iterations = admm_iterations;

  double final_value = 0.5 * hp.gamma * n * theta.squaredNorm();
  for (int i = 0; i < n; ++i) {
    const Vector q = segment(pg.x, i);
    final_value += queries[i].committed.value + 0.5 * hp.mu * q.squaredNorm();
    result.beliefs.emplace_back(q);
    result.p_star.push_back(
        DoublyStochasticMatrix::FromMatrix(queries[i].committed.p));
  }
  diag.final_objective = final_value / n;
  return result;
}

std::vector<int> FoldSizes(int num_queries, int folds) {
  if (folds < 2) throw InvalidInputError("need at least two folds");
  if (num_queries < folds) {
    throw InvalidInputError("dataset has fewer queries than folds");
  }
  std::vector<int> sizes(folds, num_queries / folds);
  for (int k = 0; k < num_queries % folds; ++k) ++sizes[k];
  return sizes;
}

CrossValidationResult CrossValidate(const std::vector<RankingProblem>& dataset,
                                    const std::vector<double>& gamma_grid,
                                    const std::vector<double>& mu_grid,
                                    int folds, const Hyperparams& base) {
  if (gamma_grid.empty() || mu_grid.empty()) {
    throw InvalidInputError("CrossValidate: empty hyperparameter grid");
  }
  const std::vector<int> sizes =
      FoldSizes(static_cast<int>(dataset.size()), folds);

  CrossValidationResult result;
  result.scores.assign(gamma_grid.size() * mu_grid.size(), 0.0);
  int start = 0;
  for (int fold = 0; fold < folds; ++fold) {
    const int end = start + sizes[fold];
    std::vector<RankingProblem> train;
    std::vector<QueryItems> held_out;
    std::vector<const Vector*> labels;
    for (int i = 0; i < static_cast<int>(dataset.size()); ++i) {
      if (i >= start && i < end) {
        held_out.push_back(dataset[i].Unlabeled());
        labels.push_back(&dataset[i].relevance);
      } else {
        train.push_back(dataset[i]);
      }
    }
    for (size_t g = 0; g < gamma_grid.size(); ++g) {
      for (size_t u = 0; u < mu_grid.size(); ++u) {
        Hyperparams hp = base;
        hp.gamma = gamma_grid[g];
        hp.mu = mu_grid[u];
        const TrainResult trained = Train(train, hp);
        const std::vector<InferenceResult> inferred =
            InferBatch(held_out, trained.params);
        double ndcg_sum = 0.0;
        for (size_t i = 0; i < inferred.size(); ++i) {
          ndcg_sum += Ndcg(*labels[i], inferred[i].ranking);
        }
        result.scores[g * mu_grid.size() + u] += ndcg_sum;
      }
    }
    start = end;
  }
  for (double& score : result.scores) score /= static_cast<double>(dataset.size());

  int best = -1;
  for (size_t g = 0; g < gamma_grid.size(); ++g) {
    for (size_t u = 0; u < mu_grid.size(); ++u) {
      const int idx = static_cast<int>(g * mu_grid.size() + u);
      if (best < 0) {
        best = idx;
        continue;
      }
      const double score = result.scores[idx];
      const double best_score = result.scores[best];
      const double best_gamma = gamma_grid[best / mu_grid.size()];
      const double best_mu = mu_grid[best % mu_grid.size()];
      const bool better =
          score > best_score ||
          (score == best_score &&
           (gamma_grid[g] < best_gamma ||
            (gamma_grid[g] == best_gamma && mu_grid[u] < best_mu)));
      if (better) best = idx;
    }
  }
  result.gamma = gamma_grid[best / mu_grid.size()];
  result.mu = mu_grid[best % mu_grid.size()];
  return result;
}

}  // namespace fairrank
