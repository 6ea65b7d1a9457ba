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

#include "fairrank/baselines.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "fairrank/fairness.h"
#include "fairrank/numkernels.h"

namespace fairrank {

RegressionModel RidgeFit(const std::vector<RankingProblem>& problems,
                         double ridge) {
  if (problems.empty()) {
    throw InvalidInputError("RidgeFit: need at least one query");
  }
  if (!(ridge >= 0.0)) {
    throw InvalidInputError("RidgeFit: ridge must be non-negative");
  }
  const int l = problems.front().num_features();
  long n = 0;
  Vector feature_sum = Vector::Zero(l);
  double target_sum = 0.0;
  for (const auto& p : problems) {
    if (p.num_features() != l) {
      throw InvalidInputError("RidgeFit: queries disagree on feature count");
    }
    n += p.size();
    feature_sum += p.features.colwise().sum().transpose();
    target_sum += p.relevance.sum();
  }
  if (n == 0) throw InvalidInputError("RidgeFit: no items");
  const Vector x_mean = feature_sum / static_cast<double>(n);
  const double y_mean = target_sum / static_cast<double>(n);

  // Centering removes the intercept from the penalized system.
  Matrix gram = Matrix::Zero(l, l);
  Vector rhs = Vector::Zero(l);
  for (const auto& p : problems) {
    const Matrix xc = p.features.rowwise() - x_mean.transpose();
    gram.noalias() += xc.transpose() * xc;
    rhs.noalias() += xc.transpose() * (p.relevance.array() - y_mean).matrix();
  }
  gram.diagonal().array() += ridge;

  RegressionModel model;
  model.ridge = ridge;
  if (l == 0) {
    model.weights = Vector::Zero(0);
  } else {
    Eigen::LDLT<Matrix> ldlt(gram);
    const double scale = std::max(1.0, gram.diagonal().cwiseAbs().maxCoeff());
    const double min_pivot = ldlt.vectorD().cwiseAbs().minCoeff();
    if (ldlt.info() != Eigen::Success || min_pivot <= 1e-12 * scale) {
      throw InvalidInputError(
          "RidgeFit: normal equations are singular; use a positive ridge");
    }
    model.weights = ldlt.solve(rhs);
  }
  model.intercept = y_mean - x_mean.dot(model.weights);
  if (!model.weights.allFinite() || !std::isfinite(model.intercept)) {
    throw InvalidInputError("RidgeFit: non-finite solution");
  }
  return model;
}

InferenceResult PostProcessRank(const Vector& predicted,
                                const std::vector<int>& groups, double lambda,
                                double mu, const AdmmOptions& admm) {
  const int m = static_cast<int>(predicted.size());
  if (m == 0 || static_cast<int>(groups.size()) != m) {
    throw InvalidInputError("PostProcessRank: bad prediction or group sizes");
  }
  if (!predicted.allFinite()) {
    throw InvalidInputError("PostProcessRank: non-finite prediction");
  }
  if (!(lambda >= 0.0) || !(mu > 0.0)) {
    throw InvalidInputError("PostProcessRank: need lambda >= 0 and mu > 0");
  }
  const Vector u = predicted.cwiseMax(0.0).cwiseMin(1.0);
  const PositionBias bias(m);
  Vector scores = u;
  if (lambda > 0.0) scores += lambda * BuildFairnessVector(u, groups).f;
  const Matrix r = scores * bias.values().transpose() / mu;

  const AdmmResult projected = RunDsProjection(r, admm);
  if (!projected.converged) {
    throw ConvergenceError("PostProcessRank: projection did not converge",
                           projected.iterations, projected.primal_residual,
                           projected.dual_residual);
  }
  InferenceResult result;
  result.p_star = DoublyStochasticMatrix::FromMatrix(projected.projection);
  result.ranking = HungarianMax(result.p_star.matrix());
  result.adversary_belief = AdversaryBelief(u);
  result.diagnostics.converged = true;
  result.diagnostics.admm_iterations = projected.iterations;
  result.diagnostics.primal_residual = projected.primal_residual;
  result.diagnostics.dual_residual = projected.dual_residual;
  return result;
}

Permutation RandomRank(int num_items, uint64_t seed) {
  if (num_items < 1) {
    throw InvalidInputError("RandomRank: need at least one item");
  }
  std::vector<int> order(num_items);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  return Permutation::FromOrder(order);
}

}  // namespace fairrank
