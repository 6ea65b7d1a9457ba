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

#include "fairrank/inference.h"

#include <utility>
#include <vector>

#include "fairrank/fairness.h"
#include "fairrank/numkernels.h"
#include "inner_solve.h"
#include "projected_gradient.h"

namespace fairrank {

InferenceResult Infer(const QueryItems& query, const ModelParams& params) {
  params.Validate();
  const int m = query.size();
  if (m == 0) throw InvalidInputError("Infer: query has no items");
  if (static_cast<int>(query.groups.size()) != m) {
    throw InvalidInputError("Infer: groups length differs from item count");
  }
  if (query.features.cols() != params.theta.size()) {
    throw InvalidInputError("Infer: feature count differs from theta");
  }
  if (!query.features.allFinite()) {
    throw InvalidInputError("Infer: non-finite feature value");
  }

  const PositionBias bias(m);
  const Vector& v = bias.values();
  const Vector score = query.features * params.theta;

  Vector f = Vector::Zero(m);
  bool fairness_built = false;
  internal::InnerSolution committed, trial;
  long admm_iterations = 0;

  AdmmOptions admm = params.admm;
  internal::BoxObjective objective;
  objective.refresh = [&](const Vector& q) {
    if (params.lambda == 0.0 && fairness_built) return false;
    Vector next = BuildFairnessVector(q, query.groups, params.fairness_weighting).f;
    const bool changed = !fairness_built || next != f;
    f = std::move(next);
    fairness_built = true;
    return changed;
  };
  objective.evaluate = [&](const Vector& q, Vector& grad) {
    trial = internal::SolveBalancedInner(q, f, v, params.lambda, params.mu,
                                         admm, &committed);
    admm_iterations += trial.admm_iterations;
    grad = trial.p * v - score + params.mu * q;
    return trial.value - q.dot(score) + 0.5 * params.mu * q.squaredNorm();
  };
  objective.commit = [&]() { std::swap(committed, trial); };
  objective.tighten = [&]() { return internal::TightenAdmm(admm); };

  internal::BoxMinimizerOptions options;
  options.max_iter = params.max_outer_iter;
  options.grad_tol = params.grad_tol;

  const internal::BoxMinimizerResult pg = internal::MinimizeOverUnitBox(
      Vector::Constant(m, 0.5), objective, options);

  InferenceResult result;
  result.p_star = DoublyStochasticMatrix::FromMatrix(std::move(committed.p));
  result.ranking = RankDeterministic(result.p_star);
  result.adversary_belief = AdversaryBelief(pg.x);
  result.diagnostics.iterations = pg.iterations;
  result.diagnostics.converged = pg.converged;
  result.diagnostics.projected_grad_norm = pg.projected_grad_norm;
  result.diagnostics.admm_iterations = admm_iterations;
  result.diagnostics.primal_residual = committed.primal_residual;
  result.diagnostics.dual_residual = committed.dual_residual;
  return result;
}

std::vector<InferenceResult> InferBatch(const std::vector<QueryItems>& queries,
                                        const ModelParams& params) {
  std::vector<InferenceResult> out;
  out.reserve(queries.size());
  for (const QueryItems& query : queries) out.push_back(Infer(query, params));
  return out;
}

Permutation RankDeterministic(const DoublyStochasticMatrix& p) {
  return HungarianMax(p.matrix());
}

Permutation RankStochastic(const DoublyStochasticMatrix& p, uint64_t seed) {
  return SampleBvn(BvnDecompose(p), seed);
}

}  // namespace fairrank
