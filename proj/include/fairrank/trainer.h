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

// Training of the robust fair ranker.
//
// The ranker P (doubly stochastic, per query) maximizes expected utility minus
// a fairness penalty against an adversary q in [0, 1]^M that minimizes it while
// matching the training feature moments through dual weights theta. Training
// minimizes over all adversary beliefs
//
//   J(q) = 1/N sum_i [ max_P q_i^T P v - lambda |f_i^T P v| - mu/2 ||P||_F^2
//                      - <q_i - u_i, X_i theta*> + mu/2 ||q_i||^2 ]
//          - gamma/2 ||theta*||^2,
//
// where theta* = -1/(gamma N) sum_i X_i^T (q_i - u_i) maximizes the bracket
// over theta. Writing lambda |f^T P v| as max over |t| <= lambda of -t f^T P v
// turns the inner problem into a saddle whose solution is the projection of
// (q + t f) v^T / mu for the multiplier t that zeroes f^T P v, or t = +-lambda
// when no such t exists. SolvePStar exposes the fixed-multiplier projection.

#ifndef FAIRRANK_TRAINER_H_
#define FAIRRANK_TRAINER_H_

#include <utility>
#include <vector>

#include "fairrank/core.h"
#include "fairrank/fairness.h"
#include "fairrank/numkernels.h"

namespace fairrank {

struct Hyperparams {
  double lambda = 0.0;
  double gamma = 1.0;
  double mu = 1.0;
  FairnessWeighting fairness_weighting = FairnessWeighting::kUniform;
  AdmmOptions admm;
  int max_outer_iter = 300;
  double grad_tol = 1e-4;
  // Armijo backtracking along the projection arc.
  double armijo_c = 1e-4;
  double backtrack = 0.5;
  int max_backtracks = 40;
  double initial_step = 1.0;

  void Validate() const;
};

struct TrainDiagnostics {
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  bool line_search_failed = false;
  double projected_grad_norm = 0.0;
  // Objective before and after every accepted step, both measured with the
  // fairness vectors of that iteration.
  std::vector<std::pair<double, double>> accepted_steps;
  double final_objective = 0.0;
  long admm_iterations = 0;
};

struct TrainResult {
  ModelParams params;
  TrainDiagnostics diagnostics;
  std::vector<AdversaryBelief> beliefs;
  std::vector<DoublyStochasticMatrix> p_star;
};

// theta*_l = -1/(gamma N) sum_i <q_i - u_i, X_i[:, l]>.
// Throws InvalidInputError on an empty dataset or mismatched sizes.
Vector ThetaStar(const std::vector<Vector>& beliefs,
                 const std::vector<RankingProblem>& dataset, double gamma);

// argmax_{P doubly stochastic} q^T P v + lambda f^T P v - mu/2 ||P||_F^2,
// i.e. the projection of (q + lambda f) v^T / mu. Throws ConvergenceError if
// the projection does not converge.
DoublyStochasticMatrix SolvePStar(const Vector& q, const Vector& f,
                                  const PositionBias& bias, double lambda,
                                  double mu, const AdmmOptions& admm = {});

struct QObjective {
  double value = 0.0;
  Vector grad;
  DoublyStochasticMatrix p_star;
};

// Per-query bracket of J and its gradient in q (by the envelope theorem at
// P*, with theta and f held fixed):
//   value = q^T P* v - <q - u, X theta> + lambda f^T P* v - mu/2 ||P*||^2
//           + mu/2 ||q||^2
//   grad  = P* v - X theta + mu q
// mu must be positive for P* to be defined.
QObjective QObjectiveGrad(const Vector& q, const RankingProblem& problem,
                          const Vector& theta, const Vector& f,
                          const PositionBias& bias, double lambda, double mu,
                          const AdmmOptions& admm = {});

// Alternates fairness-vector refresh, per-query P* solves, closed-form theta*
// and one projected descent step on every q, starting from q = 0.5. Stops on
// a projected-gradient infinity norm below grad_tol or after max_outer_iter
// steps; in the latter case the best iterate is returned and
// diagnostics.converged is false. Throws InvalidInputError on an empty or
// ragged dataset and std::runtime_error on a non-finite objective.
TrainResult Train(const std::vector<RankingProblem>& dataset,
                  const Hyperparams& hyperparams);

struct CrossValidationResult {
  double gamma = 0.0;
  double mu = 0.0;
  // Mean held-out NDCG for every (gamma, mu) pair, gamma-major.
  std::vector<double> scores;
};

// Query-level k-fold selection of (gamma, mu) by mean held-out NDCG of
// deterministic inference. Fold f holds a contiguous block of queries; the
// first N mod k folds get one extra query. Ties go to the smaller gamma, then
// the smaller mu. `base` supplies lambda and solver settings.
CrossValidationResult CrossValidate(const std::vector<RankingProblem>& dataset,
                                    const std::vector<double>& gamma_grid,
                                    const std::vector<double>& mu_grid,
                                    int folds, const Hyperparams& base);

// Sizes of the k query folds.
std::vector<int> FoldSizes(int num_queries, int folds);

}  // namespace fairrank

#endif  // FAIRRANK_TRAINER_H_
