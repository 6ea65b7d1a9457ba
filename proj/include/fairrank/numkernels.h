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

// Numeric kernels behind the ranker: Euclidean projection onto the
// probability simplex, ADMM projection onto the Birkhoff polytope, maximum
// score linear assignment and Birkhoff-von Neumann decomposition.
//
// All functions are reentrant; none keeps state between calls.

#ifndef FAIRRANK_NUMKERNELS_H_
#define FAIRRANK_NUMKERNELS_H_

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "fairrank/core.h"

namespace fairrank {

// argmin_{p >= 0, sum p = 1} ||p - x||^2 by sorting and thresholding.
// Throws InvalidInputError on empty or non-finite input.
Vector ProjectOntoSimplex(const Vector& x);

// In-place variant used by the ADMM loop. `scratch` must hold at least
// x.size() doubles. Input is assumed finite.
void ProjectOntoSimplexInPlace(std::span<double> x, std::span<double> scratch);

// Iterates of the ADMM splitting P = S, with P constrained to have rows on the
// simplex and S columns on the simplex. W is the scaled dual variable.
struct AdmmState {
  Matrix p;
  Matrix s;
  Matrix w;
  double rho = 1.0;
  int iteration = 0;
};

struct AdmmResult {
  // (P + S) / 2 clipped at zero. Only guaranteed doubly stochastic when
  // `converged` is true.
  Matrix projection;
  AdmmState state;
  double primal_residual = 0.0;  // ||P - S||_F
  double dual_residual = 0.0;    // rho ||S^{t+1} - S^t||_F
  int iterations = 0;
  bool converged = false;
};

// Runs ADMM for argmin_{P doubly stochastic} ||P - R||_F^2. A previous state
// of the same size may be passed to warm start S, W and rho. Does not throw on
// non-convergence; check `converged`.
AdmmResult RunDsProjection(const Matrix& r, const AdmmOptions& options = {},
                           const AdmmState* warm_start = nullptr);

// Same as RunDsProjection but returns the projection directly and throws
// ConvergenceError (carrying the residuals) when max_iter is exhausted.
DoublyStochasticMatrix ProjectDoublyStochastic(const Matrix& r,
                                               const AdmmOptions& options = {});

// The permutation maximizing sum_j score(j, pi_j - 1). Among optimal
// assignments the lexicographically smallest position vector wins, so equal
// scores give the identity.
Permutation HungarianMax(const Matrix& score);

struct BvnTerm {
  double weight = 0.0;
  Permutation permutation;
};

struct BvnDecomposition {
  std::vector<BvnTerm> terms;

  // sum_i weight_i * permutation_matrix_i.
  Matrix Reconstruct() const;
};

// Greedy Birkhoff decomposition: pick a permutation on the support of the
// residual, subtract the smallest entry along it, repeat until the remaining
// mass falls below `tol`. Weights are normalized to sum to one.
BvnDecomposition BvnDecompose(const DoublyStochasticMatrix& p,
                              double tol = 1e-9);
// Checks feasibility to 1e-6 first; throws InvalidInputError otherwise.
BvnDecomposition BvnDecompose(const Matrix& p, double tol = 1e-9);

// Draws permutations with probability equal to their weight.
class BvnSampler {
 public:
  // Throws InvalidInputError on an empty decomposition.
  BvnSampler(const BvnDecomposition& decomposition, uint64_t seed);

  const Permutation& Next();

 private:
  const BvnDecomposition* decomposition_;
  std::vector<double> cumulative_;
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

// One draw from a sampler seeded with `seed`.
Permutation SampleBvn(const BvnDecomposition& decomposition, uint64_t seed);

}  // namespace fairrank

#endif  // FAIRRANK_NUMKERNELS_H_
