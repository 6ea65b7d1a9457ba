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

#ifndef FAIRRANK_SRC_INNER_SOLVE_H_
#define FAIRRANK_SRC_INNER_SOLVE_H_

#include "fairrank/core.h"
#include "fairrank/numkernels.h"

namespace fairrank::internal {

struct InnerSolution {
  Matrix p;
  AdmmState state;
  // Weight t on f actually used: lambda for SolveInner, the balancing
  // multiplier for SolveBalancedInner.
  double multiplier = 0.0;
  // (q + t f)^T P v - mu/2 ||P||_F^2 at the returned P.
  double value = 0.0;
  int admm_iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
};

// The ranker's best response to q for a frozen fairness vector. Throws
// ConvergenceError when the projection hits its iteration cap.
InnerSolution SolveInner(const Vector& q, const Vector& f, const Vector& v,
                         double lambda, double mu, const AdmmOptions& admm,
                         const AdmmState* warm_start);

// Best response of a ranker that pays lambda |f^T P v| instead of the linear
// reward lambda f^T P v:
//   max_P q^T P v - lambda |f^T P v| - mu/2 ||P||^2
//     = max_P min_{|t| <= lambda} (q + t f)^T P v - mu/2 ||P||^2.
// f^T P(t) v is non-decreasing in t (P(t) is a projection of a matrix affine
// in t), so the saddle multiplier is the root of that gap clipped to
// [-lambda, lambda]. `warm` supplies both the ADMM state and a starting t.
InnerSolution SolveBalancedInner(const Vector& q, const Vector& f,
                                 const Vector& v, double lambda, double mu,
                                 const AdmmOptions& admm,
                                 const InnerSolution* warm);

}  // namespace fairrank::internal

#endif  // FAIRRANK_SRC_INNER_SOLVE_H_
