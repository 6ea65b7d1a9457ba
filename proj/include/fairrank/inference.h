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

// Test-time ranking. With theta frozen, the adversary minimizes
//   max_P q^T P v - lambda |f^T P v| - mu/2 ||P||^2 - <q, X theta>
//   + mu/2 ||q||^2
// over q in [0, 1]^M, independently per query. The converged P* is turned
// into a ranking by maximum-weight assignment or by Birkhoff sampling.

#ifndef FAIRRANK_INFERENCE_H_
#define FAIRRANK_INFERENCE_H_

#include <cstdint>
#include <vector>

#include "fairrank/core.h"

namespace fairrank {

struct InferenceDiagnostics {
  int iterations = 0;
  bool converged = false;
  double projected_grad_norm = 0.0;
  long admm_iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
};

struct InferenceResult {
  DoublyStochasticMatrix p_star;
  Permutation ranking;
  AdversaryBelief adversary_belief;
  InferenceDiagnostics diagnostics;
};

// Never reads relevance: the input type has none. Non-convergence of the
// q-minimization is reported through diagnostics.converged.
InferenceResult Infer(const QueryItems& query, const ModelParams& params);

// Per-query Infer, results in input order.
std::vector<InferenceResult> InferBatch(const std::vector<QueryItems>& queries,
                                        const ModelParams& params);

// The assignment maximizing total probability mass sum_j P[j, pi_j].
Permutation RankDeterministic(const DoublyStochasticMatrix& p);

// A permutation drawn from the Birkhoff-von Neumann decomposition of P.
Permutation RankStochastic(const DoublyStochasticMatrix& p, uint64_t seed);

}  // namespace fairrank

#endif  // FAIRRANK_INFERENCE_H_
