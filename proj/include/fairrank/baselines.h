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

// Reference rankers run through the same harness as the robust model: a
// ridge regression whose predictions are re-ranked under a parity penalty,
// and a uniformly random ranker.

#ifndef FAIRRANK_BASELINES_H_
#define FAIRRANK_BASELINES_H_

#include <cstdint>
#include <vector>

#include "fairrank/core.h"
#include "fairrank/inference.h"

namespace fairrank {

struct RegressionModel {
  Vector weights;
  double intercept = 0.0;
  double ridge = 0.0;

  Vector Predict(const Matrix& features) const {
    return (features * weights).array() + intercept;
  }
};

// Least squares of relevance on features over every item of every query,
// with ridge * ||w||^2 added (the intercept is not penalized). Throws
// InvalidInputError for an empty set, a negative ridge, or a singular system
// when ridge is zero.
RegressionModel RidgeFit(const std::vector<RankingProblem>& problems,
                         double ridge);

inline constexpr double kPostProcessSmoothing = 1e-2;

// Projects (u + lambda f(u)) v^T / mu onto the doubly-stochastic matrices,
// where u is the prediction clipped to [0, 1], then ranks by maximum-weight
// assignment. The returned adversary_belief holds the clipped predictions.
InferenceResult PostProcessRank(const Vector& predicted,
                                const std::vector<int>& groups, double lambda,
                                double mu = kPostProcessSmoothing,
                                const AdmmOptions& admm = {});

// Uniform over the M! permutations.
Permutation RandomRank(int num_items, uint64_t seed);

}  // namespace fairrank

#endif  // FAIRRANK_BASELINES_H_
