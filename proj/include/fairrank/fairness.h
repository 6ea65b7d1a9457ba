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

#ifndef FAIRRANK_FAIRNESS_H_
#define FAIRRANK_FAIRNESS_H_

#include <vector>

#include "fairrank/core.h"

namespace fairrank {

// Signed per-item weights f such that f^T P v rewards exposure of the
// predicted-disadvantaged group and penalizes the other one.
//
// Items of group label 0 and 1 are compared. Within group s each item gets
// a_j = |G_s| q_j / sum_{i in G_s} q_i (so sum_{G_s} a_j = |G_s|), falling back
// to a_j = 1 when the group's q-mass is zero, and f_j = +-a_j / |G_s|. The
// group with the lower mean q gets the positive sign; on a tie group 0 does.
// With FairnessWeighting::kUniform every a_j is 1, so f^T P v is exactly the
// signed gap between the groups' mean exposures.
struct FairnessVector {
  Vector f;
  Vector group_weights;  // a_j; zero outside the compared groups.
  double target_tau = 0.0;
  // False when one of the groups is absent; f is then zero.
  bool active = false;
  int disadvantaged_group = -1;
};

// Average over `group` of sum_k P_jk v_k. Throws InvalidInputError on an
// empty group or an out-of-range index.
double Exposure(const DoublyStochasticMatrix& p, const PositionBias& bias,
                const std::vector<int>& group);

// Item indices carrying `label`.
std::vector<int> GroupMembers(const std::vector<int>& groups, int label);

FairnessVector BuildFairnessVector(
    const AdversaryBelief& q, const std::vector<int>& groups,
    FairnessWeighting weighting = FairnessWeighting::kRelevance);
// Unchecked variant for the solver's inner loops; q must lie in [0, 1].
FairnessVector BuildFairnessVector(
    const Vector& q, const std::vector<int>& groups,
    FairnessWeighting weighting = FairnessWeighting::kRelevance);

}  // namespace fairrank

#endif  // FAIRRANK_FAIRNESS_H_
