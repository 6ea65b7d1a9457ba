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

#include "fairrank/fairness.h"

#include <vector>

namespace fairrank {

double Exposure(const DoublyStochasticMatrix& p, const PositionBias& bias,
                const std::vector<int>& group) {
  if (group.empty()) throw InvalidInputError("Exposure: empty group");
  if (bias.size() != p.size()) {
    throw InvalidInputError("Exposure: bias length differs from P");
  }
  double total = 0.0;
  for (int j : group) {
    if (j < 0 || j >= p.size()) {
      throw InvalidInputError("Exposure: item index out of range");
    }
    total += p.matrix().row(j).dot(bias.values());
  }
  return total / static_cast<double>(group.size());
}

std::vector<int> GroupMembers(const std::vector<int>& groups, int label) {
  std::vector<int> members;
  for (int j = 0; j < static_cast<int>(groups.size()); ++j) {
    if (groups[j] == label) members.push_back(j);
  }
  return members;
}

FairnessVector BuildFairnessVector(const Vector& q,
                                   const std::vector<int>& groups,
                                   FairnessWeighting weighting) {
  const int m = static_cast<int>(q.size());
  if (static_cast<int>(groups.size()) != m) {
    throw InvalidInputError("BuildFairnessVector: q and groups lengths differ");
  }
  FairnessVector out;
  out.f = Vector::Zero(m);
  out.group_weights = Vector::Zero(m);
  out.target_tau = m > 0 ? PositionBias(m).MeanExposure() : 0.0;

  const std::vector<int> members[2] = {GroupMembers(groups, 0),
                                       GroupMembers(groups, 1)};
  if (members[0].empty() || members[1].empty()) return out;

  double mass[2] = {0.0, 0.0};
  for (int s = 0; s < 2; ++s) {
    for (int j : members[s]) mass[s] += q[j];
  }
  const double mean0 = mass[0] / static_cast<double>(members[0].size());
  const double mean1 = mass[1] / static_cast<double>(members[1].size());
  out.disadvantaged_group = mean1 < mean0 ? 1 : 0;
  out.active = true;

  for (int s = 0; s < 2; ++s) {
    const double size = static_cast<double>(members[s].size());
    const double sign = s == out.disadvantaged_group ? 1.0 : -1.0;
    for (int j : members[s]) {
      const double a =
          weighting == FairnessWeighting::kRelevance && mass[s] > 0.0
              ? size * q[j] / mass[s]
              : 1.0;
      out.group_weights[j] = a;
      out.f[j] = sign * a / size;
    }
  }
  return out;
}

FairnessVector BuildFairnessVector(const AdversaryBelief& q,
                                   const std::vector<int>& groups,
                                   FairnessWeighting weighting) {
  return BuildFairnessVector(q.values(), groups, weighting);
}

}  // namespace fairrank
