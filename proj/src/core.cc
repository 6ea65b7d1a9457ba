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

#include "fairrank/core.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace fairrank {

void RankingProblem::Validate() const {
  const int m = size();
  if (relevance.size() != m || static_cast<int>(groups.size()) != m) {
    throw InvalidInputError("RankingProblem: features, relevance and groups "
                            "must have the same number of items");
  }
  for (int j = 0; j < m; ++j) {
    if (relevance[j] != 0.0 && relevance[j] != 1.0) {
      throw InvalidInputError("RankingProblem: relevance must be 0 or 1");
    }
  }
  if (!features.allFinite()) {
    throw InvalidInputError("RankingProblem: non-finite feature value");
  }
}

PositionBias::PositionBias(int num_positions) : values_(num_positions) {
  if (num_positions < 1) {
    throw InvalidInputError("PositionBias: need at least one position");
  }
  for (int k = 0; k < num_positions; ++k) {
    values_[k] = 1.0 / std::log2(2.0 + k);
  }
}

Permutation Permutation::FromPositions(std::vector<int> positions) {
  const int m = static_cast<int>(positions.size());
  std::vector<bool> seen(m, false);
  for (int p : positions) {
    if (p < 1 || p > m || seen[p - 1]) {
      throw InvalidInputError("Permutation: positions must be a bijection on "
                              "1.." + std::to_string(m));
    }
    seen[p - 1] = true;
  }
  return Permutation(std::move(positions));
}

Permutation Permutation::FromOrder(const std::vector<int>& order) {
  const int m = static_cast<int>(order.size());
  std::vector<int> positions(m, 0);
  for (int r = 0; r < m; ++r) {
    if (order[r] < 0 || order[r] >= m) {
      throw InvalidInputError("Permutation: item index out of range");
    }
    positions[order[r]] = r + 1;
  }
  return FromPositions(std::move(positions));
}

Permutation Permutation::Identity(int size) {
  std::vector<int> positions(size);
  for (int j = 0; j < size; ++j) positions[j] = j + 1;
  return Permutation(std::move(positions));
}

std::vector<int> Permutation::Order() const {
  std::vector<int> order(positions_.size());
  for (int j = 0; j < size(); ++j) order[positions_[j] - 1] = j;
  return order;
}

Matrix Permutation::ToMatrix() const {
  Matrix m = Matrix::Zero(size(), size());
  for (int j = 0; j < size(); ++j) m(j, positions_[j] - 1) = 1.0;
  return m;
}

double MaxMarginalError(const Matrix& m) {
  const double rows = (m.rowwise().sum().array() - 1.0).abs().maxCoeff();
  const double cols = (m.colwise().sum().array() - 1.0).abs().maxCoeff();
  return std::max(rows, cols);
}

DoublyStochasticMatrix DoublyStochasticMatrix::FromMatrix(
    Matrix entries, double marginal_tolerance) {
  if (entries.rows() != entries.cols() || entries.rows() == 0) {
    throw InvalidInputError("DoublyStochasticMatrix: must be square, non-empty");
  }
  if (!entries.allFinite()) {
    throw InvalidInputError("DoublyStochasticMatrix: non-finite entry");
  }
  if (entries.minCoeff() < -kEntryTolerance ||
      entries.maxCoeff() > 1.0 + kEntryTolerance) {
    throw InvalidInputError("DoublyStochasticMatrix: entry outside [0, 1]");
  }
  entries = entries.cwiseMax(0.0).cwiseMin(1.0);
  const double err = fairrank::MaxMarginalError(entries);
  if (err > marginal_tolerance) {
    throw InvalidInputError(
        "DoublyStochasticMatrix: marginal off by " + std::to_string(err));
  }
  return DoublyStochasticMatrix(std::move(entries));
}

DoublyStochasticMatrix DoublyStochasticMatrix::FromPermutation(
    const Permutation& ranking) {
  return DoublyStochasticMatrix(ranking.ToMatrix());
}

DoublyStochasticMatrix DoublyStochasticMatrix::Uniform(int size) {
  return DoublyStochasticMatrix(Matrix::Constant(size, size, 1.0 / size));
}

double DoublyStochasticMatrix::MaxMarginalError() const {
  return fairrank::MaxMarginalError(entries_);
}

AdversaryBelief::AdversaryBelief(Vector q) : q_(std::move(q)) {
  for (int j = 0; j < q_.size(); ++j) {
    if (!(q_[j] >= 0.0 && q_[j] <= 1.0)) {
      throw InvalidInputError("AdversaryBelief: entries must lie in [0, 1]");
    }
  }
}

void ModelParams::Validate() const {
  if (!(gamma > 0.0) || !(mu > 0.0) || !(lambda >= 0.0)) {
    throw InvalidInputError(
        "ModelParams: need gamma > 0, mu > 0 and lambda >= 0");
  }
  if (!(admm.rho > 0.0) || admm.max_iter < 1) {
    throw InvalidInputError("ModelParams: invalid ADMM settings");
  }
}

uint64_t DeriveSeed(uint64_t base, uint64_t stream) {
  uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double Dcg(const Vector& relevance, const Permutation& ranking) {
  if (relevance.size() != ranking.size()) {
    throw InvalidInputError("Dcg: relevance and ranking lengths differ");
  }
  double dcg = 0.0;
  for (int j = 0; j < ranking.size(); ++j) {
    dcg += (std::exp2(relevance[j]) - 1.0) /
           std::log2(1.0 + ranking.position(j));
  }
  return dcg;
}

double Ndcg(const Vector& relevance, const Permutation& ranking) {
  const double dcg = Dcg(relevance, ranking);
  std::vector<int> ideal(relevance.size());
  for (int j = 0; j < relevance.size(); ++j) ideal[j] = j;
  std::stable_sort(ideal.begin(), ideal.end(), [&](int a, int b) {
    return relevance[a] > relevance[b];
  });
  const double ideal_dcg = Dcg(relevance, Permutation::FromOrder(ideal));
  if (ideal_dcg == 0.0) return 0.0;
  return dcg / ideal_dcg;
}

namespace {

// Mean exposure of the items carrying `label`; nullopt if there are none.
std::optional<double> GroupExposure(const Matrix& p,
                                    const std::vector<int>& groups, int label,
                                    const Vector& item_exposure) {
  double total = 0.0;
  int count = 0;
  for (int j = 0; j < p.rows(); ++j) {
    if (groups[j] != label) continue;
    total += item_exposure[j];
    ++count;
  }
  if (count == 0) return std::nullopt;
  return total / count;
}

}  // namespace

std::optional<double> DpViolation(const DoublyStochasticMatrix& ranking,
                                  const std::vector<int>& groups,
                                  const PositionBias& bias) {
  if (static_cast<int>(groups.size()) != ranking.size() ||
      bias.size() != ranking.size()) {
    throw InvalidInputError("DpViolation: dimension mismatch");
  }
  const Vector item_exposure = ranking.matrix() * bias.values();
  const auto g0 = GroupExposure(ranking.matrix(), groups, 0, item_exposure);
  const auto g1 = GroupExposure(ranking.matrix(), groups, 1, item_exposure);
  if (!g0 || !g1) return std::nullopt;
  return std::abs(*g0 - *g1);
}

std::optional<double> DpViolation(const Permutation& ranking,
                                  const std::vector<int>& groups,
                                  const PositionBias& bias) {
  return DpViolation(DoublyStochasticMatrix::FromPermutation(ranking), groups,
                     bias);
}

double ExpectedUtility(const DoublyStochasticMatrix& ranking,
                       const AdversaryBelief& belief,
                       const PositionBias& bias) {
  if (belief.size() != ranking.size() || bias.size() != ranking.size()) {
    throw InvalidInputError("ExpectedUtility: dimension mismatch");
  }
  return belief.values().dot(ranking.matrix() * bias.values());
}

}  // namespace fairrank
