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

#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "fairrank/numkernels.h"
#include "test_util.h"

namespace fairrank {
namespace {

Vector Vec(std::initializer_list<double> xs) {
  Vector v(static_cast<int>(xs.size()));
  int i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

TEST(FairnessVector, WorkedExample) {
  const FairnessVector fv =
      BuildFairnessVector(AdversaryBelief(Vec({0.8, 0.2, 0.1, 0.1})),
                          {0, 0, 1, 1});
  EXPECT_TRUE(fv.active);
  EXPECT_EQ(fv.disadvantaged_group, 1);
  const Vector expected_a = Vec({1.6, 0.4, 1.0, 1.0});
  const Vector expected_f = Vec({-0.8, -0.2, 0.5, 0.5});
  EXPECT_LT((fv.group_weights - expected_a).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((fv.f - expected_f).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(fv.target_tau, PositionBias(4).MeanExposure(), 1e-15);
}

TEST(FairnessVector, SingleGroupIsInactive) {
  const FairnessVector fv =
      BuildFairnessVector(AdversaryBelief(Vec({0.3, 0.9})), {1, 1});
  EXPECT_FALSE(fv.active);
  EXPECT_EQ(fv.f, Vector::Zero(2));
}

TEST(FairnessVector, ZeroMassFallsBackToUnitWeights) {
  const FairnessVector fv =
      BuildFairnessVector(AdversaryBelief(Vec({0.0, 0.0, 1.0})), {0, 0, 1});
  EXPECT_EQ(fv.disadvantaged_group, 0);
  EXPECT_LT((fv.f - Vec({0.5, 0.5, -1.0})).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(FairnessVector, TieFavoursGroupZero) {
  const FairnessVector fv =
      BuildFairnessVector(AdversaryBelief(Vec({0.5, 0.5})), {1, 0});
  EXPECT_EQ(fv.disadvantaged_group, 0);
  EXPECT_GT(fv.f[1], 0.0);
  EXPECT_LT(fv.f[0], 0.0);
}

TEST(FairnessVector, RejectsLengthMismatch) {
  EXPECT_THROW(BuildFairnessVector(AdversaryBelief(Vec({0.5})), {0, 1}),
               InvalidInputError);
}

TEST(FairnessVector, GroupSumsAreSigned) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  for (int trial = 0; trial < 200; ++trial) {
    const int m = 2 + trial % 9;
    Vector q(m);
    std::vector<int> groups(m);
    for (int j = 0; j < m; ++j) {
      q[j] = u(rng);
      groups[j] = coin(rng) ? 1 : 0;
    }
    groups[0] = 0;
    groups[1] = 1;
    for (auto w : {FairnessWeighting::kRelevance, FairnessWeighting::kUniform}) {
      const FairnessVector fv = BuildFairnessVector(q, groups, w);
      double s0 = 0.0, s1 = 0.0;
      for (int j = 0; j < m; ++j) (groups[j] == 0 ? s0 : s1) += fv.f[j];
      const double sign0 = fv.disadvantaged_group == 0 ? 1.0 : -1.0;
      EXPECT_NEAR(s0, sign0, 1e-12);
      EXPECT_NEAR(s1, -sign0, 1e-12);
    }
  }
}

TEST(FairnessVector, UniformWeightsGiveSignedExposureGap) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int m = 6;
    const std::vector<int> groups = {0, 1, 0, 1, 1, 0};
    Vector q(m);
    for (int j = 0; j < m; ++j) q[j] = u(rng);
    const DoublyStochasticMatrix p = DoublyStochasticMatrix::FromMatrix(
        testing::RandomDoublyStochastic(m, 4, rng));
    const PositionBias bias(m);
    const FairnessVector fv =
        BuildFairnessVector(q, groups, FairnessWeighting::kUniform);
    const double gap = fv.f.dot(p.matrix() * bias.values());
    const int d = fv.disadvantaged_group;
    const double expected = Exposure(p, bias, GroupMembers(groups, d)) -
                            Exposure(p, bias, GroupMembers(groups, 1 - d));
    EXPECT_NEAR(gap, expected, 1e-12);
    EXPECT_NEAR(std::abs(gap), *DpViolation(p, groups, bias), 1e-12);
  }
}

TEST(Exposure, KnownValuesAndErrors) {
  const PositionBias bias(3);
  const auto p = DoublyStochasticMatrix::FromPermutation(
      Permutation::FromPositions({3, 1, 2}));
  EXPECT_NEAR(Exposure(p, bias, {0, 1}), (bias[2] + bias[0]) / 2.0, 1e-15);
  EXPECT_THROW(Exposure(p, bias, {}), InvalidInputError);
  EXPECT_THROW(Exposure(p, bias, {5}), InvalidInputError);
  EXPECT_EQ(GroupMembers({1, 0, 1}, 1), (std::vector<int>{0, 2}));
}

}  // namespace
}  // namespace fairrank
