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

#include "fairrank/numkernels.h"

#include <gtest/gtest.h>

#include <map>
#include <random>
#include <vector>

#include "test_util.h"

namespace fairrank {
namespace {

using testing::RandomDoublyStochastic;
using testing::RandomMatrix;
using testing::RandomVector;

TEST(SimplexProjection, MatchesBisectionOracle) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const Vector x = RandomVector(1 + trial % 9, rng, -3.0, 3.0);
    const Vector p = ProjectOntoSimplex(x);
    const Vector oracle = testing::SimplexByBisection(x);
    EXPECT_LT((p - oracle).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(p.sum(), 1.0, 1e-12);
    EXPECT_GE(p.minCoeff(), 0.0);
  }
}

TEST(SimplexProjection, MatchesSortThresholdOracleExactly) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 200; ++trial) {
    const Vector x = RandomVector(1 + trial % 12, rng, -2.0, 2.0);
    EXPECT_EQ(ProjectOntoSimplex(x), testing::SimplexSortThreshold(x));
  }
}

TEST(SimplexProjection, KnownValues) {
  EXPECT_TRUE(ProjectOntoSimplex(Vector::Constant(4, 0.25))
                  .isApprox(Vector::Constant(4, 0.25)));
  Vector x(3);
  x << 2.0, 0.0, 0.0;
  Vector expected(3);
  expected << 1.0, 0.0, 0.0;
  EXPECT_TRUE(ProjectOntoSimplex(x).isApprox(expected));
  Vector y(2);
  y << 0.5, 0.1;
  Vector ey(2);
  ey << 0.7, 0.3;
  EXPECT_LT((ProjectOntoSimplex(y) - ey).norm(), 1e-15);
}

TEST(SimplexProjection, RejectsBadInput) {
  EXPECT_THROW(ProjectOntoSimplex(Vector()), InvalidInputError);
  Vector x(2);
  x << 1.0, std::nan("");
  EXPECT_THROW(ProjectOntoSimplex(x), InvalidInputError);
}

TEST(DsProjection, KnownTwoByTwo) {
  Matrix r(2, 2);
  r << 2.0, 0.0, 0.0, 2.0;
  EXPECT_TRUE(ProjectDoublyStochastic(r).matrix().isApprox(
      Matrix::Identity(2, 2), 1e-6));
}

TEST(DsProjection, MatchesTwoByTwoClosedForm) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix r = RandomMatrix(2, 2, rng, -2.0, 2.0);
    const Matrix p = ProjectDoublyStochastic(r).matrix();
    EXPECT_LT((p - testing::DsProject2x2(r)).cwiseAbs().maxCoeff(), 1e-4);
  }
}

TEST(DsProjection, MatchesThreeByThreeActiveSetOracle) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix r = RandomMatrix(3, 3, rng, -1.5, 1.5);
    const Matrix p = ProjectDoublyStochastic(r).matrix();
    EXPECT_LT((p - testing::DsProject3x3(r)).cwiseAbs().maxCoeff(), 1e-4)
        << "trial " << trial;
  }
}

TEST(DsProjection, FixedPointOnFeasibleInput) {
  std::mt19937_64 rng(14);
  for (int m : {2, 4, 7}) {
    const Matrix p0 = RandomDoublyStochastic(m, 3, rng);
    EXPECT_LT((ProjectDoublyStochastic(p0).matrix() - p0).cwiseAbs().maxCoeff(),
              1e-6);
  }
}

TEST(DsProjection, OutputIsFeasibleAndOptimalAgainstVertices) {
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 30; ++trial) {
    const int m = 2 + trial % 8;
    const Matrix r = RandomMatrix(m, m, rng, -2.0, 2.0);
    const Matrix p = ProjectDoublyStochastic(r).matrix();
    EXPECT_LE(MaxMarginalError(p), 1e-6);
    EXPECT_GE(p.minCoeff(), -1e-9);
    // Optimality: <R - P, Q - P> <= 0 for every feasible Q, in particular
    // for random permutation matrices.
    for (int k = 0; k < 20; ++k) {
      const Matrix q = RandomDoublyStochastic(m, 1, rng);
      EXPECT_LE(((r - p).array() * (q - p).array()).sum(), 1e-4);
    }
  }
}

TEST(DsProjection, WarmStartGivesSameAnswer) {
  std::mt19937_64 rng(16);
  const Matrix r1 = RandomMatrix(6, 6, rng, -3.0, 3.0);
  const Matrix r2 = r1 + 0.1 * RandomMatrix(6, 6, rng);
  const AdmmResult first = RunDsProjection(r1);
  const AdmmResult cold = RunDsProjection(r2);
  const AdmmResult warm = RunDsProjection(r2, {}, &first.state);
  ASSERT_TRUE(cold.converged && warm.converged);
  EXPECT_LT((cold.projection - warm.projection).cwiseAbs().maxCoeff(), 1e-4);
}

TEST(DsProjection, IterationCapRaisesConvergenceError) {
  std::mt19937_64 rng(17);
  const Matrix r = RandomMatrix(8, 8, rng, -20.0, 20.0);
  AdmmOptions options;
  options.max_iter = 1;
  EXPECT_THROW(ProjectDoublyStochastic(r, options), ConvergenceError);
}

TEST(Hungarian, MatchesBruteForce) {
  std::mt19937_64 rng(18);
  for (int trial = 0; trial < 200; ++trial) {
    const int m = 1 + trial % 6;
    const Matrix score = RandomMatrix(m, m, rng);
    EXPECT_EQ(HungarianMax(score).positions(),
              testing::BruteForceAssignment(score));
  }
}

TEST(Hungarian, TiesGiveIdentity) {
  EXPECT_EQ(HungarianMax(Matrix::Constant(5, 5, 0.2)), Permutation::Identity(5));
}

TEST(Hungarian, IntegerScoresMatchBruteForceValue) {
  std::mt19937_64 rng(19);
  std::uniform_int_distribution<int> d(0, 3);
  for (int trial = 0; trial < 100; ++trial) {
    const int m = 2 + trial % 5;
    Matrix score(m, m);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) score(i, j) = d(rng);
    }
    EXPECT_EQ(HungarianMax(score).positions(),
              testing::BruteForceAssignment(score));
  }
}

TEST(Bvn, ReconstructsAndNormalizes) {
  std::mt19937_64 rng(20);
  for (int trial = 0; trial < 50; ++trial) {
    const int m = 2 + trial % 8;
    const Matrix p = RandomDoublyStochastic(m, 1 + trial % 6, rng);
    const BvnDecomposition d = BvnDecompose(p);
    double total = 0.0;
    for (const auto& term : d.terms) {
      EXPECT_GT(term.weight, 0.0);
      total += term.weight;
    }
    EXPECT_NEAR(total, 1.0, 1e-8);
    EXPECT_LT((d.Reconstruct() - p).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_LE(static_cast<int>(d.terms.size()), (m - 1) * (m - 1) + 1);
  }
}

TEST(Bvn, ProjectedMatricesDecompose) {
  std::mt19937_64 rng(21);
  const Matrix r = RandomMatrix(10, 10, rng, -1.0, 1.0);
  const DoublyStochasticMatrix p = ProjectDoublyStochastic(r);
  const BvnDecomposition d = BvnDecompose(p);
  EXPECT_LT((d.Reconstruct() - p.matrix()).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Bvn, RejectsInfeasible) {
  EXPECT_THROW(BvnDecompose(Matrix::Constant(3, 3, 0.5)), InvalidInputError);
}

TEST(Bvn, SamplingFrequenciesMatchP) {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix p = RandomDoublyStochastic(4, 5, rng);
    const BvnDecomposition d = BvnDecompose(p);
    BvnSampler sampler(d, 100 + trial);
    Matrix counts = Matrix::Zero(4, 4);
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) counts += sampler.Next().ToMatrix();
    EXPECT_LT((counts / draws - p).cwiseAbs().maxCoeff(), 0.01);
  }
}

TEST(Bvn, SamplingIsSeedDeterministic) {
  std::mt19937_64 rng(23);
  const BvnDecomposition d = BvnDecompose(RandomDoublyStochastic(5, 4, rng));
  EXPECT_EQ(SampleBvn(d, 5), SampleBvn(d, 5));
}

}  // namespace
}  // namespace fairrank
