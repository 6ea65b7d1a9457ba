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

// Domain types shared by every module, plus the ranking utility and the
// evaluation metrics (DCG, NDCG, demographic-parity exposure gap, expected
// utility of a probabilistic ranking).

#ifndef FAIRRANK_CORE_H_
#define FAIRRANK_CORE_H_

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fairrank {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Raised when an argument violates a documented precondition.
class InvalidInputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised by iterative solvers that hit their iteration cap. Carries the last
// residuals so callers can log or decide to accept the iterate anyway.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, int iterations,
                   double primal_residual, double dual_residual)
      : std::runtime_error(what),
        iterations_(iterations),
        primal_residual_(primal_residual),
        dual_residual_(dual_residual) {}

  int iterations() const { return iterations_; }
  double primal_residual() const { return primal_residual_; }
  double dual_residual() const { return dual_residual_; }

 private:
  int iterations_;
  double primal_residual_;
  double dual_residual_;
};

// Items of one query without their relevance labels. Inference only ever
// sees this type.
struct QueryItems {
  Matrix features;          // M items x L features.
  std::vector<int> groups;  // Protected-group label per item.
  std::string query_id;

  int size() const { return static_cast<int>(features.rows()); }
};

// One labelled query: item features, binary relevance and group labels.
struct RankingProblem {
  Matrix features;          // M x L.
  Vector relevance;         // Entries in {0, 1}.
  std::vector<int> groups;  // Entries drawn from a finite label set.
  std::string query_id;

  int size() const { return static_cast<int>(features.rows()); }
  int num_features() const { return static_cast<int>(features.cols()); }

  QueryItems Unlabeled() const { return {features, groups, query_id}; }

  // Throws InvalidInputError on shape mismatch, non-binary relevance or
  // non-finite features.
  void Validate() const;
};

// Position discount v_k = 1 / log2(1 + k) for ranks k = 1..M.
class PositionBias {
 public:
  explicit PositionBias(int num_positions);

  const Vector& values() const { return values_; }
  int size() const { return static_cast<int>(values_.size()); }
  double operator[](int position_index) const { return values_[position_index]; }

  // Mean exposure over all positions, sum_k v_k / M.
  double MeanExposure() const { return values_.mean(); }

 private:
  Vector values_;
};

// A ranking. positions()[j] is the 1-based rank of item j.
class Permutation {
 public:
  Permutation() = default;

  // Throws InvalidInputError unless `positions` is a bijection on {1..M}.
  static Permutation FromPositions(std::vector<int> positions);
  // Item order[r] is placed at rank r + 1.
  static Permutation FromOrder(const std::vector<int>& order);
  static Permutation Identity(int size);

  int size() const { return static_cast<int>(positions_.size()); }
  int position(int item) const { return positions_[item]; }
  const std::vector<int>& positions() const { return positions_; }

  // Items listed from rank 1 downwards.
  std::vector<int> Order() const;
  // 0/1 matrix with entry (j, position(j) - 1) set.
  Matrix ToMatrix() const;

  friend bool operator==(const Permutation&, const Permutation&) = default;

 private:
  explicit Permutation(std::vector<int> positions)
      : positions_(std::move(positions)) {}

  std::vector<int> positions_;
};

// Entry (j, k) is the probability that item j is placed at rank k + 1.
class DoublyStochasticMatrix {
 public:
  static constexpr double kEntryTolerance = 1e-9;
  static constexpr double kMarginalTolerance = 1e-6;

  DoublyStochasticMatrix() = default;

  // Clips entries to [0, 1] and checks row and column sums. Throws
  // InvalidInputError if the input is not square, has an entry outside
  // [-kEntryTolerance, 1 + kEntryTolerance] or a marginal further than
  // `marginal_tolerance` from one.
  static DoublyStochasticMatrix FromMatrix(
      Matrix entries, double marginal_tolerance = kMarginalTolerance);
  static DoublyStochasticMatrix FromPermutation(const Permutation& ranking);
  static DoublyStochasticMatrix Uniform(int size);

  const Matrix& matrix() const { return entries_; }
  int size() const { return static_cast<int>(entries_.rows()); }
  double operator()(int item, int position) const {
    return entries_(item, position);
  }

  // Largest |row sum - 1| or |column sum - 1|.
  double MaxMarginalError() const;

 private:
  explicit DoublyStochasticMatrix(Matrix entries)
      : entries_(std::move(entries)) {}

  Matrix entries_;
};

// Max over rows and columns of |sum - 1| for an arbitrary square matrix.
double MaxMarginalError(const Matrix& m);

// The adversary's per-item relevance probabilities, each in [0, 1].
class AdversaryBelief {
 public:
  AdversaryBelief() = default;
  // Throws InvalidInputError if an entry lies outside [0, 1].
  explicit AdversaryBelief(Vector q);

  const Vector& values() const { return q_; }
  int size() const { return static_cast<int>(q_.size()); }

 private:
  Vector q_;
};

// ADMM settings for the doubly-stochastic projection.
struct AdmmOptions {
  double rho = 1.0;
  double tol_abs = 1e-6;
  double tol_rel = 1e-4;
  int max_iter = 5000;
  // The reported matrix must also have every marginal within this distance of
  // one before the iteration stops.
  double feasibility_tol = 1e-7;
  // Rescale rho every few iterations so the primal and dual residuals stay
  // within a factor of ten of each other.
  bool adaptive_rho = true;
};

// Item weights a_j inside a group's fairness vector. kRelevance scales them
// with the adversary's relevance belief, so items the ranker is expected to
// value count more; kUniform gives every member weight one, which makes the
// balanced quantity exactly the group exposure gap.
enum class FairnessWeighting { kUniform, kRelevance };

// Learned model: dual feature weights plus the penalties used at training.
struct ModelParams {
  Vector theta;
  double lambda = 0.0;  // Fairness penalty, >= 0.
  double gamma = 1.0;   // Regularization of theta, > 0.
  double mu = 1.0;      // Smoothing of P and q, > 0.
  FairnessWeighting fairness_weighting = FairnessWeighting::kUniform;
  AdmmOptions admm;
  int max_outer_iter = 300;
  double grad_tol = 1e-4;

  void Validate() const;
};

// SplitMix64 mix of (base, stream). Gives every query, fold and repeat its own
// reproducible random stream.
uint64_t DeriveSeed(uint64_t base, uint64_t stream);

// sum_j (2^rel_j - 1) / log2(1 + pi_j).
double Dcg(const Vector& relevance, const Permutation& ranking);

// DCG divided by the DCG of the ideal ordering; 0 when nothing is relevant.
double Ndcg(const Vector& relevance, const Permutation& ranking);

// |Exposure(G_0) - Exposure(G_1)| where group labels 0 and 1 are compared.
// Returns nullopt when either group is absent from the query.
std::optional<double> DpViolation(const DoublyStochasticMatrix& ranking,
                                  const std::vector<int>& groups,
                                  const PositionBias& bias);
std::optional<double> DpViolation(const Permutation& ranking,
                                  const std::vector<int>& groups,
                                  const PositionBias& bias);

// q^T P v.
double ExpectedUtility(const DoublyStochasticMatrix& ranking,
                       const AdversaryBelief& belief, const PositionBias& bias);

}  // namespace fairrank

#endif  // FAIRRANK_CORE_H_
