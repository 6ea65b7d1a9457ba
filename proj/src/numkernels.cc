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

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

namespace fairrank {

void ProjectOntoSimplexInPlace(std::span<double> x, std::span<double> scratch) {
  const size_t n = x.size();
  std::copy(x.begin(), x.end(), scratch.begin());
  std::sort(scratch.begin(), scratch.begin() + n, std::greater<double>());

  // Largest k with u_k - (sum_{i<=k} u_i - 1) / k > 0 fixes the threshold.
  double cumsum = 0.0;
  double threshold = 0.0;
  for (size_t k = 0; k < n; ++k) {
    cumsum += scratch[k];
    const double candidate = (cumsum - 1.0) / static_cast<double>(k + 1);
    if (scratch[k] - candidate > 0.0) threshold = candidate;
  }
  for (double& xi : x) xi = std::max(xi - threshold, 0.0);
}

Vector ProjectOntoSimplex(const Vector& x) {
  if (x.size() == 0) throw InvalidInputError("ProjectOntoSimplex: empty input");
  if (!x.allFinite()) {
    throw InvalidInputError("ProjectOntoSimplex: non-finite input");
  }
  Vector out = x;
  std::vector<double> scratch(x.size());
  ProjectOntoSimplexInPlace(std::span<double>(out.data(), out.size()),
                            scratch);
  return out;
}

namespace {

// Rows of `x` onto the simplex. Eigen storage is column-major, so rows go
// through a buffer.
void ProjectRows(Matrix& x, std::vector<double>& row,
                 std::vector<double>& scratch) {
  const int m = static_cast<int>(x.cols());
  for (int j = 0; j < x.rows(); ++j) {
    for (int k = 0; k < m; ++k) row[k] = x(j, k);
    ProjectOntoSimplexInPlace(std::span<double>(row.data(), m), scratch);
    for (int k = 0; k < m; ++k) x(j, k) = row[k];
  }
}

void ProjectColumns(Matrix& x, std::vector<double>& scratch) {
  for (int k = 0; k < x.cols(); ++k) {
    ProjectOntoSimplexInPlace(std::span<double>(x.col(k).data(), x.rows()),
                              scratch);
  }
}

// Residual balancing: keep primal and dual residuals within a factor of ten.
constexpr int kRhoUpdateInterval = 10;
constexpr double kRhoBalance = 10.0;
constexpr double kRhoFactor = 2.0;
constexpr double kRhoRange = 1e4;

}  // namespace

AdmmResult RunDsProjection(const Matrix& r, const AdmmOptions& options,
                           const AdmmState* warm_start) {
  if (r.rows() != r.cols() || r.rows() == 0) {
    throw InvalidInputError("RunDsProjection: R must be square and non-empty");
  }
  if (!r.allFinite()) {
    throw InvalidInputError("RunDsProjection: R has non-finite entries");
  }
  if (!(options.rho > 0.0)) {
    throw InvalidInputError("RunDsProjection: rho must be positive");
  }
  const int m = static_cast<int>(r.rows());

  // Adding a constant to a row or a column of R shifts the objective by a
  // constant over the Birkhoff polytope, so double-centering R leaves the
  // projection unchanged and keeps the iterates well scaled.
  Matrix centered = r;
  centered.colwise() -= r.rowwise().mean();
  centered.rowwise() -= r.colwise().mean();
  centered.array() += r.mean() + 1.0 / m;

  AdmmResult result;
  AdmmState& st = result.state;

  // `centered` is the projection onto the affine hull {P1 = 1, P^T 1 = 1}.
  // When it is already nonnegative it is the answer.
  if (centered.minCoeff() >= 0.0) {
    st.p = centered;
    st.s = centered;
    st.w = Matrix::Zero(m, m);
    st.rho = warm_start != nullptr ? warm_start->rho : options.rho;
    st.iteration = warm_start != nullptr ? warm_start->iteration : 0;
    result.projection = std::move(centered);
    result.converged = true;
    return result;
  }

  if (warm_start != nullptr && warm_start->s.rows() == m &&
      warm_start->s.cols() == m) {
    st.s = warm_start->s;
    st.w = warm_start->w;
    st.rho = warm_start->rho;
  } else {
    st.s = Matrix::Constant(m, m, 1.0 / m);
    st.w = Matrix::Zero(m, m);
    st.rho = options.rho;
  }
  st.p = st.s;

  std::vector<double> row(m), scratch(m);
  Matrix s_prev(m, m);
  const double sqrt_n = static_cast<double>(m);  // sqrt of m * m entries.
  const double rho_min = options.rho / kRhoRange;
  const double rho_max = options.rho * kRhoRange;

  for (int t = 1; t <= options.max_iter; ++t) {
    const double rho = st.rho;
    st.p = (centered + rho * (st.s - st.w)) / (1.0 + rho);
    ProjectRows(st.p, row, scratch);

    s_prev = st.s;
    st.s = (centered + rho * (st.p + st.w)) / (1.0 + rho);
    ProjectColumns(st.s, scratch);

    st.w += st.p - st.s;
    ++st.iteration;

    result.iterations = t;
    result.primal_residual = (st.p - st.s).norm();
    result.dual_residual = rho * (st.s - s_prev).norm();
    const double eps_primal =
        sqrt_n * options.tol_abs +
        options.tol_rel * std::max(st.p.norm(), st.s.norm());
    const double eps_dual =
        sqrt_n * options.tol_abs + options.tol_rel * rho * st.w.norm();

    if (result.primal_residual <= eps_primal &&
        result.dual_residual <= eps_dual) {
      Matrix average = 0.5 * (st.p + st.s);
      if (MaxMarginalError(average) <= options.feasibility_tol) {
        result.projection = average.cwiseMax(0.0);
        result.converged = true;
        return result;
      }
    }

    if (options.adaptive_rho && t % kRhoUpdateInterval == 0) {
      if (result.primal_residual > kRhoBalance * result.dual_residual &&
          st.rho * kRhoFactor <= rho_max) {
        st.rho *= kRhoFactor;
        st.w /= kRhoFactor;
      } else if (result.dual_residual > kRhoBalance * result.primal_residual &&
                 st.rho / kRhoFactor >= rho_min) {
        st.rho /= kRhoFactor;
        st.w *= kRhoFactor;
      }
    }
  }
  result.projection = (0.5 * (st.p + st.s)).cwiseMax(0.0);
  return result;
}

DoublyStochasticMatrix ProjectDoublyStochastic(const Matrix& r,
                                               const AdmmOptions& options) {
  AdmmResult result = RunDsProjection(r, options);
  if (!result.converged) {
    throw ConvergenceError(
        "ProjectDoublyStochastic: no convergence after " +
            std::to_string(result.iterations) + " iterations",
        result.iterations, result.primal_residual, result.dual_residual);
  }
  return DoublyStochasticMatrix::FromMatrix(std::move(result.projection));
}

namespace {

// Minimum-cost assignment with dual potentials (shortest augmenting paths).
// On return row_of_col[k] is the row assigned to column k, and cost(j, k) -
// u[j] - v[k] >= 0 everywhere with equality on the assignment.
struct AssignmentDuals {
  std::vector<double> u;
  std::vector<double> v;
  std::vector<int> row_of_col;
};

AssignmentDuals SolveMinCostAssignment(const Matrix& cost) {
  const int n = static_cast<int>(cost.rows());
  constexpr double kInf = std::numeric_limits<double>::infinity();
  // 1-based internally; index 0 is the virtual source column.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> match(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const int i0 = match[j0];
      double delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  AssignmentDuals out;
  out.u.assign(u.begin() + 1, u.end());
  out.v.assign(v.begin() + 1, v.end());
  out.row_of_col.resize(n);
  for (int k = 1; k <= n; ++k) out.row_of_col[k - 1] = match[k] - 1;
  return out;
}

// Lexicographically smallest perfect matching inside the equality subgraph
// of an optimal dual. Every optimal assignment is complementary to every
// optimal dual, so this enumerates exactly the optimal assignments.
class TightMatcher {
 public:
  TightMatcher(std::vector<std::vector<bool>> tight, std::vector<int> col_of_row)
      : n_(static_cast<int>(tight.size())),
        tight_(std::move(tight)),
        col_of_row_(std::move(col_of_row)),
        row_of_col_(n_),
        locked_row_(n_, false),
        locked_col_(n_, false) {
    for (int j = 0; j < n_; ++j) row_of_col_[col_of_row_[j]] = j;
  }

  std::vector<int> Solve() {
    for (int j = 0; j < n_; ++j) {
      for (int k = 0; k < n_; ++k) {
        if (!tight_[j][k] || locked_col_[k]) continue;
        if (col_of_row_[j] == k || Reroute(j, k)) break;
      }
      locked_row_[j] = true;
      locked_col_[col_of_row_[j]] = true;
    }
    return col_of_row_;
  }

 private:
  // Moves row j onto column k, re-matching k's current owner through an
  // alternating path that ends at j's old column.
  bool Reroute(int j, int k) {
    const int freed = col_of_row_[j];
    const int displaced = row_of_col_[k];
    visited_.assign(n_, false);
    visited_[k] = true;
    excluded_row_ = j;
    if (!Augment(displaced, freed)) return false;
    col_of_row_[j] = k;
    row_of_col_[k] = j;
    return true;
  }

  bool Augment(int row, int target) {
    for (int c = 0; c < n_; ++c) {
      if (!tight_[row][c] || locked_col_[c] || visited_[c]) continue;
      visited_[c] = true;
      if (c == target) {
        col_of_row_[row] = c;
        row_of_col_[c] = row;
        return true;
      }
      const int owner = row_of_col_[c];
      if (owner == excluded_row_) continue;
      if (Augment(owner, target)) {
        col_of_row_[row] = c;
        row_of_col_[c] = row;
        return true;
      }
    }
    return false;
  }

  int n_;
  std::vector<std::vector<bool>> tight_;
  std::vector<int> col_of_row_;
  std::vector<int> row_of_col_;
  std::vector<bool> locked_row_;
  std::vector<bool> locked_col_;
  std::vector<bool> visited_;
  int excluded_row_ = -1;
};

}  // namespace

Permutation HungarianMax(const Matrix& score) {
  if (score.rows() != score.cols()) {
    throw InvalidInputError("HungarianMax: score matrix must be square");
  }
  if (!score.allFinite()) {
    throw InvalidInputError("HungarianMax: non-finite score");
  }
  const int n = static_cast<int>(score.rows());
  if (n == 0) return Permutation();

  const Matrix cost = -score;
  const AssignmentDuals duals = SolveMinCostAssignment(cost);
  const double tol = 1e-10 * std::max(1.0, score.cwiseAbs().maxCoeff());

  std::vector<std::vector<bool>> tight(n, std::vector<bool>(n, false));
  std::vector<int> col_of_row(n);
  for (int k = 0; k < n; ++k) col_of_row[duals.row_of_col[k]] = k;
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      tight[j][k] = cost(j, k) - duals.u[j] - duals.v[k] <= tol;
    }
    tight[j][col_of_row[j]] = true;
  }
  std::vector<int> cols = TightMatcher(std::move(tight), col_of_row).Solve();
  for (int& c : cols) c += 1;
  return Permutation::FromPositions(std::move(cols));
}

Matrix BvnDecomposition::Reconstruct() const {
  if (terms.empty()) return Matrix();
  const int m = terms.front().permutation.size();
  Matrix out = Matrix::Zero(m, m);
  for (const BvnTerm& term : terms) {
    out += term.weight * term.permutation.ToMatrix();
  }
  return out;
}

namespace {

constexpr double kSupportEps = 1e-13;

// Alternating row/column normalization. Brings a matrix that is doubly
// stochastic up to solver tolerance to machine precision without changing
// its support.
void Rebalance(Matrix& p) {
  for (int it = 0; it < 200; ++it) {
    if (MaxMarginalError(p) < 1e-14) return;
    p.array().colwise() /= p.rowwise().sum().array();
    p.array().rowwise() /= p.colwise().sum().array();
  }
}

}  // namespace

BvnDecomposition BvnDecompose(const DoublyStochasticMatrix& p, double tol) {
  const int m = p.size();
  Matrix residual = p.matrix();
  residual = (residual.array() < kSupportEps).select(0.0, residual);
  Rebalance(residual);

  BvnDecomposition out;
  double remaining = 1.0;
  const int max_terms = (m - 1) * (m - 1) + 1;
  while (remaining > tol && static_cast<int>(out.terms.size()) < max_terms) {
    const Matrix support =
        (residual.array() > kSupportEps).cast<double>().matrix();
    Permutation perm = HungarianMax(support);
    double weight = std::numeric_limits<double>::infinity();
    int argmin = -1;
    for (int j = 0; j < m; ++j) {
      const double entry = residual(j, perm.position(j) - 1);
      if (entry < weight) {
        weight = entry;
        argmin = j;
      }
    }
    if (!(weight > kSupportEps)) break;  // No permutation left on the support.
    for (int j = 0; j < m; ++j) {
      double& entry = residual(j, perm.position(j) - 1);
      entry = j == argmin ? 0.0 : entry - weight;
      if (entry < kSupportEps) entry = 0.0;
    }
    remaining -= weight;
    out.terms.push_back({weight, std::move(perm)});
  }

  double total = 0.0;
  for (const BvnTerm& term : out.terms) total += term.weight;
  for (BvnTerm& term : out.terms) term.weight /= total;
  return out;
}

BvnDecomposition BvnDecompose(const Matrix& p, double tol) {
  return BvnDecompose(DoublyStochasticMatrix::FromMatrix(p), tol);
}

BvnSampler::BvnSampler(const BvnDecomposition& decomposition, uint64_t seed)
    : decomposition_(&decomposition), engine_(seed) {
  if (decomposition.terms.empty()) {
    throw InvalidInputError("BvnSampler: empty decomposition");
  }
  double running = 0.0;
  for (const BvnTerm& term : decomposition.terms) {
    running += term.weight;
    cumulative_.push_back(running);
  }
}

const Permutation& BvnSampler::Next() {
  const double u = uniform_(engine_) * cumulative_.back();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  const size_t index = std::min<size_t>(it - cumulative_.begin(),
                                        cumulative_.size() - 1);
  return decomposition_->terms[index].permutation;
}

Permutation SampleBvn(const BvnDecomposition& decomposition, uint64_t seed) {
  BvnSampler sampler(decomposition, seed);
  return sampler.Next();
}

}  // namespace fairrank
