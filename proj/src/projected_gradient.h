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

// Projected gradient descent over the unit box [0, 1]^n with a
// Barzilai-Borwein trial step and monotone Armijo backtracking along the
// projection arc. Shared by training and inference.

#ifndef FAIRRANK_SRC_PROJECTED_GRADIENT_H_
#define FAIRRANK_SRC_PROJECTED_GRADIENT_H_

#include <algorithm>
#include <functional>
#include <vector>

#include "fairrank/core.h"

namespace fairrank::internal {

struct BoxMinimizerOptions {
  int max_iter = 300;
  double grad_tol = 1e-4;  // On the infinity norm of the projected gradient.
  double armijo_c = 1e-4;
  double backtrack = 0.5;
  int max_backtracks = 40;
  double initial_step = 1.0;
};

// The objective may depend on auxiliary quantities that are frozen during one
// outer iteration (the fairness vectors). `refresh` recomputes them from the
// current point before the iteration's gradient is taken and reports whether
// they changed.
struct BoxObjective {
  std::function<bool(const Vector& x)> refresh;
  // Returns the value at a trial point and fills `grad`.
  std::function<double(const Vector& x, Vector& grad)> evaluate;
  // Makes the last evaluated point the reference for warm starts.
  std::function<void()> commit;
  // Optional. Called when backtracking fails, which happens once the step
  // decrease drops below the noise of an inexact objective. Returns true if
  // the objective was made more accurate and the line search should be
  // retried from a fresh evaluation.
  std::function<bool()> tighten;
};

// Divides the ADMM tolerances by 100, down to 1e-12. Returns false when they
// are already at that floor.
inline bool TightenAdmm(AdmmOptions& admm) {
  constexpr double kFloor = 1e-12;
  if (admm.tol_abs <= kFloor && admm.tol_rel <= kFloor) return false;
  admm.tol_abs = std::max(admm.tol_abs * 1e-2, kFloor);
  admm.tol_rel = std::max(admm.tol_rel * 1e-2, kFloor);
  admm.feasibility_tol = std::max(admm.feasibility_tol * 1e-2, kFloor);
  return true;
}

struct AcceptedStep {
  double value_before = 0.0;
  double value_after = 0.0;
};

struct BoxMinimizerResult {
  // Final point (best iterate if not converged). It is the last point
  // evaluated and committed.
  Vector x;
  double projected_grad_norm = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  bool line_search_failed = false;
  std::vector<AcceptedStep> steps;
};

inline Vector ClipToUnitBox(const Vector& x) {
  return x.cwiseMax(0.0).cwiseMin(1.0);
}

inline double ProjectedGradientNorm(const Vector& x, const Vector& grad) {
  if (x.size() == 0) return 0.0;
  return (x - ClipToUnitBox(x - grad)).cwiseAbs().maxCoeff();
}

BoxMinimizerResult MinimizeOverUnitBox(Vector x, const BoxObjective& objective,
                                       const BoxMinimizerOptions& options);

}  // namespace fairrank::internal

#endif  // FAIRRANK_SRC_PROJECTED_GRADIENT_H_
