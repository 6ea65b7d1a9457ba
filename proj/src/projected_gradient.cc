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

#include "projected_gradient.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fairrank::internal {

namespace {

constexpr double kMinStep = 1e-10;
constexpr double kMaxStep = 1e10;

double CheckFinite(double value) {
  if (!std::isfinite(value)) {
    throw std::runtime_error("projected gradient: objective is not finite");
  }
  return value;
}

}  // namespace

BoxMinimizerResult MinimizeOverUnitBox(Vector x, const BoxObjective& objective,
                                       const BoxMinimizerOptions& options) {
  BoxMinimizerResult result;
  x = ClipToUnitBox(x);
  Vector grad(x.size());
  Vector trial_grad(x.size());
  Vector prev_x, prev_grad;
  Vector best_x = x;
  double best_norm = std::numeric_limits<double>::infinity();

  // Value and gradient of the last accepted trial, reusable when the frozen
  // quantities did not change.
  bool have_cached = false;
  double value = 0.0;

  for (int it = 0;; ++it) {
    const bool changed = objective.refresh(x);
    if (changed || !have_cached) {
      value = CheckFinite(objective.evaluate(x, grad));
      objective.commit();
      ++result.evaluations;
    }

    const double norm = ProjectedGradientNorm(x, grad);
    if (norm < best_norm) {
      best_norm = norm;
      best_x = x;
    }
    result.iterations = it;
    if (norm < options.grad_tol) {
      result.converged = true;
      break;
    }
    if (it >= options.max_iter) break;

    double step = options.initial_step;
    if (prev_x.size() == x.size()) {
      const Vector s = x - prev_x;
      const Vector y = grad - prev_grad;
      const double sy = s.dot(y);
      if (sy > 0.0) step = std::clamp(s.squaredNorm() / sy, kMinStep, kMaxStep);
    }

    bool accepted = false;
    Vector candidate;
    double trial_value = 0.0;
    for (int k = 0; k <= options.max_backtracks; ++k) {
      candidate = ClipToUnitBox(x - step * grad);
      const double decrease = grad.dot(candidate - x);
      trial_value = CheckFinite(objective.evaluate(candidate, trial_grad));
      ++result.evaluations;
      if (trial_value <= value + options.armijo_c * decrease) {
        accepted = true;
        break;
      }
      step *= options.backtrack;
    }
    if (!accepted) {
      if (objective.tighten && objective.tighten()) {
        value = CheckFinite(objective.evaluate(x, grad));
        objective.commit();
        ++result.evaluations;
        prev_x.resize(0);
        continue;
      }
      result.line_search_failed = true;
      break;
    }
    objective.commit();
    result.steps.push_back({value, trial_value});
    prev_x = x;
    prev_grad = grad;
    x = candidate;
    grad = trial_grad;
    value = trial_value;
    have_cached = true;
  }

  if (!result.converged && best_x != x) {
    x = best_x;
    objective.refresh(x);
    CheckFinite(objective.evaluate(x, grad));
    objective.commit();
    ++result.evaluations;
  }
  result.x = std::move(x);
  result.projected_grad_norm = best_norm;
  return result;
}

}  // namespace fairrank::internal
