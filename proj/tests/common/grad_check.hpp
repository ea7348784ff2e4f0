#pragma once

// Shared gradient-oracle helpers for the unit and acceptance suites.

#include <algorithm>
#include <cmath>
#include <span>

#include "eveopt/problems.hpp"

namespace eveopt::testing {

/// ||a - b|| / max(||a||, ||b||), falling back to the absolute difference
/// when both gradients are essentially zero.
inline double gradient_rel_error(std::span<const double> a, std::span<const double> b) {
  double diff = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  const double scale = std::max(std::sqrt(std::max(na, nb)), 1e-8);
  return std::sqrt(diff) / scale;
}

/// Analytic gradient of `problem` vs central differences with steps
/// 1e-5 * (1 + |theta_i|), on a fixed batch.
inline double check_gradient(const problems::Problem& problem, std::span<const double> params,
                             const problems::Batch& batch) {
  const auto analytic = problem.evaluate(params, batch).grad;
  const auto numeric = problems::finite_diff_grad(problem, params, batch, 1e-5, problems::StepScaling::relative);
  return gradient_rel_error(analytic, numeric);
}

}  // namespace eveopt::testing
