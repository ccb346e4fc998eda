#pragma once

// Central-difference gradient oracle, independent of the analytic gradients it
// checks.

#include <cmath>
#include <span>
#include <vector>

#include "setadam/problem.hpp"

namespace setadam::testing {

inline std::vector<real> fd_gradient(const Problem& problem,
                                     std::span<const real> theta,
                                     std::span<const std::size_t> batch = {}) {
  std::vector<real> point(theta.begin(), theta.end());
  std::vector<real> grad(theta.size());
  for (std::size_t i = 0; i < point.size(); ++i) {
    const real h = real(1e-5) * (1 + std::abs(point[i]));
    const real saved = point[i];
    point[i] = saved + h;
    const real up = problem.loss(point, batch);
    point[i] = saved - h;
    const real down = problem.loss(point, batch);
    point[i] = saved;
    grad[i] = (up - down) / (2 * h);
  }
  return grad;
}

inline real relative_error(std::span<const real> analytic,
                           std::span<const real> reference) {
  real diff = 0, ref = 0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    diff += (analytic[i] - reference[i]) * (analytic[i] - reference[i]);
    ref += reference[i] * reference[i];
  }
  return std::sqrt(diff) / std::max(std::sqrt(ref), real(1e-12));
}

inline real gradient_check(const Problem& problem, std::span<const real> theta,
                           std::span<const std::size_t> batch = {}) {
  const GradientSnapshot g = problem.gradient(theta, batch);
  const std::vector<real> fd = fd_gradient(problem, theta, batch);
  return relative_error(g.values, fd);
}

}  // namespace setadam::testing
