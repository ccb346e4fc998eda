#pragma once

// Scalar (d = 1) transcriptions of the update recurrences, written directly
// from the per-step definitions. These stay independent of the library
// implementation and serve as trajectory oracles.

#include <cmath>
#include <cstddef>
#include <vector>

#include "setadam/real.hpp"

namespace setadam::testing {

struct ScalarHyper {
  real eta = 1e-3;
  real beta1 = 0.9;
  real beta2 = 0.999;
  real lambda = 1.0;
  real epsilon = 1e-8;
  real tau = 0.5;
};

// First-step displacements from zero state under a constant gradient c.
inline real adam_first_delta(real c, real eta, real eps) {
  return -eta * c / (std::abs(c) + eps);
}

inline real adam_star_first_delta(real c, real eta, real eps) {
  return -eta * c / std::sqrt(c * c + eps);
}

inline real set_adam_first_delta(real c, real eta, real tau, real eps) {
  return -eta * c / ((1 - tau) * std::sqrt(c * c + eps));
}

// Full scalar run of the three-operation update for a single-parameter model
// (one layer, so the angle is zero and the minimum is the value itself).
inline std::vector<real> scalar_set_adam(real theta0,
                                         const std::vector<real>& grads,
                                         const ScalarHyper& hp) {
  std::vector<real> trajectory;
  real theta = theta0, m = 0, v = 0;
  for (std::size_t k = 0; k < grads.size(); ++k) {
    const real t = static_cast<real>(k + 1);
    const real beta1t = hp.beta1 * std::pow(hp.lambda, t - 1);
    m = beta1t * m + (1 - beta1t) * grads[k];
    v = hp.beta2 * v + (1 - hp.beta2) * grads[k] * grads[k];
    const real vtilde = v;  // cos^2 of a 1-vector against [1] is 1
    const real w = std::sqrt(vtilde / (1 - std::pow(hp.beta2, t)) + hp.epsilon);
    const real wtilde = w - hp.tau * w;
    const real mhat = m / (1 - std::pow(hp.beta1, t));
    theta -= hp.eta * mhat / wtilde;
    trajectory.push_back(theta);
  }
  return trajectory;
}

inline std::vector<real> scalar_adam(real theta0, const std::vector<real>& grads,
                                     const ScalarHyper& hp) {
  std::vector<real> trajectory;
  real theta = theta0, m = 0, v = 0;
  for (std::size_t k = 0; k < grads.size(); ++k) {
    const real t = static_cast<real>(k + 1);
    m = hp.beta1 * m + (1 - hp.beta1) * grads[k];
    v = hp.beta2 * v + (1 - hp.beta2) * grads[k] * grads[k];
    const real mhat = m / (1 - std::pow(hp.beta1, t));
    const real vhat = v / (1 - std::pow(hp.beta2, t));
    theta -= hp.eta * mhat / (std::sqrt(vhat) + hp.epsilon);
    trajectory.push_back(theta);
  }
  return trajectory;
}

inline std::vector<real> scalar_adam_star(real theta0,
                                          const std::vector<real>& grads,
                                          const ScalarHyper& hp) {
  std::vector<real> trajectory;
  real theta = theta0, m = 0, v = 0;
  for (std::size_t k = 0; k < grads.size(); ++k) {
    const real t = static_cast<real>(k + 1);
    m = hp.beta1 * m + (1 - hp.beta1) * grads[k];
    v = hp.beta2 * v + (1 - hp.beta2) * grads[k] * grads[k];
    const real mhat = m / (1 - std::pow(hp.beta1, t));
    const real vhat = v / (1 - std::pow(hp.beta2, t));
    theta -= hp.eta * mhat / std::sqrt(vhat + hp.epsilon);
    trajectory.push_back(theta);
  }
  return trajectory;
}

// Original-form AdaBelief: the epsilon added inside the EMA every step.
inline std::vector<real> scalar_adabelief(real theta0,
                                          const std::vector<real>& grads,
                                          const ScalarHyper& hp) {
  std::vector<real> trajectory;
  real theta = theta0, m = 0, s = 0;
  for (std::size_t k = 0; k < grads.size(); ++k) {
    const real t = static_cast<real>(k + 1);
    m = hp.beta1 * m + (1 - hp.beta1) * grads[k];
    const real diff = m - grads[k];
    s = hp.beta2 * s + (1 - hp.beta2) * diff * diff + hp.epsilon;
    const real mhat = m / (1 - std::pow(hp.beta1, t));
    const real shat = s / (1 - std::pow(hp.beta2, t));
    theta -= hp.eta * mhat / std::sqrt(shat);
    trajectory.push_back(theta);
  }
  return trajectory;
}

inline std::vector<real> scalar_sgd_momentum(real theta0,
                                             const std::vector<real>& grads,
                                             real eta, real beta) {
  std::vector<real> trajectory;
  real theta = theta0, m = 0;
  for (real g : grads) {
    m = beta * m + g;
    theta -= eta * m;
    trajectory.push_back(theta);
  }
  return trajectory;
}

}  // namespace setadam::testing
