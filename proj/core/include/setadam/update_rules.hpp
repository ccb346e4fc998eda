#pragma once

#include <span>

#include "setadam/hyperparams.hpp"
#include "setadam/state.hpp"

namespace setadam {

// --- the three per-layer operations on the second momentum ------------------

// cos^n of the angle between a nonnegative subvector and the all-one vector of
// the same dimension, computed as ((sum v)^2 / (d * sum v^2))^(n/2).
// Returns 1 for the zero vector and for single-entry layers. n must be 2 or 4.
real cos2_angle(std::span<const real> v, int n = 2);

// vtilde = gamma * v, elementwise. gamma must lie in [0, 1]; out may alias v.
void down_scale(std::span<const real> v, real gamma, std::span<real> out);

// w = sqrt(vtilde / (1 - beta2^t) + eps), elementwise; every output >= sqrt(eps).
// Requires t >= 1.
void eps_embed(std::span<const real> vtilde, long t, real beta2, real eps,
               std::span<real> out);

// w -= tau * min(w), in place. Keeps min(w) * (1 - tau) as the new minimum.
void down_translate(std::span<real> w, real tau);

// --- stepsize schedule -------------------------------------------------------

// eta_t for iteration t (1-based) in the given epoch (0-based).
real schedule_stepsize(const HyperParams& hp, long t, int epoch = 0);

// --- update rules ------------------------------------------------------------
// Each rule validates inputs (a NaN/Inf gradient rejects the step with the
// state untouched), advances state.t, updates the momenta and the parameters,
// and reports the per-coordinate stepsizes it applied.

StepOutput set_adam_step(ModelParams& params, const GradientSnapshot& grad,
                         MomentState& state, const HyperParams& hp,
                         int epoch = 0);

StepOutput adam_step(ModelParams& params, const GradientSnapshot& grad,
                     MomentState& state, const HyperParams& hp, int epoch = 0);

StepOutput adam_star_step(ModelParams& params, const GradientSnapshot& grad,
                          MomentState& state, const HyperParams& hp,
                          int epoch = 0);

enum class AdaBeliefForm { original, reformulated };

StepOutput adabelief_step(ModelParams& params, const GradientSnapshot& grad,
                          MomentState& state, const HyperParams& hp,
                          AdaBeliefForm form, int epoch = 0);

StepOutput sgd_momentum_step(ModelParams& params, const GradientSnapshot& grad,
                             MomentState& state, const HyperParams& hp,
                             int epoch = 0);

// Dispatch on kind.
StepOutput apply_step(OptimizerKind kind, ModelParams& params,
                      const GradientSnapshot& grad, MomentState& state,
                      const HyperParams& hp, int epoch = 0);

}  // namespace setadam
