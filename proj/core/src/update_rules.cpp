#include "setadam/update_rules.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace setadam {
namespace {

void validate_step_inputs(const ModelParams& params, const GradientSnapshot& grad,
                          const MomentState& state, const HyperParams& hp) {
  hp.validate();
  const std::size_t d = params.values.size();
  if (params.partition.dim() != d) {
    throw std::invalid_argument("step: partition does not match parameter vector");
  }
  if (grad.values.size() != d) {
    throw std::invalid_argument("step: gradient dimension " +
                                std::to_string(grad.values.size()) +
                                " does not match model dimension " + std::to_string(d));
  }
  if (state.m.size() != d || state.v.size() != d) {
    throw std::invalid_argument("step: momentum buffers do not match model dimension");
  }
  if (!all_finite(grad.values)) {
    throw std::invalid_argument("step rejected: gradient contains NaN/Inf");
  }
}

struct StepScalars {
  long t;       // post-increment iteration counter
  real beta1t;  // beta1 * lambda^(t-1)
  real corr1;   // 1 - beta1^t, or 1 in theoretical mode
  real corr2;   // 1 - beta2^t
  real eta_t;
};

StepScalars step_scalars(const MomentState& state, const HyperParams& hp, int epoch) {
  StepScalars s;
  s.t = state.t + 1;
  s.beta1t = hp.beta1 * std::pow(hp.lambda, static_cast<real>(s.t - 1));
  s.corr1 = hp.theoretical_mode
                ? real(1)
                : real(1) - std::pow(hp.beta1, static_cast<real>(s.t));
  s.corr2 = real(1) - std::pow(hp.beta2, static_cast<real>(s.t));
  s.eta_t = schedule_stepsize(hp, s.t, epoch);
  return s;
}

// Gradient with coupled (classic L2) weight decay folded in when requested.
std::span<const real> effective_gradient(const ModelParams& params,
                                         const GradientSnapshot& grad,
                                         const HyperParams& hp,
                                         std::vector<real>& storage) {
  if (hp.weight_decay_mode != WeightDecayMode::coupled || hp.weight_decay == 0) {
    return grad.values;
  }
  storage.resize(grad.values.size());
  for (std::size_t i = 0; i < storage.size(); ++i) {
    storage[i] = grad.values[i] + hp.weight_decay * params.values[i];
  }
  return storage;
}

void apply_decoupled_decay(ModelParams& params, const HyperParams& hp, real eta_t) {
  if (hp.weight_decay_mode != WeightDecayMode::decoupled || hp.weight_decay == 0) {
    return;
  }
  for (real& x : params.values) {
    x -= eta_t * hp.weight_decay * x;
  }
}

StepOutput make_output(std::size_t d, std::size_t layers, const StepScalars& s) {
  StepOutput out;
  out.alpha.resize(d);
  out.denom.resize(d);
  out.gamma.reserve(layers);
  out.cos2.reserve(layers);
  out.eta_t = s.eta_t;
  out.t = s.t;
  return out;
}

// Shared tail: theta -= eta_t * (m / corr1) / denom, alpha = eta_t / denom.
void apply_adaptive_update(ModelParams& params, const MomentState& state,
                           const StepScalars& s, StepOutput& out) {
  for (std::size_t i = 0; i < params.values.size(); ++i) {
    assert(out.denom[i] > 0 && "adaptive denominator must stay positive");
    params.values[i] -= s.eta_t * (state.m[i] / s.corr1) / out.denom[i];
    out.alpha[i] = s.eta_t / out.denom[i];
  }
}

void record_layer_geometry(const LayerPartition& part, std::span<const real> v,
                           StepOutput& out, bool unit_gamma_applied) {
  for (std::size_t l = 0; l < part.layer_count(); ++l) {
    const real c2 = cos2_angle(part.view(v, l), 2);
    out.cos2.push_back(c2);
    out.gamma.push_back(unit_gamma_applied ? real(1) : c2);
  }
}

}  // namespace

real cos2_angle(std::span<const real> v, int n) {
  if (n != 2 && n != 4) {
    throw std::invalid_argument("cos2_angle: exponent must be 2 or 4");
  }
  if (v.empty()) {
    throw std::invalid_argument("cos2_angle: empty subvector");
  }
  real sum = 0, sumsq = 0;
  for (real x : v) {
    if (x < 0) {
      throw std::invalid_argument("cos2_angle: negative entry in second momentum");
    }
    sum += x;
    sumsq += x * x;
  }
  if (v.size() == 1 || sumsq == 0) {
    return 1;  // one-parameter layer, or zero momentum: scaling is a no-op
  }
  real c2 = (sum * sum) / (static_cast<real>(v.size()) * sumsq);
  c2 = std::min(c2, real(1));
  return n == 2 ? c2 : c2 * c2;
}

void down_scale(std::span<const real> v, real gamma, std::span<real> out) {
  if (!(gamma >= 0 && gamma <= 1)) {
    throw std::invalid_argument("down_scale: gamma must be in [0, 1]");
  }
  if (out.size() != v.size()) {
    throw std::invalid_argument("down_scale: output size mismatch");
  }
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = gamma * v[i];
  }
}

void eps_embed(std::span<const real> vtilde, long t, real beta2, real eps,
               std::span<real> out) {
  if (t < 1) {
    throw std::invalid_argument("eps_embed: t must be >= 1 (bias correction)");
  }
  if (!(beta2 >= 0 && beta2 < 1)) {
    throw std::invalid_argument("eps_embed: beta2 must be in [0, 1)");
  }
  if (!(eps > 0)) {
    throw std::invalid_argument("eps_embed: eps must be > 0");
  }
  if (out.size() != vtilde.size()) {
    throw std::invalid_argument("eps_embed: output size mismatch");
  }
  const real corr = real(1) - std::pow(beta2, static_cast<real>(t));
  for (std::size_t i = 0; i < vtilde.size(); ++i) {
    if (vtilde[i] < 0) {
      throw std::invalid_argument("eps_embed: negative entry in scaled momentum");
    }
    out[i] = std::sqrt(vtilde[i] / corr + eps);
  }
}

void down_translate(std::span<real> w, real tau) {
  if (w.empty()) {
    throw std::invalid_argument("down_translate: empty subvector");
  }
  if (!(tau >= 0 && tau < 1)) {
    throw std::invalid_argument("down_translate: tau must be in [0, 1)");
  }
  real wmin = w[0];
  for (real x : w) wmin = std::min(wmin, x);
  const real shift = tau * wmin;
  for (real& x : w) x -= shift;
}

real schedule_stepsize(const HyperParams& hp, long t, int epoch) {
  switch (hp.schedule.kind) {
    case ScheduleKind::constant:
      return hp.eta;
    case ScheduleKind::step_decay: {
      real eta = hp.eta;
      for (int m : hp.schedule.milestones) {
        if (epoch >= m) eta *= hp.schedule.factor;
      }
      return eta;
    }
    case ScheduleKind::inverse_sqrt:
      if (t < 1) {
        throw std::invalid_argument("schedule_stepsize: inverse_sqrt needs t >= 1");
      }
      return hp.eta / std::sqrt(static_cast<real>(t));
  }
  throw std::logic_error("schedule_stepsize: unreachable");
}

StepOutput set_adam_step(ModelParams& params, const GradientSnapshot& grad,
                         MomentState& state, const HyperParams& hp, int epoch) {
  validate_step_inputs(params, grad, state, hp);
  const StepScalars s = step_scalars(state, hp, epoch);
  const std::size_t d = params.values.size();
  const LayerPartition& part = params.partition;

  std::vector<real> wd_storage;
  const std::span<const real> g = effective_gradient(params, grad, hp, wd_storage);

  state.t = s.t;
  for (std::size_t i = 0; i < d; ++i) {
    state.m[i] = s.beta1t * state.m[i] + (1 - s.beta1t) * g[i];
    state.v[i] = hp.beta2 * state.v[i] + (1 - hp.beta2) * g[i] * g[i];
  }

  StepOutput out = make_output(d, part.layer_count(), s);
  for (std::size_t l = 0; l < part.layer_count(); ++l) {
    const std::span<const real> vl = part.view(std::span<const real>(state.v), l);
    const real c2 = cos2_angle(vl, 2);
    const real gamma =
        hp.force_unit_gamma ? real(1) : (hp.cos_exponent == 2 ? c2 : c2 * c2);
    out.cos2.push_back(c2);
    out.gamma.push_back(gamma);

    const std::size_t off = part.layer_offset(l);
    real wmin = std::numeric_limits<real>::infinity();
    for (std::size_t i = off; i < off + vl.size(); ++i) {
      const real w = std::sqrt(gamma * state.v[i] / s.corr2 + hp.epsilon);
      out.denom[i] = w;
      wmin = std::min(wmin, w);
    }
    const real shift = hp.tau * wmin;
    for (std::size_t i = off; i < off + vl.size(); ++i) {
      out.denom[i] -= shift;
    }
  }

  apply_adaptive_update(params, state, s, out);
  apply_decoupled_decay(params, hp, s.eta_t);
  return out;
}

StepOutput adam_step(ModelParams& params, const GradientSnapshot& grad,
                     MomentState& state, const HyperParams& hp, int epoch) {
  validate_step_inputs(params, grad, state, hp);
  const StepScalars s = step_scalars(state, hp, epoch);
  const std::size_t d = params.values.size();

  std::vector<real> wd_storage;
  const std::span<const real> g = effective_gradient(params, grad, hp, wd_storage);

  state.t = s.t;
  StepOutput out = make_output(d, params.partition.layer_count(), s);
  for (std::size_t i = 0; i < d; ++i) {
    state.m[i] = s.beta1t * state.m[i] + (1 - s.beta1t) * g[i];
    state.v[i] = hp.beta2 * state.v[i] + (1 - hp.beta2) * g[i] * g[i];
    out.denom[i] = std::sqrt(state.v[i] / s.corr2) + hp.epsilon;
  }
  record_layer_geometry(params.partition, state.v, out, true);
  apply_adaptive_update(params, state, s, out);
  apply_decoupled_decay(params, hp, s.eta_t);
  return out;
}

StepOutput adam_star_step(ModelParams& params, const GradientSnapshot& grad,
                          MomentState& state, const HyperParams& hp, int epoch) {
  validate_step_inputs(params, grad, state, hp);
  const StepScalars s = step_scalars(state, hp, epoch);
  const std::size_t d = params.values.size();

  std::vector<real> wd_storage;
  const std::span<const real> g = effective_gradient(params, grad, hp, wd_storage);

  state.t = s.t;
  StepOutput out = make_output(d, params.partition.layer_count(), s);
  for (std::size_t i = 0; i < d; ++i) {
    state.m[i] = s.beta1t * state.m[i] + (1 - s.beta1t) * g[i];
    state.v[i] = hp.beta2 * state.v[i] + (1 - hp.beta2) * g[i] * g[i];
    out.denom[i] = std::sqrt(state.v[i] / s.corr2 + hp.epsilon);
  }
  record_layer_geometry(params.partition, state.v, out, true);
  apply_adaptive_update(params, state, s, out);
  apply_decoupled_decay(params, hp, s.eta_t);
  return out;
}

StepOutput adabelief_step(ModelParams& params, const GradientSnapshot& grad,
                          MomentState& state, const HyperParams& hp,
                          AdaBeliefForm form, int epoch) {
  validate_step_inputs(params, grad, state, hp);
  const StepScalars s = step_scalars(state, hp, epoch);
  const std::size_t d = params.values.size();

  std::vector<real> wd_storage;
  const std::span<const real> g = effective_gradient(params, grad, hp, wd_storage);

  state.t = s.t;
  StepOutput out = make_output(d, params.partition.layer_count(), s);
  // state.v tracks the EMA of the squared prediction error (m - g)^2.
  if (form == AdaBeliefForm::original) {
    for (std::size_t i = 0; i < d; ++i) {
      state.m[i] = s.beta1t * state.m[i] + (1 - s.beta1t) * g[i];
      const real diff = state.m[i] - g[i];
      state.v[i] = hp.beta2 * state.v[i] + (1 - hp.beta2) * diff * diff + hp.epsilon;
      out.denom[i] = std::sqrt(state.v[i] / s.corr2);
    }
  } else {
    const real embedded = hp.epsilon / (1 - hp.beta2);
    for (std::size_t i = 0; i < d; ++i) {
      state.m[i] = s.beta1t * state.m[i] + (1 - s.beta1t) * g[i];
      const real diff = state.m[i] - g[i];
      state.v[i] = hp.beta2 * state.v[i] + (1 - hp.beta2) * diff * diff;
      out.denom[i] = std::sqrt(state.v[i] / s.corr2 + embedded);
    }
  }
  record_layer_geometry(params.partition, state.v, out, true);
  apply_adaptive_update(params, state, s, out);
  apply_decoupled_decay(params, hp, s.eta_t);
  return out;
}

StepOutput sgd_momentum_step(ModelParams& params, const GradientSnapshot& grad,
                             MomentState& state, const HyperParams& hp, int epoch) {
  validate_step_inputs(params, grad, state, hp);
  const StepScalars s = step_scalars(state, hp, epoch);
  const std::size_t d = params.values.size();

  std::vector<real> wd_storage;
  const std::span<const real> g = effective_gradient(params, grad, hp, wd_storage);

  state.t = s.t;
  StepOutput out = make_output(d, params.partition.layer_count(), s);
  for (std::size_t i = 0; i < d; ++i) {
    state.m[i] = s.beta1t * state.m[i] + g[i];  // undamped accumulation
    params.values[i] -= s.eta_t * state.m[i];
    out.denom[i] = 1;
    out.alpha[i] = s.eta_t;
  }
  out.gamma.assign(params.partition.layer_count(), 1);
  out.cos2.assign(params.partition.layer_count(), 1);
  apply_decoupled_decay(params, hp, s.eta_t);
  return out;
}

StepOutput apply_step(OptimizerKind kind, ModelParams& params,
                      const GradientSnapshot& grad, MomentState& state,
                      const HyperParams& hp, int epoch) {
  switch (kind) {
    case OptimizerKind::sgd_momentum:
      return sgd_momentum_step(params, grad, state, hp, epoch);
    case OptimizerKind::adam:
      return adam_step(params, grad, state, hp, epoch);
    case OptimizerKind::adam_star:
      return adam_star_step(params, grad, state, hp, epoch);
    case OptimizerKind::adabelief:
      return adabelief_step(params, grad, state, hp, AdaBeliefForm::original, epoch);
    case OptimizerKind::adabelief_reformulated:
      return adabelief_step(params, grad, state, hp, AdaBeliefForm::reformulated,
                            epoch);
    case OptimizerKind::set_adam:
      return set_adam_step(params, grad, state, hp, epoch);
  }
  throw std::logic_error("apply_step: unreachable");
}

}  // namespace setadam
