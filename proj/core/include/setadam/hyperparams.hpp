#pragma once

#include <string>
#include <vector>

#include "setadam/real.hpp"

namespace setadam {

enum class OptimizerKind {
  sgd_momentum,
  adam,
  adam_star,
  adabelief,
  adabelief_reformulated,
  set_adam,
};

const char* to_string(OptimizerKind k);
OptimizerKind optimizer_kind_from_string(const std::string& name);

enum class WeightDecayMode { none, coupled, decoupled };

const char* to_string(WeightDecayMode m);
WeightDecayMode weight_decay_mode_from_string(const std::string& name);

enum class ScheduleKind { constant, step_decay, inverse_sqrt };

const char* to_string(ScheduleKind k);
ScheduleKind schedule_kind_from_string(const std::string& name);

struct StepsizeSchedule {
  ScheduleKind kind = ScheduleKind::constant;
  std::vector<int> milestones;  // epochs at which step_decay multiplies by factor
  real factor = 0.1;
};

struct HyperParams {
  real eta = 1e-3;             // base common stepsize
  StepsizeSchedule schedule;
  real beta1 = 0.9;
  real beta2 = 0.999;
  real lambda = 1.0;           // first-moment decay: beta1_t = beta1 * lambda^(t-1)
  real epsilon = 1e-8;
  real tau = 0.5;              // down-translating strength, in [0, 1)
  int cos_exponent = 2;        // down-scaling exponent, 2 or 4
  real weight_decay = 0.0;
  WeightDecayMode weight_decay_mode = WeightDecayMode::none;
  bool theoretical_mode = false;  // drop the first-moment bias correction
  bool force_unit_gamma = false;  // verification switch: pin gamma to 1

  void validate() const;  // throws std::invalid_argument on bad values
};

// Per-step byproducts of an update rule, used by the instrumentation and the
// theory verifier.
struct StepOutput {
  std::vector<real> alpha;  // eta_t / denom, per coordinate
  std::vector<real> denom;  // denominator the update divided by
  std::vector<real> gamma;  // down-scale factor actually applied, per layer
  std::vector<real> cos2;   // cos^2 of (v_l, all-one vector), per layer
  real eta_t = 0;
  long t = 0;
};

}  // namespace setadam
