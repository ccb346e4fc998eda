#include "setadam/hyperparams.hpp"

#include <stdexcept>

namespace setadam {

const char* to_string(OptimizerKind k) {
  switch (k) {
    case OptimizerKind::sgd_momentum: return "sgd_momentum";
    case OptimizerKind::adam: return "adam";
    case OptimizerKind::adam_star: return "adam_star";
    case OptimizerKind::adabelief: return "adabelief";
    case OptimizerKind::adabelief_reformulated: return "adabelief_reformulated";
    case OptimizerKind::set_adam: return "set_adam";
  }
  return "?";
}

OptimizerKind optimizer_kind_from_string(const std::string& name) {
  if (name == "sgd_momentum") return OptimizerKind::sgd_momentum;
  if (name == "adam") return OptimizerKind::adam;
  if (name == "adam_star") return OptimizerKind::adam_star;
  if (name == "adabelief") return OptimizerKind::adabelief;
  if (name == "adabelief_reformulated") return OptimizerKind::adabelief_reformulated;
  if (name == "set_adam") return OptimizerKind::set_adam;
  throw std::invalid_argument("unknown optimizer kind: " + name);
}

const char* to_string(WeightDecayMode m) {
  switch (m) {
    case WeightDecayMode::none: return "none";
    case WeightDecayMode::coupled: return "coupled";
    case WeightDecayMode::decoupled: return "decoupled";
  }
  return "?";
}

WeightDecayMode weight_decay_mode_from_string(const std::string& name) {
  if (name == "none") return WeightDecayMode::none;
  if (name == "coupled") return WeightDecayMode::coupled;
  if (name == "decoupled") return WeightDecayMode::decoupled;
  throw std::invalid_argument("unknown weight decay mode: " + name);
}

const char* to_string(ScheduleKind k) {
  switch (k) {
    case ScheduleKind::constant: return "constant";
    case ScheduleKind::step_decay: return "step_decay";
    case ScheduleKind::inverse_sqrt: return "inverse_sqrt";
  }
  return "?";
}

ScheduleKind schedule_kind_from_string(const std::string& name) {
  if (name == "constant") return ScheduleKind::constant;
  if (name == "step_decay") return ScheduleKind::step_decay;
  if (name == "inverse_sqrt") return ScheduleKind::inverse_sqrt;
  throw std::invalid_argument("unknown schedule kind: " + name);
}

void HyperParams::validate() const {
  if (!(eta > 0)) throw std::invalid_argument("HyperParams: eta must be > 0");
  if (!(beta1 >= 0 && beta1 < 1))
    throw std::invalid_argument("HyperParams: beta1 must be in [0, 1)");
  if (!(beta2 >= 0 && beta2 < 1))
    throw std::invalid_argument("HyperParams: beta2 must be in [0, 1)");
  if (!(lambda > 0 && lambda <= 1))
    throw std::invalid_argument("HyperParams: lambda must be in (0, 1]");
  if (!(epsilon > 0))
    throw std::invalid_argument("HyperParams: epsilon must be strictly positive");
  if (!(tau >= 0 && tau < 1))
    throw std::invalid_argument("HyperParams: tau must be in [0, 1)");
  if (cos_exponent != 2 && cos_exponent != 4)
    throw std::invalid_argument("HyperParams: cos_exponent must be 2 or 4");
  if (!(weight_decay >= 0))
    throw std::invalid_argument("HyperParams: weight_decay must be >= 0");
  if (schedule.kind == ScheduleKind::step_decay && !(schedule.factor > 0))
    throw std::invalid_argument("HyperParams: step decay factor must be > 0");
}

}  // namespace setadam
