#include "setadam/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "setadam/rng.hpp"
#include "setadam/update_rules.hpp"

namespace setadam {
namespace {

real linf_norm(std::span<const real> x) {
  real m = 0;
  for (real v : x) m = std::max(m, std::abs(v));
  return m;
}

real l2_norm(std::span<const real> x) {
  real s = 0;
  for (real v : x) s += v * v;
  return std::sqrt(s);
}

// sum over coordinates of || (g_1[i]^2, ..., g_T[i]^2) ||_2
real gradient_history_norm(const std::vector<std::vector<real>>& gradients,
                           std::size_t dim) {
  real total = 0;
  for (std::size_t i = 0; i < dim; ++i) {
    real s = 0;
    for (const std::vector<real>& g : gradients) {
      const real sq = g[i] * g[i];
      s += sq * sq;
    }
    total += std::sqrt(s);
  }
  return total;
}

LayerPartition chunked_partition(std::size_t dim, std::size_t chunk = 7) {
  std::vector<std::size_t> sizes;
  std::size_t left = dim;
  while (left > 0) {
    const std::size_t take = std::min(chunk, left);
    sizes.push_back(take);
    left -= take;
  }
  return LayerPartition::from_sizes(std::move(sizes));
}

struct RandomStream {
  std::vector<real> theta0;
  std::vector<std::vector<real>> gradients;
};

RandomStream make_random_stream(std::size_t steps, std::size_t dim,
                                std::uint64_t seed) {
  RandomStream s;
  CounterRng init_rng(seed, 1);
  s.theta0.resize(dim);
  for (real& x : s.theta0) x = 2 * static_cast<real>(init_rng.next_double()) - 1;
  CounterRng grad_rng(seed, 2);
  s.gradients.resize(steps);
  for (std::vector<real>& g : s.gradients) {
    g.resize(dim);
    for (real& x : g) x = static_cast<real>(grad_rng.next_normal());
  }
  return s;
}

}  // namespace

TheoremInstance run_theorem_instance(std::shared_ptr<const Problem> problem,
                                     HyperParams hp, std::size_t horizon,
                                     real radius, std::vector<real> theta0) {
  if (!problem) throw std::invalid_argument("run_theorem_instance: null problem");
  if (!problem->convex()) {
    throw std::invalid_argument("run_theorem_instance: problem must be convex");
  }
  if (horizon == 0) throw std::invalid_argument("run_theorem_instance: T must be >= 1");
  if (!(radius > 0)) throw std::invalid_argument("run_theorem_instance: D must be > 0");
  if (theta0.size() != problem->dim()) {
    throw std::invalid_argument("run_theorem_instance: theta0 dimension mismatch");
  }
  hp.schedule.kind = ScheduleKind::inverse_sqrt;
  hp.theoretical_mode = true;
  hp.validate();

  TheoremInstance inst;
  inst.problem = problem;
  inst.hp = hp;
  inst.horizon = horizon;
  inst.radius = radius;
  project_to_ball(theta0, radius);
  inst.theta0 = theta0;
  inst.gradients.reserve(horizon);
  inst.moments.reserve(horizon);
  inst.denominators.reserve(horizon);
  inst.iterates.reserve(horizon);

  ModelParams params = ModelParams::make(problem->partition(), std::move(theta0));
  MomentState state = MomentState::zeros(problem->dim());
  for (std::size_t t = 1; t <= horizon; ++t) {
    GradientSnapshot g = problem->gradient(params.values);
    StepOutput out = set_adam_step(params, g, state, hp);
    project_to_ball(params.values, radius);
    inst.gradients.push_back(std::move(g.values));
    inst.moments.push_back(state.m);
    inst.denominators.push_back(std::move(out.denom));
    inst.iterates.push_back(params.values);
  }
  return inst;
}

AssumptionReport check_assumptions(const TheoremInstance& instance) {
  const std::size_t T = instance.horizon;
  const std::size_t d = instance.theta0.size();
  if (instance.gradients.size() != T || instance.denominators.size() != T ||
      instance.iterates.size() != T) {
    throw std::invalid_argument("check_assumptions: incomplete histories");
  }
  const std::optional<std::vector<real>> opt = instance.problem->optimum();
  if (!opt) {
    throw std::invalid_argument("check_assumptions: problem has no known optimum");
  }

  AssumptionReport report;
  const real scale = std::sqrt(1 - instance.hp.beta2);
  real ginf_raw = 0;
  for (const std::vector<real>& g : instance.gradients) {
    ginf_raw = std::max(ginf_raw, linf_norm(g));
  }
  report.g_inf = ginf_raw / scale;

  report.max_iterate_l2 = l2_norm(instance.theta0);
  report.max_iterate_linf = linf_norm(instance.theta0);
  for (const std::vector<real>& theta : instance.iterates) {
    report.max_iterate_l2 = std::max(report.max_iterate_l2, l2_norm(theta));
    report.max_iterate_linf = std::max(report.max_iterate_linf, linf_norm(theta));
  }
  report.optimum_l2 = l2_norm(*opt);
  report.bounded = report.max_iterate_l2 <= instance.radius &&
                   report.optimum_l2 <= instance.radius;

  report.denominator_floor = std::numeric_limits<real>::infinity();
  for (const std::vector<real>& w : instance.denominators) {
    for (real x : w) report.denominator_floor = std::min(report.denominator_floor, x);
  }
  report.c = report.denominator_floor * report.denominator_floor;

  report.monotonicity_pairs = (T > 1 ? T - 1 : 0) * d;
  for (std::size_t t = 1; t < T; ++t) {
    const std::vector<real>& prev = instance.denominators[t - 1];
    const std::vector<real>& cur = instance.denominators[t];
    for (std::size_t i = 0; i < d; ++i) {
      if (cur[i] > prev[i]) ++report.monotonicity_violations;
    }
  }
  report.violation_fraction =
      report.monotonicity_pairs == 0
          ? 0
          : static_cast<real>(report.monotonicity_violations) /
                static_cast<real>(report.monotonicity_pairs);
  return report;
}

RegretBound regret_bound_rhs(const TheoremInstance& instance,
                             const AssumptionReport& report) {
  const HyperParams& hp = instance.hp;
  if (hp.lambda == 1) {
    throw std::invalid_argument(
        "regret_bound_rhs: lambda = 1 makes the (1-lambda)^2 factor undefined; "
        "use lambda < 1");
  }
  const real T = static_cast<real>(instance.horizon);
  const real d = static_cast<real>(instance.theta0.size());
  const real D = instance.radius;
  const real G = report.g_inf;
  const real sqrt_eps = std::sqrt(hp.epsilon);
  const real one_minus_b1 = 1 - hp.beta1;
  const real sqrt_c = report.denominator_floor;
  const real grad_budget = gradient_history_norm(instance.gradients,
                                                 instance.theta0.size());

  RegretBound bound;
  bound.init_term = 2 * D * D * d * (G + sqrt_eps) / (hp.eta * one_minus_b1 * T);
  bound.schedule_term =
      2 * D * D * d * (G + sqrt_eps) / (std::sqrt(T) * one_minus_b1 * hp.eta);
  bound.gradient_term = (1 + hp.beta1) * hp.eta * std::sqrt(1 + std::log(T)) *
                        grad_budget /
                        (2 * sqrt_c * one_minus_b1 * one_minus_b1 * one_minus_b1 * T);
  bound.momentum_term = 2 * D * D * d * hp.beta1 * (G + sqrt_eps) /
                        (one_minus_b1 * (1 - hp.lambda) * (1 - hp.lambda) * hp.eta * T);
  return bound;
}

RegretCheck verify_regret(const TheoremInstance& instance) {
  RegretCheck check;
  const AssumptionReport report = check_assumptions(instance);
  if (!report.hold()) {
    check.vacuous = true;
    return check;
  }
  const std::size_t T = instance.horizon;
  const std::size_t d = instance.theta0.size();

  // mean of theta_0 .. theta_{T-1}
  check.theta_bar.assign(d, 0);
  for (std::size_t i = 0; i < d; ++i) check.theta_bar[i] = instance.theta0[i];
  for (std::size_t t = 0; t + 1 < T; ++t) {
    for (std::size_t i = 0; i < d; ++i) check.theta_bar[i] += instance.iterates[t][i];
  }
  for (real& x : check.theta_bar) x /= static_cast<real>(T);

  const real f_bar = instance.problem->loss(check.theta_bar);
  const real f_star = instance.problem->optimum_value()
                          ? *instance.problem->optimum_value()
                          : instance.problem->loss(*instance.problem->optimum());
  check.gap = f_bar - f_star;
  check.bound = regret_bound_rhs(instance, report);
  check.margin = check.bound.total() - check.gap;
  check.pass = check.gap <= check.bound.total();
  return check;
}

Lemma1Check verify_lemma1(const TheoremInstance& instance,
                          const AssumptionReport& report) {
  Lemma1Check check;
  if (!report.hold()) {
    check.vacuous = true;
    return check;
  }
  const std::size_t T = instance.horizon;
  const std::size_t d = instance.theta0.size();
  const HyperParams& hp = instance.hp;

  for (std::size_t t = 1; t <= T; ++t) {
    const real eta_t = hp.eta / std::sqrt(static_cast<real>(t));
    // w~_{T+1} is taken as w~_T.
    const std::vector<real>& w_next =
        t < T ? instance.denominators[t] : instance.denominators[T - 1];
    const std::vector<real>& m = instance.moments[t - 1];
    real weighted = 0;
    for (std::size_t i = 0; i < d; ++i) weighted += m[i] * m[i] / w_next[i];
    check.lhs += eta_t * weighted;
  }
  const real one_minus_b1 = 1 - hp.beta1;
  check.rhs = hp.eta * std::sqrt(1 + std::log(static_cast<real>(T))) *
              gradient_history_norm(instance.gradients, d) /
              (report.denominator_floor * one_minus_b1 * one_minus_b1);
  check.margin = check.rhs - check.lhs;
  check.pass = check.lhs <= check.rhs;
  return check;
}

TaylorReport verify_taylor_suppression(std::span<const real> v, long t, real beta2,
                                       real eps) {
  if (v.empty()) throw std::invalid_argument("verify_taylor_suppression: empty vector");
  if (t < 1) throw std::invalid_argument("verify_taylor_suppression: t must be >= 1");
  if (!(beta2 >= 0 && beta2 < 1)) {
    throw std::invalid_argument("verify_taylor_suppression: beta2 must be in [0, 1)");
  }
  if (!(eps >= 0)) {
    throw std::invalid_argument("verify_taylor_suppression: eps must be >= 0");
  }
  const real corr = 1 - std::pow(beta2, static_cast<real>(t));

  TaylorReport report;
  real a_min = std::numeric_limits<real>::infinity();
  real emb_min = std::numeric_limits<real>::infinity(), emb_max = 0;
  real out_min = std::numeric_limits<real>::infinity(), out_max = 0;
  for (real x : v) {
    if (x < 0) {
      throw std::invalid_argument("verify_taylor_suppression: negative entry");
    }
    const real a = x / corr;
    a_min = std::min(a_min, a);
    const real embedded = 1 / std::sqrt(a + eps);
    const real outside = 1 / (std::sqrt(a) + eps);
    emb_min = std::min(emb_min, embedded);
    emb_max = std::max(emb_max, embedded);
    out_min = std::min(out_min, outside);
    out_max = std::max(out_max, outside);
    if (a > 0) {
      const real taylor = 1 / (std::sqrt(a) + eps / (2 * std::sqrt(a)));
      report.max_rel_error =
          std::max(report.max_rel_error, std::abs(taylor - embedded) / embedded);
    }
  }
  report.gated = a_min >= 100 * eps;
  report.spread_embedded = emb_max / emb_min;
  report.spread_outside = out_max / out_min;
  report.error_ok = !report.gated || report.max_rel_error <= real(0.01);
  report.contraction_ok = report.spread_embedded <= report.spread_outside;
  return report;
}

IdentityCheck verify_adabelief_identity(std::size_t steps, std::size_t dim,
                                        std::uint64_t seed, HyperParams hp) {
  if (steps == 0 || dim == 0) {
    throw std::invalid_argument("verify_adabelief_identity: steps and dim must be >= 1");
  }
  hp.validate();
  const RandomStream stream = make_random_stream(steps, dim, seed);
  const LayerPartition part = chunked_partition(dim);

  ModelParams original = ModelParams::make(part, stream.theta0);
  ModelParams reformulated = ModelParams::make(part, stream.theta0);
  MomentState state_a = MomentState::zeros(dim);
  MomentState state_b = MomentState::zeros(dim);

  IdentityCheck check;
  for (std::size_t t = 0; t < steps; ++t) {
    GradientSnapshot g{stream.gradients[t]};
    adabelief_step(original, g, state_a, hp, AdaBeliefForm::original);
    adabelief_step(reformulated, g, state_b, hp, AdaBeliefForm::reformulated);
    for (std::size_t i = 0; i < dim; ++i) {
      check.max_abs_deviation =
          std::max(check.max_abs_deviation,
                   std::abs(original.values[i] - reformulated.values[i]));
    }
  }
  check.pass = check.max_abs_deviation <= real(1e-10);
  return check;
}

EquivalenceCheck verify_equivalence(std::size_t steps, std::size_t dim,
                                    std::uint64_t seed, HyperParams hp) {
  if (steps == 0 || dim == 0) {
    throw std::invalid_argument("verify_equivalence: steps and dim must be >= 1");
  }
  hp.tau = 0;
  hp.force_unit_gamma = true;
  hp.validate();
  const RandomStream stream = make_random_stream(steps, dim, seed);
  const LayerPartition part = chunked_partition(dim);

  ModelParams degenerate = ModelParams::make(part, stream.theta0);
  ModelParams star = ModelParams::make(part, stream.theta0);
  MomentState state_a = MomentState::zeros(dim);
  MomentState state_b = MomentState::zeros(dim);

  EquivalenceCheck check;
  for (std::size_t t = 0; t < steps; ++t) {
    GradientSnapshot g{stream.gradients[t]};
    set_adam_step(degenerate, g, state_a, hp);
    adam_star_step(star, g, state_b, hp);
    for (std::size_t i = 0; i < dim; ++i) {
      const real rel = std::abs(degenerate.values[i] - star.values[i]) /
                       std::max(real(1), std::abs(star.values[i]));
      check.max_rel_deviation = std::max(check.max_rel_deviation, rel);
    }
  }
  check.pass = check.max_rel_deviation <= real(1e-12);
  return check;
}

TheoreticalSetup make_theoretical_quadratic(std::size_t dim, std::uint64_t seed) {
  if (dim == 0 || dim > 10) {
    throw std::invalid_argument("make_theoretical_quadratic: dim must be in [1, 10]");
  }
  static constexpr real curvatures[5] = {1.0, 2.0, 0.5, 1.5, 3.0};
  std::vector<real> a(dim), b(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    a[i] = curvatures[i % 5];
    b[i] = a[i] * real(0.2) * (static_cast<real>(i % 3) - 1);  // optimum in {-.2, 0, .2}
  }

  TheoreticalSetup setup;
  setup.problem = std::make_shared<QuadraticProblem>(a, b, /*coordinate_layers=*/true);
  setup.hp.eta = 0.1;
  setup.hp.beta1 = 0.9;
  setup.hp.beta2 = 0.999;
  setup.hp.lambda = 0.95;
  setup.hp.epsilon = 1.0;
  setup.hp.tau = 0.5;
  setup.hp.schedule.kind = ScheduleKind::inverse_sqrt;
  setup.hp.theoretical_mode = true;

  CounterRng rng(seed, 3);
  setup.theta0.resize(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    setup.theta0[i] = real(0.8) + real(0.2) * static_cast<real>(rng.next_double());
  }
  setup.radius = 2 * std::sqrt(static_cast<real>(dim));
  return setup;
}

}  // namespace setadam
