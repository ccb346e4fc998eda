#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "setadam/hyperparams.hpp"
#include "setadam/problem.hpp"

namespace setadam {

// A completed theoretical-mode run on a convex problem: full-batch gradients,
// eta_t = eta / sqrt(t), beta1_t = beta1 * lambda^(t-1), iterates projected
// onto the L2 ball of radius D, no first-moment bias correction. Histories
// hold exactly T entries (index 0 is iteration 1).
struct TheoremInstance {
  std::shared_ptr<const Problem> problem;
  HyperParams hp;
  std::size_t horizon = 0;  // T
  real radius = 0;          // D
  std::vector<real> theta0;
  std::vector<std::vector<real>> gradients;     // g_t
  std::vector<std::vector<real>> moments;       // m_t
  std::vector<std::vector<real>> denominators;  // w~_t
  std::vector<std::vector<real>> iterates;      // theta_t
};

// Runs SET-Adam in theoretical mode and records the histories.
TheoremInstance run_theorem_instance(std::shared_ptr<const Problem> problem,
                                     HyperParams hp, std::size_t horizon,
                                     real radius, std::vector<real> theta0);

struct AssumptionReport {
  real g_inf = 0;  // smallest G with ||g_t||_inf <= G sqrt(1 - beta2) for all t
  real max_iterate_l2 = 0;
  real max_iterate_linf = 0;
  real optimum_l2 = 0;
  bool bounded = false;  // every iterate and the optimum inside the D-ball
  std::size_t monotonicity_violations = 0;
  std::size_t monotonicity_pairs = 0;
  real violation_fraction = 0;
  real denominator_floor = 0;  // min over (i, t) of w~_t[i], i.e. sqrt(c)
  real c = 0;                  // denominator_floor squared

  bool hold() const { return bounded && monotonicity_violations == 0; }
};

AssumptionReport check_assumptions(const TheoremInstance& instance);

// The four summands of the regret bound. Requires lambda < 1.
struct RegretBound {
  real init_term = 0;        // 2 D^2 d (G + sqrt(eps)) / (eta (1-b1) T)
  real schedule_term = 0;    // 2 D^2 d (G + sqrt(eps)) / (sqrt(T) (1-b1) eta)
  real gradient_term = 0;    // (1+b1) eta sqrt(1+log T) sum_i ||g^2_{1:T}[i]|| / (2 sqrt(c) (1-b1)^3 T)
  real momentum_term = 0;    // 2 D^2 d b1 (G + sqrt(eps)) / ((1-b1) (1-lambda)^2 eta T)

  real total() const { return init_term + schedule_term + gradient_term + momentum_term; }
};

RegretBound regret_bound_rhs(const TheoremInstance& instance,
                             const AssumptionReport& report);

struct RegretCheck {
  bool vacuous = false;  // some assumption failed; nothing asserted
  real gap = 0;          // f(mean iterate) - f(optimum)
  RegretBound bound;
  real margin = 0;  // bound.total() - gap
  bool pass = false;
  std::vector<real> theta_bar;
};

RegretCheck verify_regret(const TheoremInstance& instance);

struct Lemma1Check {
  bool vacuous = false;
  real lhs = 0;  // sum_t eta_t || w~_{t+1}^{-1/2} m_t ||^2
  real rhs = 0;  // eta sqrt(1+log T) sum_i ||g^2_{1:T}[i]|| / (sqrt(c) (1-b1)^2)
  real margin = 0;
  bool pass = false;
};

Lemma1Check verify_lemma1(const TheoremInstance& instance,
                          const AssumptionReport& report);

struct TaylorReport {
  bool gated = false;       // min(v / (1 - beta2^t)) >= 100 eps
  real max_rel_error = 0;   // Taylor form vs exact embedded stepsize
  real spread_embedded = 0; // max/min of 1/sqrt(a + eps)
  real spread_outside = 0;  // max/min of 1/(sqrt(a) + eps)
  bool error_ok = false;    // gated implies max_rel_error <= 1%
  bool contraction_ok = false;  // spread_embedded <= spread_outside
};

TaylorReport verify_taylor_suppression(std::span<const real> v, long t, real beta2,
                                       real eps);

struct IdentityCheck {
  real max_abs_deviation = 0;
  bool pass = false;  // deviation <= 1e-10
};

// Original vs reformulated AdaBelief on a shared random gradient stream.
IdentityCheck verify_adabelief_identity(std::size_t steps, std::size_t dim,
                                        std::uint64_t seed, HyperParams hp = {});

struct EquivalenceCheck {
  real max_rel_deviation = 0;
  bool pass = false;  // deviation <= 1e-12
};

// SET-Adam with gamma pinned to 1 and tau = 0 against Adam* on a shared
// random gradient stream.
EquivalenceCheck verify_equivalence(std::size_t steps, std::size_t dim,
                                    std::uint64_t seed, HyperParams hp = {});

// A diagonal quadratic with one partition layer per coordinate, a gentle
// stepsize and a large epsilon, engineered so the per-coordinate gradient
// magnitudes shrink monotonically and the denominator-monotonicity assumption
// holds along the run.
struct TheoreticalSetup {
  std::shared_ptr<const Problem> problem;
  HyperParams hp;
  std::vector<real> theta0;
  real radius = 0;
};

TheoreticalSetup make_theoretical_quadratic(std::size_t dim, std::uint64_t seed);

}  // namespace setadam
