#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "setadam/config.hpp"
#include "setadam/csv.hpp"
#include "setadam/rng.hpp"
#include "setadam/runner.hpp"
#include "setadam/update_rules.hpp"
#include "setadam/verifier.hpp"
#include "setadam/version.hpp"

namespace {

using nlohmann::json;
using namespace setadam;

constexpr int kExitOk = 0;
constexpr int kExitAssertion = 1;
constexpr int kExitConfig = 2;

struct VerifyInstanceOptions {
  std::size_t dim = 5;
  std::uint64_t seed = 1;
  std::vector<long> horizons{100, 1000};
  double eta = -1, beta1 = -1, beta2 = -1, lambda = -1, epsilon = -1, tau = -1;
};

void add_instance_flags(CLI::App* cmd, VerifyInstanceOptions& opt) {
  cmd->add_option("--dim", opt.dim, "problem dimension (<= 10)");
  cmd->add_option("--seed", opt.seed, "instance seed");
  cmd->add_option("--T", opt.horizons, "horizon(s), repeatable");
  cmd->add_option("--eta", opt.eta, "base stepsize");
  cmd->add_option("--beta1", opt.beta1, "first-moment coefficient");
  cmd->add_option("--beta2", opt.beta2, "second-moment coefficient");
  cmd->add_option("--lambda", opt.lambda, "beta1 decay rate (must be < 1)");
  cmd->add_option("--epsilon", opt.epsilon, "epsilon");
  cmd->add_option("--tau", opt.tau, "down-translating strength");
}

TheoreticalSetup setup_from_options(const VerifyInstanceOptions& opt) {
  TheoreticalSetup setup = make_theoretical_quadratic(opt.dim, opt.seed);
  if (opt.eta > 0) setup.hp.eta = static_cast<real>(opt.eta);
  if (opt.beta1 >= 0) setup.hp.beta1 = static_cast<real>(opt.beta1);
  if (opt.beta2 >= 0) setup.hp.beta2 = static_cast<real>(opt.beta2);
  if (opt.lambda >= 0) setup.hp.lambda = static_cast<real>(opt.lambda);
  if (opt.epsilon >= 0) setup.hp.epsilon = static_cast<real>(opt.epsilon);
  if (opt.tau >= 0) setup.hp.tau = static_cast<real>(opt.tau);
  return setup;
}

json assumption_json(const AssumptionReport& r) {
  json j;
  j["g_inf"] = r.g_inf;
  j["max_iterate_l2"] = r.max_iterate_l2;
  j["max_iterate_linf"] = r.max_iterate_linf;
  j["optimum_l2"] = r.optimum_l2;
  j["bounded"] = r.bounded;
  j["monotonicity_violations"] = r.monotonicity_violations;
  j["monotonicity_pairs"] = r.monotonicity_pairs;
  j["violation_fraction"] = r.violation_fraction;
  j["denominator_floor"] = r.denominator_floor;
  j["c"] = r.c;
  j["hold"] = r.hold();
  return j;
}

void emit_report(const json& report, const std::string& out_path) {
  const std::string text = report.dump(2) + "\n";
  std::cout << text;
  if (!out_path.empty()) {
    write_text_file(out_path, text);
  }
}

int run_command(const std::string& config_path, std::uint64_t* seed_override,
                const std::string& out_override, long* trace_override) {
  RunConfig cfg = parse_config_file(config_path);
  if (seed_override) cfg.seed = *seed_override;
  if (!out_override.empty()) cfg.out_dir = out_override;
  if (trace_override) cfg.trace_every = *trace_override;

  const RunSummary summary = run(cfg);
  std::cout << "optimizer: " << to_string(cfg.optimizer) << "\n";
  std::cout << "initial loss: " << format_real(summary.initial_loss) << "\n";
  std::cout << "final loss:   " << format_real(summary.final_loss) << "\n";
  if (summary.final_train_accuracy) {
    std::cout << "train accuracy: " << format_real(*summary.final_train_accuracy)
              << "\n";
  }
  if (summary.final_val_accuracy) {
    std::cout << "val accuracy:   " << format_real(*summary.final_val_accuracy) << "\n";
  }
  if (!cfg.out_dir.empty()) {
    std::cout << "wrote " << cfg.out_dir << "/{trace.csv, range.csv, summary.json}\n";
  }
  return kExitOk;
}

int compare_command(const std::vector<std::string>& config_paths,
                    const std::vector<std::uint64_t>& seeds,
                    const std::string& metric_name, const std::string& out_dir) {
  std::vector<RunConfig> configs;
  configs.reserve(config_paths.size());
  for (const std::string& path : config_paths) {
    configs.push_back(parse_config_file(path));
  }
  const Metric metric = metric_from_string(metric_name);
  const Comparison cmp = compare(configs, seeds, metric);
  if (cmp.single_seed_warning) {
    std::cerr << "warning: fewer than 3 seeds; reported std is not meaningful\n";
  }
  std::cout << cmp.to_table();
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    write_text_file((std::filesystem::path(out_dir) / "comparison.json").string(),
                    cmp.to_json().dump(2) + "\n");
  }
  return kExitOk;
}

int verify_regret_command(const VerifyInstanceOptions& opt, const std::string& out) {
  const TheoreticalSetup setup = setup_from_options(opt);
  json report;
  report["check"] = "regret";
  report["dim"] = opt.dim;
  report["seed"] = opt.seed;
  json runs = json::array();
  bool any_fail = false;
  for (long T : opt.horizons) {
    if (T < 1) throw ConfigError("verify regret: T must be >= 1");
    const TheoremInstance inst = run_theorem_instance(
        setup.problem, setup.hp, static_cast<std::size_t>(T), setup.radius,
        setup.theta0);
    const AssumptionReport assumptions = check_assumptions(inst);
    const RegretCheck check = verify_regret(inst);
    json j;
    j["T"] = T;
    j["assumptions"] = assumption_json(assumptions);
    if (check.vacuous) {
      j["result"] = "vacuous";
    } else {
      j["result"] = check.pass ? "pass" : "fail";
      j["gap"] = check.gap;
      j["bound_total"] = check.bound.total();
      j["bound_terms"] = {{"init", check.bound.init_term},
                          {"schedule", check.bound.schedule_term},
                          {"gradient", check.bound.gradient_term},
                          {"momentum", check.bound.momentum_term}};
      j["margin"] = check.margin;
      if (!check.pass) any_fail = true;
    }
    runs.push_back(j);
  }
  report["runs"] = runs;
  emit_report(report, out);
  return any_fail ? kExitAssertion : kExitOk;
}

int verify_lemma1_command(const VerifyInstanceOptions& opt, const std::string& out) {
  const TheoreticalSetup setup = setup_from_options(opt);
  json report;
  report["check"] = "lemma1";
  report["dim"] = opt.dim;
  report["seed"] = opt.seed;
  json runs = json::array();
  bool any_fail = false;
  for (long T : opt.horizons) {
    if (T < 1) throw ConfigError("verify lemma1: T must be >= 1");
    const TheoremInstance inst = run_theorem_instance(
        setup.problem, setup.hp, static_cast<std::size_t>(T), setup.radius,
        setup.theta0);
    const AssumptionReport assumptions = check_assumptions(inst);
    const Lemma1Check check = verify_lemma1(inst, assumptions);
    json j;
    j["T"] = T;
    j["assumptions"] = assumption_json(assumptions);
    if (check.vacuous) {
      j["result"] = "vacuous";
    } else {
      j["result"] = check.pass ? "pass" : "fail";
      j["lhs"] = check.lhs;
      j["rhs"] = check.rhs;
      j["margin"] = check.margin;
      if (!check.pass) any_fail = true;
    }
    runs.push_back(j);
  }
  report["runs"] = runs;
  emit_report(report, out);
  return any_fail ? kExitAssertion : kExitOk;
}

int verify_taylor_command(std::size_t samples, std::size_t dim, long t, double beta2,
                          double epsilon, std::uint64_t seed, const std::string& out) {
  if (samples == 0 || dim == 0) {
    throw ConfigError("verify taylor: samples and dim must be >= 1");
  }
  const real eps = static_cast<real>(epsilon);
  const real b2 = static_cast<real>(beta2);
  const real corr = 1 - std::pow(b2, static_cast<real>(t));

  // Draw bias-corrected second-momentum entries log-uniformly over
  // [100 eps, 1]: inside the Taylor gate and inside the regime where the
  // embedded spread provably contracts.
  CounterRng rng(seed, 4);
  const real lo = std::log(100 * eps);
  const real hi = std::log(real(1));
  real worst_error = 0;
  std::size_t contraction_failures = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    std::vector<real> v(dim);
    for (real& x : v) {
      const real a = std::exp(lo + (hi - lo) * static_cast<real>(rng.next_double()));
      x = a * corr;
    }
    const TaylorReport rep = verify_taylor_suppression(v, t, b2, eps);
    worst_error = std::max(worst_error, rep.max_rel_error);
    if (!rep.contraction_ok) ++contraction_failures;
    if (!rep.gated) {
      throw ConfigError("verify taylor: internal sampling left the gate region");
    }
  }
  const bool pass = worst_error <= real(0.01) && contraction_failures == 0;
  json report;
  report["check"] = "taylor";
  report["samples"] = samples;
  report["dim"] = dim;
  report["epsilon"] = epsilon;
  report["beta2"] = beta2;
  report["t"] = t;
  report["max_rel_error"] = worst_error;
  report["contraction_failures"] = contraction_failures;
  report["result"] = pass ? "pass" : "fail";
  emit_report(report, out);
  return pass ? kExitOk : kExitAssertion;
}

int verify_adabelief_command(std::size_t steps, std::size_t dim, std::uint64_t seed,
                             const std::string& out) {
  const IdentityCheck check = verify_adabelief_identity(steps, dim, seed);
  json report;
  report["check"] = "adabelief-identity";
  report["steps"] = steps;
  report["dim"] = dim;
  report["seed"] = seed;
  report["max_abs_deviation"] = check.max_abs_deviation;
  report["result"] = check.pass ? "pass" : "fail";
  emit_report(report, out);
  return check.pass ? kExitOk : kExitAssertion;
}

int verify_equivalence_command(std::size_t steps, std::size_t dim, std::uint64_t seed,
                               const std::string& out) {
  const EquivalenceCheck check = verify_equivalence(steps, dim, seed);
  json report;
  report["check"] = "equivalence";
  report["steps"] = steps;
  report["dim"] = dim;
  report["seed"] = seed;
  report["max_rel_deviation"] = check.max_rel_deviation;
  report["result"] = check.pass ? "pass" : "fail";
  emit_report(report, out);
  return check.pass ? kExitOk : kExitAssertion;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SET-Adam optimizer experiment harness"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  // run
  auto* run_cmd = app.add_subcommand("run", "train one optimizer/problem config");
  std::string run_config;
  run_cmd->add_option("--config", run_config, "config file")->required();
  std::uint64_t run_seed = 0;
  auto* run_seed_opt = run_cmd->add_option("--seed", run_seed, "seed override");
  std::string run_out;
  run_cmd->add_option("--out", run_out, "output directory override");
  long run_trace = 0;
  auto* run_trace_opt =
      run_cmd->add_option("--trace-every", run_trace, "trace cadence override");

  // compare
  auto* cmp_cmd = app.add_subcommand("compare", "mean/std of a metric across configs");
  std::vector<std::string> cmp_configs;
  cmp_cmd->add_option("--config", cmp_configs, "config file (repeatable)")
      ->required()
      ->expected(-2);
  std::vector<std::uint64_t> cmp_seeds{1, 2, 3};
  cmp_cmd->add_option("--seeds", cmp_seeds, "seeds, e.g. --seeds 1 2 3");
  std::string cmp_metric = "loss";
  cmp_cmd->add_option("--metric", cmp_metric, "loss | accuracy | range_cv");
  std::string cmp_out;
  cmp_cmd->add_option("--out", cmp_out, "directory for comparison.json");

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "theory checks");
  verify_cmd->require_subcommand(1);

  auto* regret_cmd = verify_cmd->add_subcommand("regret", "regret bound check");
  VerifyInstanceOptions regret_opt;
  add_instance_flags(regret_cmd, regret_opt);
  std::string regret_out;
  regret_cmd->add_option("--out", regret_out, "write the JSON report here");

  auto* lemma_cmd = verify_cmd->add_subcommand("lemma1", "momentum-sum lemma check");
  VerifyInstanceOptions lemma_opt;
  add_instance_flags(lemma_cmd, lemma_opt);
  std::string lemma_out;
  lemma_cmd->add_option("--out", lemma_out, "write the JSON report here");

  auto* taylor_cmd =
      verify_cmd->add_subcommand("taylor", "epsilon-embedding Taylor check");
  std::size_t taylor_samples = 1000, taylor_dim = 50;
  long taylor_t = 10;
  double taylor_beta2 = 0.999, taylor_eps = 1e-5;
  std::uint64_t taylor_seed = 1;
  std::string taylor_out;
  taylor_cmd->add_option("--samples", taylor_samples, "random vectors to test");
  taylor_cmd->add_option("--dim", taylor_dim, "vector dimension");
  taylor_cmd->add_option("--t", taylor_t, "iteration for the bias correction");
  taylor_cmd->add_option("--beta2", taylor_beta2, "second-moment coefficient");
  taylor_cmd->add_option("--epsilon", taylor_eps, "epsilon");
  taylor_cmd->add_option("--seed", taylor_seed, "sampling seed");
  taylor_cmd->add_option("--out", taylor_out, "write the JSON report here");

  auto* belief_cmd = verify_cmd->add_subcommand(
      "adabelief-identity", "original vs reformulated AdaBelief");
  std::size_t belief_steps = 200, belief_dim = 20;
  std::uint64_t belief_seed = 1;
  std::string belief_out;
  belief_cmd->add_option("--steps", belief_steps, "steps");
  belief_cmd->add_option("--dim", belief_dim, "dimension");
  belief_cmd->add_option("--seed", belief_seed, "stream seed");
  belief_cmd->add_option("--out", belief_out, "write the JSON report here");

  auto* equiv_cmd = verify_cmd->add_subcommand(
      "equivalence", "SET-Adam (gamma=1, tau=0) vs Adam*");
  std::size_t equiv_steps = 100, equiv_dim = 50;
  std::uint64_t equiv_seed = 1;
  std::string equiv_out;
  equiv_cmd->add_option("--steps", equiv_steps, "steps");
  equiv_cmd->add_option("--dim", equiv_dim, "dimension");
  equiv_cmd->add_option("--seed", equiv_seed, "stream seed");
  equiv_cmd->add_option("--out", equiv_out, "write the JSON report here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      return run_command(run_config, *run_seed_opt ? &run_seed : nullptr, run_out,
                         *run_trace_opt ? &run_trace : nullptr);
    }
    if (*cmp_cmd) {
      return compare_command(cmp_configs, cmp_seeds, cmp_metric, cmp_out);
    }
    if (*regret_cmd) return verify_regret_command(regret_opt, regret_out);
    if (*lemma_cmd) return verify_lemma1_command(lemma_opt, lemma_out);
    if (*taylor_cmd) {
      return verify_taylor_command(taylor_samples, taylor_dim, taylor_t, taylor_beta2,
                                   taylor_eps, taylor_seed, taylor_out);
    }
    if (*belief_cmd) {
      return verify_adabelief_command(belief_steps, belief_dim, belief_seed,
                                      belief_out);
    }
    if (*equiv_cmd) {
      return verify_equivalence_command(equiv_steps, equiv_dim, equiv_seed, equiv_out);
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
