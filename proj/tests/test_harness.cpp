#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "setadam/config.hpp"
#include "setadam/csv.hpp"
#include "setadam/rng.hpp"
#include "setadam/runner.hpp"

using namespace setadam;
namespace fs = std::filesystem;

namespace {

const char* kTinyMlpConfig = R"(
# two-moons smoke configuration
[problem]
kind = mlp
dataset = two_moons
n = 64
noise = 0.15
data_seed = 7
val_n = 32
widths = 2,4,2
activation = tanh

[optimizer]
kind = set_adam
eta = 0.01
beta1 = 0.9
beta2 = 0.999
epsilon = 1e-5
tau = 0.5

[run]
epochs = 3
batch_size = 16
seed = 1
)";

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("setadam_harness_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static inline int counter = 0;
};

std::string slurp(const fs::path& p) { return read_text_file(p.string()); }

}  // namespace

TEST_CASE("config parsing covers sections, types, and defaults") {
  const RunConfig cfg = parse_config_text(kTinyMlpConfig, "test", false);
  CHECK(cfg.problem.kind == "mlp");
  CHECK(cfg.problem.n == 64);
  CHECK(cfg.problem.val_n == 32);
  CHECK(cfg.problem.widths == std::vector<std::size_t>{2, 4, 2});
  CHECK(cfg.optimizer == OptimizerKind::set_adam);
  CHECK(cfg.hp.eta == doctest::Approx(0.01));
  CHECK(cfg.hp.epsilon == doctest::Approx(1e-5));
  CHECK(cfg.epochs == 3);
  CHECK(cfg.batch_size == 16);
  CHECK(cfg.seed == 1);
  CHECK(cfg.mode == "train");
}

TEST_CASE("unknown keys and malformed configs are hard errors") {
  CHECK_THROWS_WITH_AS(
      parse_config_text("[problem]\nkind = mlp\nwidht = 2\n", "test", false),
      doctest::Contains("widht"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config_text("[nonsense]\nx = 1\n", "test", false),
                       doctest::Contains("nonsense"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("kind = mlp\n", "test", false), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[problem]\nkind\n", "test", false), ConfigError);
  CHECK_THROWS_AS(
      parse_config_text("[problem]\nkind = mlp\nkind = mlp\n", "test", false),
      ConfigError);
  CHECK_THROWS_AS(
      parse_config_text("[problem]\nkind = warp_drive\n", "test", false),
      ConfigError);
  CHECK_THROWS_AS(parse_config_text(
                      "[problem]\nkind = mlp\nwidths = 2,2\n[optimizer]\nkind = "
                      "adam\neta = fast\n",
                      "test", false),
                  ConfigError);
  // hyperparameter validation runs on the parsed result
  CHECK_THROWS_AS(parse_config_text(
                      "[problem]\nkind = mlp\nwidths = 2,2\n[optimizer]\nkind = "
                      "adam\ntau = 1.5\n",
                      "test", false),
                  ConfigError);
}

TEST_CASE("environment variables override file values") {
  ::setenv("SETADAM_OPTIMIZER_ETA", "0.5", 1);
  const RunConfig cfg = parse_config_text(kTinyMlpConfig, "test", true);
  ::unsetenv("SETADAM_OPTIMIZER_ETA");
  CHECK(cfg.hp.eta == doctest::Approx(0.5));

  const RunConfig plain = parse_config_text(kTinyMlpConfig, "test", true);
  CHECK(plain.hp.eta == doctest::Approx(0.01));
}

TEST_CASE("format_real round-trips doubles") {
  CounterRng rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    const double x = (rng.next_double() - 0.5) * std::pow(10.0, double(rng.next_below(20)) - 10.0);
    const std::string s = format_real(x);
    CHECK(std::stod(s) == x);
  }
  CHECK(format_real(0.0) == "0");
  CHECK(format_real(1.0) == "1");
}

TEST_CASE("runs are byte-deterministic for a fixed config and seed") {
  TempDir a, b;
  RunConfig cfg = parse_config_text(kTinyMlpConfig, "test", false);
  cfg.out_dir = a.path.string();
  run(cfg);
  cfg.out_dir = b.path.string();
  run(cfg);

  CHECK(slurp(a.path / "trace.csv") == slurp(b.path / "trace.csv"));
  CHECK(slurp(a.path / "range.csv") == slurp(b.path / "range.csv"));
  CHECK(!slurp(a.path / "trace.csv").empty());

  // a different seed changes the trace
  cfg.seed = 2;
  TempDir c;
  cfg.out_dir = c.path.string();
  run(cfg);
  CHECK(slurp(a.path / "trace.csv") != slurp(c.path / "trace.csv"));
}

TEST_CASE("summary.json round-trips byte for byte") {
  TempDir dir;
  RunConfig cfg = parse_config_text(kTinyMlpConfig, "test", false);
  cfg.out_dir = dir.path.string();
  const RunSummary summary = run(cfg);
  CHECK(summary.final_train_accuracy.has_value());
  CHECK(summary.final_val_accuracy.has_value());

  const std::string text = slurp(dir.path / "summary.json");
  const nlohmann::json parsed = nlohmann::json::parse(text);
  CHECK(parsed.dump(2) + "\n" == text);

  // referenced trace files exist on disk at summary-write time
  CHECK(fs::exists(dir.path / parsed.at("trace_file").get<std::string>()));
  CHECK(fs::exists(dir.path / parsed.at("range_file").get<std::string>()));

  // the config echo carries everything needed to re-run
  CHECK(parsed.at("config").at("run").at("seed").get<std::uint64_t>() == cfg.seed);
  CHECK(parsed.at("config").at("optimizer").at("kind").get<std::string>() ==
        "set_adam");
}

TEST_CASE("zero-epoch runs report the initial loss and write empty traces") {
  TempDir dir;
  RunConfig cfg = parse_config_text(kTinyMlpConfig, "test", false);
  cfg.epochs = 0;
  cfg.out_dir = dir.path.string();
  const RunSummary summary = run(cfg);
  CHECK(summary.final_loss == summary.initial_loss);
  CHECK(summary.epoch_losses.empty());
  CHECK(summary.trace.empty());
  const std::string trace = slurp(dir.path / "trace.csv");
  CHECK(trace ==
        "iter,epoch,layer,mean_alpha,std_alpha,min_alpha,max_alpha,gamma,angle_deg\n");
}

TEST_CASE("theoretical mode rejects nonconvex problems before running") {
  RunConfig cfg = parse_config_text(kTinyMlpConfig, "test", false);
  cfg.mode = "theoretical";
  cfg.projection_radius = 2;
  cfg.hp.schedule.kind = ScheduleKind::inverse_sqrt;
  CHECK_THROWS_WITH_AS(run(cfg), doctest::Contains("convex"), ConfigError);
}

TEST_CASE("theoretical mode runs convex problems full-batch with projection") {
  RunConfig cfg;
  cfg.problem.kind = "quadratic";
  cfg.problem.a_diag = {1, 2};
  cfg.problem.b = {0, 0};
  cfg.problem.coordinate_layers = true;
  cfg.optimizer = OptimizerKind::set_adam;
  cfg.hp.schedule.kind = ScheduleKind::inverse_sqrt;
  cfg.hp.eta = 0.1;
  cfg.hp.lambda = 0.95;
  cfg.hp.epsilon = 1.0;
  cfg.mode = "theoretical";
  cfg.projection_radius = 3;
  cfg.epochs = 50;
  cfg.seed = 4;
  const RunSummary summary = run(cfg);
  CHECK(summary.epoch_losses.size() == 50);
  CHECK(summary.final_loss < summary.initial_loss);

  cfg.projection_radius = 0;
  CHECK_THROWS_AS(run(cfg), ConfigError);
  cfg.projection_radius = 3;
  cfg.hp.schedule.kind = ScheduleKind::constant;
  CHECK_THROWS_WITH_AS(run(cfg), doctest::Contains("inverse_sqrt"), ConfigError);
}

TEST_CASE("compare aggregates a metric over shared seeds") {
  RunConfig base = parse_config_text(kTinyMlpConfig, "test", false);
  base.epochs = 2;
  RunConfig adam_cfg = base;
  adam_cfg.optimizer = OptimizerKind::adam;
  adam_cfg.hp.epsilon = 1e-8;

  const Comparison cmp = compare({base, adam_cfg}, {1, 2, 3}, Metric::final_loss);
  CHECK(cmp.rows.size() == 2);
  CHECK(cmp.rows[0].optimizer == "set_adam");
  CHECK(cmp.rows[1].optimizer == "adam");
  for (const CompareRow& row : cmp.rows) {
    CHECK(row.values.size() == 3);
    CHECK(row.stddev >= 0);
  }
  CHECK_FALSE(cmp.single_seed_warning);

  const Comparison one_seed = compare({base, adam_cfg}, {1}, Metric::final_loss);
  CHECK(one_seed.single_seed_warning);
  CHECK(one_seed.rows[0].stddev == 0);

  // metric variants
  const Comparison acc = compare({base, adam_cfg}, {1}, Metric::final_accuracy);
  CHECK(acc.rows[0].values[0] >= 0);
  CHECK(acc.rows[0].values[0] <= 1);
  const Comparison cv = compare({base, adam_cfg}, {1}, Metric::range_cv);
  CHECK(cv.rows[0].values[0] >= 0);

  // mismatched problems are rejected
  RunConfig other = base;
  other.problem.n = 128;
  CHECK_THROWS_AS(compare({base, other}, {1, 2, 3}, Metric::final_loss), ConfigError);
  CHECK_THROWS_AS(compare({base}, {1}, Metric::final_loss), ConfigError);
  CHECK_THROWS_AS(compare({base, adam_cfg}, {}, Metric::final_loss), ConfigError);

  CHECK(metric_from_string("range-cv") == Metric::range_cv);
  CHECK_THROWS_AS(metric_from_string("vibes"), ConfigError);
}

TEST_CASE("trace cadence: default once per epoch plus the final iteration") {
  RunConfig cfg = parse_config_text(kTinyMlpConfig, "test", false);
  cfg.epochs = 3;  // 64 samples / batch 16 = 4 iters per epoch
  const RunSummary summary = run(cfg);
  // records at iterations 4, 8, 12 for 2 layers... partition has 4 layers
  const std::size_t layers = 4;
  CHECK(summary.trace.size() == 3 * layers);
  CHECK(summary.range_series.size() == 3);
  CHECK(summary.range_series.back().iter == 12);

  cfg.trace_every = 5;
  const RunSummary odd = run(cfg);
  // iterations 5, 10, plus the final iteration 12
  CHECK(odd.range_series.size() == 3);
  CHECK(odd.range_series.back().iter == 12);
}

TEST_CASE("counter rng follows its published algorithm") {
  auto mix = [](std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
  };
  const std::uint64_t golden = 0x9E3779B97F4A7C15ULL;
  const std::uint64_t seed = 123456789, stream = 5;
  const std::uint64_t base = mix(seed + golden * (stream + 1));
  CounterRng rng(seed, stream);
  for (std::uint64_t k = 0; k < 10; ++k) {
    CHECK(rng.next_u64() == mix(base + golden * (k + 1)));
  }
}
