#include "setadam/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <sstream>

#include "setadam/csv.hpp"
#include "setadam/rng.hpp"
#include "setadam/update_rules.hpp"
#include "setadam/version.hpp"

namespace setadam {

nlohmann::json RunSummary::to_json() const {
  nlohmann::json j;
  j["artifact_version"] = version;
  j["config"] = config.to_json();
  j["initial_loss"] = initial_loss;
  j["final_loss"] = final_loss;
  if (final_train_accuracy) j["final_train_accuracy"] = *final_train_accuracy;
  if (final_val_accuracy) j["final_val_accuracy"] = *final_val_accuracy;
  j["wall_seconds"] = wall_seconds;
  j["epoch_losses"] = epoch_losses;
  nlohmann::json series = nlohmann::json::array();
  for (const RangeSummary& r : range_series) {
    nlohmann::json row;
    row["iter"] = r.iter;
    row["epoch"] = r.epoch;
    row["ratio"] = r.ratio;
    row["cv"] = r.cv;
    row["global_min_alpha"] = r.global_min_alpha;
    row["global_max_alpha"] = r.global_max_alpha;
    series.push_back(row);
  }
  j["range_series"] = series;
  if (!trace_file.empty()) j["trace_file"] = trace_file;
  if (!range_file.empty()) j["range_file"] = range_file;
  return j;
}

RunSummary run(const RunConfig& config) {
  const auto start = std::chrono::steady_clock::now();

  BuiltProblem built = build_problem(config.problem);
  const Problem& problem = *built.problem;
  const LayerPartition& partition = problem.partition();

  HyperParams hp = config.hp;
  const bool theoretical = config.mode == "theoretical";
  if (theoretical) {
    if (!problem.convex()) {
      throw ConfigError("run: theoretical mode requires a convex problem");
    }
    if (hp.schedule.kind != ScheduleKind::inverse_sqrt) {
      throw ConfigError("run: theoretical mode requires schedule = inverse_sqrt");
    }
    if (!(config.projection_radius > 0)) {
      throw ConfigError("run: theoretical mode requires projection_radius > 0");
    }
    hp.theoretical_mode = true;
  }

  ModelParams params =
      ModelParams::make(partition, problem.initial_point(config.seed));
  MomentState state = MomentState::zeros(problem.dim());

  RunSummary summary;
  summary.config = config;
  summary.version = kVersion;
  summary.initial_loss = problem.loss(params.values);

  const std::size_t samples = problem.sample_count();
  const bool minibatched = !theoretical && samples > 0 && config.batch_size > 0 &&
                           static_cast<std::size_t>(config.batch_size) < samples;
  const std::size_t iters_per_epoch =
      minibatched
          ? (samples + static_cast<std::size_t>(config.batch_size) - 1) /
                static_cast<std::size_t>(config.batch_size)
          : 1;
  const long cadence = config.trace_every > 0
                           ? config.trace_every
                           : static_cast<long>(iters_per_epoch);

  std::vector<std::size_t> order(samples);
  std::iota(order.begin(), order.end(), std::size_t{0});

  StepOutput last_step;
  int last_epoch = 0;
  long last_recorded_iter = -1;

  auto record = [&](const StepOutput& step, long iter, int epoch) {
    const std::vector<StepsizeRecord> records =
        record_layer_stats(step, partition, iter, epoch);
    summary.range_series.push_back(
        summarize_range(std::span<const StepsizeRecord>(records)));
    summary.trace.insert(summary.trace.end(), records.begin(), records.end());
    last_recorded_iter = iter;
  };

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    if (minibatched) {
      // seeded per-epoch shuffle: sampling without replacement
      CounterRng rng(config.seed, 1 + static_cast<std::uint64_t>(epoch));
      for (std::size_t i = samples; i > 1; --i) {
        const std::size_t j = rng.next_below(i);
        std::swap(order[i - 1], order[j]);
      }
    }
    for (std::size_t k = 0; k < iters_per_epoch; ++k) {
      std::span<const std::size_t> batch;
      if (minibatched) {
        const std::size_t lo = k * static_cast<std::size_t>(config.batch_size);
        const std::size_t hi =
            std::min(samples, lo + static_cast<std::size_t>(config.batch_size));
        batch = std::span<const std::size_t>(order).subspan(lo, hi - lo);
      }
      const GradientSnapshot g = problem.gradient(params.values, batch);
      last_step = apply_step(config.optimizer, params, g, state, hp, epoch);
      last_epoch = epoch;
      if (theoretical) {
        project_to_ball(params.values, config.projection_radius);
      }
      if (state.t % cadence == 0) {
        record(last_step, state.t, epoch);
      }
    }
    summary.epoch_losses.push_back(problem.loss(params.values));
  }
  if (state.t > 0 && last_recorded_iter != state.t) {
    record(last_step, state.t, last_epoch);
  }

  summary.final_loss =
      summary.epoch_losses.empty() ? summary.initial_loss : summary.epoch_losses.back();
  if (problem.classification()) {
    if (const auto* lp = dynamic_cast<const LogisticRegressionProblem*>(&problem)) {
      summary.final_train_accuracy = lp->accuracy(params.values, lp->dataset());
    } else if (const auto* mp = dynamic_cast<const MlpProblem*>(&problem)) {
      summary.final_train_accuracy = mp->accuracy(params.values, mp->dataset());
    }
    if (built.validation) {
      summary.final_val_accuracy = problem.accuracy(params.values, *built.validation);
    }
  }

  summary.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (!config.out_dir.empty()) {
    std::filesystem::create_directories(config.out_dir);
    const std::filesystem::path dir(config.out_dir);
    summary.trace_file = "trace.csv";
    summary.range_file = "range.csv";
    write_trace_csv((dir / summary.trace_file).string(), summary.trace);
    write_range_csv((dir / summary.range_file).string(), summary.range_series);
    write_text_file((dir / "summary.json").string(), summary.to_json().dump(2) + "\n");
  }
  return summary;
}

Metric metric_from_string(const std::string& name) {
  if (name == "loss" || name == "final_loss") return Metric::final_loss;
  if (name == "accuracy" || name == "final_accuracy") return Metric::final_accuracy;
  if (name == "range_cv" || name == "range-cv") return Metric::range_cv;
  throw ConfigError("unknown metric '" + name + "'");
}

const char* to_string(Metric m) {
  switch (m) {
    case Metric::final_loss: return "final_loss";
    case Metric::final_accuracy: return "final_accuracy";
    case Metric::range_cv: return "range_cv";
  }
  return "?";
}

nlohmann::json Comparison::to_json() const {
  nlohmann::json j;
  j["metric"] = to_string(metric);
  j["seeds"] = seeds;
  nlohmann::json rows_json = nlohmann::json::array();
  for (const CompareRow& row : rows) {
    nlohmann::json r;
    r["optimizer"] = row.optimizer;
    r["values"] = row.values;
    r["mean"] = row.mean;
    r["std"] = row.stddev;
    rows_json.push_back(r);
  }
  j["rows"] = rows_json;
  return j;
}

std::string Comparison::to_table() const {
  std::ostringstream out;
  out << "metric: " << to_string(metric) << " over " << seeds.size() << " seed"
      << (seeds.size() == 1 ? "" : "s") << "\n";
  std::size_t width = 9;
  for (const CompareRow& row : rows) width = std::max(width, row.optimizer.size());
  out << std::string(width, ' ') << "  mean          std\n";
  for (const CompareRow& row : rows) {
    out << row.optimizer << std::string(width - row.optimizer.size(), ' ') << "  "
        << format_real(row.mean) << "  " << format_real(row.stddev) << "\n";
  }
  return out.str();
}

Comparison compare(const std::vector<RunConfig>& configs,
                   const std::vector<std::uint64_t>& seeds, Metric metric) {
  if (configs.size() < 2) {
    throw ConfigError("compare: need at least two configs");
  }
  if (seeds.empty()) {
    throw ConfigError("compare: need at least one seed");
  }
  const std::string reference = configs.front().problem.to_json().dump();
  for (const RunConfig& cfg : configs) {
    if (cfg.problem.to_json().dump() != reference) {
      throw ConfigError("compare: configs must share one problem spec");
    }
  }

  Comparison cmp;
  cmp.metric = metric;
  cmp.seeds = seeds;
  cmp.single_seed_warning = seeds.size() < 3;
  for (const RunConfig& base : configs) {
    CompareRow row;
    row.optimizer = to_string(base.optimizer);
    for (const std::uint64_t seed : seeds) {
      RunConfig cfg = base;
      cfg.seed = seed;
      cfg.out_dir.clear();
      const RunSummary summary = run(cfg);
      real value = 0;
      switch (metric) {
        case Metric::final_loss:
          value = summary.final_loss;
          break;
        case Metric::final_accuracy:
          if (summary.final_val_accuracy) {
            value = *summary.final_val_accuracy;
          } else if (summary.final_train_accuracy) {
            value = *summary.final_train_accuracy;
          } else {
            throw ConfigError("compare: metric accuracy needs a classification problem");
          }
          break;
        case Metric::range_cv:
          if (summary.range_series.empty()) {
            throw ConfigError("compare: metric range_cv needs recorded iterations");
          }
          value = summary.range_series.back().cv;
          break;
      }
      row.values.push_back(value);
    }
    const real n = static_cast<real>(row.values.size());
    row.mean = std::accumulate(row.values.begin(), row.values.end(), real(0)) / n;
    real sq = 0;
    for (real v : row.values) sq += (v - row.mean) * (v - row.mean);
    row.stddev = std::sqrt(sq / n);
    cmp.rows.push_back(std::move(row));
  }
  return cmp;
}

}  // namespace setadam
