#pragma once

#include <optional>
#include <string>
#include <vector>

#include "setadam/config.hpp"
#include "setadam/trace.hpp"

namespace setadam {

struct RunSummary {
  real initial_loss = 0;
  real final_loss = 0;
  std::optional<real> final_train_accuracy;
  std::optional<real> final_val_accuracy;
  double wall_seconds = 0;
  std::vector<real> epoch_losses;
  std::vector<RangeSummary> range_series;
  StepsizeTrace trace;
  RunConfig config;
  std::string version;
  std::string trace_file;  // set when out_dir was given
  std::string range_file;

  nlohmann::json to_json() const;
};

// Full training loop with instrumentation. Deterministic for a fixed config
// and seed; writes trace.csv, range.csv and summary.json when out_dir is set.
RunSummary run(const RunConfig& config);

enum class Metric { final_loss, final_accuracy, range_cv };

Metric metric_from_string(const std::string& name);
const char* to_string(Metric m);

struct CompareRow {
  std::string optimizer;
  std::vector<real> values;  // one per seed
  real mean = 0;
  real stddev = 0;  // population std over seeds
};

struct Comparison {
  Metric metric = Metric::final_loss;
  std::vector<std::uint64_t> seeds;
  std::vector<CompareRow> rows;
  bool single_seed_warning = false;

  nlohmann::json to_json() const;
  std::string to_table() const;
};

// Runs every config with every seed (the configs' own seeds are overridden)
// and aggregates the metric per config. All configs must share one problem
// spec; fewer than two configs or mismatched problems are rejected.
Comparison compare(const std::vector<RunConfig>& configs,
                   const std::vector<std::uint64_t>& seeds, Metric metric);

}  // namespace setadam
