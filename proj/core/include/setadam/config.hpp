#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "setadam/hyperparams.hpp"
#include "setadam/problem.hpp"

#include "json.hpp"

namespace setadam {

// Configuration errors map to CLI exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ProblemSpec {
  std::string kind;                 // quadratic | logistic | mlp
  std::string dataset = "two_moons";  // two_moons | csv
  std::string csv_path;
  std::string label_column;
  std::size_t n = 200;              // two-moons training size
  real noise = 0.15;
  std::uint64_t data_seed = 0;
  std::size_t val_n = 0;            // two-moons validation size; 0 = none
  std::vector<std::size_t> widths;  // mlp
  std::string activation = "tanh";
  real l2 = 0;                      // logistic
  std::vector<real> a_diag;         // quadratic
  std::vector<real> b;
  bool coordinate_layers = false;   // quadratic: one layer per coordinate

  nlohmann::json to_json() const;
};

struct RunConfig {
  ProblemSpec problem;
  OptimizerKind optimizer = OptimizerKind::adam;
  HyperParams hp;
  int epochs = 10;
  int batch_size = 32;  // 0 = full batch
  std::uint64_t seed = 1;
  long trace_every = 0;  // iterations between records; 0 = once per epoch
  std::string out_dir;
  std::string mode = "train";  // train | theoretical
  real projection_radius = 0;  // theoretical mode

  nlohmann::json to_json() const;
};

// Flat sectioned key=value text. '#' starts a comment line; unknown sections
// or keys are hard errors. Environment variables SETADAM_<SECTION>_<KEY>
// override file values.
RunConfig parse_config_text(const std::string& text, const std::string& source,
                            bool apply_env = true);
RunConfig parse_config_file(const std::string& path, bool apply_env = true);

struct BuiltProblem {
  std::shared_ptr<Problem> problem;
  std::optional<Dataset> validation;
};

BuiltProblem build_problem(const ProblemSpec& spec);

}  // namespace setadam
