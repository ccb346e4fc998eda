#include "setadam/config.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "setadam/csv.hpp"

namespace setadam {
namespace {

using KvMap = std::map<std::string, std::map<std::string, std::string>>;

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  std::size_t b = s.find_last_not_of(" \t\r");
  if (a == std::string::npos) return "";
  return s.substr(a, b - a + 1);
}

KvMap parse_ini(const std::string& text, const std::string& source) {
  KvMap map;
  std::string section;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') {
        throw ConfigError(source + ":" + std::to_string(lineno) +
                          ": malformed section header");
      }
      section = trim(t.substr(1, t.size() - 2));
      if (section.empty()) {
        throw ConfigError(source + ":" + std::to_string(lineno) + ": empty section name");
      }
      continue;
    }
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(source + ":" + std::to_string(lineno) +
                        ": expected 'key = value'");
    }
    if (section.empty()) {
      throw ConfigError(source + ":" + std::to_string(lineno) +
                        ": key outside of any section");
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError(source + ":" + std::to_string(lineno) + ": empty key");
    }
    if (map[section].count(key)) {
      throw ConfigError(source + ":" + std::to_string(lineno) + ": duplicate key '" +
                        key + "' in section [" + section + "]");
    }
    map[section][key] = value;
  }
  return map;
}

std::string upper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

// Typed accessors over one section. Every lookup marks the key as consumed;
// unconsumed keys are reported as unknown at the end.
class Section {
 public:
  Section(KvMap& map, const std::string& name) : name_(name) {
    auto it = map.find(name);
    if (it != map.end()) kv_ = &it->second;
  }

  std::optional<std::string> raw(const std::string& key) {
    consumed_.insert(key);
    const std::string env_name = "SETADAM_" + upper(name_) + "_" + upper(key);
    if (const char* env = std::getenv(env_name.c_str()); env && env_enabled) {
      return std::string(env);
    }
    if (!kv_) return std::nullopt;
    auto it = kv_->find(key);
    if (it == kv_->end()) return std::nullopt;
    return it->second;
  }

  std::string get_string(const std::string& key, const std::string& fallback) {
    return raw(key).value_or(fallback);
  }

  real get_real(const std::string& key, real fallback) {
    const auto v = raw(key);
    if (!v) return fallback;
    return parse_real(*v, key);
  }

  long get_long(const std::string& key, long fallback) {
    const auto v = raw(key);
    if (!v) return fallback;
    return parse_long(*v, key);
  }

  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) {
    const auto v = raw(key);
    if (!v) return fallback;
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
    if (ec != std::errc() || ptr != v->data() + v->size()) {
      throw ConfigError("config: key '" + key + "': expected unsigned integer, got '" +
                        *v + "'");
    }
    return out;
  }

  bool get_bool(const std::string& key, bool fallback) {
    const auto v = raw(key);
    if (!v) return fallback;
    if (*v == "true") return true;
    if (*v == "false") return false;
    throw ConfigError("config: key '" + key + "': expected true or false, got '" + *v +
                      "'");
  }

  std::vector<real> get_real_list(const std::string& key) {
    const auto v = raw(key);
    std::vector<real> out;
    if (!v || v->empty()) return out;
    std::stringstream ss(*v);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(parse_real(trim(cell), key));
    return out;
  }

  std::vector<int> get_int_list(const std::string& key) {
    const auto v = raw(key);
    std::vector<int> out;
    if (!v || v->empty()) return out;
    std::stringstream ss(*v);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      out.push_back(static_cast<int>(parse_long(trim(cell), key)));
    }
    return out;
  }

  std::vector<std::size_t> get_size_list(const std::string& key) {
    const auto v = raw(key);
    std::vector<std::size_t> out;
    if (!v || v->empty()) return out;
    std::stringstream ss(*v);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      const long x = parse_long(trim(cell), key);
      if (x < 0) throw ConfigError("config: key '" + key + "': negative entry");
      out.push_back(static_cast<std::size_t>(x));
    }
    return out;
  }

  void finish() const {
    if (!kv_) return;
    for (const auto& [key, value] : *kv_) {
      if (!consumed_.count(key)) {
        throw ConfigError("config: unknown key '" + key + "' in section [" + name_ +
                          "]");
      }
    }
  }

  bool env_enabled = true;

 private:
  static real parse_real(const std::string& v, const std::string& key) {
    double out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
      throw ConfigError("config: key '" + key + "': expected number, got '" + v + "'");
    }
    return static_cast<real>(out);
  }

  static long parse_long(const std::string& v, const std::string& key) {
    long out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
      throw ConfigError("config: key '" + key + "': expected integer, got '" + v + "'");
    }
    return out;
  }

  std::string name_;
  const std::map<std::string, std::string>* kv_ = nullptr;
  std::set<std::string> consumed_;
};

}  // namespace

nlohmann::json ProblemSpec::to_json() const {
  nlohmann::json j;
  j["kind"] = kind;
  if (kind == "logistic" || kind == "mlp") {
    j["dataset"] = dataset;
    if (dataset == "csv") {
      j["csv_path"] = csv_path;
      j["label_column"] = label_column;
    } else {
      j["n"] = n;
      j["noise"] = noise;
      j["data_seed"] = data_seed;
      j["val_n"] = val_n;
    }
  }
  if (kind == "mlp") {
    j["widths"] = widths;
    j["activation"] = activation;
  }
  if (kind == "logistic") j["l2"] = l2;
  if (kind == "quadratic") {
    j["a_diag"] = a_diag;
    j["b"] = b;
    j["coordinate_layers"] = coordinate_layers;
  }
  return j;
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j;
  j["problem"] = problem.to_json();
  nlohmann::json opt;
  opt["kind"] = to_string(optimizer);
  opt["eta"] = hp.eta;
  opt["beta1"] = hp.beta1;
  opt["beta2"] = hp.beta2;
  opt["lambda"] = hp.lambda;
  opt["epsilon"] = hp.epsilon;
  opt["tau"] = hp.tau;
  opt["cos_exponent"] = hp.cos_exponent;
  opt["weight_decay"] = hp.weight_decay;
  opt["weight_decay_mode"] = to_string(hp.weight_decay_mode);
  opt["schedule"] = to_string(hp.schedule.kind);
  opt["milestones"] = hp.schedule.milestones;
  opt["decay_factor"] = hp.schedule.factor;
  j["optimizer"] = opt;
  nlohmann::json run;
  run["epochs"] = epochs;
  run["batch_size"] = batch_size;
  run["seed"] = seed;
  run["trace_every"] = trace_every;
  run["out_dir"] = out_dir;
  run["mode"] = mode;
  run["projection_radius"] = projection_radius;
  j["run"] = run;
  return j;
}

RunConfig parse_config_text(const std::string& text, const std::string& source,
                            bool apply_env) {
  KvMap map = parse_ini(text, source);
  for (const auto& [section, kv] : map) {
    if (section != "problem" && section != "optimizer" && section != "run") {
      throw ConfigError("config: unknown section [" + section + "]");
    }
  }

  RunConfig cfg;

  Section problem(map, "problem");
  problem.env_enabled = apply_env;
  cfg.problem.kind = problem.get_string("kind", "");
  if (cfg.problem.kind.empty()) {
    throw ConfigError("config: [problem] kind is required");
  }
  if (cfg.problem.kind != "quadratic" && cfg.problem.kind != "logistic" &&
      cfg.problem.kind != "mlp") {
    throw ConfigError("config: unknown problem kind '" + cfg.problem.kind + "'");
  }
  cfg.problem.dataset = problem.get_string("dataset", cfg.problem.dataset);
  cfg.problem.csv_path = problem.get_string("csv_path", "");
  cfg.problem.label_column = problem.get_string("label_column", "label");
  cfg.problem.n = static_cast<std::size_t>(problem.get_long("n", 200));
  cfg.problem.noise = problem.get_real("noise", cfg.problem.noise);
  cfg.problem.data_seed = problem.get_u64("data_seed", 0);
  cfg.problem.val_n = static_cast<std::size_t>(problem.get_long("val_n", 0));
  cfg.problem.widths = problem.get_size_list("widths");
  cfg.problem.activation = problem.get_string("activation", "tanh");
  cfg.problem.l2 = problem.get_real("l2", 0);
  cfg.problem.a_diag = problem.get_real_list("a_diag");
  cfg.problem.b = problem.get_real_list("b");
  cfg.problem.coordinate_layers = problem.get_bool("coordinate_layers", false);
  problem.finish();

  Section optimizer(map, "optimizer");
  optimizer.env_enabled = apply_env;
  const std::string kind = optimizer.get_string("kind", "");
  if (kind.empty()) {
    throw ConfigError("config: [optimizer] kind is required");
  }
  try {
    cfg.optimizer = optimizer_kind_from_string(kind);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  cfg.hp.eta = optimizer.get_real("eta", cfg.hp.eta);
  cfg.hp.beta1 = optimizer.get_real("beta1", cfg.hp.beta1);
  cfg.hp.beta2 = optimizer.get_real("beta2", cfg.hp.beta2);
  cfg.hp.lambda = optimizer.get_real("lambda", cfg.hp.lambda);
  cfg.hp.epsilon = optimizer.get_real("epsilon", cfg.hp.epsilon);
  cfg.hp.tau = optimizer.get_real("tau", cfg.hp.tau);
  cfg.hp.cos_exponent = static_cast<int>(optimizer.get_long("cos_exponent", 2));
  cfg.hp.weight_decay = optimizer.get_real("weight_decay", 0);
  try {
    cfg.hp.weight_decay_mode =
        weight_decay_mode_from_string(optimizer.get_string("weight_decay_mode", "none"));
    cfg.hp.schedule.kind =
        schedule_kind_from_string(optimizer.get_string("schedule", "constant"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  cfg.hp.schedule.milestones = optimizer.get_int_list("milestones");
  cfg.hp.schedule.factor = optimizer.get_real("decay_factor", 0.1);
  optimizer.finish();

  Section run(map, "run");
  run.env_enabled = apply_env;
  cfg.epochs = static_cast<int>(run.get_long("epochs", cfg.epochs));
  cfg.batch_size = static_cast<int>(run.get_long("batch_size", cfg.batch_size));
  cfg.seed = run.get_u64("seed", cfg.seed);
  cfg.trace_every = run.get_long("trace_every", 0);
  cfg.out_dir = run.get_string("out_dir", "");
  cfg.mode = run.get_string("mode", "train");
  cfg.projection_radius = run.get_real("projection_radius", 0);
  run.finish();

  if (cfg.mode != "train" && cfg.mode != "theoretical") {
    throw ConfigError("config: mode must be 'train' or 'theoretical'");
  }
  if (cfg.epochs < 0) throw ConfigError("config: epochs must be >= 0");
  if (cfg.batch_size < 0) throw ConfigError("config: batch_size must be >= 0");
  if (cfg.trace_every < 0) throw ConfigError("config: trace_every must be >= 0");
  try {
    cfg.hp.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

RunConfig parse_config_file(const std::string& path, bool apply_env) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("config: cannot open '" + path + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path, apply_env);
}

BuiltProblem build_problem(const ProblemSpec& spec) {
  BuiltProblem built;
  if (spec.kind == "quadratic") {
    if (spec.a_diag.empty() || spec.a_diag.size() != spec.b.size()) {
      throw ConfigError("config: quadratic needs a_diag and b of equal length");
    }
    built.problem = std::make_shared<QuadraticProblem>(spec.a_diag, spec.b,
                                                       spec.coordinate_layers);
    return built;
  }

  Dataset data;
  if (spec.dataset == "two_moons") {
    data = make_two_moons(spec.n, spec.noise, spec.data_seed);
    if (spec.val_n > 0) {
      // fixed stream offset so validation never overlaps the training draw
      built.validation =
          make_two_moons(spec.val_n, spec.noise, spec.data_seed + 0x517CC1B7ULL);
    }
  } else if (spec.dataset == "csv") {
    if (spec.csv_path.empty()) {
      throw ConfigError("config: dataset csv needs csv_path");
    }
    try {
      data = load_csv_dataset(spec.csv_path, spec.label_column);
    } catch (const std::runtime_error& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
    if (spec.val_n > 0) {
      throw ConfigError("config: val_n is only supported for the two_moons dataset");
    }
  } else {
    throw ConfigError("config: unknown dataset '" + spec.dataset + "'");
  }

  try {
    if (spec.kind == "logistic") {
      built.problem = std::make_shared<LogisticRegressionProblem>(std::move(data),
                                                                  spec.l2);
    } else if (spec.kind == "mlp") {
      if (spec.widths.empty()) {
        throw ConfigError("config: mlp needs widths");
      }
      built.problem = std::make_shared<MlpProblem>(
          spec.widths, activation_from_string(spec.activation), std::move(data));
    } else {
      throw ConfigError("config: unknown problem kind '" + spec.kind + "'");
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return built;
}

}  // namespace setadam
