#include "metapi/sim_config.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "metapi/errors.hpp"
#include "metapi/text.hpp"

namespace metapi {

using nlohmann::json;

std::vector<PIMethodSpec> SimConfig::methods() const {
  std::vector<PIMethodSpec> out;
  for (const std::string& name : method_names) {
    if (name == "all") {
      for (PIMethodSpec m : PIMethodSpec::all_presets(bootstrap_b)) out.push_back(m);
    } else {
      out.push_back(PIMethodSpec::from_name(name, bootstrap_b));
    }
  }
  // Deduplicate while keeping first-seen order.
  std::vector<PIMethodSpec> unique;
  for (const PIMethodSpec& m : out) {
    if (std::find(unique.begin(), unique.end(), m) == unique.end()) unique.push_back(m);
  }
  return unique;
}

RunSettings SimConfig::run_settings() const {
  RunSettings rs;
  rs.mu = mu;
  rs.reps = reps;
  rs.alpha = alpha;
  rs.methods = methods();
  rs.master_seed = seed;
  return rs;
}

std::vector<Scenario> SimConfig::scenarios() const {
  return build_grid(axes, run_settings());
}

EngineOptions SimConfig::engine_options(int threads) const {
  EngineOptions opts;
  opts.threads = threads;
  opts.bootstrap_reps = bootstrap_reps;
  opts.hist_bins = hist_bins;
  opts.betas = betas;
  return opts;
}

std::string SimConfig::canonical_json() const {
  json j;
  json k_levels = json::array();
  for (int k : axes.k_levels) k_levels.push_back(k);
  j["K"] = k_levels;
  json n_levels = json::array();
  for (const auto& plan : axes.size_levels) {
    if (plan.is_mixed()) n_levels.push_back("mixed");
    else n_levels.push_back(plan.equal_n());
  }
  j["N"] = n_levels;
  j["tau2"] = axes.tau2_levels;
  json dists = json::array();
  for (const auto& d : axes.dist_levels) dists.push_back(d.name());
  j["dist"] = dists;
  j["mu"] = mu;
  j["reps"] = reps;
  j["bootstrap_reps"] = bootstrap_reps;
  j["B"] = bootstrap_b;
  j["alpha"] = alpha;
  j["beta"] = betas;
  json ms = json::array();
  for (const auto& m : methods()) ms.push_back(m.name());
  j["methods"] = ms;
  j["seed"] = seed;
  j["hist_bins"] = hist_bins;
  j["records"] = write_records;
  return j.dump();  // nlohmann objects are key-sorted, so this is canonical
}

std::string SimConfig::digest() const {
  const std::uint64_t h = fnv1a64(canonical_json());
  std::ostringstream out;
  out << "fnv1a64:" << std::hex << h;
  return out.str();
}

namespace {

const std::set<std::string> kKnownKeys = {
    "K", "N", "tau2", "dist", "mu", "reps", "bootstrap_reps", "B",
    "alpha", "beta", "methods", "seed", "hist_bins", "records"};

class Issues {
 public:
  void add(const std::string& msg) { msgs_.push_back(msg); }
  bool empty() const { return msgs_.empty(); }
  [[noreturn]] void raise() const {
    std::string all = "invalid simulation config:";
    for (const auto& m : msgs_) all += "\n  - " + m;
    throw ConfigError(all);
  }

 private:
  std::vector<std::string> msgs_;
};

}  // namespace

SimConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) {
    throw ConfigError("config must be a JSON object");
  }

  Issues issues;
  for (const auto& [key, _] : j.items()) {
    if (!kKnownKeys.count(key)) issues.add("unknown key '" + key + "'");
  }

  SimConfig cfg;

  if (j.contains("K")) {
    cfg.axes.k_levels.clear();
    if (!j["K"].is_array() || j["K"].empty()) {
      issues.add("'K' must be a nonempty array of integers");
    } else {
      for (const auto& e : j["K"]) {
        if (!e.is_number_integer() || e.get<int>() < 2) {
          issues.add("'K' entries must be integers >= 2");
          break;
        }
        cfg.axes.k_levels.push_back(e.get<int>());
      }
    }
  }

  if (j.contains("N")) {
    cfg.axes.size_levels.clear();
    if (!j["N"].is_array() || j["N"].empty()) {
      issues.add("'N' must be a nonempty array of even integers or \"mixed\"");
    } else {
      for (const auto& e : j["N"]) {
        try {
          if (e.is_string()) {
            cfg.axes.size_levels.push_back(SampleSizePlan::from_tag(e.get<std::string>()));
          } else if (e.is_number_integer()) {
            cfg.axes.size_levels.push_back(SampleSizePlan::equal(e.get<int>()));
          } else {
            issues.add("'N' entries must be integers or \"mixed\"");
          }
        } catch (const ConfigError& err) {
          issues.add(std::string("'N': ") + err.what());
        }
      }
    }
  }

  if (j.contains("tau2")) {
    cfg.axes.tau2_levels.clear();
    if (!j["tau2"].is_array() || j["tau2"].empty()) {
      issues.add("'tau2' must be a nonempty array of positive numbers");
    } else {
      for (const auto& e : j["tau2"]) {
        if (!e.is_number() || !(e.get<double>() > 0.0)) {
          issues.add("'tau2' entries must be positive numbers");
          break;
        }
        cfg.axes.tau2_levels.push_back(e.get<double>());
      }
    }
  }

  if (j.contains("dist")) {
    cfg.axes.dist_levels.clear();
    if (!j["dist"].is_array() || j["dist"].empty()) {
      issues.add("'dist' must be a nonempty array of distribution names");
    } else {
      for (const auto& e : j["dist"]) {
        if (!e.is_string()) {
          issues.add("'dist' entries must be strings");
          break;
        }
        try {
          cfg.axes.dist_levels.push_back(EffectDistSpec::from_name(e.get<std::string>()));
        } catch (const ConfigError& err) {
          issues.add(err.what());
        }
      }
    }
  }

  if (j.contains("mu")) {
    if (!j["mu"].is_number()) issues.add("'mu' must be a number");
    else cfg.mu = j["mu"].get<double>();
  }
  if (j.contains("reps")) {
    if (!j["reps"].is_number_integer() || j["reps"].get<int>() < 1) {
      issues.add("'reps' must be a positive integer");
    } else {
      cfg.reps = j["reps"].get<int>();
    }
  }
  if (j.contains("bootstrap_reps")) {
    if (!j["bootstrap_reps"].is_number_integer() || j["bootstrap_reps"].get<int>() < 1) {
      issues.add("'bootstrap_reps' must be a positive integer");
    } else {
      cfg.bootstrap_reps = j["bootstrap_reps"].get<int>();
    }
  }
  if (j.contains("B")) {
    if (!j["B"].is_number_integer() || j["B"].get<int>() < 100) {
      issues.add("'B' must be an integer >= 100");
    } else {
      cfg.bootstrap_b = j["B"].get<int>();
    }
  }
  if (j.contains("alpha")) {
    if (!j["alpha"].is_number() || !(j["alpha"].get<double>() > 0.0) ||
        !(j["alpha"].get<double>() < 1.0)) {
      issues.add("'alpha' must be a number in (0,1)");
    } else {
      cfg.alpha = j["alpha"].get<double>();
    }
  }
  if (j.contains("beta")) {
    cfg.betas.clear();
    if (!j["beta"].is_array() || j["beta"].empty()) {
      issues.add("'beta' must be a nonempty array of numbers in (0,1)");
    } else {
      for (const auto& e : j["beta"]) {
        if (!e.is_number() || !(e.get<double>() > 0.0) || !(e.get<double>() < 1.0)) {
          issues.add("'beta' entries must be numbers in (0,1)");
          break;
        }
        cfg.betas.push_back(e.get<double>());
      }
    }
  }
  if (j.contains("methods")) {
    cfg.method_names.clear();
    if (!j["methods"].is_array() || j["methods"].empty()) {
      issues.add("'methods' must be a nonempty array of method names");
    } else {
      for (const auto& e : j["methods"]) {
        if (!e.is_string()) {
          issues.add("'methods' entries must be strings");
          break;
        }
        const std::string name = e.get<std::string>();
        if (name != "all") {
          try {
            PIMethodSpec::from_name(name);
          } catch (const ParameterError& err) {
            issues.add(err.what());
            continue;
          }
        }
        cfg.method_names.push_back(name);
      }
    }
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer()) {
      issues.add("'seed' must be a nonnegative integer");
    } else if (j["seed"].is_number_integer() && j["seed"].get<std::int64_t>() < 0) {
      issues.add("'seed' must be a nonnegative integer");
    } else {
      cfg.seed = j["seed"].get<std::uint64_t>();
    }
  }
  if (j.contains("hist_bins")) {
    if (!j["hist_bins"].is_number_integer() || j["hist_bins"].get<int>() < 1) {
      issues.add("'hist_bins' must be a positive integer");
    } else {
      cfg.hist_bins = j["hist_bins"].get<int>();
    }
  }
  if (j.contains("records")) {
    if (!j["records"].is_boolean()) issues.add("'records' must be a boolean");
    else cfg.write_records = j["records"].get<bool>();
  }

  if (!issues.empty()) issues.raise();

  // Cross-field constraints (df requirements against the K levels).
  try {
    cfg.scenarios();
  } catch (const ConfigError& e) {
    issues.add(e.what());
    issues.raise();
  }
  return cfg;
}

SimConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace metapi
