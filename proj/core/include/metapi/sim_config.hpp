#ifndef METAPI_SIM_CONFIG_HPP
#define METAPI_SIM_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "metapi/scenario.hpp"
#include "metapi/sim_engine.hpp"

namespace metapi {

/// A fully resolved simulation run: grid axes plus engine settings. Defaults
/// (an empty JSON object) reproduce the full 3024-scenario grid with 5000
/// replicates per scenario, 1000 for the bootstrap at B = 5000, alpha = 0.05
/// and the single tolerance content beta = 0.8.
struct SimConfig {
  GridAxes axes = GridAxes::paper_defaults();
  double mu = 0.0;
  int reps = 5000;
  int bootstrap_reps = 1000;
  int bootstrap_b = 5000;
  double alpha = 0.05;
  std::vector<double> betas = {0.8};
  std::vector<std::string> method_names = {"all"};
  std::uint64_t seed = 1;
  int hist_bins = 100;
  bool write_records = false;

  std::vector<PIMethodSpec> methods() const;
  RunSettings run_settings() const;
  std::vector<Scenario> scenarios() const;
  EngineOptions engine_options(int threads) const;

  /// Canonical JSON rendering of the resolved config (defaults filled in).
  std::string canonical_json() const;
  /// Stable digest of canonical_json(), hex-encoded.
  std::string digest() const;
};

/// Parses and validates a config document. Unknown keys are rejected; all
/// schema violations are reported together.
///
/// Recognized keys: K, N, tau2, dist, mu, reps, bootstrap_reps, B, alpha,
/// beta, methods, seed, hist_bins, records.
SimConfig parse_config(const std::string& json_text);
SimConfig parse_config_file(const std::string& path);

}  // namespace metapi

#endif  // METAPI_SIM_CONFIG_HPP
