#ifndef METAPI_SIM_ENGINE_HPP
#define METAPI_SIM_ENGINE_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "metapi/dataset.hpp"
#include "metapi/distributions.hpp"
#include "metapi/pi_methods.hpp"
#include "metapi/scenario.hpp"

namespace metapi {

/// One simulated study: the true effect, its observed value and the
/// theoretical / observed within-study variances.
struct GeneratedStudy {
  double theta = 0.0;
  double theta_hat = 0.0;
  double sigma2 = 0.0;      // 40 / N
  double sigma2_hat = 0.0;  // from chi-square distributed group variances
  int n_total = 0;
  int n_exp = 0;
  int n_ctl = 0;
};

struct GeneratedData {
  MetaDataset dataset;
  std::vector<GeneratedStudy> studies;
};

/// Simulates one meta-analysis input for the scenario. The generator must be
/// seeded with the replicate's dataset substream; draws are consumed in a
/// fixed per-study order (group variances, true effect, measurement error).
GeneratedData generate_dataset(const Scenario& s, Rng& rng);

/// Mass of the true-effect distribution inside the interval, clamped to [0,1].
double coverage(const PredictionInterval& pi, const TrueEffectDist& dist);

/// Distance between the 0.975 and 0.025 quantiles of the true-effect
/// distribution; the yardstick for interval length.
double theoretical_length(const TrueEffectDist& dist);

enum class MethodStatus : std::uint8_t { kOk, kSkipped, kFailed };

enum class FailCode : std::uint8_t {
  kNone,
  kRemlNonConvergence,
  kDegreesOfFreedom,
  kNumeric,
  kOther,
};

std::string fail_code_name(FailCode code);

/// Outcome of one method on one replicate.
struct MethodOutcome {
  MethodStatus status = MethodStatus::kSkipped;
  FailCode fail_code = FailCode::kNone;
  double lower = 0.0;
  double upper = 0.0;
  double covered = 0.0;  // C = F(upper) - F(lower)
  double length = 0.0;
  bool new_effect_covered = false;
};

/// Everything recorded for one simulated meta-analysis.
struct ReplicateRecord {
  int rep = 0;
  double theta_new = 0.0;
  double mu_hat = 0.0;
  double q = 0.0;
  double i2 = 0.0;
  double tau2_dl = 0.0;
  double tau2_reml = 0.0;  // NaN when not computed or not converged
  std::vector<MethodOutcome> methods;  // parallel to Scenario::methods
};

struct MethodSummary {
  PIMethodSpec spec;
  std::string name;
  std::size_t attempted = 0;
  std::size_t ok = 0;
  std::size_t failed = 0;
  double mean_c = 0.0;
  double median_c = 0.0;
  double mean_abs_dev = 0.0;     // mean |C - (1 - alpha)|
  double mean_rel_length = 0.0;  // mean L / L_T
  double norm_mae = 0.0;         // mean |L - L_T| / L_T
  double prop_c_gt_99 = 0.0;     // share of replicates with C > 0.99
  double freq_new_covered = 0.0; // share with theta_new inside the interval
  std::vector<std::uint64_t> hist;   // counts over hist_bins equal bins on [0,1]
  std::vector<double> beta_content;  // P[C >= beta] per requested beta
};

struct ScenarioSummary {
  int scenario_index = 0;
  std::size_t reps = 0;
  double alpha = 0.05;
  double l_t = 0.0;
  double v = 0.0;        // tau2 / mean theoretical within-study variance
  double mean_i2 = 0.0;  // mean of the observed I^2 over replicates
  int hist_bins = 100;
  std::vector<double> betas;
  std::vector<MethodSummary> methods;
};

struct EngineOptions {
  int threads = 1;
  /// Replicate budget for the bootstrap method (it is evaluated on the first
  /// min(reps, bootstrap_reps) replicates only).
  int bootstrap_reps = 1000;
  int hist_bins = 100;
  std::vector<double> betas = {0.8};
  /// A method failing on more than this share of its replicates aborts the run.
  double max_failure_rate = 0.01;
};

struct ScenarioRun {
  std::vector<ReplicateRecord> records;
  ScenarioSummary summary;
};

/// Aggregates per-replicate records into the scenario's performance measures.
ScenarioSummary summarize(const Scenario& s, std::span<const ReplicateRecord> records,
                          const EngineOptions& opts);

/// Runs every replicate of a scenario. Replicates are independent work units
/// with per-replicate substreams, so the result is identical for any thread
/// count.
ScenarioRun run_scenario(const Scenario& s, const EngineOptions& opts = {});

}  // namespace metapi

#endif  // METAPI_SIM_ENGINE_HPP
