#ifndef METAPI_PI_METHODS_HPP
#define METAPI_PI_METHODS_HPP

#include <memory>
#include <string>
#include <vector>

#include "metapi/dataset.hpp"
#include "metapi/quad_form.hpp"
#include "metapi/re_model.hpp"
#include "metapi/rng.hpp"

namespace metapi {

enum class PiKind { kHts, kEnsemble, kBootstrap };
enum class CriticalRule { kTKm2, kTKm1, kZ };
enum class VarianceRule { kIV, kHKSJ };

/// Identity of a prediction-interval method. The named presets cover the five
/// HTS-style variants plus the ensemble and parametric-bootstrap methods.
struct PIMethodSpec {
  PiKind kind = PiKind::kHts;
  Tau2Estimator tau2_estimator = Tau2Estimator::kDL;
  VarianceRule variance = VarianceRule::kIV;
  CriticalRule critical = CriticalRule::kTKm2;
  int bootstrap_draws = 5000;  // only meaningful for the bootstrap

  static PIMethodSpec hts_dl_tkm2();
  static PIMethodSpec hts_reml_tkm2();
  static PIMethodSpec hts_hksj_tkm2();
  static PIMethodSpec hts_dl_tkm1();
  static PIMethodSpec hts_dl_z();
  static PIMethodSpec ensemble();
  static PIMethodSpec bootstrap(int draws = 5000);

  /// All seven presets, in reporting order.
  static std::vector<PIMethodSpec> all_presets(int bootstrap_draws = 5000);

  /// Stable identifier used in CLI arguments, CSV columns and file names:
  /// hts_dl_tkm2, hts_reml_tkm2, hts_hksj_tkm2, hts_dl_tkm1, hts_dl_z,
  /// ensemble, bootstrap.
  std::string name() const;
  /// Human-facing label, e.g. "HTS-DL (t_k-2)".
  std::string label() const;

  static PIMethodSpec from_name(const std::string& name, int bootstrap_draws = 5000);

  /// Smallest K the method is defined for (3 when a t with K-2 df is used).
  int min_studies() const;

  bool uses_reml() const { return kind == PiKind::kHts && tau2_estimator == Tau2Estimator::kREML; }

  friend bool operator==(const PIMethodSpec&, const PIMethodSpec&) = default;
};

struct PredictionInterval {
  double lower = 0.0;
  double upper = 0.0;
  double level = 0.95;
  PIMethodSpec method;

  double length() const { return upper - lower; }
  bool degenerate() const { return upper == lower; }
};

/// HTS-style interval: mu_hat +/- c * sqrt(tau2_hat + Var(mu_hat)) with the
/// critical value c from a t (K-2 or K-1 df) or standard normal distribution
/// and the variance taken from the inverse-variance or HKSJ estimate.
PredictionInterval hts_pi(const REFit& fit, CriticalRule critical, VarianceRule variance,
                          double level = 0.95);

/// Interval from the empirical quantiles of the shrunken study effects
/// theta*_k = mu_hat + sqrt(tau2/(tau2 + s2_k)) (theta_k - mu_hat). Degenerates
/// to the single point mu_hat when tau2 = 0.
PredictionInterval ensemble_pi(const MetaDataset& d, const REFit& fit, double level = 0.95);

/// Shrunken effects used by ensemble_pi, in study order.
std::vector<double> shrunken_effects(const MetaDataset& d, const REFit& fit);

/// Weights of the chi-square(1) mixture that gives the exact conditional law
/// of Cochran's Q when Var(theta_hat_k) = sigma2_k + tau2: the nonnegative
/// eigenvalues of S^(1/2) (W - w w^T / sum w) S^(1/2) with W = diag(1/sigma2_k)
/// and S = diag(sigma2_k + tau2). Eigenvalues below 1e-12 of the largest are
/// dropped.
std::vector<double> q_stat_weights(const MetaDataset& d, double tau2);

/// Inverts the exact Q law into a draw from the confidence distribution of
/// tau2: solves P(Q > q_obs; tau2) = u by bracketing bisection, truncating at
/// zero when u <= P(Q > q_obs; 0).
///
/// The class form keeps one set of numeric workspaces per consumer thread;
/// sample_tau2_confidence is the single-shot convenience wrapper.
class Tau2ConfidenceSampler {
 public:
  explicit Tau2ConfidenceSampler(const MetaDataset& d);
  ~Tau2ConfidenceSampler();
  Tau2ConfidenceSampler(Tau2ConfidenceSampler&&) noexcept;
  Tau2ConfidenceSampler& operator=(Tau2ConfidenceSampler&&) noexcept;

  /// tau2 solving P(Q > q_obs; tau2) = u, truncated at zero. Bisection to
  /// |delta tau2| <= tol; bracket grown by doubling up to 1e6 (beyond that a
  /// NumericError is thrown).
  double tau2_at(double u, double tol = 1e-8);

  /// P(Q > q_obs; tau2) for the sampler's dataset.
  double survival(double tau2);

  double q_obs() const noexcept;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

double sample_tau2_confidence(const MetaDataset& d, double u, double tol = 1e-8);

struct BootstrapOptions {
  int draws = 5000;
  double tau2_tol = 1e-8;
  /// Recompute the pooled mean and HKSJ variance per draw with weights at the
  /// drawn tau2 (cross-check mode); off by default, where both are computed
  /// once from the observed fit and held fixed.
  bool recompute_weights_per_draw = false;
};

/// Parametric bootstrap interval: per draw, theta_new = mu_hat + z * tau_b -
/// t_(K-1) * sqrt(var_hksj) with tau_b the square root of a truncated
/// confidence-distribution draw of tau2; the interval is the empirical
/// (alpha/2, 1-alpha/2) quantile pair of the draws. Deterministic for a fixed
/// generator state.
PredictionInterval bootstrap_pi(const MetaDataset& d, const BootstrapOptions& opts,
                                double level, Rng& rng);

PredictionInterval bootstrap_pi(const MetaDataset& d, int draws, double level, Rng& rng);

}  // namespace metapi

#endif  // METAPI_PI_METHODS_HPP
