#ifndef METAPI_RE_MODEL_HPP
#define METAPI_RE_MODEL_HPP

#include <string>
#include <vector>

#include "metapi/dataset.hpp"

namespace metapi {

enum class Tau2Estimator { kDL, kREML };

std::string tau2_estimator_name(Tau2Estimator e);

/// Fixed-effect-weighted heterogeneity statistics.
struct HeterogeneityStats {
  double q = 0.0;         // Cochran's Q
  double i2 = 0.0;        // max(0, (Q - (K-1))/Q), 0 when Q == 0
  double tau2_udl = 0.0;  // untruncated moment estimate; may be negative
  double tau2_dl = 0.0;   // max(0, tau2_udl)
};

HeterogeneityStats cochran_q(const MetaDataset& d);

struct RemlOptions {
  int max_iterations = 200;
  double tol = 1e-10;
};

struct RemlResult {
  double tau2 = 0.0;
  int iterations = 0;
  double last_delta = 0.0;
};

/// Restricted-maximum-likelihood estimate of the between-study variance.
/// Fixed-point iteration started at the truncated moment estimate, damped on
/// oscillation, negative iterates truncated to zero. Throws NonConvergenceError
/// (carrying the last iterate) when the iteration budget is exhausted.
RemlResult tau2_reml(const MetaDataset& d, const RemlOptions& opts = {});

/// Restricted log-likelihood of tau2 (profiled over the mean), up to an
/// additive constant. Exposed so independent maximizers can cross-check the
/// fixed-point estimate.
double restricted_log_likelihood(const MetaDataset& d, double tau2);

/// Pooled random-effects results at a given between-study variance.
struct REFit {
  double mu_hat = 0.0;
  double var_iv = 0.0;     // inverse-variance Var(mu_hat) = 1 / sum(w)
  double var_hksj = 0.0;   // Hartung-Knapp / Sidik-Jonkman variance
  double tau2 = 0.0;
  Tau2Estimator tau2_estimator = Tau2Estimator::kDL;
  std::vector<double> weights;  // w*_k = 1 / (sigma2_k + tau2)
  HeterogeneityStats het;
  int k = 0;
};

REFit re_fit(const MetaDataset& d, double tau2, Tau2Estimator estimator);

/// Convenience fits: moment estimate and REML estimate of tau2 respectively.
REFit fit_dl(const MetaDataset& d);
REFit fit_reml(const MetaDataset& d, const RemlOptions& opts = {});

}  // namespace metapi

#endif  // METAPI_RE_MODEL_HPP
