#include "metapi/re_model.hpp"

#include <cmath>

#include "metapi/errors.hpp"

namespace metapi {

std::string tau2_estimator_name(Tau2Estimator e) {
  return e == Tau2Estimator::kDL ? "DL" : "REML";
}

HeterogeneityStats cochran_q(const MetaDataset& d) {
  const int k = d.k();
  double s1 = 0.0, s2 = 0.0, wsum_effect = 0.0;
  for (const auto& s : d.studies()) {
    const double w = 1.0 / s.within_variance;
    s1 += w;
    s2 += w * w;
    wsum_effect += w * s.effect;
  }
  const double pooled = wsum_effect / s1;

  double q = 0.0;
  for (const auto& s : d.studies()) {
    const double dev = s.effect - pooled;
    q += dev * dev / s.within_variance;
  }

  HeterogeneityStats het;
  het.q = q;
  het.tau2_udl = (q - (k - 1)) / (s1 - s2 / s1);
  het.tau2_dl = std::max(0.0, het.tau2_udl);
  het.i2 = q > 0.0 ? std::max(0.0, (q - (k - 1)) / q) : 0.0;
  return het;
}

namespace {

// One step of the REML fixed-point map.
double reml_step(const MetaDataset& d, double tau2) {
  double wsum = 0.0, w2sum = 0.0, wsum_effect = 0.0;
  for (const auto& s : d.studies()) {
    const double w = 1.0 / (s.within_variance + tau2);
    wsum += w;
    w2sum += w * w;
    wsum_effect += w * s.effect;
  }
  const double mu = wsum_effect / wsum;
  double num = 0.0;
  for (const auto& s : d.studies()) {
    const double w = 1.0 / (s.within_variance + tau2);
    const double dev = s.effect - mu;
    num += w * w * (dev * dev - s.within_variance);
  }
  return num / w2sum + 1.0 / wsum;
}

}  // namespace

double restricted_log_likelihood(const MetaDataset& d, double tau2) {
  double wsum = 0.0, wsum_effect = 0.0, logdet = 0.0;
  for (const auto& s : d.studies()) {
    const double v = s.within_variance + tau2;
    wsum += 1.0 / v;
    wsum_effect += s.effect / v;
    logdet += std::log(v);
  }
  const double mu = wsum_effect / wsum;
  double rss = 0.0;
  for (const auto& s : d.studies()) {
    const double dev = s.effect - mu;
    rss += dev * dev / (s.within_variance + tau2);
  }
  return -0.5 * (logdet + std::log(wsum) + rss);
}

RemlResult tau2_reml(const MetaDataset& d, const RemlOptions& opts) {
  double tau2 = cochran_q(d).tau2_dl;
  double prev_delta = 0.0;
  for (int iter = 1; iter <= opts.max_iterations; ++iter) {
    double next = std::max(0.0, reml_step(d, tau2));
    double delta = next - tau2;
    if (delta * prev_delta < 0.0) {
      next = tau2 + 0.5 * delta;  // damp when the iterate starts to oscillate
      delta = next - tau2;
    }
    prev_delta = delta;
    tau2 = next;
    if (std::fabs(delta) < opts.tol) {
      return RemlResult{tau2, iter, std::fabs(delta)};
    }
  }
  throw NonConvergenceError("REML did not converge within the iteration budget",
                            tau2, opts.max_iterations);
}

REFit re_fit(const MetaDataset& d, double tau2, Tau2Estimator estimator) {
  if (!(tau2 >= 0.0)) {
    throw ParameterError("re_fit: tau2 must be nonnegative");
  }
  const int k = d.k();

  REFit fit;
  fit.k = k;
  fit.tau2 = tau2;
  fit.tau2_estimator = estimator;
  fit.het = cochran_q(d);
  fit.weights.reserve(d.size());

  double wsum = 0.0, wsum_effect = 0.0;
  for (const auto& s : d.studies()) {
    const double w = 1.0 / (s.within_variance + tau2);
    fit.weights.push_back(w);
    wsum += w;
    wsum_effect += w * s.effect;
  }
  fit.mu_hat = wsum_effect / wsum;
  fit.var_iv = 1.0 / wsum;

  double wrss = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double dev = d[i].effect - fit.mu_hat;
    wrss += fit.weights[i] * dev * dev;
  }
  fit.var_hksj = wrss / ((k - 1) * wsum);
  return fit;
}

REFit fit_dl(const MetaDataset& d) {
  return re_fit(d, cochran_q(d).tau2_dl, Tau2Estimator::kDL);
}

REFit fit_reml(const MetaDataset& d, const RemlOptions& opts) {
  return re_fit(d, tau2_reml(d, opts).tau2, Tau2Estimator::kREML);
}

}  // namespace metapi
