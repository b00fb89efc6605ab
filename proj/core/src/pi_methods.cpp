#include "metapi/pi_methods.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <utility>

#include "metapi/errors.hpp"
#include "metapi/quantiles.hpp"
#include "metapi/special.hpp"

namespace metapi {

// ---------------------------------------------------------------------------
// Method specs
// ---------------------------------------------------------------------------

PIMethodSpec PIMethodSpec::hts_dl_tkm2() {
  return {PiKind::kHts, Tau2Estimator::kDL, VarianceRule::kIV, CriticalRule::kTKm2, 0};
}
PIMethodSpec PIMethodSpec::hts_reml_tkm2() {
  return {PiKind::kHts, Tau2Estimator::kREML, VarianceRule::kIV, CriticalRule::kTKm2, 0};
}
PIMethodSpec PIMethodSpec::hts_hksj_tkm2() {
  return {PiKind::kHts, Tau2Estimator::kDL, VarianceRule::kHKSJ, CriticalRule::kTKm2, 0};
}
PIMethodSpec PIMethodSpec::hts_dl_tkm1() {
  return {PiKind::kHts, Tau2Estimator::kDL, VarianceRule::kIV, CriticalRule::kTKm1, 0};
}
PIMethodSpec PIMethodSpec::hts_dl_z() {
  return {PiKind::kHts, Tau2Estimator::kDL, VarianceRule::kIV, CriticalRule::kZ, 0};
}
PIMethodSpec PIMethodSpec::ensemble() {
  return {PiKind::kEnsemble, Tau2Estimator::kDL, VarianceRule::kIV, CriticalRule::kZ, 0};
}
PIMethodSpec PIMethodSpec::bootstrap(int draws) {
  if (draws < 100) {
    throw ParameterError("bootstrap: at least 100 draws are required");
  }
  return {PiKind::kBootstrap, Tau2Estimator::kDL, VarianceRule::kHKSJ, CriticalRule::kTKm1, draws};
}

std::vector<PIMethodSpec> PIMethodSpec::all_presets(int bootstrap_draws) {
  return {hts_dl_tkm2(), hts_reml_tkm2(), hts_hksj_tkm2(), hts_dl_tkm1(),
          hts_dl_z(),    ensemble(),      bootstrap(bootstrap_draws)};
}

std::string PIMethodSpec::name() const {
  switch (kind) {
    case PiKind::kEnsemble: return "ensemble";
    case PiKind::kBootstrap: return "bootstrap";
    case PiKind::kHts: break;
  }
  std::string out = "hts_";
  if (variance == VarianceRule::kHKSJ) {
    out += "hksj";
  } else {
    out += tau2_estimator == Tau2Estimator::kREML ? "reml" : "dl";
  }
  switch (critical) {
    case CriticalRule::kTKm2: out += "_tkm2"; break;
    case CriticalRule::kTKm1: out += "_tkm1"; break;
    case CriticalRule::kZ: out += "_z"; break;
  }
  return out;
}

std::string PIMethodSpec::label() const {
  switch (kind) {
    case PiKind::kEnsemble: return "Ensemble";
    case PiKind::kBootstrap: return "Parametric bootstrap";
    case PiKind::kHts: break;
  }
  std::string out = "HTS-";
  out += variance == VarianceRule::kHKSJ
             ? "HKSJ"
             : (tau2_estimator == Tau2Estimator::kREML ? "REML" : "DL");
  switch (critical) {
    case CriticalRule::kTKm2: out += " (t_k-2)"; break;
    case CriticalRule::kTKm1: out += " (t_k-1)"; break;
    case CriticalRule::kZ: out += " (z)"; break;
  }
  return out;
}

PIMethodSpec PIMethodSpec::from_name(const std::string& name, int bootstrap_draws) {
  for (PIMethodSpec spec : all_presets(bootstrap_draws)) {
    if (spec.name() == name) return spec;
  }
  throw ParameterError("unknown prediction-interval method '" + name + "'");
}

int PIMethodSpec::min_studies() const {
  if (kind == PiKind::kHts && critical == CriticalRule::kTKm2) return 3;
  return 2;
}

// ---------------------------------------------------------------------------
// HTS family
// ---------------------------------------------------------------------------

namespace {

void check_level(double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw ParameterError("prediction level must be in (0,1)");
  }
}

double critical_value(CriticalRule rule, int k, double level) {
  const double p = 1.0 - 0.5 * (1.0 - level);
  switch (rule) {
    case CriticalRule::kZ:
      return norm_quantile(p);
    case CriticalRule::kTKm1:
      return t_quantile(k - 1, p);
    case CriticalRule::kTKm2:
      if (k < 3) {
        throw DegreesOfFreedomError("t with K-2 degrees of freedom needs K >= 3");
      }
      return t_quantile(k - 2, p);
  }
  throw ParameterError("unknown critical rule");
}

}  // namespace

PredictionInterval hts_pi(const REFit& fit, CriticalRule critical, VarianceRule variance,
                          double level) {
  check_level(level);
  const double c = critical_value(critical, fit.k, level);
  const double v = variance == VarianceRule::kHKSJ ? fit.var_hksj : fit.var_iv;
  const double half = c * std::sqrt(fit.tau2 + v);

  PredictionInterval pi;
  pi.lower = fit.mu_hat - half;
  pi.upper = fit.mu_hat + half;
  pi.level = level;
  pi.method = {PiKind::kHts, fit.tau2_estimator, variance, critical, 0};
  return pi;
}

// ---------------------------------------------------------------------------
// Ensemble method
// ---------------------------------------------------------------------------

std::vector<double> shrunken_effects(const MetaDataset& d, const REFit& fit) {
  std::vector<double> out;
  out.reserve(d.size());
  for (const auto& s : d.studies()) {
    const double shrink = std::sqrt(fit.tau2 / (fit.tau2 + s.within_variance));
    out.push_back(fit.mu_hat + shrink * (s.effect - fit.mu_hat));
  }
  return out;
}

PredictionInterval ensemble_pi(const MetaDataset& d, const REFit& fit, double level) {
  check_level(level);
  PredictionInterval pi;
  pi.level = level;
  pi.method = PIMethodSpec::ensemble();
  if (fit.tau2 == 0.0) {
    pi.lower = pi.upper = fit.mu_hat;  // all effects shrink onto the mean
    return pi;
  }
  std::vector<double> star = shrunken_effects(d, fit);
  std::sort(star.begin(), star.end());
  const double alpha = 1.0 - level;
  pi.lower = empirical_quantile(star, 0.5 * alpha);
  pi.upper = empirical_quantile(star, 1.0 - 0.5 * alpha);
  return pi;
}

// ---------------------------------------------------------------------------
// Exact Q law and the tau2 confidence distribution
// ---------------------------------------------------------------------------

namespace {

void fill_q_form_matrix(const std::vector<double>& sigma2, double tau2,
                        Eigen::MatrixXd& m) {
  const int k = static_cast<int>(sigma2.size());
  double wsum = 0.0;
  for (double v : sigma2) wsum += 1.0 / v;
  m.resize(k, k);
  for (int i = 0; i < k; ++i) {
    const double wi = 1.0 / sigma2[i];
    const double si = std::sqrt(sigma2[i] + tau2);
    for (int j = 0; j <= i; ++j) {
      const double wj = 1.0 / sigma2[j];
      const double sj = std::sqrt(sigma2[j] + tau2);
      double a = -wi * wj / wsum;
      if (i == j) a += wi;
      m(i, j) = si * sj * a;
      m(j, i) = m(i, j);
    }
  }
}

std::vector<double> positive_eigenvalues(const Eigen::MatrixXd& m,
                                         Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>& solver) {
  solver.compute(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericError("eigen-decomposition of the Q quadratic form failed");
  }
  const auto& ev = solver.eigenvalues();
  const double floor = 1e-12 * std::max(0.0, ev.maxCoeff());
  std::vector<double> weights;
  weights.reserve(static_cast<std::size_t>(ev.size()));
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev[i] > floor) weights.push_back(ev[i]);
  }
  if (weights.empty()) {
    throw NumericError("Q quadratic form has no positive eigenvalues");
  }
  return weights;
}

}  // namespace

std::vector<double> q_stat_weights(const MetaDataset& d, double tau2) {
  if (!(tau2 >= 0.0)) {
    throw ParameterError("q_stat_weights: tau2 must be nonnegative");
  }
  Eigen::MatrixXd m;
  fill_q_form_matrix(d.variances(), tau2, m);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  return positive_eigenvalues(m, solver);
}

struct Tau2ConfidenceSampler::Impl {
  std::vector<double> sigma2;
  double q_obs = 0.0;
  double tau2_dl = 0.0;
  Eigen::MatrixXd matrix;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  QuadFormScratch scratch;

  double survival(double tau2) {
    fill_q_form_matrix(sigma2, tau2, matrix);
    WeightedChiSquare law(positive_eigenvalues(matrix, solver));
    return law.survival(q_obs, scratch);
  }
};

Tau2ConfidenceSampler::Tau2ConfidenceSampler(const MetaDataset& d)
    : impl_(std::make_unique<Impl>()) {
  impl_->sigma2 = d.variances();
  const HeterogeneityStats het = cochran_q(d);
  impl_->q_obs = het.q;
  impl_->tau2_dl = het.tau2_dl;
}

Tau2ConfidenceSampler::~Tau2ConfidenceSampler() = default;
Tau2ConfidenceSampler::Tau2ConfidenceSampler(Tau2ConfidenceSampler&&) noexcept = default;
Tau2ConfidenceSampler& Tau2ConfidenceSampler::operator=(Tau2ConfidenceSampler&&) noexcept = default;

double Tau2ConfidenceSampler::survival(double tau2) { return impl_->survival(tau2); }

double Tau2ConfidenceSampler::q_obs() const noexcept { return impl_->q_obs; }

double Tau2ConfidenceSampler::tau2_at(double u, double tol) {
  if (!(u > 0.0 && u < 1.0)) {
    throw ParameterError("tau2 confidence draw: u must be in (0,1)");
  }
  if (!(tol > 0.0)) {
    throw ParameterError("tau2 confidence draw: tol must be positive");
  }
  // The survival probability is increasing in tau2; no nonnegative root exists
  // when u is below its value at zero.
  if (u <= impl_->survival(0.0)) return 0.0;

  double hi = std::max(1.0, impl_->tau2_dl);
  while (impl_->survival(hi) <= u) {
    hi *= 2.0;
    if (hi > 1e6) {
      throw NumericError("tau2 confidence draw: bracket cap reached (u too close to 1?)");
    }
  }
  double lo = 0.0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (impl_->survival(mid) < u ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double sample_tau2_confidence(const MetaDataset& d, double u, double tol) {
  Tau2ConfidenceSampler sampler(d);
  return sampler.tau2_at(u, tol);
}

// ---------------------------------------------------------------------------
// Parametric bootstrap
// ---------------------------------------------------------------------------

PredictionInterval bootstrap_pi(const MetaDataset& d, const BootstrapOptions& opts,
                                double level, Rng& rng) {
  check_level(level);
  if (opts.draws < 100) {
    throw ParameterError("bootstrap: at least 100 draws are required");
  }
  const int k = d.k();
  const REFit observed = fit_dl(d);
  const double se_hksj = std::sqrt(observed.var_hksj);

  Tau2ConfidenceSampler sampler(d);
  std::vector<double> draws;
  draws.reserve(static_cast<std::size_t>(opts.draws));

  for (int b = 0; b < opts.draws; ++b) {
    const double u = rng.next_open();
    const double z = rng.next_normal();
    const double t = t_quantile(k - 1, rng.next_open());
    const double tau = std::sqrt(sampler.tau2_at(u, opts.tau2_tol));
    if (opts.recompute_weights_per_draw) {
      const REFit refit = re_fit(d, tau * tau, Tau2Estimator::kDL);
      draws.push_back(refit.mu_hat + z * tau - t * std::sqrt(refit.var_hksj));
    } else {
      draws.push_back(observed.mu_hat + z * tau - t * se_hksj);
    }
  }
  std::sort(draws.begin(), draws.end());

  const double alpha = 1.0 - level;
  PredictionInterval pi;
  pi.lower = empirical_quantile(draws, 0.5 * alpha);
  pi.upper = empirical_quantile(draws, 1.0 - 0.5 * alpha);
  pi.level = level;
  pi.method = PIMethodSpec::bootstrap(opts.draws);
  return pi;
}

PredictionInterval bootstrap_pi(const MetaDataset& d, int draws, double level, Rng& rng) {
  BootstrapOptions opts;
  opts.draws = draws;
  return bootstrap_pi(d, opts, level, rng);
}

}  // namespace metapi
