#include "metapi/distributions.hpp"

#include <cmath>
#include <limits>

#include "metapi/errors.hpp"
#include "metapi/special.hpp"

namespace metapi {

namespace {

constexpr double kPi = 3.14159265358979323846;
const double kB = std::sqrt(2.0 / kPi);  // E|Z| for a standard normal

// Skewness of a skew-normal as a function of delta = shape/sqrt(1+shape^2).
double sn_skewness_of_delta(double delta) {
  const double bd = kB * delta;
  const double v = 1.0 - bd * bd;
  return 0.5 * (4.0 - kPi) * bd * bd * bd / (v * std::sqrt(v));
}

// Inverts the skewness-delta relation by bisection (monotone on [0, 1)).
double sn_delta_of_skewness(double skewness) {
  const double target = std::fabs(skewness);
  double lo = 0.0;
  double hi = 1.0 - 1e-15;
  for (int i = 0; i < 200 && hi - lo > 1e-12; ++i) {
    const double mid = 0.5 * (lo + hi);
    (sn_skewness_of_delta(mid) < target ? lo : hi) = mid;
  }
  const double delta = 0.5 * (lo + hi);
  return skewness < 0.0 ? -delta : delta;
}

void check_moments(double variance) {
  if (!(variance > 0.0) || !std::isfinite(variance)) {
    throw ParameterError("true-effect distribution: variance must be positive and finite");
  }
}

}  // namespace

std::string family_name(EffectFamily family) {
  switch (family) {
    case EffectFamily::kNormal: return "normal";
    case EffectFamily::kSkewNormal: return "skew-normal";
    case EffectFamily::kBimodalMixture: return "bimodal";
    case EffectFamily::kUniform: return "uniform";
  }
  return "unknown";
}

double skew_normal_max_skewness() { return sn_skewness_of_delta(1.0 - 1e-15); }

TrueEffectDist TrueEffectDist::make(EffectFamily family, double mean, double variance,
                                    std::optional<double> skewness) {
  if (family == EffectFamily::kSkewNormal) {
    if (!skewness.has_value()) {
      throw ParameterError("skew-normal requires a skewness coefficient");
    }
    return skew_normal(mean, variance, *skewness);
  }
  if (skewness.has_value() && *skewness != 0.0) {
    throw ParameterError("skewness is only meaningful for the skew-normal family");
  }
  switch (family) {
    case EffectFamily::kNormal: return normal(mean, variance);
    case EffectFamily::kBimodalMixture: return bimodal(mean, variance);
    case EffectFamily::kUniform: return uniform(mean, variance);
    default: throw ParameterError("unknown true-effect family");
  }
}

TrueEffectDist TrueEffectDist::normal(double mean, double variance) {
  check_moments(variance);
  TrueEffectDist d;
  d.family_ = EffectFamily::kNormal;
  d.mean_ = mean;
  d.variance_ = variance;
  return d;
}

TrueEffectDist TrueEffectDist::skew_normal(double mean, double variance, double skewness) {
  check_moments(variance);
  if (!(std::fabs(skewness) < skew_normal_max_skewness())) {
    throw ParameterError("skew-normal skewness must lie in (-0.9952, 0.9952)");
  }
  TrueEffectDist d;
  d.family_ = EffectFamily::kSkewNormal;
  d.mean_ = mean;
  d.variance_ = variance;
  d.skewness_ = skewness;
  d.sn_delta_ = sn_delta_of_skewness(skewness);
  d.sn_shape_ = d.sn_delta_ / std::sqrt(1.0 - d.sn_delta_ * d.sn_delta_);
  const double bd = kB * d.sn_delta_;
  d.sn_scale_ = std::sqrt(variance / (1.0 - bd * bd));
  d.sn_location_ = mean - d.sn_scale_ * bd;
  return d;
}

TrueEffectDist TrueEffectDist::bimodal(double mean, double variance) {
  check_moments(variance);
  TrueEffectDist d;
  d.family_ = EffectFamily::kBimodalMixture;
  d.mean_ = mean;
  d.variance_ = variance;
  const double spread = std::sqrt(0.75 * variance);
  d.mix_mean_lo_ = mean - spread;
  d.mix_mean_hi_ = mean + spread;
  d.mix_sd_ = std::sqrt(0.25 * variance);
  return d;
}

TrueEffectDist TrueEffectDist::uniform(double mean, double variance) {
  check_moments(variance);
  TrueEffectDist d;
  d.family_ = EffectFamily::kUniform;
  d.mean_ = mean;
  d.variance_ = variance;
  const double half = std::sqrt(3.0 * variance);
  d.uniform_lo_ = mean - half;
  d.uniform_hi_ = mean + half;
  return d;
}

double TrueEffectDist::cdf(double x) const {
  if (std::isnan(x)) {
    throw ParameterError("cdf: x is NaN");
  }
  switch (family_) {
    case EffectFamily::kNormal:
      return norm_cdf((x - mean_) / std::sqrt(variance_));
    case EffectFamily::kSkewNormal: {
      if (std::isinf(x)) return x > 0.0 ? 1.0 : 0.0;
      const double z = (x - sn_location_) / sn_scale_;
      const double p = norm_cdf(z) - 2.0 * owens_t(z, sn_shape_);
      return std::min(1.0, std::max(0.0, p));
    }
    case EffectFamily::kBimodalMixture:
      return 0.5 * norm_cdf((x - mix_mean_lo_) / mix_sd_) +
             0.5 * norm_cdf((x - mix_mean_hi_) / mix_sd_);
    case EffectFamily::kUniform:
      if (x <= uniform_lo_) return 0.0;
      if (x >= uniform_hi_) return 1.0;
      return (x - uniform_lo_) / (uniform_hi_ - uniform_lo_);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double TrueEffectDist::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) {
    throw ParameterError("quantile: p must be in (0,1)");
  }
  switch (family_) {
    case EffectFamily::kNormal:
      return mean_ + std::sqrt(variance_) * norm_quantile(p);
    case EffectFamily::kUniform:
      return uniform_lo_ + p * (uniform_hi_ - uniform_lo_);
    default:
      break;
  }
  // Skew-normal and mixture: bisection on the CDF with bracket expansion.
  const double sd = std::sqrt(variance_);
  double lo = mean_ - 8.0 * sd;
  double hi = mean_ + 8.0 * sd;
  while (cdf(lo) > p) lo -= 8.0 * sd;
  while (cdf(hi) < p) hi += 8.0 * sd;
  const double xtol = 1e-10 * std::max(1.0, std::fabs(mean_) + sd);
  while (hi - lo > xtol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // hit double resolution
    (cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double TrueEffectDist::sample(Rng& rng) const {
  switch (family_) {
    case EffectFamily::kNormal:
      return mean_ + std::sqrt(variance_) * rng.next_normal();
    case EffectFamily::kSkewNormal: {
      // delta-correlated pair representation: |z0| supplies the skewed half.
      const double z0 = rng.next_normal();
      const double z1 = rng.next_normal();
      const double z = sn_delta_ * std::fabs(z0) +
                       std::sqrt(1.0 - sn_delta_ * sn_delta_) * z1;
      return sn_location_ + sn_scale_ * z;
    }
    case EffectFamily::kBimodalMixture: {
      const bool hi = rng.next_open() < 0.5;
      const double mu = hi ? mix_mean_hi_ : mix_mean_lo_;
      return mu + mix_sd_ * rng.next_normal();
    }
    case EffectFamily::kUniform:
      return uniform_lo_ + (uniform_hi_ - uniform_lo_) * rng.next_open();
  }
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace metapi
