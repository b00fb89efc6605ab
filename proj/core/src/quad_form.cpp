#include "metapi/quad_form.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <limits>

#include "metapi/errors.hpp"
#include "metapi/rng.hpp"
#include "metapi/special.hpp"

namespace metapi {

namespace {
std::atomic<std::uint64_t> g_fallbacks{0};
}  // namespace

std::uint64_t quad_form_fallback_count() noexcept { return g_fallbacks.load(); }

WeightedChiSquare::WeightedChiSquare(std::vector<double> weights)
    : weights_(std::move(weights)) {
  if (weights_.empty()) {
    throw ParameterError("weighted chi-square: empty weight vector");
  }
  positive_.reserve(weights_.size());
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw ParameterError("weighted chi-square: weights must be finite and nonnegative");
    }
    if (w > 0.0) positive_.push_back(w);
  }
  if (positive_.empty()) {
    throw ParameterError("weighted chi-square: at least one weight must be positive");
  }
  min_weight_ = *std::min_element(positive_.begin(), positive_.end());
}

double WeightedChiSquare::cdf_series(double q, QuadFormScratch& s, double abs_tol,
                                     std::size_t max_terms) const {
  if (q <= 0.0) return 0.0;

  const std::size_t m = positive_.size();
  const double beta = min_weight_;
  const double x = q / beta;

  // Mixture representation with scale beta = min weight: coefficients a_j are
  // nonnegative and sum to 1, and the chi-square CDF factors F_j at
  // (x, df = m + 2j) decrease in j, so the tail after term J is bounded by
  // (1 - sum_{j<=J} a_j) * F_{J+1}.
  s.ratio.resize(m);
  s.powers.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    s.ratio[i] = 1.0 - beta / positive_[i];
    s.powers[i] = 1.0;
  }

  double log_a0 = 0.0;
  for (std::size_t i = 0; i < m; ++i) log_a0 += 0.5 * std::log(beta / positive_[i]);
  const double a0 = std::exp(log_a0);

  const double half_m = 0.5 * static_cast<double>(m);
  double f = chisq_cdf(x, static_cast<double>(m));
  // Density-increment recurrence: F(x; df+2) = F(x; df) - d(df), with
  // d(df) = (x/2)^(df/2) e^(-x/2) / Gamma(df/2 + 1).
  double d = std::exp(half_m * std::log(0.5 * x) - 0.5 * x - lgamma_fn(half_m + 1.0));

  s.mix_a.clear();
  s.mix_b.clear();
  s.mix_a.push_back(a0);
  double sum_a = a0;
  double total = a0 * f;

  for (std::size_t j = 1; j <= max_terms; ++j) {
    f -= d;
    if (f < 0.0) f = 0.0;
    d *= x / static_cast<double>(m + 2 * j);

    double bj = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      s.powers[i] *= s.ratio[i];
      bj += s.powers[i];
    }
    s.mix_b.push_back(bj);

    double aj = 0.0;
    for (std::size_t i = 0; i < j; ++i) {
      aj += s.mix_b[j - 1 - i] * s.mix_a[i];
    }
    aj /= 2.0 * static_cast<double>(j);
    s.mix_a.push_back(aj);

    sum_a += aj;
    total += aj * f;

    const double tail = (1.0 - sum_a) * f;
    if (tail <= abs_tol) {
      return std::min(1.0, std::max(0.0, total + 0.5 * tail));
    }
  }
  throw NumericError("weighted chi-square CDF: series did not reach the accuracy target");
}

double WeightedChiSquare::cdf(double q, QuadFormScratch& scratch) const {
  try {
    return cdf_series(q, scratch);
  } catch (const NumericError&) {
    g_fallbacks.fetch_add(1);
    // Deterministic fallback seed derived from the exact input bits.
    std::uint64_t state = 0x51ab5f1c3024e9d7ULL;
    std::uint64_t h = splitmix64(state);
    std::uint64_t bits;
    std::memcpy(&bits, &q, sizeof bits);
    state ^= bits;
    h ^= splitmix64(state);
    for (double w : positive_) {
      std::memcpy(&bits, &w, sizeof bits);
      state ^= bits;
      h ^= splitmix64(state);
    }
    return cdf_monte_carlo(q, h);
  }
}

double WeightedChiSquare::cdf(double q) const {
  QuadFormScratch scratch;
  return cdf(q, scratch);
}

double WeightedChiSquare::cdf_monte_carlo(double q, std::uint64_t seed,
                                          std::size_t draws) const {
  if (q <= 0.0) return 0.0;
  Rng rng(seed);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < draws; ++i) {
    double acc = 0.0;
    for (double w : positive_) {
      const double z = rng.next_normal();
      acc += w * z * z;
    }
    if (acc <= q) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(draws);
}

}  // namespace metapi
