#ifndef METAPI_QUANTILES_HPP
#define METAPI_QUANTILES_HPP

#include <cmath>
#include <span>

#include "metapi/errors.hpp"

namespace metapi {

/// Empirical quantile with plotting position h = (n-1)p + 1 and linear
/// interpolation between order statistics (R type 7 / spreadsheet
/// PERCENTILE.INC). This single rule is used everywhere a quantile of a finite
/// sample is taken, so results are reproducible.
inline double empirical_quantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) {
    throw ParameterError("empirical_quantile: empty sample");
  }
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ParameterError("empirical_quantile: p must be in [0,1]");
  }
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double h = (static_cast<double>(n) - 1.0) * p;
  const double fl = std::floor(h);
  std::size_t lo = static_cast<std::size_t>(fl);
  if (lo >= n - 1) return sorted[n - 1];
  const double frac = h - fl;
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

/// Median under the same rule: mean of the two central order statistics for an
/// even sample size.
inline double median_sorted(std::span<const double> sorted) {
  return empirical_quantile(sorted, 0.5);
}

}  // namespace metapi

#endif  // METAPI_QUANTILES_HPP
