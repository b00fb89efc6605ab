#ifndef METAPI_QUAD_FORM_HPP
#define METAPI_QUAD_FORM_HPP

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace metapi {

/// Reusable scratch buffers for the series evaluator; one per thread of use.
struct QuadFormScratch {
  std::vector<double> ratio;   // 1 - beta/lambda_i
  std::vector<double> powers;  // running ratio^j
  std::vector<double> mix_a;   // mixture coefficients a_j
  std::vector<double> mix_b;   // power sums b_j
};

/// Distribution of sum_i lambda_i * X_i with X_i i.i.d. chi-square(1) and
/// lambda_i >= 0 (at least one positive).
///
/// The CDF is evaluated as a mixture of central chi-square CDFs (Ruben's
/// series) whose coefficients are nonnegative and sum to one, which yields a
/// running truncation bound; the series is accepted only when that bound is
/// below the accuracy target. A seeded Monte-Carlo evaluator is available as
/// an independent oracle and as a fallback for pathological weight spreads.
class WeightedChiSquare {
 public:
  explicit WeightedChiSquare(std::vector<double> weights);

  const std::vector<double>& weights() const noexcept { return weights_; }

  /// P(Q <= q), absolute error below 1e-9 from the series; falls back to the
  /// Monte-Carlo evaluator (recorded in quad_form_fallback_count) if the
  /// series does not converge within the term cap.
  double cdf(double q) const;
  double cdf(double q, QuadFormScratch& scratch) const;

  /// P(Q > q).
  double survival(double q) const { return 1.0 - cdf(q); }
  double survival(double q, QuadFormScratch& scratch) const {
    return 1.0 - cdf(q, scratch);
  }

  /// Series evaluator without the fallback; throws NumericError when the
  /// truncation bound cannot be met within max_terms.
  double cdf_series(double q, QuadFormScratch& scratch, double abs_tol = 1e-9,
                    std::size_t max_terms = 20000) const;

  /// Plain Monte-Carlo estimate of P(Q <= q); deterministic for a given seed.
  double cdf_monte_carlo(double q, std::uint64_t seed, std::size_t draws = 200000) const;

  static constexpr std::string_view evaluator_name() { return "ruben-series"; }

 private:
  std::vector<double> weights_;      // as given (validated)
  std::vector<double> positive_;     // zero weights dropped
  double min_weight_ = 0.0;
};

/// Number of times any weighted-chi-square CDF evaluation had to fall back to
/// Monte Carlo in this process; surfaced in run manifests.
std::uint64_t quad_form_fallback_count() noexcept;

}  // namespace metapi

#endif  // METAPI_QUAD_FORM_HPP
