#ifndef METAPI_SPECIAL_HPP
#define METAPI_SPECIAL_HPP

// Thin wrappers around the classical distribution functions used across the
// library. Keeping them behind plain free functions confines the heavy math
// headers to one translation unit.

namespace metapi {

double norm_cdf(double x);
double norm_quantile(double p);

double t_quantile(double df, double p);

double chisq_cdf(double x, double df);
double chisq_quantile(double p, double df);

/// Owen's T function; needed by the skew-normal CDF.
double owens_t(double h, double a);

/// Regularized lower incomplete gamma P(a, x).
double gamma_p(double a, double x);

double lgamma_fn(double x);

}  // namespace metapi

#endif  // METAPI_SPECIAL_HPP
