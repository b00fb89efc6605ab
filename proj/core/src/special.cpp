#include "metapi/special.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/owens_t.hpp>

#include <stdexcept>

#include "metapi/errors.hpp"

namespace metapi {

namespace {
const boost::math::normal_distribution<double> kStdNormal(0.0, 1.0);
}  // namespace

double norm_cdf(double x) { return boost::math::cdf(kStdNormal, x); }

double norm_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw ParameterError("norm_quantile: p must be in (0,1)");
  }
  return boost::math::quantile(kStdNormal, p);
}

double t_quantile(double df, double p) {
  if (!(df > 0.0)) {
    throw ParameterError("t_quantile: df must be positive");
  }
  if (!(p > 0.0 && p < 1.0)) {
    throw ParameterError("t_quantile: p must be in (0,1)");
  }
  return boost::math::quantile(boost::math::students_t_distribution<double>(df), p);
}

double chisq_cdf(double x, double df) {
  if (x <= 0.0) return 0.0;
  return boost::math::gamma_p(0.5 * df, 0.5 * x);
}

double chisq_quantile(double p, double df) {
  if (!(p > 0.0 && p < 1.0)) {
    throw ParameterError("chisq_quantile: p must be in (0,1)");
  }
  return boost::math::quantile(boost::math::chi_squared_distribution<double>(df), p);
}

double owens_t(double h, double a) { return boost::math::owens_t(h, a); }

double gamma_p(double a, double x) { return boost::math::gamma_p(a, x); }

double lgamma_fn(double x) { return boost::math::lgamma(x); }

}  // namespace metapi
