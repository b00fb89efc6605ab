#include <doctest.h>

#include <cmath>
#include <vector>

#include "metapi/distributions.hpp"
#include "metapi/errors.hpp"
#include "metapi/rng.hpp"
#include "metapi/special.hpp"

using namespace metapi;

namespace {

struct SampleMoments {
  double mean = 0.0;
  double variance = 0.0;
  double skewness = 0.0;
};

SampleMoments sample_moments(const TrueEffectDist& d, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> xs(n);
  double sum = 0.0;
  for (auto& x : xs) {
    x = d.sample(rng);
    sum += x;
  }
  SampleMoments m;
  m.mean = sum / static_cast<double>(n);
  double m2 = 0.0, m3 = 0.0;
  for (double x : xs) {
    const double c = x - m.mean;
    m2 += c * c;
    m3 += c * c * c;
  }
  m2 /= static_cast<double>(n);
  m3 /= static_cast<double>(n);
  m.variance = m2;
  m.skewness = m3 / std::pow(m2, 1.5);
  return m;
}

// Independent quantile oracle: plain bisection against the CDF.
double bisect_quantile(const TrueEffectDist& d, double p) {
  double lo = d.mean() - 20.0 * std::sqrt(d.variance());
  double hi = d.mean() + 20.0 * std::sqrt(d.variance());
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (d.cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_SUITE_BEGIN("stats_dist");

TEST_CASE("normal construction and cdf") {
  const auto d = TrueEffectDist::normal(0.0, 1.0);
  CHECK(d.cdf(0.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(d.cdf(1.959964) == doctest::Approx(0.975).epsilon(1e-6));
  CHECK(d.quantile(0.975) == doctest::Approx(1.959964).epsilon(1e-5));
}

TEST_CASE("skew-normal with zero skewness degenerates to the normal") {
  const auto sn = TrueEffectDist::skew_normal(0.0, 1.0, 0.0);
  const auto n = TrueEffectDist::normal(0.0, 1.0);
  for (double x = -4.0; x <= 4.0; x += 0.25) {
    CHECK(sn.cdf(x) == doctest::Approx(n.cdf(x)).epsilon(1e-12));
  }
}

TEST_CASE("moment matching across families") {
  struct Case {
    EffectFamily family;
    double mean, variance, skew;
  };
  const std::vector<Case> cases = {
      {EffectFamily::kNormal, 0.0, 1.0, 0.0},
      {EffectFamily::kNormal, -3.2, 0.2, 0.0},
      {EffectFamily::kSkewNormal, 0.0, 1.0, 0.5},
      {EffectFamily::kSkewNormal, 0.0, 2.0, 0.75},
      {EffectFamily::kSkewNormal, 1.5, 0.3, 0.99},
      {EffectFamily::kSkewNormal, 0.0, 1.0, -0.5},
      {EffectFamily::kBimodalMixture, 0.0, 1.0, 0.0},
      {EffectFamily::kBimodalMixture, 2.0, 5.0, 0.0},
      {EffectFamily::kUniform, 0.0, 1.0, 0.0},
      {EffectFamily::kUniform, -1.0, 0.1, 0.0},
  };
  for (const Case& c : cases) {
    CAPTURE(family_name(c.family));
    CAPTURE(c.skew);
    const auto d = TrueEffectDist::make(
        c.family, c.mean, c.variance,
        c.family == EffectFamily::kSkewNormal ? std::optional<double>(c.skew)
                                              : std::nullopt);

    // Analytic moments from the internal parameterization.
    double mean = 0.0, var = 0.0;
    switch (c.family) {
      case EffectFamily::kNormal:
        mean = d.mean();
        var = d.variance();
        break;
      case EffectFamily::kSkewNormal: {
        const double delta = d.sn_shape() / std::sqrt(1.0 + d.sn_shape() * d.sn_shape());
        const double b = std::sqrt(2.0 / 3.14159265358979323846);
        mean = d.sn_location() + d.sn_scale() * b * delta;
        var = d.sn_scale() * d.sn_scale() * (1.0 - b * b * delta * delta);
        const double bd = b * delta;
        const double skew = 0.5 * (4.0 - 3.14159265358979323846) * bd * bd * bd /
                            std::pow(1.0 - bd * bd, 1.5);
        CHECK(std::fabs(skew - c.skew) < 1e-8);
        break;
      }
      case EffectFamily::kBimodalMixture:
        mean = 0.5 * (d.mix_mean_lo() + d.mix_mean_hi());
        var = d.mix_sd() * d.mix_sd() +
              0.25 * (d.mix_mean_hi() - d.mix_mean_lo()) * (d.mix_mean_hi() - d.mix_mean_lo());
        break;
      case EffectFamily::kUniform:
        mean = 0.5 * (d.uniform_lo() + d.uniform_hi());
        var = (d.uniform_hi() - d.uniform_lo()) * (d.uniform_hi() - d.uniform_lo()) / 12.0;
        break;
    }
    CHECK(std::fabs(mean - c.mean) < 1e-10);
    CHECK(std::fabs(var - c.variance) / c.variance < 1e-10);
  }
}

TEST_CASE("uniform endpoints are mean +/- sqrt(3 variance)") {
  const auto d = TrueEffectDist::uniform(0.0, 1.0);
  CHECK(d.uniform_lo() == doctest::Approx(-1.7320508).epsilon(1e-7));
  CHECK(d.uniform_hi() == doctest::Approx(1.7320508).epsilon(1e-7));
  CHECK(d.cdf(std::sqrt(3.0)) == 1.0);
  CHECK(d.quantile(0.025) == doctest::Approx(-1.6454482).epsilon(1e-6));
}

TEST_CASE("bimodal default is symmetric and mixture cdf averages its components") {
  const auto d = TrueEffectDist::bimodal(0.0, 1.0);
  CHECK(d.cdf(0.0) == doctest::Approx(0.5).epsilon(1e-12));
  for (double x = -3.0; x <= 3.0; x += 0.5) {
    const double direct = 0.5 * norm_cdf((x - d.mix_mean_lo()) / d.mix_sd()) +
                          0.5 * norm_cdf((x - d.mix_mean_hi()) / d.mix_sd());
    CHECK(std::fabs(d.cdf(x) - direct) < 1e-12);
  }
}

TEST_CASE("quantile round-trips through the cdf") {
  const std::vector<TrueEffectDist> dists = {
      TrueEffectDist::normal(0.0, 1.0),
      TrueEffectDist::normal(2.0, 0.3),
      TrueEffectDist::skew_normal(0.0, 1.0, 0.5),
      TrueEffectDist::skew_normal(-1.0, 2.0, 0.99),
      TrueEffectDist::bimodal(0.0, 1.0),
      TrueEffectDist::bimodal(1.0, 0.25),
      TrueEffectDist::uniform(0.0, 1.0),
  };
  for (const auto& d : dists) {
    for (double p : {0.01, 0.025, 0.5, 0.975, 0.99}) {
      CAPTURE(family_name(d.family()));
      CAPTURE(p);
      CHECK(std::fabs(d.cdf(d.quantile(p)) - p) < 1e-8);
    }
  }
}

TEST_CASE("skew-normal median agrees with a bisection oracle") {
  const auto d = TrueEffectDist::skew_normal(0.0, 1.0, 0.5);
  const double q = d.quantile(0.5);
  CHECK(q == doctest::Approx(bisect_quantile(d, 0.5)).epsilon(1e-9));
  CHECK(std::fabs(d.cdf(q) - 0.5) < 1e-9);
}

TEST_CASE("skew-normal quantiles reflect under sign change of the skewness") {
  const auto pos = TrueEffectDist::skew_normal(0.0, 1.0, 0.75);
  const auto neg = TrueEffectDist::skew_normal(0.0, 1.0, -0.75);
  for (double p : {0.01, 0.1, 0.3, 0.5, 0.8, 0.975}) {
    CHECK(pos.quantile(p) == doctest::Approx(-neg.quantile(1.0 - p)).epsilon(1e-8));
  }
}

TEST_CASE("sampling matches the requested moments") {
  constexpr std::size_t kDraws = 1000000;

  SUBCASE("standard normal") {
    const auto m = sample_moments(TrueEffectDist::normal(0.0, 1.0), kDraws, 11);
    CHECK(std::fabs(m.mean) < 0.004);
    CHECK(std::fabs(m.variance - 1.0) < 0.01);
  }
  SUBCASE("bimodal") {
    const auto m = sample_moments(TrueEffectDist::bimodal(0.0, 1.0), kDraws, 12);
    CHECK(std::fabs(m.mean) < 0.004);
    CHECK(std::fabs(m.variance - 1.0) < 0.01);
  }
  SUBCASE("heavily skewed") {
    const auto m = sample_moments(TrueEffectDist::skew_normal(0.0, 1.0, 0.99), kDraws, 13);
    CHECK(std::fabs(m.skewness - 0.99) < 0.02);
    CHECK(std::fabs(m.mean) < 0.004);
  }
  SUBCASE("uniform stays inside its endpoints") {
    const auto d = TrueEffectDist::uniform(0.0, 1.0);
    Rng rng(14);
    for (int i = 0; i < 100000; ++i) {
      const double x = d.sample(rng);
      CHECK(x > d.uniform_lo());
      CHECK(x < d.uniform_hi());
    }
  }
}

TEST_CASE("parameter errors") {
  CHECK_THROWS_AS(TrueEffectDist::normal(0.0, 0.0), ParameterError);
  CHECK_THROWS_AS(TrueEffectDist::normal(0.0, -1.0), ParameterError);
  CHECK_THROWS_AS(TrueEffectDist::skew_normal(0.0, 1.0, 0.9953), ParameterError);
  CHECK_THROWS_AS(TrueEffectDist::skew_normal(0.0, 1.0, -1.2), ParameterError);
  CHECK_THROWS_AS(TrueEffectDist::make(EffectFamily::kSkewNormal, 0.0, 1.0), ParameterError);
  const auto d = TrueEffectDist::normal(0.0, 1.0);
  CHECK_THROWS_AS(d.quantile(0.0), ParameterError);
  CHECK_THROWS_AS(d.quantile(1.0), ParameterError);
  CHECK_THROWS_AS(d.cdf(std::nan("")), ParameterError);
  CHECK(skew_normal_max_skewness() == doctest::Approx(0.99527).epsilon(1e-4));
}

TEST_SUITE_END();
