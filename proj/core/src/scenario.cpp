#include "metapi/scenario.hpp"

#include <array>
#include <cmath>

#include "metapi/errors.hpp"
#include "metapi/text.hpp"

namespace metapi {

namespace {
constexpr std::array<int, 3> kMixedCycle{50, 100, 500};
}

SampleSizePlan SampleSizePlan::equal(int n) {
  if (n < 4 || n % 2 != 0) {
    throw ConfigError("equal sample size must be an even integer >= 4, got " +
                      std::to_string(n));
  }
  return SampleSizePlan(false, n);
}

SampleSizePlan SampleSizePlan::mixed() { return SampleSizePlan(true, 0); }

int SampleSizePlan::size_for(int study_index) const {
  if (mixed_) return kMixedCycle[static_cast<std::size_t>(study_index) % kMixedCycle.size()];
  return equal_n_;
}

std::vector<int> SampleSizePlan::sizes_for(int k) const {
  std::vector<int> out(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) out[static_cast<std::size_t>(i)] = size_for(i);
  return out;
}

double SampleSizePlan::theoretical_variance(int study_index) const {
  // V/(N/2) per group, two groups.
  return 4.0 * group_population_variance() / size_for(study_index);
}

double SampleSizePlan::mean_theoretical_variance(int k) const {
  if (!mixed_) return theoretical_variance(0);  // constant across studies, no summation drift
  double sum = 0.0;
  for (int i = 0; i < k; ++i) sum += theoretical_variance(i);
  return sum / k;
}

std::string SampleSizePlan::tag() const {
  return mixed_ ? "mixed" : std::to_string(equal_n_);
}

SampleSizePlan SampleSizePlan::from_tag(const std::string& tag) {
  if (tag == "mixed") return mixed();
  try {
    return equal(std::stoi(tag));
  } catch (const std::invalid_argument&) {
    throw ConfigError("unknown sample-size tag '" + tag + "'");
  }
}

std::string EffectDistSpec::name() const {
  switch (family) {
    case EffectFamily::kNormal: return "normal";
    case EffectFamily::kSkewNormal: return "skew" + format_double(skewness);
    case EffectFamily::kBimodalMixture: return "bimodal";
    case EffectFamily::kUniform: return "uniform";
  }
  return "unknown";
}

EffectDistSpec EffectDistSpec::from_name(const std::string& name) {
  for (const EffectDistSpec& spec : grid_defaults()) {
    if (spec.name() == name) return spec;
  }
  if (name.rfind("skew", 0) == 0) {
    try {
      return {EffectFamily::kSkewNormal, std::stod(name.substr(4))};
    } catch (const std::invalid_argument&) {
    }
  }
  throw ConfigError("unknown true-effect distribution '" + name + "'");
}

std::vector<EffectDistSpec> EffectDistSpec::grid_defaults() {
  return {{EffectFamily::kNormal, 0.0},      {EffectFamily::kSkewNormal, 0.5},
          {EffectFamily::kSkewNormal, 0.75}, {EffectFamily::kSkewNormal, 0.99},
          {EffectFamily::kBimodalMixture, 0.0}, {EffectFamily::kUniform, 0.0}};
}

TrueEffectDist EffectDistSpec::make(double mean, double variance) const {
  if (family == EffectFamily::kSkewNormal) {
    return TrueEffectDist::skew_normal(mean, variance, skewness);
  }
  return TrueEffectDist::make(family, mean, variance);
}

std::string Scenario::dir_name() const {
  return "s" + std::to_string(index) + "_K" + std::to_string(k) + "_N" + sizes.tag() +
         "_t2" + format_double(tau2) + "_" + dist.name();
}

GridAxes GridAxes::paper_defaults() {
  GridAxes axes;
  axes.k_levels = {3, 4, 5, 7, 10, 15, 20, 30, 100};
  for (int n : {30, 50, 100, 200, 500, 1000, 2000}) {
    axes.size_levels.push_back(SampleSizePlan::equal(n));
  }
  axes.size_levels.push_back(SampleSizePlan::mixed());
  axes.tau2_levels = {0.1, 0.2, 0.3, 0.5, 1.0, 2.0, 5.0};
  axes.dist_levels = EffectDistSpec::grid_defaults();
  return axes;
}

std::vector<Scenario> build_grid(const GridAxes& axes, const RunSettings& settings) {
  if (axes.k_levels.empty() || axes.size_levels.empty() || axes.tau2_levels.empty() ||
      axes.dist_levels.empty()) {
    throw ConfigError("every grid factor needs at least one level");
  }
  if (settings.methods.empty()) {
    throw ConfigError("at least one prediction-interval method is required");
  }
  if (settings.reps < 1) {
    throw ConfigError("reps must be at least 1");
  }
  for (int k : axes.k_levels) {
    for (const PIMethodSpec& m : settings.methods) {
      if (k < m.min_studies()) {
        throw ConfigError("method " + m.name() + " needs K >= " +
                          std::to_string(m.min_studies()) + " but the grid contains K = " +
                          std::to_string(k));
      }
    }
  }

  std::vector<Scenario> grid;
  grid.reserve(axes.k_levels.size() * axes.size_levels.size() * axes.tau2_levels.size() *
               axes.dist_levels.size());
  int index = 0;
  for (const SampleSizePlan& sizes : axes.size_levels) {
    for (int k : axes.k_levels) {
      for (double tau2 : axes.tau2_levels) {
        for (const EffectDistSpec& dist : axes.dist_levels) {
          if (!(tau2 > 0.0)) {
            throw ConfigError("tau2 levels must be positive");
          }
          Scenario s;
          s.index = index++;
          s.k = k;
          s.sizes = sizes;
          s.tau2 = tau2;
          s.mu = settings.mu;
          s.dist = dist;
          s.reps = settings.reps;
          s.alpha = settings.alpha;
          s.methods = settings.methods;
          s.master_seed = settings.master_seed;
          grid.push_back(std::move(s));
        }
      }
    }
  }
  return grid;
}

}  // namespace metapi
