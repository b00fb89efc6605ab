#ifndef METAPI_SCENARIO_HPP
#define METAPI_SCENARIO_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "metapi/distributions.hpp"
#include "metapi/pi_methods.hpp"

namespace metapi {

/// Per-study total sample sizes: either equal across studies or the cycle
/// (50, 100, 500) repeated. Group sizes are the halved totals, so equal sizes
/// must be even. The two-group population variance is fixed at 10, which makes
/// the theoretical within-study variance 40/N.
class SampleSizePlan {
 public:
  static SampleSizePlan equal(int n);
  static SampleSizePlan mixed();

  bool is_mixed() const noexcept { return mixed_; }
  int equal_n() const noexcept { return equal_n_; }

  int size_for(int study_index) const;
  std::vector<int> sizes_for(int k) const;

  /// Theoretical within-study variance 40/N for study k.
  double theoretical_variance(int study_index) const;
  double mean_theoretical_variance(int k) const;

  /// "30", "100", ... or "mixed"; used in configs and directory names.
  std::string tag() const;
  static SampleSizePlan from_tag(const std::string& tag);

  friend bool operator==(const SampleSizePlan&, const SampleSizePlan&) = default;

  static constexpr double group_population_variance() { return 10.0; }

 private:
  SampleSizePlan(bool mixed, int n) : mixed_(mixed), equal_n_(n) {}
  bool mixed_ = false;
  int equal_n_ = 0;
};

/// Which true-effect family a scenario draws from, plus the skewness level for
/// the skew-normal entries. Grid names: normal, skew0.5, skew0.75, skew0.99,
/// bimodal, uniform.
struct EffectDistSpec {
  EffectFamily family = EffectFamily::kNormal;
  double skewness = 0.0;

  std::string name() const;
  static EffectDistSpec from_name(const std::string& name);

  /// All six grid families in canonical order.
  static std::vector<EffectDistSpec> grid_defaults();

  TrueEffectDist make(double mean, double variance) const;

  friend bool operator==(const EffectDistSpec&, const EffectDistSpec&) = default;
};

/// One cell of the simulation grid together with its run parameters.
struct Scenario {
  int index = 0;
  int k = 3;
  SampleSizePlan sizes = SampleSizePlan::equal(100);
  double tau2 = 1.0;
  double mu = 0.0;
  EffectDistSpec dist;
  int reps = 5000;
  double alpha = 0.05;
  std::vector<PIMethodSpec> methods;
  std::uint64_t master_seed = 1;

  TrueEffectDist true_effect_dist() const { return dist.make(mu, tau2); }
  /// tau2 over the mean theoretical within-study variance.
  double heterogeneity_ratio() const { return tau2 / sizes.mean_theoretical_variance(k); }
  /// Directory-friendly identifier: s<index>_K<K>_N<tag>_t2<tau2>_<dist>.
  std::string dir_name() const;
};

/// Factor levels of a fully crossed grid. Defaults reproduce the 3024-cell
/// grid: K in {3,4,5,7,10,15,20,30,100}, N in {30,50,100,200,500,1000,2000}
/// plus mixed, tau2 in {0.1,0.2,0.3,0.5,1,2,5}, six true-effect families.
struct GridAxes {
  std::vector<int> k_levels;
  std::vector<SampleSizePlan> size_levels;
  std::vector<double> tau2_levels;
  std::vector<EffectDistSpec> dist_levels;

  static GridAxes paper_defaults();
};

/// Run parameters shared by every scenario of a grid.
struct RunSettings {
  double mu = 0.0;
  int reps = 5000;
  double alpha = 0.05;
  std::vector<PIMethodSpec> methods = PIMethodSpec::all_presets();
  std::uint64_t master_seed = 1;
};

/// Fully crossed scenario list with deterministic indices (sizes outermost,
/// then K, tau2, and the distribution family fastest).
std::vector<Scenario> build_grid(const GridAxes& axes, const RunSettings& settings);

}  // namespace metapi

#endif  // METAPI_SCENARIO_HPP
