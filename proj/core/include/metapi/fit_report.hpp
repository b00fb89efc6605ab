#ifndef METAPI_FIT_REPORT_HPP
#define METAPI_FIT_REPORT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "metapi/dataset.hpp"
#include "metapi/pi_methods.hpp"

namespace metapi {

struct FitOptions {
  std::vector<std::string> method_names = {"all"};
  double level = 0.95;
  std::optional<std::uint64_t> seed;  // entropy-seeded (and recorded) when absent
  int bootstrap_b = 5000;
};

/// Forest-style fit report: per-study rows, pooled results under both variance
/// estimators, heterogeneity statistics and one row per prediction-interval
/// method.
struct FitReport {
  struct StudyRow {
    std::string id;
    double effect = 0.0;
    double se = 0.0;
    double ci_lower = 0.0;
    double ci_upper = 0.0;
  };
  struct PiRow {
    std::string method;
    std::string label;
    double lower = 0.0;
    double upper = 0.0;
    bool degenerate = false;
  };

  std::vector<StudyRow> studies;
  int k = 0;
  double level = 0.95;

  double mu_hat = 0.0;
  double var_iv = 0.0;
  double var_hksj = 0.0;
  double ci_iv_z_lower = 0.0;    // z critical value on the inverse-variance SE
  double ci_iv_z_upper = 0.0;
  double ci_hksj_t_lower = 0.0;  // t with K-1 df on the HKSJ SE
  double ci_hksj_t_upper = 0.0;
  double q = 0.0;
  double i2 = 0.0;
  double tau2_udl = 0.0;
  double tau2_dl = 0.0;
  double tau2_reml = 0.0;

  std::vector<PiRow> intervals;

  std::uint64_t seed = 0;
  int bootstrap_b = 5000;
};

FitReport build_fit_report(const MetaDataset& d, const FitOptions& opts);

std::string fit_report_to_json(const FitReport& report);
std::string fit_report_to_csv(const FitReport& report);

}  // namespace metapi

#endif  // METAPI_FIT_REPORT_HPP
