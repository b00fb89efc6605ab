#include "metapi/fit_report.hpp"

#include <json.hpp>

#include <cmath>
#include <random>
#include <sstream>

#include "metapi/errors.hpp"
#include "metapi/manifest.hpp"
#include "metapi/special.hpp"
#include "metapi/text.hpp"

namespace metapi {

using nlohmann::json;

FitReport build_fit_report(const MetaDataset& d, const FitOptions& opts) {
  if (!(opts.level > 0.0 && opts.level < 1.0)) {
    throw ParameterError("fit: level must be in (0,1)");
  }

  std::vector<PIMethodSpec> methods;
  for (const std::string& name : opts.method_names) {
    if (name == "all") {
      for (PIMethodSpec m : PIMethodSpec::all_presets(opts.bootstrap_b)) methods.push_back(m);
    } else {
      methods.push_back(PIMethodSpec::from_name(name, opts.bootstrap_b));
    }
  }
  for (const PIMethodSpec& m : methods) {
    if (d.k() < m.min_studies()) {
      throw DegreesOfFreedomError("method " + m.name() + " needs K >= " +
                                  std::to_string(m.min_studies()) + ", dataset has K = " +
                                  std::to_string(d.k()));
    }
  }

  FitReport rep;
  rep.k = d.k();
  rep.level = opts.level;
  rep.bootstrap_b = opts.bootstrap_b;
  rep.seed = opts.seed.value_or(std::random_device{}());

  const double z = norm_quantile(1.0 - 0.5 * (1.0 - opts.level));
  for (const auto& s : d.studies()) {
    const double se = std::sqrt(s.within_variance);
    rep.studies.push_back({s.id, s.effect, se, s.effect - z * se, s.effect + z * se});
  }

  const REFit dl = fit_dl(d);
  rep.mu_hat = dl.mu_hat;
  rep.var_iv = dl.var_iv;
  rep.var_hksj = dl.var_hksj;
  rep.q = dl.het.q;
  rep.i2 = dl.het.i2;
  rep.tau2_udl = dl.het.tau2_udl;
  rep.tau2_dl = dl.het.tau2_dl;
  rep.tau2_reml = tau2_reml(d).tau2;

  rep.ci_iv_z_lower = dl.mu_hat - z * std::sqrt(dl.var_iv);
  rep.ci_iv_z_upper = dl.mu_hat + z * std::sqrt(dl.var_iv);
  const double t = t_quantile(d.k() - 1, 1.0 - 0.5 * (1.0 - opts.level));
  rep.ci_hksj_t_lower = dl.mu_hat - t * std::sqrt(dl.var_hksj);
  rep.ci_hksj_t_upper = dl.mu_hat + t * std::sqrt(dl.var_hksj);

  REFit reml_fit;
  bool have_reml_fit = false;
  for (const PIMethodSpec& m : methods) {
    PredictionInterval pi;
    switch (m.kind) {
      case PiKind::kHts:
        if (m.uses_reml()) {
          if (!have_reml_fit) {
            reml_fit = re_fit(d, rep.tau2_reml, Tau2Estimator::kREML);
            have_reml_fit = true;
          }
          pi = hts_pi(reml_fit, m.critical, m.variance, opts.level);
        } else {
          pi = hts_pi(dl, m.critical, m.variance, opts.level);
        }
        break;
      case PiKind::kEnsemble:
        pi = ensemble_pi(d, dl, opts.level);
        break;
      case PiKind::kBootstrap: {
        Rng rng(mix_seed(rep.seed, 0, 0, StreamId::kBootstrap));
        pi = bootstrap_pi(d, m.bootstrap_draws, opts.level, rng);
        break;
      }
    }
    rep.intervals.push_back({m.name(), m.label(), pi.lower, pi.upper, pi.degenerate()});
  }
  return rep;
}

std::string fit_report_to_json(const FitReport& r) {
  json j;
  j["manifest"] = {{"tool", std::string(kToolName)},
                   {"version", std::string(kToolVersion)},
                   {"generator", std::string(Rng::generator_name())},
                   {"seed", r.seed},
                   {"bootstrap_b", r.bootstrap_b}};
  j["level"] = r.level;
  j["k"] = r.k;

  json studies = json::array();
  for (const auto& s : r.studies) {
    studies.push_back({{"id", s.id},
                       {"effect", s.effect},
                       {"se", s.se},
                       {"ci_lower", s.ci_lower},
                       {"ci_upper", s.ci_upper}});
  }
  j["studies"] = studies;

  j["pooled"] = {{"mu_hat", r.mu_hat},
                 {"var_iv", r.var_iv},
                 {"var_hksj", r.var_hksj},
                 {"ci_iv_z", {{"lower", r.ci_iv_z_lower}, {"upper", r.ci_iv_z_upper}}},
                 {"ci_hksj_t", {{"lower", r.ci_hksj_t_lower}, {"upper", r.ci_hksj_t_upper}}},
                 {"Q", r.q},
                 {"I2", r.i2},
                 {"tau2_udl", r.tau2_udl},
                 {"tau2_dl", r.tau2_dl},
                 {"tau2_reml", r.tau2_reml}};

  json pis = json::array();
  for (const auto& p : r.intervals) {
    json row = {{"method", p.method},
                {"label", p.label},
                {"lower", p.lower},
                {"upper", p.upper}};
    if (p.degenerate) row["warning"] = "degenerate-interval";
    pis.push_back(row);
  }
  j["prediction_intervals"] = pis;
  return j.dump(2) + "\n";
}

std::string fit_report_to_csv(const FitReport& r) {
  std::ostringstream out;
  out << "row,name,a,b,c,d\n";
  out << "meta,tool," << kToolName << "," << kToolVersion << ",,\n";
  out << "meta,generator," << Rng::generator_name() << ",,,\n";
  out << "meta,seed," << r.seed << ",,,\n";
  out << "meta,bootstrap_b," << r.bootstrap_b << ",,,\n";
  out << "meta,level," << format_double(r.level) << ",,,\n";
  out << "meta,k," << r.k << ",,,\n";
  for (const auto& s : r.studies) {
    out << "study," << csv_escape(s.id) << "," << format_double(s.effect) << ","
        << format_double(s.se) << "," << format_double(s.ci_lower) << ","
        << format_double(s.ci_upper) << "\n";
  }
  const auto stat = [&](const char* name, double v) {
    out << "stat," << name << "," << format_double(v) << ",,,\n";
  };
  stat("mu_hat", r.mu_hat);
  stat("var_iv", r.var_iv);
  stat("var_hksj", r.var_hksj);
  stat("Q", r.q);
  stat("I2", r.i2);
  stat("tau2_udl", r.tau2_udl);
  stat("tau2_dl", r.tau2_dl);
  stat("tau2_reml", r.tau2_reml);
  out << "ci,pooled_iv_z," << format_double(r.ci_iv_z_lower) << ","
      << format_double(r.ci_iv_z_upper) << ",,\n";
  out << "ci,pooled_hksj_t," << format_double(r.ci_hksj_t_lower) << ","
      << format_double(r.ci_hksj_t_upper) << ",,\n";
  for (const auto& p : r.intervals) {
    out << "pi," << p.method << "," << format_double(p.lower) << ","
        << format_double(p.upper) << "," << (p.degenerate ? "degenerate" : "") << ",\n";
  }
  return out.str();
}

}  // namespace metapi
