// Acceptance suite: runs each release criterion at its stated tolerance and
// prints one PASS/FAIL line per criterion. Exit code 0 only if all pass.
//
// Usage: metapi_acceptance [--only 1,4,9] [--threads N]
//
// The bootstrap scenarios dominate the runtime (roughly half an hour on two
// cores); everything is seeded, so reruns are bit-identical.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "metapi/fit_report.hpp"
#include "metapi/pi_methods.hpp"
#include "metapi/quad_form.hpp"
#include "metapi/sim_config.hpp"
#include "metapi/sim_engine.hpp"
#include "metapi/simulate.hpp"
#include "metapi/study_csv.hpp"

using namespace metapi;
namespace fs = std::filesystem;

namespace {

int g_threads = static_cast<int>(std::thread::hardware_concurrency());

struct Criterion {
  Criterion(int id_in, std::string title_in) : id(id_in), title(std::move(title_in)) {}

  int id;
  std::string title;
  bool pass = true;
  std::vector<std::string> failures;
  std::vector<std::string> notes;

  void expect(bool ok, const std::string& detail) {
    if (!ok) {
      pass = false;
      failures.push_back(detail);
    } else {
      notes.push_back(detail);
    }
  }
};

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(4);
  out << v;
  return out.str();
}

std::string in_range_detail(const std::string& what, double value, double lo, double hi) {
  return what + " = " + fmt(value) + " (target [" + fmt(lo) + ", " + fmt(hi) + "])";
}

MetaDataset worked_dataset() {
  std::vector<StudySummary> studies = {{"a", 0.0, 1.0}, {"b", 2.0, 1.0}, {"c", 4.0, 1.0}};
  return MetaDataset(std::move(studies));
}

Scenario normal_scenario(int k, double tau2, int reps, std::uint64_t seed,
                         std::vector<PIMethodSpec> methods) {
  Scenario s;
  s.index = 0;
  s.k = k;
  s.sizes = SampleSizePlan::equal(100);
  s.tau2 = tau2;
  s.mu = 0.0;
  s.dist = {EffectFamily::kNormal, 0.0};
  s.reps = reps;
  s.alpha = 0.05;
  s.methods = std::move(methods);
  s.master_seed = seed;
  return s;
}

ScenarioRun run_with_progress(const Scenario& s, const EngineOptions& opts,
                              const std::string& tag) {
  std::cerr << "  [running] " << tag << " (K=" << s.k << ", reps=" << s.reps
            << ", threads=" << opts.threads << ") ..." << std::flush;
  const auto t0 = std::chrono::steady_clock::now();
  ScenarioRun run = run_scenario(s, opts);
  const auto dt = std::chrono::duration_cast<std::chrono::seconds>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
  std::cerr << " done in " << dt << "s\n";
  return run;
}

const MethodSummary& method_summary(const ScenarioRun& run, const std::string& name) {
  for (const MethodSummary& m : run.summary.methods) {
    if (m.name == name) return m;
  }
  throw std::runtime_error("method summary not found: " + name);
}

// The worked high-heterogeneity scenario (N=100, tau2=1, K=7), all methods,
// the simulation budget of 5000 replicates (1000 for the bootstrap, B=5000).
const ScenarioRun& k7_run(std::uint64_t seed) {
  static std::map<std::uint64_t, ScenarioRun> cache;
  auto it = cache.find(seed);
  if (it == cache.end()) {
    const Scenario s =
        normal_scenario(7, 1.0, 5000, seed, PIMethodSpec::all_presets(5000));
    EngineOptions opts;
    opts.threads = g_threads;
    opts.bootstrap_reps = 1000;
    it = cache.emplace(seed, run_with_progress(s, opts, "K7 tau2=1 seed " +
                                                            std::to_string(seed)))
             .first;
  }
  return it->second;
}

// --------------------------------------------------------------------------

Criterion criterion1() {
  Criterion c(1, "tower-rule identity: mean(C) vs fresh-effect hit frequency");
  for (std::uint64_t seed : {101ULL, 202ULL, 303ULL}) {
    const ScenarioRun& run = k7_run(seed);
    for (const MethodSummary& m : run.summary.methods) {
      const double n = static_cast<double>(m.ok);
      const double bound = 3.0 * std::sqrt(0.95 * 0.05 / n);
      const double diff = std::fabs(m.mean_c - m.freq_new_covered);
      c.expect(diff <= bound, "seed " + std::to_string(seed) + " " + m.name + ": |" +
                                  fmt(m.mean_c) + " - " + fmt(m.freq_new_covered) +
                                  "| = " + fmt(diff) + " (bound " + fmt(bound) + ")");
    }
  }
  return c;
}

const ScenarioRun& k3_run() {
  static const ScenarioRun run = [] {
    const Scenario s = normal_scenario(
        3, 1.0, 1000, 404,
        {PIMethodSpec::bootstrap(5000), PIMethodSpec::hts_dl_tkm2()});
    EngineOptions opts;
    opts.threads = g_threads;
    opts.bootstrap_reps = 1000;
    return run_with_progress(s, opts, "K3 tau2=1");
  }();
  return run;
}

Criterion criterion2() {
  Criterion c(2, "bootstrap mean coverage stays near nominal at K=3");
  const MethodSummary& m = method_summary(k3_run(), "bootstrap");
  c.expect(m.mean_c >= 0.93 && m.mean_c <= 0.97,
           in_range_detail("bootstrap mean(C)", m.mean_c, 0.93, 0.97));
  return c;
}

Criterion criterion3() {
  Criterion c(3, "HTS-DL(t_k-2) mean coverage is nearly 1 at K=3");
  const MethodSummary& m = method_summary(k3_run(), "hts_dl_tkm2");
  c.expect(m.mean_c >= 0.985, "HTS-DL(t_k-2) mean(C) = " + fmt(m.mean_c) + " (>= 0.985)");
  return c;
}

Criterion criterion4() {
  Criterion c(4, "worked scenario N=100, tau2=1 (I2 label 71%), K=7");
  const ScenarioRun& run = k7_run(101);

  const auto& boot = method_summary(run, "bootstrap");
  c.expect(std::fabs(boot.mean_c - 0.94) <= 0.015,
           in_range_detail("bootstrap mean(C)", boot.mean_c, 0.925, 0.955));

  for (const char* name : {"hts_dl_z", "ensemble"}) {
    const auto& m = method_summary(run, name);
    c.expect(m.mean_c >= 0.815 && m.mean_c <= 0.865,
             in_range_detail(std::string(name) + " mean(C)", m.mean_c, 0.815, 0.865));
  }

  for (const char* name :
       {"hts_dl_tkm2", "hts_reml_tkm2", "hts_hksj_tkm2", "hts_dl_tkm1", "bootstrap"}) {
    const auto& m = method_summary(run, name);
    c.expect(m.median_c >= 0.975 && m.median_c <= 0.995,
             in_range_detail(std::string(name) + " median(C)", m.median_c, 0.975, 0.995));
  }

  for (const MethodSummary& m : run.summary.methods) {
    c.expect(m.prop_c_gt_99 >= 0.18 && m.prop_c_gt_99 <= 0.52,
             in_range_detail(m.name + " prop(C>0.99)", m.prop_c_gt_99, 0.18, 0.52));
  }

  for (const char* name :
       {"bootstrap", "hts_dl_tkm2", "hts_reml_tkm2", "hts_hksj_tkm2", "hts_dl_tkm1"}) {
    const auto& m = method_summary(run, name);
    c.expect(std::fabs(m.mean_rel_length - 1.30) <= 0.07,
             in_range_detail(std::string(name) + " mean(L/L_T)", m.mean_rel_length, 1.23,
                             1.37));
  }
  const auto& ens = method_summary(run, "ensemble");
  c.expect(std::fabs(ens.mean_rel_length - 1.10) <= 0.05,
           in_range_detail("ensemble mean(L/L_T)", ens.mean_rel_length, 1.05, 1.15));
  const auto& z = method_summary(run, "hts_dl_z");
  c.expect(std::fabs(z.mean_rel_length - 1.00) <= 0.05,
           in_range_detail("hts_dl_z mean(L/L_T)", z.mean_rel_length, 0.95, 1.05));
  return c;
}

Criterion criterion5() {
  Criterion c(5, "heterogeneity summaries: v exact, mean I2 near its label (K=100)");
  for (const auto& [tau2, v_target, i2_target] :
       {std::tuple{0.2, 0.5, 0.33}, std::tuple{1.0, 2.5, 0.71}}) {
    const Scenario s =
        normal_scenario(100, tau2, 1000, 505, {PIMethodSpec::hts_dl_z()});
    EngineOptions opts;
    opts.threads = g_threads;
    const ScenarioRun run =
        run_with_progress(s, opts, "K100 tau2=" + fmt(tau2) + " summaries");
    c.expect(run.summary.v == v_target,
             "v = " + fmt(run.summary.v) + " (exactly " + fmt(v_target) + ")");
    c.expect(std::fabs(run.summary.mean_i2 - i2_target) <= 0.02,
             in_range_detail("mean I2 at tau2=" + fmt(tau2), run.summary.mean_i2,
                             i2_target - 0.02, i2_target + 0.02));
  }
  return c;
}

Criterion criterion6() {
  Criterion c(6, "large-K concentration of HTS-DL(t_k-2) coverage");
  const Scenario s = normal_scenario(100, 1.0, 5000, 606, {PIMethodSpec::hts_dl_tkm2()});
  EngineOptions opts;
  opts.threads = g_threads;
  const ScenarioRun run = run_with_progress(s, opts, "K100 tau2=1 concentration");
  const auto& m = run.summary.methods[0];
  c.expect(m.median_c >= 0.94 && m.median_c <= 0.965,
           in_range_detail("median(C)", m.median_c, 0.94, 0.965));
  c.expect(m.prop_c_gt_99 <= 0.05,
           "prop(C>0.99) = " + fmt(m.prop_c_gt_99) + " (<= 0.05)");
  return c;
}

Criterion criterion7() {
  Criterion c(7, "tau2 confidence sampler matches the equal-variance closed form");
  const MetaDataset d = worked_dataset();  // q_obs = 8, K = 3, unit variances
  const double q_obs = cochran_q(d).q;

  Tau2ConfidenceSampler sampler(d);
  Rng rng(707);
  const int n = 10000;
  std::vector<double> draws;
  draws.reserve(n);
  double max_err = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.next_open();
    const double tau2 = sampler.tau2_at(u, 1e-8);
    const double closed = std::max(0.0, q_obs / (-2.0 * std::log(u)) - 1.0);
    max_err = std::max(max_err, std::fabs(tau2 - closed));
    draws.push_back(tau2);
  }
  c.expect(max_err <= 1e-4,
           "max |sampled - closed form| = " + fmt(max_err) + " (<= 1e-4)");

  // Kolmogorov-Smirnov distance against the closed-form pushforward of U(0,1):
  // F(t) = exp(-q_obs / (2 (1 + t))) for t >= 0, with an atom at zero.
  std::sort(draws.begin(), draws.end());
  double ks = 0.0;
  for (int i = 0; i < n; ++i) {
    const double f = std::exp(-q_obs / (2.0 * (1.0 + draws[static_cast<std::size_t>(i)])));
    ks = std::max(ks, std::fabs(f - static_cast<double>(i) / n));
    ks = std::max(ks, std::fabs(static_cast<double>(i + 1) / n - f));
  }
  c.expect(ks <= 0.02, "KS distance = " + fmt(ks) + " (<= 0.02)");
  return c;
}

Criterion criterion8() {
  Criterion c(8, "weighted chi-square CDF: analytic cases and Monte-Carlo oracle");
  const WeightedChiSquare one({1.0});
  c.expect(std::fabs(one.cdf(3.841459) - 0.95) <= 1e-5,
           "lambda=(1): cdf(3.841459) = " + fmt(one.cdf(3.841459)));
  const WeightedChiSquare two({2.0, 2.0});
  c.expect(std::fabs(two.cdf(2.0 * 5.991465) - 0.95) <= 1e-5,
           "lambda=(2,2): cdf(11.98293) = " + fmt(two.cdf(2.0 * 5.991465)));
  const WeightedChiSquare mix({1.0, 2.0, 3.0});
  for (double q : {2.0, 6.0, 12.0}) {
    const double mc = mix.cdf_monte_carlo(q, 881122, 1000000);
    const double series = mix.cdf(q);
    c.expect(std::fabs(series - mc) <= 0.003,
             "lambda=(1,2,3) q=" + fmt(q) + ": |" + fmt(series) + " - " + fmt(mc) + "|");
  }
  return c;
}

Criterion criterion9() {
  Criterion c(9, "hand-example suite through the fit pipeline");
  FitOptions opts;
  opts.seed = 909;
  const FitReport rep = build_fit_report(worked_dataset(), opts);

  const auto close = [](double a, double b) { return std::fabs(a - b) <= 1e-3; };
  c.expect(close(rep.q, 8.0), "Q = " + fmt(rep.q));
  c.expect(close(rep.i2, 0.75), "I2 = " + fmt(rep.i2));
  c.expect(close(rep.tau2_dl, 3.0), "tau2_DL = " + fmt(rep.tau2_dl));
  c.expect(close(rep.tau2_reml, 3.0), "tau2_REML = " + fmt(rep.tau2_reml));
  c.expect(close(rep.mu_hat, 2.0), "mu_hat = " + fmt(rep.mu_hat));
  c.expect(close(rep.var_iv, 4.0 / 3.0), "var_iv = " + fmt(rep.var_iv));
  c.expect(close(rep.var_hksj, 4.0 / 3.0), "var_hksj = " + fmt(rep.var_hksj));

  const auto interval = [&](const std::string& name) {
    for (const auto& row : rep.intervals) {
      if (row.method == name) return row;
    }
    throw std::runtime_error("missing interval row " + name);
  };
  // Half widths follow directly from c * sqrt(tau2 + var_iv) = c * sqrt(13/3).
  const auto t2 = interval("hts_dl_tkm2");
  c.expect(close(t2.lower, -24.4501) && close(t2.upper, 28.4501),
           "HTS-DL(t_k-2) = (" + fmt(t2.lower) + ", " + fmt(t2.upper) + ")");
  const auto t1 = interval("hts_dl_tkm1");
  c.expect(close(t1.lower, -6.9567) && close(t1.upper, 10.9567),
           "HTS-DL(t_k-1) = (" + fmt(t1.lower) + ", " + fmt(t1.upper) + ")");
  const auto z = interval("hts_dl_z");
  c.expect(close(z.lower, -2.0800) && close(z.upper, 6.0800),
           "HTS-DL(z) = (" + fmt(z.lower) + ", " + fmt(z.upper) + ")");
  return c;
}

Criterion criterion10() {
  Criterion c(10, "simulate outputs are byte-identical across worker counts");
  const SimConfig cfg = parse_config(
      R"({"K":[3,5],"N":[100],"tau2":[1],"dist":["normal"],"reps":150,
          "bootstrap_reps":20,"B":150,"seed":4242})");
  const fs::path base = fs::temp_directory_path() / "metapi_acceptance_det";
  const fs::path dir1 = base / "jobs1";
  const fs::path dir2 = base / "jobs2";
  fs::remove_all(base);
  run_simulation(cfg, dir1.string(), 1);
  run_simulation(cfg, dir2.string(), 2);

  std::size_t compared = 0;
  for (const auto& entry : fs::recursive_directory_iterator(dir1)) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), dir1);
    if (rel.filename() == "manifest.json") continue;  // timestamps differ
    std::ifstream a(entry.path(), std::ios::binary);
    std::ifstream b(dir2 / rel, std::ios::binary);
    std::ostringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    c.expect(b.good() && sa.str() == sb.str(), "file " + rel.string() + " identical");
    ++compared;
  }
  c.expect(compared >= 10, "compared " + std::to_string(compared) + " files");
  fs::remove_all(base);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--only" && i + 1 < argc) {
      std::istringstream list(argv[++i]);
      std::string tok;
      while (std::getline(list, tok, ',')) only.insert(std::stoi(tok));
    } else if (arg == "--threads" && i + 1 < argc) {
      g_threads = std::stoi(argv[++i]);
    } else {
      std::cerr << "usage: metapi_acceptance [--only 1,2,...] [--threads N]\n";
      return 2;
    }
  }
  if (g_threads < 1) g_threads = 1;

  using Builder = Criterion (*)();
  const std::vector<std::pair<int, Builder>> builders = {
      {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4},
      {5, criterion5}, {6, criterion6}, {7, criterion7}, {8, criterion8},
      {9, criterion9}, {10, criterion10}};
  int failed = 0;
  for (const auto& [id, build] : builders) {
    if (!only.empty() && !only.count(id)) continue;
    Criterion c(id, "criterion raised before completing");
    try {
      c = build();
    } catch (const std::exception& e) {
      c.pass = false;
      c.failures.push_back(std::string("exception: ") + e.what());
    }
    std::cout << (c.pass ? "[PASS]" : "[FAIL]") << " criterion " << c.id << ": "
              << c.title << "\n";
    for (const std::string& f : c.failures) std::cout << "       !! " << f << "\n";
    for (const std::string& n : c.notes) std::cout << "          " << n << "\n";
    if (!c.pass) ++failed;
  }
  if (failed > 0) {
    std::cout << failed << " criterion(s) failed\n";
    return 1;
  }
  std::cout << "all criteria passed\n";
  return 0;
}
