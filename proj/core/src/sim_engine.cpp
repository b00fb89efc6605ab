#include "metapi/sim_engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "metapi/errors.hpp"
#include "metapi/quantiles.hpp"
#include "metapi/special.hpp"

namespace metapi {

GeneratedData generate_dataset(const Scenario& s, Rng& rng) {
  const TrueEffectDist dist = s.true_effect_dist();
  const double v_pop = SampleSizePlan::group_population_variance();

  std::vector<GeneratedStudy> studies(static_cast<std::size_t>(s.k));
  std::vector<StudySummary> summaries;
  summaries.reserve(studies.size());

  for (int k = 0; k < s.k; ++k) {
    GeneratedStudy& g = studies[static_cast<std::size_t>(k)];
    g.n_total = s.sizes.size_for(k);
    g.n_exp = g.n_total / 2;
    g.n_ctl = g.n_total - g.n_exp;
    g.sigma2 = v_pop / g.n_exp + v_pop / g.n_ctl;

    // Observed group variances are scaled chi-square draws.
    const double df_e = g.n_exp - 1;
    const double df_c = g.n_ctl - 1;
    const double var_e = chisq_quantile(rng.next_open(), df_e) * v_pop / df_e;
    const double var_c = chisq_quantile(rng.next_open(), df_c) * v_pop / df_c;
    g.sigma2_hat = var_e / g.n_exp + var_c / g.n_ctl;

    g.theta = dist.sample(rng);
    // Measurement error uses the theoretical variance; estimators only ever
    // see the observed sigma2_hat.
    g.theta_hat = g.theta + std::sqrt(g.sigma2) * rng.next_normal();

    summaries.push_back({"study" + std::to_string(k + 1), g.theta_hat, g.sigma2_hat});
  }

  return {MetaDataset(std::move(summaries)), std::move(studies)};
}

double coverage(const PredictionInterval& pi, const TrueEffectDist& dist) {
  const double c = dist.cdf(pi.upper) - dist.cdf(pi.lower);
  return std::min(1.0, std::max(0.0, c));
}

double theoretical_length(const TrueEffectDist& dist) {
  return dist.quantile(0.975) - dist.quantile(0.025);
}

std::string fail_code_name(FailCode code) {
  switch (code) {
    case FailCode::kNone: return "none";
    case FailCode::kRemlNonConvergence: return "reml_nonconvergence";
    case FailCode::kDegreesOfFreedom: return "degrees_of_freedom";
    case FailCode::kNumeric: return "numeric";
    case FailCode::kOther: return "other";
  }
  return "unknown";
}

namespace {

int bootstrap_rep_budget(const Scenario& s, const EngineOptions& opts) {
  return std::min(s.reps, opts.bootstrap_reps);
}

ReplicateRecord run_replicate(const Scenario& s, const TrueEffectDist& dist, int rep,
                              const EngineOptions& opts) {
  ReplicateRecord rec;
  rec.rep = rep;
  rec.methods.resize(s.methods.size());

  Rng data_rng(mix_seed(s.master_seed, static_cast<std::uint64_t>(s.index),
                        static_cast<std::uint64_t>(rep), StreamId::kDataset));
  GeneratedData data = generate_dataset(s, data_rng);

  Rng new_rng(mix_seed(s.master_seed, static_cast<std::uint64_t>(s.index),
                       static_cast<std::uint64_t>(rep), StreamId::kNewEffect));
  rec.theta_new = dist.sample(new_rng);

  const REFit dl = fit_dl(data.dataset);
  rec.mu_hat = dl.mu_hat;
  rec.q = dl.het.q;
  rec.i2 = dl.het.i2;
  rec.tau2_dl = dl.het.tau2_dl;
  rec.tau2_reml = std::numeric_limits<double>::quiet_NaN();

  bool needs_reml = false;
  for (const PIMethodSpec& m : s.methods) needs_reml = needs_reml || m.uses_reml();

  REFit reml;
  bool reml_ok = false;
  if (needs_reml) {
    try {
      reml = fit_reml(data.dataset);
      rec.tau2_reml = reml.tau2;
      reml_ok = true;
    } catch (const NonConvergenceError&) {
      reml_ok = false;
    }
  }

  const double level = 1.0 - s.alpha;
  const int boot_budget = bootstrap_rep_budget(s, opts);

  for (std::size_t i = 0; i < s.methods.size(); ++i) {
    const PIMethodSpec& m = s.methods[i];
    MethodOutcome& out = rec.methods[i];
    if (m.kind == PiKind::kBootstrap && rep >= boot_budget) {
      out.status = MethodStatus::kSkipped;
      continue;
    }
    try {
      PredictionInterval pi;
      switch (m.kind) {
        case PiKind::kHts:
          if (m.uses_reml() && !reml_ok) {
            out.status = MethodStatus::kFailed;
            out.fail_code = FailCode::kRemlNonConvergence;
            continue;
          }
          pi = hts_pi(m.uses_reml() ? reml : dl, m.critical, m.variance, level);
          break;
        case PiKind::kEnsemble:
          pi = ensemble_pi(data.dataset, dl, level);
          break;
        case PiKind::kBootstrap: {
          Rng boot_rng(mix_seed(s.master_seed, static_cast<std::uint64_t>(s.index),
                                static_cast<std::uint64_t>(rep), StreamId::kBootstrap));
          pi = bootstrap_pi(data.dataset, m.bootstrap_draws, level, boot_rng);
          break;
        }
      }
      out.status = MethodStatus::kOk;
      out.lower = pi.lower;
      out.upper = pi.upper;
      out.covered = coverage(pi, dist);
      out.length = pi.length();
      out.new_effect_covered = rec.theta_new > pi.lower && rec.theta_new < pi.upper;
    } catch (const DegreesOfFreedomError&) {
      out.status = MethodStatus::kFailed;
      out.fail_code = FailCode::kDegreesOfFreedom;
    } catch (const NumericError&) {
      out.status = MethodStatus::kFailed;
      out.fail_code = FailCode::kNumeric;
    } catch (const Error&) {
      out.status = MethodStatus::kFailed;
      out.fail_code = FailCode::kOther;
    }
  }
  return rec;
}

}  // namespace

ScenarioSummary summarize(const Scenario& s, std::span<const ReplicateRecord> records,
                          const EngineOptions& opts) {
  if (records.empty()) {
    throw ParameterError("summarize: no replicate records");
  }
  if (opts.hist_bins < 1) {
    throw ParameterError("summarize: hist_bins must be positive");
  }

  ScenarioSummary sum;
  sum.scenario_index = s.index;
  sum.reps = records.size();
  sum.alpha = s.alpha;
  const TrueEffectDist dist = s.true_effect_dist();
  sum.l_t = theoretical_length(dist);
  sum.v = s.heterogeneity_ratio();
  sum.hist_bins = opts.hist_bins;
  sum.betas = opts.betas;

  double i2_sum = 0.0;
  for (const ReplicateRecord& r : records) i2_sum += r.i2;
  sum.mean_i2 = i2_sum / static_cast<double>(records.size());

  const double target = 1.0 - s.alpha;
  for (std::size_t mi = 0; mi < s.methods.size(); ++mi) {
    MethodSummary ms;
    ms.spec = s.methods[mi];
    ms.name = ms.spec.name();
    ms.hist.assign(static_cast<std::size_t>(opts.hist_bins), 0);
    ms.beta_content.assign(opts.betas.size(), 0.0);

    std::vector<double> cs;
    cs.reserve(records.size());
    double c_sum = 0.0, dev_sum = 0.0, rel_len_sum = 0.0, mae_sum = 0.0;
    std::size_t gt99 = 0, new_cov = 0;

    for (const ReplicateRecord& r : records) {
      const MethodOutcome& out = r.methods[mi];
      if (out.status == MethodStatus::kSkipped) continue;
      ++ms.attempted;
      if (out.status == MethodStatus::kFailed) {
        ++ms.failed;
        continue;
      }
      ++ms.ok;
      cs.push_back(out.covered);
      c_sum += out.covered;
      dev_sum += std::fabs(out.covered - target);
      rel_len_sum += out.length / sum.l_t;
      mae_sum += std::fabs(out.length - sum.l_t) / sum.l_t;
      if (out.covered > 0.99) ++gt99;
      if (out.new_effect_covered) ++new_cov;
      const auto bin = std::min<std::size_t>(
          static_cast<std::size_t>(opts.hist_bins) - 1,
          static_cast<std::size_t>(out.covered * opts.hist_bins));
      ++ms.hist[bin];
      for (std::size_t bi = 0; bi < opts.betas.size(); ++bi) {
        if (out.covered >= opts.betas[bi]) ms.beta_content[bi] += 1.0;
      }
    }

    if (ms.ok > 0) {
      const double n = static_cast<double>(ms.ok);
      ms.mean_c = c_sum / n;
      std::sort(cs.begin(), cs.end());
      ms.median_c = median_sorted(cs);
      ms.mean_abs_dev = dev_sum / n;
      ms.mean_rel_length = rel_len_sum / n;
      ms.norm_mae = mae_sum / n;
      ms.prop_c_gt_99 = static_cast<double>(gt99) / n;
      ms.freq_new_covered = static_cast<double>(new_cov) / n;
      for (double& b : ms.beta_content) b /= n;
    } else {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      ms.mean_c = ms.median_c = ms.mean_abs_dev = nan;
      ms.mean_rel_length = ms.norm_mae = ms.prop_c_gt_99 = ms.freq_new_covered = nan;
      std::fill(ms.beta_content.begin(), ms.beta_content.end(), nan);
    }
    sum.methods.push_back(std::move(ms));
  }
  return sum;
}

ScenarioRun run_scenario(const Scenario& s, const EngineOptions& opts) {
  if (s.methods.empty()) {
    throw ConfigError("run_scenario: no methods requested");
  }
  for (const PIMethodSpec& m : s.methods) {
    if (s.k < m.min_studies()) {
      throw ConfigError("method " + m.name() + " needs K >= " +
                        std::to_string(m.min_studies()));
    }
  }
  if (s.reps < 1) {
    throw ConfigError("run_scenario: reps must be at least 1");
  }

  const TrueEffectDist dist = s.true_effect_dist();
  std::vector<ReplicateRecord> records(static_cast<std::size_t>(s.reps));

  const int threads = std::max(1, opts.threads);
  if (threads == 1 || s.reps == 1) {
    for (int rep = 0; rep < s.reps; ++rep) {
      records[static_cast<std::size_t>(rep)] = run_replicate(s, dist, rep, opts);
    }
  } else {
    std::atomic<int> next{0};
    auto worker = [&] {
      for (;;) {
        const int rep = next.fetch_add(1);
        if (rep >= s.reps) return;
        records[static_cast<std::size_t>(rep)] = run_replicate(s, dist, rep, opts);
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  ScenarioRun run;
  run.summary = summarize(s, records, opts);
  run.records = std::move(records);

  for (const MethodSummary& ms : run.summary.methods) {
    if (ms.attempted == 0) continue;
    const double rate = static_cast<double>(ms.failed) / static_cast<double>(ms.attempted);
    if (rate > opts.max_failure_rate) {
      throw NumericError("scenario " + std::to_string(s.index) + ": method " + ms.name +
                         " failed on " + std::to_string(ms.failed) + "/" +
                         std::to_string(ms.attempted) + " replicates");
    }
  }
  return run;
}

}  // namespace metapi
