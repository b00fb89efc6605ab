#include "metapi/simulate.hpp"

#include <zlib.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "metapi/errors.hpp"
#include "metapi/quad_form.hpp"
#include "metapi/text.hpp"

namespace metapi {

namespace fs = std::filesystem;

namespace {

std::string csv_value(double v) {
  return std::isnan(v) ? std::string("nan") : format_double(v);
}

std::string summary_csv(const SimConfig& cfg, const ScenarioSummary& sum) {
  std::ostringstream out;
  out << summary_csv_header(cfg);
  for (const MethodSummary& m : sum.methods) {
    out << m.name << ',' << m.attempted << ',' << m.ok << ',' << m.failed << ','
        << csv_value(m.mean_c) << ',' << csv_value(m.median_c) << ','
        << csv_value(m.mean_abs_dev) << ',' << csv_value(m.mean_rel_length) << ','
        << csv_value(m.norm_mae) << ',' << csv_value(m.prop_c_gt_99) << ','
        << csv_value(m.freq_new_covered);
    for (double b : m.beta_content) out << ',' << csv_value(b);
    out << ',' << csv_value(sum.v) << ',' << csv_value(sum.mean_i2) << ','
        << csv_value(sum.l_t) << '\n';
  }
  return out.str();
}

std::string hist_csv(const MethodSummary& m, int bins) {
  std::ostringstream out;
  out << "bin_lo,bin_hi,count\n";
  for (int i = 0; i < bins; ++i) {
    out << format_double(static_cast<double>(i) / bins) << ','
        << format_double(static_cast<double>(i + 1) / bins) << ','
        << m.hist[static_cast<std::size_t>(i)] << '\n';
  }
  return out.str();
}

std::string records_csv(const Scenario& s, const std::vector<ReplicateRecord>& records) {
  std::ostringstream out;
  out << "rep,theta_new,mu_hat,q,i2,tau2_dl,tau2_reml";
  for (const PIMethodSpec& m : s.methods) {
    const std::string n = m.name();
    out << ',' << n << "_lower," << n << "_upper," << n << "_c," << n << "_len,"
        << n << "_new_covered," << n << "_status";
  }
  out << '\n';
  for (const ReplicateRecord& r : records) {
    out << r.rep << ',' << csv_value(r.theta_new) << ',' << csv_value(r.mu_hat) << ','
        << csv_value(r.q) << ',' << csv_value(r.i2) << ',' << csv_value(r.tau2_dl) << ','
        << csv_value(r.tau2_reml);
    for (const MethodOutcome& o : r.methods) {
      switch (o.status) {
        case MethodStatus::kOk:
          out << ',' << csv_value(o.lower) << ',' << csv_value(o.upper) << ','
              << csv_value(o.covered) << ',' << csv_value(o.length) << ','
              << (o.new_effect_covered ? 1 : 0) << ",ok";
          break;
        case MethodStatus::kSkipped:
          out << ",,,,,," << "skipped";
          break;
        case MethodStatus::kFailed:
          out << ",,,,,," << fail_code_name(o.fail_code);
          break;
      }
    }
    out << '\n';
  }
  return out.str();
}

void write_text_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw InputError("cannot open '" + path.string() + "' for writing");
  }
  out << content;
  out.flush();
  if (!out) {
    throw InputError("write failed for '" + path.string() + "'");
  }
}

void write_gz_file(const fs::path& path, const std::string& content) {
  gzFile gz = gzopen(path.string().c_str(), "wb9");
  if (gz == nullptr) {
    throw InputError("cannot open '" + path.string() + "' for writing");
  }
  const int written = gzwrite(gz, content.data(), static_cast<unsigned>(content.size()));
  const int rc = gzclose(gz);
  if (written != static_cast<int>(content.size()) || rc != Z_OK) {
    throw InputError("gzip write failed for '" + path.string() + "'");
  }
}

}  // namespace

std::string summary_csv_header(const SimConfig& cfg) {
  std::string h =
      "method,reps,ok,failed,mean_c,median_c,mean_abs_dev,mean_rel_len,norm_mae,"
      "prop_c_gt_99,freq_new_covered";
  for (double b : cfg.betas) h += ",content_" + format_double(b);
  h += ",v,mean_i2,l_t\n";
  return h;
}

RunManifest run_simulation(const SimConfig& cfg, const std::string& out_dir, int jobs,
                           std::ostream* progress) {
  if (jobs < 1) {
    throw ConfigError("jobs must be at least 1");
  }
  const std::vector<Scenario> scenarios = cfg.scenarios();

  RunManifest manifest;
  manifest.master_seed = cfg.seed;
  manifest.config_digest = cfg.digest();
  manifest.started_utc = utc_timestamp();
  manifest.jobs = jobs;
  manifest.scenarios.resize(scenarios.size());

  const fs::path root(out_dir);
  fs::create_directories(root);

  const int workers =
      std::max(1, std::min<int>(jobs, static_cast<int>(scenarios.size())));
  const int threads_per_worker = std::max(1, jobs / workers);

  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};
  std::mutex error_mutex;
  std::string first_error;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= scenarios.size() || abort.load()) return;
      const Scenario& s = scenarios[i];
      try {
        EngineOptions opts = cfg.engine_options(threads_per_worker);
        ScenarioRun run = run_scenario(s, opts);

        const fs::path dir = root / s.dir_name();
        fs::create_directories(dir);
        write_text_file(dir / "summary.csv", summary_csv(cfg, run.summary));
        for (const MethodSummary& m : run.summary.methods) {
          write_text_file(dir / ("hist_" + m.name + ".csv"), hist_csv(m, cfg.hist_bins));
        }
        if (cfg.write_records) {
          write_gz_file(dir / "records.csv.gz", records_csv(s, run.records));
        }

        RunManifest::ScenarioEntry entry;
        entry.index = s.index;
        entry.dir = s.dir_name();
        entry.reps = run.records.size();
        for (const MethodSummary& m : run.summary.methods) {
          entry.failures[m.name] = m.failed;
        }
        manifest.scenarios[i] = std::move(entry);

        if (progress != nullptr) {
          std::lock_guard<std::mutex> lock(error_mutex);
          *progress << "scenario " << s.index << " (" << s.dir_name() << ") done\n";
        }
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (first_error.empty()) {
          first_error = "scenario " + std::to_string(s.index) + ": " + e.what();
        }
        abort.store(true);
        return;
      }
    }
  };

  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  if (!first_error.empty()) {
    write_text_file(root / "INCOMPLETE", first_error + "\n");
    throw NumericError("simulation aborted: " + first_error);
  }

  manifest.finished_utc = utc_timestamp();
  manifest.quad_form_fallbacks = quad_form_fallback_count();
  write_text_file(root / "manifest.json", manifest.to_json());
  return manifest;
}

}  // namespace metapi
