// Command-line front end: fit a study table and report every prediction
// interval, run simulation grids, or print a resolved scenario list.

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "metapi/errors.hpp"
#include "metapi/fit_report.hpp"
#include "metapi/manifest.hpp"
#include "metapi/simulate.hpp"
#include "metapi/study_csv.hpp"
#include "metapi/text.hpp"

namespace {

int run_fit(const std::string& input, const std::vector<std::string>& methods,
            double level, std::optional<std::uint64_t> seed, int bootstrap_b,
            const std::string& format, const std::string& out_path) {
  metapi::FitOptions opts;
  if (!methods.empty()) opts.method_names = methods;
  opts.level = level;
  opts.seed = seed;
  opts.bootstrap_b = bootstrap_b;

  const metapi::MetaDataset dataset = metapi::parse_studies_file(input);
  const metapi::FitReport report = metapi::build_fit_report(dataset, opts);
  const std::string text = format == "csv" ? metapi::fit_report_to_csv(report)
                                           : metapi::fit_report_to_json(report);
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
      throw metapi::InputError("cannot open '" + out_path + "' for writing");
    }
    out << text;
  }
  return 0;
}

int run_simulate(const std::string& config_path, const std::string& out_dir, int jobs,
                 std::optional<std::uint64_t> seed) {
  metapi::SimConfig cfg = config_path.empty() ? metapi::SimConfig{}
                                              : metapi::parse_config_file(config_path);
  if (seed.has_value()) cfg.seed = *seed;
  metapi::run_simulation(cfg, out_dir, jobs, &std::cerr);
  return 0;
}

int run_grid(const std::string& config_path) {
  metapi::SimConfig cfg = config_path.empty() ? metapi::SimConfig{}
                                              : metapi::parse_config_file(config_path);
  std::cout << "index,K,N,tau2,dist,reps,alpha,dir\n";
  for (const metapi::Scenario& s : cfg.scenarios()) {
    std::cout << s.index << ',' << s.k << ',' << s.sizes.tag() << ','
              << metapi::format_double(s.tau2) << ',' << s.dist.name() << ',' << s.reps
              << ',' << metapi::format_double(s.alpha) << ',' << s.dir_name() << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random-effects meta-analysis prediction intervals and coverage simulation"};
  app.set_version_flag("--version", std::string(metapi::kToolVersion));
  app.require_subcommand(1);

  // fit
  std::string fit_input;
  std::vector<std::string> fit_methods;
  double fit_level = 0.95;
  std::optional<std::uint64_t> fit_seed;
  int fit_bootstrap_b = 5000;
  std::string fit_format = "json";
  std::string fit_out;
  CLI::App* fit = app.add_subcommand("fit", "Fit a study table and report prediction intervals");
  fit->add_option("--input", fit_input, "Study CSV (study_id,effect,se|var)")->required();
  fit->add_option("--methods", fit_methods,
                  "Comma-separated method names or 'all'")
      ->delimiter(',');
  fit->add_option("--level", fit_level, "Nominal coverage level")->check(CLI::Range(0.5, 0.9999));
  fit->add_option("--seed", fit_seed, "Seed for the bootstrap draws");
  fit->add_option("--bootstrap-b", fit_bootstrap_b, "Bootstrap draw count")
      ->check(CLI::Range(100, 10000000));
  fit->add_option("--format", fit_format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}));
  fit->add_option("--out", fit_out, "Output path (stdout when omitted)");

  // simulate
  std::string sim_config;
  std::string sim_out_dir;
  int sim_jobs = 1;
  std::optional<std::uint64_t> sim_seed;
  CLI::App* simulate = app.add_subcommand("simulate", "Run simulation scenarios from a config");
  simulate->add_option("--config", sim_config, "JSON config (paper-grid defaults when omitted)");
  simulate->add_option("--out-dir", sim_out_dir, "Output directory")->required();
  simulate->add_option("--jobs", sim_jobs, "Worker threads")->check(CLI::Range(1, 4096));
  simulate->add_option("--seed", sim_seed, "Master seed override");

  // grid
  std::string grid_config;
  bool grid_print = false;
  CLI::App* grid = app.add_subcommand("grid", "Inspect the resolved scenario grid");
  grid->add_flag("--print", grid_print, "Print the resolved scenario list");
  grid->add_option("--config", grid_config, "JSON config (paper-grid defaults when omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (fit->parsed()) {
      return run_fit(fit_input, fit_methods, fit_level, fit_seed, fit_bootstrap_b,
                     fit_format, fit_out);
    }
    if (simulate->parsed()) {
      return run_simulate(sim_config, sim_out_dir, sim_jobs, sim_seed);
    }
    if (grid->parsed()) {
      if (!grid_print) {
        std::cerr << "grid: nothing to do (use --print)\n";
        return 2;
      }
      return run_grid(grid_config);
    }
  } catch (const metapi::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
