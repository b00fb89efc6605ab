#ifndef METAPI_SIMULATE_HPP
#define METAPI_SIMULATE_HPP

#include <iosfwd>
#include <string>

#include "metapi/manifest.hpp"
#include "metapi/sim_config.hpp"

namespace metapi {

/// Runs every scenario of the config and writes, per scenario directory:
/// summary.csv, hist_<method>.csv per method, and optionally records.csv.gz;
/// plus one manifest.json in the output root (written last). Scenario
/// directories are named s<index>_K<K>_N<tag>_t2<tau2>_<dist>.
///
/// `jobs` bounds the total worker threads; scenarios are distributed over a
/// worker pool and any spare parallelism goes into replicate-level threads.
/// All files for one scenario are written by the worker that ran it. Output
/// bytes (manifest timestamps aside) depend only on the config and seed, not
/// on the job count.
///
/// On a filesystem error a marker file INCOMPLETE is left in the output root
/// and the error is rethrown.
RunManifest run_simulation(const SimConfig& cfg, const std::string& out_dir, int jobs,
                           std::ostream* progress = nullptr);

/// Fixed column set of summary.csv, exposed for documentation and tests.
std::string summary_csv_header(const SimConfig& cfg);

}  // namespace metapi

#endif  // METAPI_SIMULATE_HPP
