#include "metapi/manifest.hpp"

#include <json.hpp>

#include <chrono>
#include <ctime>

#include "metapi/quad_form.hpp"
#include "metapi/rng.hpp"

namespace metapi {

using nlohmann::json;

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string RunManifest::to_json() const {
  json j;
  j["tool"] = std::string(kToolName);
  j["version"] = std::string(kToolVersion);
  j["generator"] = std::string(Rng::generator_name());
  j["master_seed"] = master_seed;
  j["config_digest"] = config_digest;
  j["started_utc"] = started_utc;
  j["finished_utc"] = finished_utc;
  j["jobs"] = jobs;
  j["quad_form"] = {{"evaluator", std::string(WeightedChiSquare::evaluator_name())},
                    {"monte_carlo_fallbacks", quad_form_fallbacks}};
  json entries = json::array();
  for (const auto& s : scenarios) {
    json failures = json::object();
    for (const auto& [name, count] : s.failures) failures[name] = count;
    entries.push_back({{"index", s.index},
                       {"dir", s.dir},
                       {"reps", s.reps},
                       {"failures", failures}});
  }
  j["scenarios"] = entries;
  return j.dump(2) + "\n";
}

}  // namespace metapi
