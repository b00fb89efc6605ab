#ifndef METAPI_MANIFEST_HPP
#define METAPI_MANIFEST_HPP

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace metapi {

inline constexpr std::string_view kToolName = "metapi";
inline constexpr std::string_view kToolVersion = "0.1.0";

/// Provenance record written next to every simulation output; its seed and
/// generator identity are sufficient to reproduce the run byte-for-byte.
struct RunManifest {
  struct ScenarioEntry {
    int index = 0;
    std::string dir;
    std::size_t reps = 0;
    std::map<std::string, std::size_t> failures;  // method name -> failed count
  };

  std::uint64_t master_seed = 0;
  std::string config_digest;
  std::string started_utc;
  std::string finished_utc;
  int jobs = 1;
  std::uint64_t quad_form_fallbacks = 0;
  std::vector<ScenarioEntry> scenarios;

  std::string to_json() const;
};

/// Current time as an ISO-8601 UTC stamp.
std::string utc_timestamp();

}  // namespace metapi

#endif  // METAPI_MANIFEST_HPP
