#ifndef METAPI_RNG_HPP
#define METAPI_RNG_HPP

#include <cstdint>
#include <random>
#include <string_view>

namespace metapi {

/// Stream identifiers for per-replicate substreams. Keeping the dataset draws,
/// the extra true-effect draw and the bootstrap draws on separate streams makes
/// each of them reproducible in isolation.
enum class StreamId : std::uint64_t {
  kDataset = 0,
  kNewEffect = 1,
  kBootstrap = 2,
};

/// splitmix64 step; used both as an avalanche mixer and as a seed expander.
std::uint64_t splitmix64(std::uint64_t& state) noexcept;

/// Collapses (master seed, scenario index, replicate index, stream id) into one
/// well-mixed 64-bit substream seed.
std::uint64_t mix_seed(std::uint64_t master_seed, std::uint64_t scenario_index,
                       std::uint64_t replicate_index, StreamId stream) noexcept;

/// Seedable 64-bit generator with a portable uniform-double mapping. All
/// sampling in the library goes through inverse-CDF transforms of these
/// uniforms, so a run is reproducible bit-for-bit from its seed alone.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform on the open interval (0, 1): 53-bit mantissa, offset by half an ulp
  /// so that 0 and 1 are unreachable (safe under inverse-CDF transforms).
  double next_open() {
    return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Uniform on [0, 1).
  double next_unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  /// Standard normal draw via the inverse CDF (one uniform consumed).
  double next_normal();

  static constexpr std::string_view generator_name() { return "mt19937_64"; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace metapi

#endif  // METAPI_RNG_HPP
