#include "metapi/rng.hpp"

#include "metapi/special.hpp"

namespace metapi {

std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t mix_seed(std::uint64_t master_seed, std::uint64_t scenario_index,
                       std::uint64_t replicate_index, StreamId stream) noexcept {
  std::uint64_t state = master_seed;
  std::uint64_t h = splitmix64(state);
  state ^= scenario_index;
  h ^= splitmix64(state);
  state ^= replicate_index;
  h ^= splitmix64(state);
  state ^= static_cast<std::uint64_t>(stream);
  h ^= splitmix64(state);
  return h;
}

double Rng::next_normal() { return norm_quantile(next_open()); }

}  // namespace metapi
