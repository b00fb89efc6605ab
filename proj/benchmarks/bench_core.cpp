#include <benchmark/benchmark.h>

#include <vector>

#include "metapi/pi_methods.hpp"
#include "metapi/quad_form.hpp"
#include "metapi/re_model.hpp"
#include "metapi/rng.hpp"
#include "metapi/sim_engine.hpp"

namespace {

metapi::MetaDataset synthetic_dataset(int k, std::uint64_t seed) {
  metapi::Rng rng(seed);
  std::vector<metapi::StudySummary> studies;
  for (int i = 0; i < k; ++i) {
    studies.push_back({"s" + std::to_string(i), 1.5 * rng.next_normal(),
                       0.2 + 0.6 * rng.next_open()});
  }
  return metapi::MetaDataset(std::move(studies));
}

void bm_fit_dl(benchmark::State& state) {
  const auto d = synthetic_dataset(static_cast<int>(state.range(0)), 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(metapi::fit_dl(d));
  }
}
BENCHMARK(bm_fit_dl)->Arg(7)->Arg(100);

void bm_tau2_reml(benchmark::State& state) {
  const auto d = synthetic_dataset(static_cast<int>(state.range(0)), 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(metapi::tau2_reml(d));
  }
}
BENCHMARK(bm_tau2_reml)->Arg(7)->Arg(100);

void bm_weighted_chisq_cdf(benchmark::State& state) {
  std::vector<double> weights;
  metapi::Rng rng(3);
  for (int i = 0; i < state.range(0); ++i) weights.push_back(0.5 + 2.0 * rng.next_open());
  const metapi::WeightedChiSquare law(weights);
  metapi::QuadFormScratch scratch;
  double q = 1.0;
  for (auto _ : state) {
    q = q < 40.0 ? q + 0.1 : 1.0;
    benchmark::DoNotOptimize(law.cdf(q, scratch));
  }
}
BENCHMARK(bm_weighted_chisq_cdf)->Arg(2)->Arg(6)->Arg(30);

void bm_tau2_confidence_draw(benchmark::State& state) {
  const auto d = synthetic_dataset(static_cast<int>(state.range(0)), 4);
  metapi::Tau2ConfidenceSampler sampler(d);
  metapi::Rng rng(5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sampler.tau2_at(rng.next_open()));
  }
}
BENCHMARK(bm_tau2_confidence_draw)->Arg(3)->Arg(7)->Arg(30);

void bm_bootstrap_pi(benchmark::State& state) {
  const auto d = synthetic_dataset(7, 6);
  for (auto _ : state) {
    metapi::Rng rng(7);
    benchmark::DoNotOptimize(
        metapi::bootstrap_pi(d, static_cast<int>(state.range(0)), 0.95, rng));
  }
}
BENCHMARK(bm_bootstrap_pi)->Arg(1000)->Unit(benchmark::kMillisecond);

void bm_generate_dataset(benchmark::State& state) {
  metapi::Scenario s;
  s.k = static_cast<int>(state.range(0));
  s.sizes = metapi::SampleSizePlan::equal(100);
  s.tau2 = 1.0;
  s.methods = {metapi::PIMethodSpec::hts_dl_z()};
  metapi::Rng rng(8);
  for (auto _ : state) {
    benchmark::DoNotOptimize(metapi::generate_dataset(s, rng));
  }
}
BENCHMARK(bm_generate_dataset)->Arg(7)->Arg(100);

}  // namespace

BENCHMARK_MAIN();
