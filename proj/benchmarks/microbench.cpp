#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "crlab/access.hpp"
#include "crlab/allocation.hpp"
#include "crlab/relay.hpp"
#include "crlab/sensing.hpp"
#include "crlab/simulator.hpp"
#include "crlab/solver.hpp"

using namespace crlab;

static void BM_OptimalThreshold(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.05, 0.4);
  std::vector<sensing::SensorProfile> s;
  for (int i = 0; i < n; ++i) s.push_back({u(rng), u(rng)});
  for (auto _ : state) benchmark::DoNotOptimize(sensing::optimal_threshold(0.6, s, 0.08));
}
BENCHMARK(BM_OptimalThreshold)->DenseRange(1, 10, 3);

static void BM_ExpectedFrames(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const auto c = sim::table2_scenario();
  access::SensingConfig cfg{std::vector<std::vector<sensing::SensorProfile>>(m, c.sensors[0]), c.gamma,
                            access::csma_probs(c.n_links).p1};
  const auto dist = access::slot_pair_distribution(c.markov, cfg);
  for (auto _ : state) benchmark::DoNotOptimize(access::expected_frames(dist, access::Strategy::AF));
}
BENCHMARK(BM_ExpectedFrames)->RangeMultiplier(2)->Range(1, 16);

static void BM_DecodingRateAf(benchmark::State& state) {
  relay::RelayLink l;
  l.p_s = l.p_r = 0.01;
  l.noise_relay = l.noise_dest = 1e-3;
  l.mean_g0 = 0.2;
  l.mean_g1 = l.mean_g2 = 1.0;
  l.kappa = 3.0;
  for (auto _ : state) benchmark::DoNotOptimize(relay::decoding_rate_af(l));
}
BENCHMARK(BM_DecodingRateAf);

static void BM_SolveReference(benchmark::State& state) {
  const auto p = solver::reference_problem();
  for (auto _ : state) benchmark::DoNotOptimize(solver::solve(p));
}
BENCHMARK(BM_SolveReference)->Unit(benchmark::kMillisecond);

static void BM_ExpectedCompetitiveRatio(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(allocation::expected_competitive_ratio(0.95, 12));
}
BENCHMARK(BM_ExpectedCompetitiveRatio);

BENCHMARK_MAIN();
