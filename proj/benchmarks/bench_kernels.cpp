#include <benchmark/benchmark.h>

#include <complex>
#include <vector>

#include "bolab/flow.hpp"
#include "bolab/functionals.hpp"
#include "bolab/invariance.hpp"
#include "bolab/measures.hpp"
#include "bolab/renorm.hpp"
#include "bolab/stats.hpp"

namespace {

bolab::BirkhoffState test_state(std::size_t N) {
  return bolab::sample_state(bolab::AmplitudeSequence::power(1.0), bolab::RadialLaw::gaussian(), N,
                             bolab::sample_stream(1, 0));
}

// Direct O(N^2) evaluation, kept as the baseline for the prefix form.
std::vector<double> phases_quadratic(const bolab::BirkhoffState& z, std::size_t N) {
  std::vector<double> beta(N);
  for (std::size_t n = 1; n <= N; ++n) {
    double s = 0.0;
    for (std::size_t k = 1; k <= N; ++k) s += static_cast<double>(std::min(n, k)) * z.action(k);
    beta[n - 1] = static_cast<double>(n * n) - 2.0 * s;
  }
  return beta;
}

}  // namespace

static void BM_PhaseVector(benchmark::State& state) {
  const auto N = static_cast<std::size_t>(state.range(0));
  const auto z = test_state(N);
  for (auto _ : state) benchmark::DoNotOptimize(bolab::phase_vector(z, N));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_PhaseVector)->RangeMultiplier(4)->Range(16, 16384)->Complexity(benchmark::oN);

static void BM_PhaseVectorQuadratic(benchmark::State& state) {
  const auto N = static_cast<std::size_t>(state.range(0));
  const auto z = test_state(N);
  for (auto _ : state) benchmark::DoNotOptimize(phases_quadratic(z, N));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_PhaseVectorQuadratic)->RangeMultiplier(4)->Range(16, 4096)->Complexity(benchmark::oNSquared);

static void BM_FlowTruncated(benchmark::State& state) {
  const auto N = static_cast<std::size_t>(state.range(0));
  const auto z = test_state(N);
  for (auto _ : state) benchmark::DoNotOptimize(bolab::flow_truncated(z, {N, 1.7}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FlowTruncated)->RangeMultiplier(8)->Range(8, 32768);

static void BM_SampleState(benchmark::State& state) {
  const auto N = static_cast<std::size_t>(state.range(0));
  const auto amps = bolab::AmplitudeSequence::power(1.0).values(N);
  const auto law = bolab::RadialLaw::gaussian();
  std::uint64_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(bolab::sample_state(amps, law, bolab::sample_stream(7, i++)));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SampleState)->RangeMultiplier(8)->Range(8, 4096);

static void BM_Hamiltonian(benchmark::State& state) {
  const auto N = static_cast<std::size_t>(state.range(0));
  const auto z = test_state(N);
  for (auto _ : state) benchmark::DoNotOptimize(bolab::hamiltonian(z, N));
}
BENCHMARK(BM_Hamiltonian)->RangeMultiplier(8)->Range(8, 32768);

static void BM_JacobianDet(benchmark::State& state) {
  const auto N = static_cast<std::size_t>(state.range(0));
  const auto z = test_state(N);
  for (auto _ : state) benchmark::DoNotOptimize(bolab::flow_jacobian_det(z, {N, 1.3}, 1e-6));
}
BENCHMARK(BM_JacobianDet)->DenseRange(1, 8);

static void BM_LimitPhases(benchmark::State& state) {
  const auto N = static_cast<std::size_t>(state.range(0));
  const bolab::RenormContext ctx(bolab::AmplitudeSequence::power(0.5), bolab::RadialLaw::gaussian().normalized());
  const auto z = bolab::sample_state(ctx.amps(), ctx.law(), N, bolab::sample_stream(3, 0));
  for (auto _ : state) benchmark::DoNotOptimize(bolab::limit_phases(z, ctx, N));
}
BENCHMARK(BM_LimitPhases)->RangeMultiplier(8)->Range(64, 32768);

static void BM_PairwiseSum(benchmark::State& state) {
  std::vector<double> values(static_cast<std::size_t>(state.range(0)));
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = 1.0 / static_cast<double>(i + 1);
  for (auto _ : state) benchmark::DoNotOptimize(bolab::pairwise_sum(values));
  state.SetBytesProcessed(state.iterations() * state.range(0) * static_cast<std::int64_t>(sizeof(double)));
}
BENCHMARK(BM_PairwiseSum)->RangeMultiplier(16)->Range(256, 1 << 20);

static void BM_InvarianceTest(benchmark::State& state) {
  bolab::InvarianceSetup setup;
  setup.ensemble.N = static_cast<std::size_t>(state.range(0));
  setup.samples = 10000;
  setup.seed = 11;
  setup.workers = static_cast<std::size_t>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(bolab::invariance_test(setup, 1.7));
}
BENCHMARK(BM_InvarianceTest)->Args({4, 1})->Args({32, 1})->Args({32, 2})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
