// Microbenchmarks of the three stability tests on generated swing networks.
// The full sweep with CSV output lives behind `stabcert bench`.
#include <benchmark/benchmark.h>

#include "stabcert/bench.hpp"
#include "stabcert/embedding.hpp"
#include "stabcert/linearization.hpp"
#include "stabcert/lp_stability.hpp"
#include "stabcert/lyapunov.hpp"

namespace {

using namespace stabcert;

Matrix network(std::size_t n, TimeDomain domain) {
  const auto shape = bench::shape_for_dimension(n);
  Matrix a = bench::gen_swing_network(shape.n_gen, shape.n_load, 7);
  if (domain == TimeDomain::DT) a = linearization::discretize(a, bench::kSamplingTime, linearization::Discretization::Zoh);
  return a;
}

void BM_Lp(benchmark::State& state, TimeDomain domain) {
  const Matrix a = network(static_cast<std::size_t>(state.range(0)), domain);
  const auto pair = embedding::build_ahat(a, domain);
  for (auto _ : state) {
    auto out = lp::lp_stability_test(pair);
    benchmark::DoNotOptimize(out.margin);
    state.counters["bytes"] = static_cast<double>(out.memory_bytes);
  }
  state.SetComplexityN(state.range(0));
}

void BM_Lyapunov(benchmark::State& state, TimeDomain domain) {
  const Matrix a = network(static_cast<std::size_t>(state.range(0)), domain);
  for (auto _ : state) {
    auto v = lyapunov::sdp_stability_test(a, domain);
    benchmark::DoNotOptimize(v.stable);
    state.counters["bytes"] = static_cast<double>(v.memory_bytes);
  }
  state.SetComplexityN(state.range(0));
}

void BM_Kronecker(benchmark::State& state) {
  const Matrix a = network(static_cast<std::size_t>(state.range(0)), TimeDomain::CT);
  for (auto _ : state) {
    auto v = lyapunov::sdp_stability_test(a, TimeDomain::CT, lyapunov::BaselineMethod::Kronecker);
    benchmark::DoNotOptimize(v.stable);
  }
}

}  // namespace

BENCHMARK_CAPTURE(BM_Lp, ct, TimeDomain::CT)->RangeMultiplier(2)->Range(16, 256)->Complexity()->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Lp, dt, TimeDomain::DT)->RangeMultiplier(2)->Range(16, 256)->Complexity()->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Lyapunov, ct, TimeDomain::CT)->RangeMultiplier(2)->Range(16, 256)->Complexity()->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Lyapunov, dt, TimeDomain::DT)->RangeMultiplier(2)->Range(16, 256)->Complexity()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Kronecker)->Arg(10)->Arg(20)->Arg(30)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
