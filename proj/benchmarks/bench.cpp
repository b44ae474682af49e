#include <benchmark/benchmark.h>

#include "kickrot/bessel.hpp"
#include "kickrot/classical.hpp"
#include "kickrot/quantum.hpp"

using namespace kickrot;

static void BM_BesselJ(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  double x = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(special::bessel_j(n, x));
    x = x < 20.0 ? x + 0.37 : 0.1;
  }
}
BENCHMARK(BM_BesselJ)->Arg(0)->Arg(2)->Arg(10);

static void BM_ClassicalEnsemble(benchmark::State& state) {
  const DimensionlessParams p{2.6, 1.0 / 16.0, 0.5, 1.0};
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    auto e = classical::sample_initial(n, 0.0, 1.0, 1, p);
    benchmark::DoNotOptimize(classical::evolve_ensemble(e, 10));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(n) * 10);
}
BENCHMARK(BM_ClassicalEnsemble)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

// One kick plus one free flight on a ladder of half-span m_max.
static void BM_FloquetPeriod(benchmark::State& state) {
  const int m_max = static_cast<int>(state.range(0));
  const DimensionlessParams p{5.0, 1.0 / 16.0, 0.5, 1.0};
  quantum::FloquetPropagator prop(p);
  auto s = quantum::QuantumLadderState::plane_wave(0.3, 1.0, {m_max, 0});
  long n = 1;
  for (auto _ : state) {
    prop.kick(s, n);
    prop.drift(s, n);
    ++n;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_FloquetPeriod)->Arg(512)->Arg(2048)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
