#include <limits>
#include <vector>

#include <benchmark/benchmark.h>

#include "hslg/dist.hpp"
#include "hslg/ensemble.hpp"
#include "hslg/gibbs.hpp"
#include "hslg/polymer.hpp"
#include "hslg/rng.hpp"
#include "hslg/specfun.hpp"
#include "hslg/walks.hpp"

using namespace hslg;

static void BM_Digamma(benchmark::State& st) {
  double z = 0.3;
  for (auto _ : st) {
    benchmark::DoNotOptimize(digamma(z));
    z = z < 50.0 ? z + 0.7 : 0.3;
  }
}
BENCHMARK(BM_Digamma);

static void BM_LogGigSample(benchmark::State& st) {
  const LogGig g(0.5, 1.0, -2.0);
  Rng rng = make_rng(1, 1, 0);
  for (auto _ : st) benchmark::DoNotOptimize(g.sample(rng));
}
BENCHMARK(BM_LogGigSample);

static void BM_ConvolutionDensity(benchmark::State& st) {
  const ConvolutionOracle o(1.0);
  const int m = static_cast<int>(st.range(0));
  double y = -3.0;
  for (auto _ : st) {
    benchmark::DoNotOptimize(o.log_density(m, y));
    y = y < 3.0 ? y + 0.01 : -3.0;
  }
}
BENCHMARK(BM_ConvolutionDensity)->Arg(4)->Arg(64)->Arg(1024);

// weight generation plus the rolling-row DP
static void BM_PolymerAntidiagonal(benchmark::State& st) {
  const int N = static_cast<int>(st.range(0));
  std::uint64_t r = 0;
  for (auto _ : st) {
    const auto f = gen_weights(N, PolymerParams::homogeneous(1.0, 1.0), 7, r++);
    benchmark::DoNotOptimize(logZ_antidiagonal(f, N, N - 1));
  }
  st.SetComplexityN(N);
}
BENCHMARK(BM_PolymerAntidiagonal)->RangeMultiplier(2)->Range(64, 1024)->Unit(benchmark::kMillisecond)->Complexity(benchmark::oNSquared);

static void BM_LineEnsemble(benchmark::State& st) {
  const int N = static_cast<int>(st.range(0));
  const auto sym = symmetrize(gen_weights(N, PolymerParams::homogeneous(1.0, 1.0), 7));
  for (auto _ : st) benchmark::DoNotOptimize(build_line_ensemble(sym, N, 1.0, 2, 8));
}
BENCHMARK(BM_LineEnsemble)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);

static void BM_Bridge(benchmark::State& st) {
  const WalkSampler ws(1.0);
  const int n = static_cast<int>(st.range(0));
  Rng rng = make_rng(1, 2, 0);
  for (auto _ : st) benchmark::DoNotOptimize(ws.bridge(n, 0.0, 0.0, rng));
}
BENCHMARK(BM_Bridge)->Arg(64)->Arg(1024)->Unit(benchmark::kMicrosecond);

static void BM_WeightedPrw(benchmark::State& st) {
  const PrwSampler prw(1.0, 1.0);
  const int n = static_cast<int>(st.range(0));
  Rng rng = make_rng(1, 3, 0);
  for (auto _ : st) benchmark::DoNotOptimize(prw.weighted_sample(n, 0.0, -8.0, rng));
}
BENCHMARK(BM_WeightedPrw)->Arg(64)->Arg(1024)->Unit(benchmark::kMicrosecond);

static void BM_HeatBathSweep(benchmark::State& st) {
  const int T = static_cast<int>(st.range(0));
  const std::vector<double> z(static_cast<std::size_t>(T), -std::numeric_limits<double>::infinity());
  const auto spec = make_K_spec(2, T, 1.0, 1.0, {0.0, -2.0}, z);
  GibbsState s(spec.domain->size());
  for (std::size_t v = 0; v < s.size(); ++v) s[v] = -0.01 * static_cast<double>(v);
  Rng rng = make_rng(1, 4, 0);
  for (int w = 0; w < 200; ++w) heat_bath_sweep(spec, s, rng);
  for (auto _ : st) heat_bath_sweep(spec, s, rng);
  st.SetItemsProcessed(st.iterations() * static_cast<long>(s.size()));
}
BENCHMARK(BM_HeatBathSweep)->Arg(16)->Arg(64)->Unit(benchmark::kMicrosecond);
BENCHMARK_MAIN();
