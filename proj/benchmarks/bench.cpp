#include <benchmark/benchmark.h>

#include "wfared/aak.hpp"
#include "wfared/hankel.hpp"
#include "wfared/random.hpp"
#include "wfared/solvers.hpp"
#include "wfared/wfa.hpp"

namespace {

using namespace wfared;

void BM_DiscreteLyapunov(benchmark::State& state) {
  const Index n = state.range(0);
  Rng rng(1);
  const Wfa w = random_wfa(rng, n, 0.8);
  Matrix G(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) G(i, j) = rng.normal();
  const Matrix S = G * G.transpose();
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_discrete_lyapunov(w.A, S));
  }
}
BENCHMARK(BM_DiscreteLyapunov)->Arg(8)->Arg(16)->Arg(32)->Arg(64);

void BM_OrderedSchur(benchmark::State& state) {
  const Index n = state.range(0);
  Rng rng(2);
  Matrix A(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) A(i, j) = rng.normal();
  A *= 0.8 / spectral_radius(A);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ordered_schur(A));
  }
}
BENCHMARK(BM_OrderedSchur)->Arg(16)->Arg(48);

void BM_ToSva(benchmark::State& state) {
  const Index n = state.range(0);
  Rng rng(3);
  const Wfa w = minimize(random_wfa(rng, n, 0.8));
  for (auto _ : state) {
    benchmark::DoNotOptimize(to_sva(w));
  }
}
BENCHMARK(BM_ToSva)->Arg(6)->Arg(12);

void BM_AakReduceNoVerify(benchmark::State& state) {
  const Index n = state.range(0);
  Rng rng(4);
  SvaGenOptions gen;
  gen.n = n;
  const SvaWfa s = random_sva(rng, gen);
  ReduceOptions opt;
  opt.verify = false;
  for (auto _ : state) {
    benchmark::DoNotOptimize(aak_reduce(s, n / 2, opt));
  }
}
BENCHMARK(BM_AakReduceNoVerify)->Arg(6)->Arg(12)->Arg(24);

void BM_TruncatedHankelSpectrum(benchmark::State& state) {
  const Index N = state.range(0);
  Rng rng(5);
  SvaGenOptions gen;
  gen.n = 6;
  const SvaWfa s = random_sva(rng, gen);
  for (auto _ : state) {
    benchmark::DoNotOptimize(spectral_error(s.wfa, zero_wfa(), N));
  }
}
BENCHMARK(BM_TruncatedHankelSpectrum)->Arg(128)->Arg(512);

}  // namespace

int main(int argc, char** argv) {
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
