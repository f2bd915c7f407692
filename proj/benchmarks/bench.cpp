// Microbenchmarks for the hot paths: sampling, rotation, norms, and the
// probe ascent.  Dimensions follow the sweep sizes used in practice.

#include <benchmark/benchmark.h>

#include "qhack/hacking.hpp"

using namespace qhack;
using linalg::CMatrix;
using linalg::Index;

namespace {

RotatedChannel channel(Index dA, Index dB) {
  random::Rng rng(99, 0);
  return hacking::rotated(
      UnitaryNetwork::make(random::haar_unitary(dA * dB, rng), dA, dB));
}

void BM_HaarUnitary(benchmark::State& state) {
  const Index n = state.range(0);
  random::Rng rng(1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(random::haar_unitary(n, rng));
}
BENCHMARK(BM_HaarUnitary)->Arg(16)->Arg(64)->Arg(256);

void BM_Rotate(benchmark::State& state) {
  const Index d = state.range(0);
  random::Rng rng(2, 0);
  const CMatrix u = random::haar_unitary(d * d, rng);
  for (auto _ : state)
    benchmark::DoNotOptimize(linalg::rotate_clockwise(u, {d, d}, {d, d}));
}
BENCHMARK(BM_Rotate)->Arg(4)->Arg(8)->Arg(16);

void BM_NuclearNorm(benchmark::State& state) {
  const Index n = state.range(0);
  random::Rng rng(3, 0);
  const CMatrix m = random::ginibre(n, n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(linalg::schatten_norm(m, 1.0));
}
BENCHMARK(BM_NuclearNorm)->Arg(16)->Arg(64)->Arg(128);

void BM_MeValue(benchmark::State& state) {
  const Index d = state.range(0);
  const auto ch = channel(d, d);
  for (auto _ : state) benchmark::DoNotOptimize(hacking::p_me(ch));
}
BENCHMARK(BM_MeValue)->Arg(4)->Arg(8)->Arg(16);

void BM_OptimizeProbe(benchmark::State& state) {
  const Index d = state.range(0);
  const auto ch = channel(d, d);
  OptimizerSettings s;
  s.convergenceTol = 1e-8;
  s.maxIter = 300;
  s.restarts = 0;
  for (auto _ : state) {
    random::Rng rng(4, 0);
    benchmark::DoNotOptimize(hacking::optimize_probe(ch, s, rng));
  }
}
BENCHMARK(BM_OptimizeProbe)->Arg(2)->Arg(4)->Arg(8);

}  // namespace

BENCHMARK_MAIN();
