#include <benchmark/benchmark.h>

#include "lqropt/dare.hpp"
#include "lqropt/experiment.hpp"
#include "lqropt/policy_optim.hpp"
#include "lqropt/sampling.hpp"

using namespace lqropt;

namespace {

ProblemInstance scaled_instance() {
  const ProblemInstance p = paper_sec5_instance();
  return ProblemInstance(p.A, p.B, 0.1 * p.Q, p.R, p.Sigma);
}

void BM_SolveDlyap(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(1);
  const Mat A = random_schur(rng, n, 0.8);
  const Mat W = rng.symmetric(n, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_dlyap_transpose(A, W));
  }
}
BENCHMARK(BM_SolveDlyap)->Arg(4)->Arg(8)->Arg(16)->Arg(32);

void BM_SpectralRadius(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(2);
  const Mat A = random_schur(rng, n, 0.8);
  for (auto _ : state) {
    benchmark::DoNotOptimize(spectral_radius(A));
  }
}
BENCHMARK(BM_SpectralRadius)->Arg(8)->Arg(32);

void BM_Evaluate(benchmark::State& state) {
  const ProblemInstance P = scaled_instance();
  const Gain g0 = classify_gain(P, Mat::Zero(5, 5));
  for (auto _ : state) {
    benchmark::DoNotOptimize(evaluate(P, g0));
  }
}
BENCHMARK(BM_Evaluate);

void BM_SolveDare(benchmark::State& state) {
  const ProblemInstance P = scaled_instance();
  const Gain g0 = classify_gain(P, Mat::Zero(5, 5));
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_dare(P, g0, 1e-13, 100));
  }
}
BENCHMARK(BM_SolveDare);

void BM_Run(benchmark::State& state) {
  const ProblemInstance P = scaled_instance();
  const Gain g0 = classify_gain(P, Mat::Zero(5, 5));
  const DareSolution star = solve_dare(P, g0, 1e-13, 100);
  const Method kind = static_cast<Method>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(run(P, g0, kind, star, StopRule{1e-10, 10000}));
  }
}
BENCHMARK(BM_Run)
    ->Arg(static_cast<int>(Method::GD))
    ->Arg(static_cast<int>(Method::NGD))
    ->Arg(static_cast<int>(Method::QN));

}  // namespace

BENCHMARK_MAIN();
