// Microbenchmarks for the hot paths: one conditioned step at several
// truncations, the two distance routes, and a whole stabilization
// trajectory.
#include <cmath>

#include <benchmark/benchmark.h>

#include "numstab/fock.hpp"
#include "numstab/qfunc.hpp"
#include "numstab/rng.hpp"
#include "numstab/sme.hpp"

using namespace numstab;

namespace {

SimParams loop_params(int n_max) {
  SimParams p;
  p.kappa = 0.005;
  p.eta = 0.8;
  p.gain = 20.0;
  p.n_star = 2;
  p.dt = 1e-3;
  p.t_final = 1.0;
  p.n_max = n_max;
  return p;
}

void BM_ConditionedStep(benchmark::State& state) {
  SimParams p = loop_params(static_cast<int>(state.range(0)));
  Stepper st(p);
  CMatrix rho = p.initial_state.realize(p.space()).mat();
  CounterRng rng(1, 0);
  const double scale = std::sqrt(p.dt);
  for (auto _ : state) {
    benchmark::DoNotOptimize(st.advance(rho, scale * rng.gaussian()));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ConditionedStep)->Arg(13)->Arg(20)->Arg(40)->Arg(80);

void BM_DistanceDiagonal(benchmark::State& state) {
  DensityMatrix rho =
      DensityMatrix::coherent(Complex(1.2, 0.3), HilbertConfig(20));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        distance(rho, 2, DistanceMethod::kFockDiagonal).value);
  }
}
BENCHMARK(BM_DistanceDiagonal);

void BM_DistanceQuadrature(benchmark::State& state) {
  DensityMatrix rho =
      DensityMatrix::coherent(Complex(1.2, 0.3), HilbertConfig(20));
  QGridSpec grid;
  grid.nx = static_cast<int>(state.range(0));
  grid.ny = grid.nx;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        distance(rho, 2, DistanceMethod::kGridQuadrature, grid).value);
  }
}
BENCHMARK(BM_DistanceQuadrature)->Arg(101)->Arg(201);

void BM_Trajectory(benchmark::State& state) {
  SimParams p = loop_params(20);
  p.record_stride = 10;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    p.seed = seed++;
    benchmark::DoNotOptimize(simulate_trajectory(p));
  }
}
BENCHMARK(BM_Trajectory)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
