// Serial reference vs OpenMP kernels. Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include "mswlab/config.hpp"
#include "mswlab/measures.hpp"
#include "mswlab/ratelab.hpp"
#include "mswlab/rng.hpp"
#include "mswlab/sliced.hpp"

using namespace mswlab;

namespace {

DiscreteMeasure cloud(std::uint64_t seed, int dim, int atoms) {
  Rng rng(seed);
  PointMatrix pts(dim, atoms);
  for (int i = 0; i < atoms; ++i) {
    for (int k = 0; k < dim; ++k) pts(k, i) = rng.normal();
  }
  return DiscreteMeasure::uniform(pts);
}

Execution mode(const benchmark::State& state) { return state.range(0) == 0 ? Execution::serial : Execution::parallel; }

void BM_MaxSlicedGrid(benchmark::State& state) {
  const auto mu = cloud(1, 3, 64);
  const auto nu = cloud(2, 3, 64);
  for (auto _ : state) benchmark::DoNotOptimize(max_sliced_grid(mu, nu, 2.0, 1e-3, mode(state)).value);
}

void BM_MaxSlicedPga(benchmark::State& state) {
  const auto mu = cloud(3, 16, 256);
  const auto nu = cloud(4, 16, 256);
  PgaOptions opt;
  opt.exec = mode(state);
  for (auto _ : state) benchmark::DoNotOptimize(max_sliced_pga(mu, nu, 1.0, opt).value);
}

void BM_RateEstimate(benchmark::State& state) {
  ratelab::RateExperimentConfig c;
  c.measure.generator = "scaled_basis";
  c.measure.d = 8;
  c.estimand = ratelab::Estimand::ew11;
  c.n_grid = {16, 64, 256};
  c.trials = 32;
  c.solver.kind = ratelab::SolverKind::pga;
  c.solver.restarts = 4;
  const auto measure = ratelab::build_measure(c.measure);
  for (auto _ : state) benchmark::DoNotOptimize(ratelab::estimate(c, measure, mode(state)).rows.back().mean);
}

}  // namespace

// Argument 0 is the serial reference, 1 the OpenMP path.
BENCHMARK(BM_MaxSlicedGrid)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_MaxSlicedPga)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_RateEstimate)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK_MAIN();
