#include <benchmark/benchmark.h>

#include "decaylab/experiments.hpp"
#include "decaylab/hamiltonian.hpp"
#include "decaylab/spectral.hpp"

namespace {

using namespace decaylab;

HamiltonianMatrix sample_operator(int dim, double side, double mesh) {
  ModelSpec model;
  model.dim = dim;
  model.coupling = 4.0;
  const LatticeDomain box = build_domain(dim, side, mesh, Boundary::Dirichlet);
  return restricted_operator(model, box, 42, 0);
}

void count_with(benchmark::State& state, int dim, double mesh, CountMethod method) {
  const auto h = sample_operator(dim, static_cast<double>(state.range(0)), mesh);
  CountOptions opts;
  opts.force = method;
  for (auto _ : state) benchmark::DoNotOptimize(count_below(h, -0.5, opts).count);
  state.counters["unknowns"] = static_cast<double>(h.size());
}

void BM_SturmCount1d(benchmark::State& state) { count_with(state, 1, 0.25, CountMethod::Sturm); }
void BM_SparseInertia1d(benchmark::State& state) { count_with(state, 1, 0.25, CountMethod::SparseInertia); }
void BM_SparseInertia2d(benchmark::State& state) { count_with(state, 2, 0.5, CountMethod::SparseInertia); }
void BM_DenseInertia2d(benchmark::State& state) { count_with(state, 2, 0.5, CountMethod::Dense); }

void BM_ReusedFactorization2d(benchmark::State& state) {
  const auto h = sample_operator(2, static_cast<double>(state.range(0)), 0.5);
  InertiaCounter counter(h);
  double e = -1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(counter.count(e).count);
    e = e < -0.1 ? e + 0.01 : -1.0;
  }
}

void BM_LowestEigenpairs2d(benchmark::State& state) {
  const auto h = sample_operator(2, static_cast<double>(state.range(0)), 0.5);
  EigenRequest req;
  req.cap = 10;
  for (auto _ : state) benchmark::DoNotOptimize(lowest_eigenpairs(h, req).energies.size());
}

void BM_CountForAlpha(benchmark::State& state) {
  ModelSpec model;
  model.coupling = 4.0;
  BoxConfig box;
  const double alpha = static_cast<double>(state.range(0)) / 10.0;
  for (auto _ : state) benchmark::DoNotOptimize(count_for_alpha(model, alpha, -0.5, box, 1, 0).count);
}

}  // namespace

BENCHMARK(BM_SturmCount1d)->RangeMultiplier(4)->Range(64, 4096);
BENCHMARK(BM_SparseInertia1d)->RangeMultiplier(4)->Range(64, 4096);
BENCHMARK(BM_SparseInertia2d)->RangeMultiplier(2)->Range(16, 128);
BENCHMARK(BM_DenseInertia2d)->Arg(8)->Arg(16);
BENCHMARK(BM_ReusedFactorization2d)->Arg(64);
BENCHMARK(BM_LowestEigenpairs2d)->Arg(32);
BENCHMARK(BM_CountForAlpha)->Arg(5)->Arg(4);

BENCHMARK_MAIN();
