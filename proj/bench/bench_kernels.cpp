#include "brl/concentration.hpp"
#include "brl/covering.hpp"
#include "brl/experiments.hpp"

#include <benchmark/benchmark.h>

using namespace brl;

namespace {

Exec exec_of(const benchmark::State& state) { return state.range(0) == 0 ? Exec::serial : Exec::parallel; }

void label(benchmark::State& state) { state.SetLabel(state.range(0) == 0 ? "serial" : "openmp"); }

void BM_NeighborLists(benchmark::State& state) {
  RandomStream s{1, 0, 0};
  std::vector<Vector> pts;
  for (int i = 0; i < 2000; ++i) pts.push_back(draw_gaussian(s, 8));
  for (auto _ : state) benchmark::DoNotOptimize(neighbor_lists(pts, 2.0, exec_of(state)));
  label(state);
}

void BM_ConcentrationMonteCarlo(benchmark::State& state) {
  const int n = 256;
  const DirectionSampler dirs = [n](RandomStream& st) {
    Vector x = Vector::Zero(n);
    for (const int i : sample_support(n, 8, st)) x[i] = st.next_normal();
    return x;
  };
  for (auto _ : state)
    benchmark::DoNotOptimize(estimate_conc_mc(SubsampledSpec{Basis::hadamard}, 64, n, dirs, 0.5, Side::low, 8, 2000,
                                              RandomStream{2, 0, 0}, exec_of(state)));
  label(state);
}

void BM_Sweep(benchmark::State& state) {
  ExperimentConfig c;
  DiracMixture atoms;
  for (int i = 0; i < 16; ++i) {
    Vector p = Vector::Zero(128);
    p[i] = 15.0;
    atoms.points.push_back(std::move(p));
  }
  atoms.weights.assign(16, 1.0 / 16);
  c.real_prior = atoms;
  c.op = SubgaussianSpec{};
  c.sigma = 0.5;
  c.eta = 0.01;
  c.m_values = {20};
  c.trials = 500;
  c.master_seed = 3;
  for (auto _ : state) benchmark::DoNotOptimize(run_sweep(c, exec_of(state)));
  label(state);
}

}  // namespace

BENCHMARK(BM_NeighborLists)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ConcentrationMonteCarlo)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Sweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
