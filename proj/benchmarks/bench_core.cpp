// microbenchmarks for the hot paths: operator assembly and application,
// the Bloch transform, one solver iteration, and the period-map exponential

#include <benchmark/benchmark.h>

#include "floqns/bloch.hpp"
#include "floqns/floquet.hpp"
#include "floqns/solver.hpp"

using namespace floqns;

namespace {

struct Setup {
  CellGrid g;
  OperatorAtoms at;
  Params pr;
  CoeffSlice s;
  VecR eta;

  explicit Setup(int nh = 16, int nz = 17)
      : g(CellGrid::make(2, nh, nz, {1.0})), at(g), s(trivial_slice(g)), eta(1) {
    eta[0] = 0.1;
  }
};

void bm_assemble_L(benchmark::State& state) {
  Setup su;
  for (auto _ : state) {
    MatC L = assemble_L(su.g, su.at, su.s, su.eta, su.pr);
    benchmark::DoNotOptimize(L.data());
  }
}
BENCHMARK(bm_assemble_L);

void bm_apply_L(benchmark::State& state) {
  Setup su;
  DofC u = DofC::Random(su.g.ndof);
  for (auto _ : state) {
    DofC v = apply_L(su.g, su.at, su.s, su.eta, su.pr, u);
    benchmark::DoNotOptimize(v.data());
  }
}
BENCHMARK(bm_apply_L);

void bm_apply_B1(benchmark::State& state) {
  Setup su;
  DofC u = DofC::Random(su.g.ndof);
  for (auto _ : state) {
    DofC v = apply_B1(su.g, su.s, 0, su.pr, u);
    benchmark::DoNotOptimize(v.data());
  }
}
BENCHMARK(bm_apply_B1);

void bm_bloch_roundtrip(benchmark::State& state) {
  Setup su;
  BlochTransform bt(su.g, 4);
  std::vector<VecC> f(bt.ncells());
  for (auto& c : f) c = VecC::Random(su.g.ngrid);
  for (auto _ : state) {
    auto hat = bt.forward(f);
    auto back = bt.inverse(hat);
    benchmark::DoNotOptimize(back[0].data());
  }
}
BENCHMARK(bm_bloch_roundtrip);

void bm_solver_iteration(benchmark::State& state) {
  Setup su;
  MatR A0 = assemble_L(su.g, su.at, su.s, VecR::Zero(1), su.pr).real();
  TimeFreqSolver solver(su.g, A0, 16);
  std::vector<DofC> F(16, DofC::Zero(su.g.ndof));
  for (auto& f : F) f = DofC::Random(su.g.ndof);
  for (auto _ : state) {
    auto u = solver.solve(F);
    benchmark::DoNotOptimize(u.data());
  }
}
BENCHMARK(bm_solver_iteration);

void bm_monodromy_static(benchmark::State& state) {
  Setup su;
  PeriodicState st = trivial_state(su.g, su.pr, 16);
  MonodromyOptions mo;
  mo.want_vectors = false;
  for (auto _ : state) {
    MonodromyResult m = monodromy(su.g, su.at, su.pr, st, su.eta, mo);
    benchmark::DoNotOptimize(m.multipliers.data());
  }
}
BENCHMARK(bm_monodromy_static);

} // namespace

BENCHMARK_MAIN();
