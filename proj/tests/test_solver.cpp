#include <doctest.h>

#include "floqns/field.hpp"
#include "floqns/operators.hpp"
#include "floqns/solver.hpp"
#include "helpers.hpp"
#include <cmath>

using namespace floqns;
using tst::tiny_grid;

namespace {

// filtered flat matrix: P A0 P + (I - P), the stiff part every periodic
// solve in the pipeline hands to the solver
MatR filtered_flat(const CellGrid& g, const OperatorAtoms& at, const Params& pr) {
  const ModeFilter mf(g);
  const MatR P = mf.matrix();
  const MatR A0 = assemble_L(g, at, trivial_slice(g), VecR::Zero(g.hdims()), pr).real();
  return P * A0 * P + MatR::Identity(g.ndof, g.ndof) - P;
}

// manufactured periodic trajectory: band-limited in time, physical in space,
// phi average removed from the time mean so the pinned mean mode matches
std::vector<DofC> manufactured(const CellGrid& g, int nt, int mmax, unsigned seed) {
  const ModeFilter mf(g);
  std::vector<DofC> coef(nt, DofC::Zero(g.ndof));
  for (int m = -mmax; m <= mmax; ++m)
    coef[(m + nt) % nt] = tst::random_cstate(g, seed + 100 * (m + mmax));
  Cplx mean = g.average(g.phi_of(coef[0]));
  coef[0].head(g.ngrid).array() -= mean;
  return idft_time(coef);
}

} // namespace

TEST_SUITE("solver") {

TEST_CASE("periodic solve recovers a manufactured trajectory") {
  const CellGrid g = tiny_grid();
  const OperatorAtoms at(g);
  const Params pr = tst::base_params();
  const MatR A0 = filtered_flat(g, at, pr);
  const int nt = 16;

  auto u = manufactured(g, nt, 5, 300);
  auto du = time_derivative(u);
  std::vector<DofC> F(nt);
  for (int k = 0; k < nt; ++k) F[k] = du[k] + A0.cast<Cplx>() * u[k];

  TimeFreqSolver tfs(g, A0, nt);
  auto got = tfs.solve(F);

  Real err = 0, scale = 0;
  for (int k = 0; k < nt; ++k) {
    err = std::max(err, (got[k] - u[k]).cwiseAbs().maxCoeff());
    scale = std::max(scale, u[k].cwiseAbs().maxCoeff());
  }
  CHECK(err < 1e-9 * scale);
  CHECK(tfs.last_defect() < 1e-10);
  CHECK(tfs.last_iters() <= 3); // no coupling: one sweep plus the convergence check
}

TEST_CASE("fixed-point iteration folds in a time-dependent coupling") {
  const CellGrid g = tiny_grid();
  const OperatorAtoms at(g);
  const Params pr = tst::base_params();
  const MatR A0 = filtered_flat(g, at, pr);
  const int nt = 16;

  // M(t) = c(t) P S P with a small random S: stays inside the subspace
  const ModeFilter mf(g);
  const MatR P = mf.matrix();
  MatR S(g.ndof, g.ndof);
  for (int j = 0; j < g.ndof; ++j) S.col(j) = tst::random_vec(g.ndof, 400 + j);
  S = 0.002 * (P * S * P).eval(); // small enough for a contractive sweep
  auto cfun = [](Real t) { return 1.0 + 0.5 * std::cos(2 * M_PI * t); };

  auto u = manufactured(g, nt, 4, 500);
  auto du = time_derivative(u);
  std::vector<DofC> F(nt);
  for (int k = 0; k < nt; ++k) {
    Real t = Real(k) / nt;
    F[k] = du[k] + A0.cast<Cplx>() * u[k] + cfun(t) * (S.cast<Cplx>() * u[k]);
  }

  TimeFreqSolver tfs(g, A0, nt);
  auto coupling = [&](int kt, const DofC& v) -> DofC {
    return cfun(Real(kt) / nt) * (S.cast<Cplx>() * v);
  };
  auto got = tfs.solve(F, coupling);

  Real err = 0, scale = 0;
  for (int k = 0; k < nt; ++k) {
    err = std::max(err, (got[k] - u[k]).cwiseAbs().maxCoeff());
    scale = std::max(scale, u[k].cwiseAbs().maxCoeff());
  }
  CHECK(err < 1e-8 * scale);
  CHECK(tfs.last_iters() > 1);
}

TEST_CASE("mean mode is pinned and its solvability defect is reported") {
  const CellGrid g = tiny_grid();
  const OperatorAtoms at(g);
  const Params pr = tst::base_params();
  const MatR A0 = filtered_flat(g, at, pr);
  const int nt = 8;

  // compatible rhs: solution exists with <phi time-mean> = 0
  auto u = manufactured(g, nt, 2, 600);
  std::vector<DofC> F(nt);
  auto du = time_derivative(u);
  for (int k = 0; k < nt; ++k) F[k] = du[k] + A0.cast<Cplx>() * u[k];
  TimeFreqSolver tfs(g, A0, nt);
  auto got = tfs.solve(F);
  Cplx mean = 0;
  for (int k = 0; k < nt; ++k) mean += g.average(g.phi_of(got[k]));
  CHECK(std::abs(mean) / nt < 1e-11);

  // incompatible rhs: inject the left-null direction into the time mean;
  // the bordered solve absorbs it and reports the defect
  std::vector<DofC> Fbad = F;
  DofC bad = DofC::Zero(g.ndof);
  bad.head(g.ngrid).setConstant(1.0);
  for (int k = 0; k < nt; ++k) Fbad[k] += bad;
  auto got2 = tfs.solve(Fbad);
  CHECK(tfs.last_defect() > 1e-4);
  Cplx mean2 = 0;
  for (int k = 0; k < nt; ++k) mean2 += g.average(g.phi_of(got2[k]));
  CHECK(std::abs(mean2) / nt < 1e-10); // still pinned
}

TEST_CASE("stationary rhs produces the stationary bordered solution") {
  const CellGrid g = tiny_grid();
  const OperatorAtoms at(g);
  const Params pr = tst::base_params();
  const MatR A0 = filtered_flat(g, at, pr);
  const int nt = 4;

  DofC rhs = tst::random_cstate(g, 700);
  rhs.head(g.ngrid).array() -= g.average(g.phi_of(rhs));
  TimeFreqSolver tfs(g, A0, nt);
  auto got = tfs.solve(std::vector<DofC>(nt, rhs));
  for (int k = 0; k < nt; ++k) {
    CHECK((got[k] - got[0]).cwiseAbs().maxCoeff() < 1e-11);
    CHECK((A0.cast<Cplx>() * got[k] - rhs).cwiseAbs().maxCoeff() <
          1e-8 * rhs.cwiseAbs().maxCoeff());
  }
  CHECK(std::abs(g.average(g.phi_of(got[0]))) < 1e-11);
}

} // TEST_SUITE
