#include <doctest.h>

#include "floqns/state.hpp"
#include "helpers.hpp"
#include <cmath>

using namespace floqns;
using tst::tiny_grid;

namespace {

ForceSpec desk_force() {
  ForceSpec spec;
  spec.modes.push_back({0, {1}, 1, 1, Cplx(1.0, 0.0)});
  return spec;
}

StateSolveOptions tiny_opts() {
  StateSolveOptions o;
  o.nt = 16;
  o.substeps = 4;
  return o;
}

} // namespace

TEST_SUITE("state") {

TEST_CASE("zero forcing returns the flat state") {
  const CellGrid g = tiny_grid();
  const OperatorAtoms at(g);
  const Params pr = tst::base_params(0.0);
  const PeriodicForce f(g, desk_force());

  StateSolveReport rep;
  PeriodicState st = solve_periodic_state(g, at, pr, f, tiny_opts(), &rep);

  CHECK(rep.converged);
  CHECK(rep.static_detected);
  CHECK(st.is_static);
  CHECK(st.sup_amp() < 1e-12);
  CHECK(st.mean_rho() == doctest::Approx(1.0).epsilon(1e-13));
  // slice coefficients are the flat ones
  CHECK((st.slices[0].rho - VecR::Ones(g.ngrid)).cwiseAbs().maxCoeff() < 1e-13);
  for (int c = 0; c < g.dim_n; ++c)
    CHECK(st.slices[0].v[c].cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("weakly forced state: converged, small, mass-exact") {
  const CellGrid g = tiny_grid();
  const OperatorAtoms at(g);
  Params pr = tst::base_params();
  pr.S_force = 0.5 * check_regime(pr).S_threshold;
  const PeriodicForce f(g, desk_force());

  StateSolveReport rep;
  PeriodicState st = solve_periodic_state(g, at, pr, f, tiny_opts(), &rep);

  CHECK(rep.converged);
  CHECK(!st.is_static); // oscillatory forcing
  CHECK(st.nt == 16);
  CHECK((int)st.samples.size() == 16);
  CHECK(rep.residual < 1e-8);
  CHECK(st.mean_rho() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(st.sup_amp() > 0);
  CHECK(st.sup_amp() < 1e-2); // deep in the small-data regime

  // every sample keeps unit mean density
  for (const auto& s : st.samples)
    CHECK(std::abs(g.average(g.phi_of(s))) < 1e-10);

  // the periodic defect measured independently agrees with the report
  CHECK(state_residual(g, at, pr, f, st) == doctest::Approx(rep.residual).epsilon(1e-9));

  // interpolation consistency: at(t_k) lands on the samples
  for (int k = 0; k < st.nt; ++k)
    CHECK((st.at(Real(k) / st.nt) - st.samples[k]).cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("response energy scales quadratically with the amplitude") {
  const CellGrid g = tiny_grid();
  const OperatorAtoms at(g);
  const PeriodicForce f(g, desk_force());
  Params pr = tst::base_params();
  const Real Sth = check_regime(pr).S_threshold;

  pr.S_force = 0.5 * Sth;
  PeriodicState full = solve_periodic_state(g, at, pr, f, tiny_opts());
  pr.S_force = 0.25 * Sth;
  PeriodicState half = solve_periodic_state(g, at, pr, f, tiny_opts());

  const Real e_full = energy_m_sup(g, tst::base_params(), full, 4);
  const Real e_half = energy_m_sup(g, tst::base_params(), half, 4);
  CHECK(e_full > 0);
  CHECK(e_full / e_half == doctest::Approx(4.0).epsilon(0.15));

  // sup amplitude scales linearly
  CHECK(full.sup_amp() / half.sup_amp() == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("steady forcing is detected and collapsed to one sample") {
  const CellGrid g = tiny_grid();
  const OperatorAtoms at(g);
  Params pr = tst::base_params();
  pr.S_force = 0.3 * check_regime(pr).S_threshold;

  ForceSpec spec;
  spec.modes.push_back({0, {1}, 0, 1, Cplx(1.0, 0.0)}); // mt = 0: no time dependence
  const PeriodicForce f(g, spec);

  StateSolveReport rep;
  PeriodicState st = solve_periodic_state(g, at, pr, f, tiny_opts(), &rep);
  CHECK(rep.converged);
  CHECK(st.is_static);
  CHECK((int)st.samples.size() == 1);
  CHECK(st.sup_amp() > 0);
  // at() is time-independent
  CHECK((st.at(0.3) - st.at(0.8)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("energy report tracks the parabolic norms") {
  const CellGrid g = tiny_grid();
  const OperatorAtoms at(g);
  Params pr = tst::base_params();
  pr.S_force = 0.5 * check_regime(pr).S_threshold;
  const PeriodicForce f(g, desk_force());
  PeriodicState st = solve_periodic_state(g, at, pr, f, tiny_opts());

  EnergyReport er = energy_report(g, pr, st);
  CHECK(er.sup_E1 > 0);
  CHECK(er.sup_E2 >= er.sup_E1);      // more derivatives, larger norm
  CHECK(er.sup_amp == doctest::Approx(st.sup_amp()).epsilon(1e-10));
  CHECK(std::isfinite(er.avg_D1));
  CHECK(std::isfinite(er.avg_D2));

  const Real e4 = energy_m_sup(g, pr, st, 4);
  CHECK(e4 >= er.sup_E2 * (1 - 1e-12));
}

} // TEST_SUITE
