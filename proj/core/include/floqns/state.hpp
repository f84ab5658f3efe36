#pragma once

#include "floqns/force.hpp"
#include "floqns/operators.hpp"
#include "floqns/solver.hpp"

namespace floqns {

// space-time periodic reference state, packed real samples over one period
struct PeriodicState {
  const CellGrid* g = nullptr;
  Params pr;
  int nt = 0;
  bool is_static = true;  // samples time-independent (then one sample stored)
  std::vector<DofR> samples;
  std::vector<CoeffSlice> slices;  // matching samples

  DofR at(Real t) const;
  CoeffSlice slice_at(Real t, const OperatorAtoms& at_) const;
  const CoeffSlice& slice(int kt) const { return slices[is_static ? 0 : kt]; }
  const DofR& sample(int kt) const { return samples[is_static ? 0 : kt]; }
  Real mean_rho() const;  // space-time average of the density
  Real sup_amp() const;   // max over samples of the gamma-weighted L2 norm
};

PeriodicState trivial_state(const CellGrid& g, const Params& pr, int nt = 64);

struct StateSolveOptions {
  int nt = 64;
  int substeps = 4;        // march steps per sample interval
  int periods_max = 60;
  Real march_tol = 1e-11;  // period-map increment target
  int picard_iters = 40;   // initializer
  Real picard_tol = 1e-12;
  bool polish = true;
  int polish_iters = 16;
  Real polish_tol = 5e-13;
};

struct StateSolveReport {
  std::vector<Real> period_increments;
  std::vector<Real> polish_increments;
  Real residual = 0.0;       // periodic defect after the final pass
  Real mean_rho = 0.0;
  Real sup_amp = 0.0;
  int periods_used = 0;
  bool converged = false;
  bool static_detected = false;
};

// nonlinear solve for the forced time-periodic state: damped march across
// whole periods until the period map contracts, then a spectral polish of the
// periodic system
PeriodicState solve_periodic_state(const CellGrid& g, const OperatorAtoms& at,
                                   const Params& pr, const PeriodicForce& force,
                                   const StateSolveOptions& opt = {},
                                   StateSolveReport* report = nullptr);

// nonlinear terms of the evolution d_t u = -A0 u + N(u, t)
DofR state_nonlinear(const CellGrid& g, const OperatorAtoms& at, const Params& pr,
                     const PeriodicForce& force, const DofR& u, Real t);

// periodic defect max_k |d_t u + A0 u - N(u)| in the gamma-weighted L2 norm
Real state_residual(const CellGrid& g, const OperatorAtoms& at, const Params& pr,
                    const PeriodicForce& force, const PeriodicState& st);

struct EnergyReport {
  Real sup_E1 = 0.0, sup_E2 = 0.0;  // sup over the period
  Real avg_D1 = 0.0, avg_D2 = 0.0;  // period averages
  Real sup_amp = 0.0;
};
EnergyReport energy_report(const CellGrid& g, const Params& pr, const PeriodicState& st);

// sup over the period of E_m = gamma^-2 [[phi]]_m^2 + sum_c [[w_c]]_m^2
Real energy_m_sup(const CellGrid& g, const Params& pr, const PeriodicState& st, int m);

} // namespace floqns
