#pragma once

#include "floqns/state.hpp"

namespace floqns {

struct EigResult {
  VecC values;
  MatC vectors;
};
// dense nonsymmetric eigensolve (LAPACK zgeev)
EigResult dense_eig(const MatC& A, bool vectors = true);

struct MonodromyOptions {
  int nt = 64;              // steps per period on the stepping path
  bool richardson = true;   // extrapolate the stepped propagator
  bool force_stepper = false;
  bool want_vectors = true;
};

struct MonodromyResult {
  MatC U;
  VecC multipliers;  // sorted by modulus, descending
  VecC exponents;    // principal logs
  MatC vectors;      // right eigenvectors, columns matching the sort
  Real mass_defect = 0.0;  // relative defect of the conserved mass functional
  bool static_path = false;
  int mass_index = -1;  // branch with multiplier nearest 1
};

// period map of d_t u + L_eta(t) u = 0 about the given state; static states go
// through a single matrix exponential, time-dependent ones through a split
// stepper sandwiched by the constant-part flow
MonodromyResult monodromy(const CellGrid& g, const OperatorAtoms& at, const Params& pr,
                          const PeriodicState& st, const VecR& eta,
                          const MonodromyOptions& opt = {});

// leading exponent with the spectral-gap diagnostics; throws when the leading
// multiplier is not simple enough, carrying the two leading moduli
struct LeadingReport {
  Cplx lambda;         // Log mu_1, principal branch
  Real beta0_hat = 0;  // -4 log |mu_2|, empirical gap scale
  Real ratio = 0;      // |mu_1| / |mu_2|
};
LeadingReport leading_exponent(const MonodromyResult& m, Real margin = 1.05);

struct DecayFit {
  Real amp_rate = 0.0;     // log-amplitude slope per period, negative
  Real energy_rate = 0.0;  // twice the amplitude rate
  Real beta0_hat = 0.0;    // -4 x amplitude rate
  Real r2 = 0.0;
};
// propagate random mass-free fields and fit the decay of the weighted norm;
// returns the slowest fitted rate across the trials
DecayFit decay_rate(const CellGrid& g, const Params& pr, const MonodromyResult& mono,
                    int trials = 3, int periods = 12, int skip = 2, unsigned seed = 1);

// samples of U(t_k, 0) v, k = 0..nt-1, by the same stepping scheme
std::vector<DofC> propagate_samples(const CellGrid& g, const OperatorAtoms& at,
                                    const Params& pr, const PeriodicState& st,
                                    const VecR& eta, const DofC& v, int nt);

struct FloquetEigenfunction {
  std::vector<DofC> p;  // periodic part samples (static: one sample)
  Cplx lambda;          // exponent of the tracked branch
  Real residual = 0.0;  // relative defect of d_t p + L p + lambda p
  Cplx overlap;         // <<p, u*>> before scaling
};

// periodic eigenfunction of the branch continuous in the mass mode,
// normalized so <<p, u*>> = 1
FloquetEigenfunction eigenfunction_eta(const CellGrid& g, const OperatorAtoms& at,
                                       const Params& pr, const PeriodicState& st,
                                       const VecR& eta, const std::vector<DofC>& ustar,
                                       const MonodromyOptions& opt = {});

} // namespace floqns
