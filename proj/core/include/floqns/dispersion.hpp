#pragma once

#include "floqns/floquet.hpp"

namespace floqns {

// zero eigenpair of the periodic generator about a state, with its adjoint
// mode; sampled on the state's time grid (one sample when static)
struct Eigenfunction0 {
  std::vector<DofC> u;      // u0 = (1, 0) + correction, <<phi>> = 1
  std::vector<DofC> ustar;  // adjoint zero mode (gamma^2 rho/p'(rho), 0)
  Real solve_defect = 0.0;  // mean-mode solvability defect of the periodic solve
  Real residual = 0.0;      // relative plug-back |d_t u + L u|
  Real adjoint_residual = 0.0;  // relative |L* u* - W^-1 d_t(W u*)|
  Cplx pairing;                 // <<u, u*>>, 1 by construction
  Real size_sq = 0.0;           // gamma^-2 [[phi - 1]]_2^2 + [[w]]_2^2, sup in t
  Real size_scale = 0.0;        // comparison scale 1/(nu gamma^2)
};

Eigenfunction0 eigenfunction_u0(const CellGrid& g, const OperatorAtoms& at,
                                const Params& pr, const PeriodicState& st);

// time-averaged state-weighted pairing <<u, v>> of sampled fields (sizes must
// match the state's sampling or be a single static sample)
Cplx pair_avg(const CellGrid& g, const Params& pr, const PeriodicState& st,
              const std::vector<DofC>& u, const std::vector<DofC>& v);

// mass-mode projection <<u, u*>> u0, sampled like u
std::vector<DofC> projection_pi0(const CellGrid& g, const Params& pr,
                                 const PeriodicState& st, const Eigenfunction0& e0,
                                 const std::vector<DofC>& u);
// plain mean projection (<phi(t)>, 0)
std::vector<DofC> projection_pi0_tilde(const CellGrid& g, const std::vector<DofC>& u);

// first-order exponent coefficients lambda1_j = -<<B1_j u0, u*>>
struct FirstOrder {
  VecC lambda1;
  VecR a;               // drift a_j = -Im lambda1_j
  Real re_residual = 0; // max_j |Re lambda1_j|, zero in exact arithmetic
};
FirstOrder first_order(const CellGrid& g, const OperatorAtoms& at, const Params& pr,
                       const PeriodicState& st, const Eigenfunction0& e0);

// first-order cell correctors: B0 u1_j = (I - Pi0) B1_j u0 with <<phi1>> = 0
struct CellSolution {
  std::vector<std::vector<DofC>> u1;  // per direction, state-grid samples
  VecR plugback;                      // relative residual per direction
  VecR mean_phi;                      // |<<phi1>>| per direction
  Real solve_defect = 0.0;
};
CellSolution cell_problem(const CellGrid& g, const OperatorAtoms& at, const Params& pr,
                          const PeriodicState& st, const Eigenfunction0& e0,
                          const FirstOrder& fo);

// second-order coefficients and the diffusion matrix A = -(sign) sym Re lambda2
struct SecondOrder {
  MatC lambda2;
  MatR A_plus;   // candidate for sign +1, A = -sym Re lambda2
  MatR A_minus;  // candidate for sign -1
};
SecondOrder second_order(const CellGrid& g, const OperatorAtoms& at, const Params& pr,
                         const PeriodicState& st, const Eigenfunction0& e0,
                         const CellSolution& cell);

// steady cell problem about the flat state: [0, gamma^2 div; grad, -nu Lap -
// nut grad div] x = (0, e_j), mean-zero phi, wall-clamped velocity; the cell
// velocity is w1_j = nu x_w and the matrix comes out both as a gradient form
// and as a flux average
struct StokesCell {
  MatR a_tilde;       // (gamma^2/nu) <grad w1_j : grad w1_l>
  MatR a_tilde_alt;   // (gamma^2/nu) <e_j . w1_l>
  Real agree = 0.0;   // max entry difference between the two forms
  Real kappa0_sharp = 0.0;  // min eigenvalue of a_tilde, scaled by nu/gamma^2
  Real kappa0 = 0.0;        // definiteness constant used downstream, 0.9 x sharp
  std::vector<std::vector<VecR>> w1;  // per direction, full-grid components
  VecR phi_mean;                      // |<phi>| per direction, zero by the border
};
StokesCell stokes_cell(const CellGrid& g, const OperatorAtoms& at, const Params& pr);

// period-averaged relative H1 distance of the first-order cell velocity from
// the steady cell velocity, worst direction
Real cell_stokes_gap(const CellGrid& g, const Params& pr, const CellSolution& cell,
                     const StokesCell& sc);

// monodromy sweep over quasimomenta with the quadratic model fit
struct SweepPoint {
  VecR eta;
  Cplx lambda;        // leading exponent, principal branch
  Cplx model;         // -i a.eta - eta^T A eta (when a model was supplied)
  Real remainder = 0; // |lambda - model|
  Real ratio = 0;     // simplicity |mu1|/|mu2|
  Real mass_defect = 0;
};
struct SweepOptions {
  MonodromyOptions mono;
  Real ratio_floor = 1.5;  // simplicity requirement defining the radius r0
  Real bound_slack = 0.9;  // slack on the pointwise attenuation bound
  Real kappa0 = 0.0;       // definiteness constant; 0 skips the bound check
};
struct SweepResult {
  std::vector<SweepPoint> points;
  VecR a_fit;
  MatR A_fit;
  Real fit_residual = 0;  // total-least-squares relative residual
  Real slope = 0;         // log-log slope of the remainder vs |eta|
  Real r0_hat = 0;        // largest swept radius with simplicity ratio >= floor
  bool bound_ok = true;   // Re lambda <= -(kappa0 gamma^2/(2 nu))|eta|^2 slack
  Real bound_margin = 0;  // min over points of bound - Re lambda
};

// symmetric direction set: for each radius, +/- along each lattice direction
// and the diagonals between pairs
std::vector<VecR> sweep_etas(const CellGrid& g, const std::vector<Real>& radii);

SweepResult dispersion_sweep(const CellGrid& g, const OperatorAtoms& at, const Params& pr,
                             const PeriodicState& st, const std::vector<VecR>& etas,
                             const VecR& a_model, const MatR& A_model,
                             const SweepOptions& opt = {});

// one-time global sign for A, fixed by matching the perturbation candidates
// against the fitted flat-state sweep
struct SignCalibration {
  int sigma = 1;
  Real res_plus = 0;   // |A_fit - A_plus|
  Real res_minus = 0;  // |A_fit - A_minus|
  MatR A_fit;
};
SignCalibration calibrate_sign(const CellGrid& g, const OperatorAtoms& at, const Params& pr,
                               const std::vector<Real>& radii = {},
                               const SweepOptions& opt = {});

// sweep-fit comparison attached by the cross-validation stage
struct FitComparison {
  bool done = false;
  VecR a_fit;
  MatR A_fit;
  Real err_a = 0;  // |a - a_fit| over max(|a|, observable scale)
  Real err_A = 0;  // |A - A_fit|_F / |A|_F
  Real slope = 0;
  Real r0_hat = 0;
  bool bound_ok = true;
};

struct DispersionCoefficients {
  VecR a;       // drift vector
  MatR A;       // effective diffusion, sign-calibrated
  VecC lambda1; // raw first-order values
  MatC lambda2; // raw second-order values
  Real kappa0_hat = 0;  // min eigenvalue of A, scaled by nu/gamma^2
  int sigma = 1;
  Real first_order_re_residual = 0;
  Real cell_plugback = 0;
  Real cell_mean_phi = 0;
  StokesCell stokes;
  SignCalibration calibration;
  FitComparison fit;
};

struct DispersionOptions {
  int sigma = 0;  // 0 calibrates against the flat-state sweep
  std::vector<Real> calib_radii = {};
};

DispersionCoefficients dispersion_coefficients(const CellGrid& g, const OperatorAtoms& at,
                                               const Params& pr, const PeriodicState& st,
                                               const Eigenfunction0& e0,
                                               const DispersionOptions& opt = {},
                                               CellSolution* cell_out = nullptr);

} // namespace floqns
