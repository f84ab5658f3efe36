#include "floqns/state.hpp"

#include <stdexcept>

#include "floqns/field.hpp"
#include "floqns/norms.hpp"

namespace floqns {

DofR PeriodicState::at(Real t) const {
  if (is_static) return samples[0];
  return trig_eval(samples, t);
}

CoeffSlice PeriodicState::slice_at(Real t, const OperatorAtoms& at_) const {
  if (is_static) return slices[0];
  return make_slice(*g, at_, pr, at(t));
}

Real PeriodicState::mean_rho() const {
  Real acc = 0.0;
  for (const auto& u : samples) {
    Real m = 0.0;
    for (int i = 0; i < g->ngrid; ++i) m += g->wq(i) * u(i);
    acc += 1.0 + m / (pr.gamma * pr.gamma);
  }
  return acc / Real(samples.size());
}

Real PeriodicState::sup_amp() const {
  Real s = 0.0;
  for (const auto& u : samples)
    s = std::max(s, std::sqrt(l2_gamma_sq(*g, u.cast<Cplx>(), pr.gamma)));
  return s;
}

PeriodicState trivial_state(const CellGrid& g, const Params& pr, int nt) {
  PeriodicState st;
  st.g = &g;
  st.pr = pr;
  st.nt = nt;
  st.is_static = true;
  st.samples = {DofR::Zero(g.ndof)};
  st.slices = {trivial_slice(g)};
  return st;
}

DofR state_nonlinear(const CellGrid& g, const OperatorAtoms& at, const Params& pr,
                     const PeriodicForce& force, const DofR& u, Real t) {
  const int n = g.dim_n, ng = g.ngrid;
  const Real g2 = pr.gamma * pr.gamma;
  const VecR phi = u.head(ng);
  std::vector<VecR> w(n);
  for (int c = 0; c < n; ++c) w[c] = g.w_full(u, c);

  VecR rho = VecR::Ones(ng) + phi / g2;
  if (rho.minCoeff() <= 0.1) throw std::runtime_error("state: density collapsed during march");

  DofR out = DofR::Zero(g.ndof);
  // mass: -div(phi w)
  VecR mass = VecR::Zero(ng);
  for (int c = 0; c < n; ++c) mass -= g.D[c] * VecR(phi.cwiseProduct(w[c]));
  out.head(ng) = mass;

  VecR divw = VecR::Zero(ng);
  for (int d = 0; d < n; ++d) divw += g.D[d] * w[d];
  // pointwise nonlinear coefficients: c = p'(rho)/rho - 1, d = 1/rho - 1
  VecR cphi(ng), dphi(ng);
  for (int i = 0; i < ng; ++i) {
    cphi(i) = pr.pressure.dp(rho(i)) / rho(i) - 1.0;
    dphi(i) = 1.0 / rho(i) - 1.0;
  }
  for (int c = 0; c < n; ++c) {
    VecR mom = pr.S_force * force.component(c, t);
    for (int d = 0; d < n; ++d) mom -= w[d].cwiseProduct(VecR(g.D[d] * w[c]));
    mom -= cphi.cwiseProduct(VecR(g.D[c] * phi));
    const VecR visc = pr.nu * (at.Lap * w[c]) + pr.nu_tilde * (g.D[c] * divw);
    mom += dphi.cwiseProduct(visc);
    for (int k = 0; k < g.nwi; ++k) out(g.dof_w(c, k)) = mom(g.interior[k]);
  }
  return out;
}

namespace {

// phi mean re-projection, killing quadrature roundoff drift
void project_mean(const CellGrid& g, DofR& u) {
  Real m = 0.0;
  for (int i = 0; i < g.ngrid; ++i) m += g.wq(i) * u(i);
  u.head(g.ngrid).array() -= m;
}

// static initializer: Picard on the viscous balance with the t = 0 force
DofR initial_guess(const CellGrid& g, const OperatorAtoms& at, const Params& pr,
                   const PeriodicForce& force, const ModeFilter& mf,
                   const StateSolveOptions& opt) {
  const int n = g.dim_n, nwi = g.nwi;
  MatR V = MatR::Zero(n * nwi, n * nwi);
  for (int c = 0; c < n; ++c)
    for (int d = 0; d < n; ++d) {
      MatR blk = -pr.nu_tilde * at.DD[c][d];
      if (c == d) blk -= pr.nu * at.Lap;
      V.block(c * nwi, d * nwi, nwi, nwi) = blk(g.interior, g.interior);
    }
  Eigen::PartialPivLU<MatR> lu(V);
  DofR u = DofR::Zero(g.ndof);
  for (int it = 0; it < opt.picard_iters; ++it) {
    DofR nl = mf.projected(state_nonlinear(g, at, pr, force, u, 0.0));
    VecR rhs(n * nwi);
    for (int c = 0; c < n; ++c) rhs.segment(c * nwi, nwi) = nl.segment(g.dof_w(c, 0), nwi);
    VecR wnew = lu.solve(rhs);
    Real d = 0.0;
    for (int c = 0; c < n; ++c)
      d = std::max(d, (wnew.segment(c * nwi, nwi) - u.segment(g.dof_w(c, 0), nwi)).norm());
    for (int c = 0; c < n; ++c) u.segment(g.dof_w(c, 0), nwi) = wnew.segment(c * nwi, nwi);
    if (d < opt.picard_tol) break;
  }
  return u;
}

} // namespace

PeriodicState solve_periodic_state(const CellGrid& g, const OperatorAtoms& at,
                                   const Params& pr, const PeriodicForce& force,
                                   const StateSolveOptions& opt, StateSolveReport* report) {
  StateSolveReport rep;
  const int nt = opt.nt, nsub = opt.substeps;
  const Real dt = 1.0 / Real(nt * nsub);

  if (pr.S_force == 0.0) {
    PeriodicState st = trivial_state(g, pr, nt);
    rep.converged = true;
    rep.static_detected = true;
    rep.mean_rho = 1.0;
    if (report) *report = rep;
    return st;
  }

  const MatR A0 = assemble_L(g, at, trivial_slice(g), VecR::Zero(g.hdims()), pr).real();
  const int n = g.ndof;
  const ModeFilter mf(g);
  Eigen::PartialPivLU<MatR> lu(MatR(MatR::Identity(n, n) + (dt / 2.0) * A0));
  const MatR Mexp = MatR::Identity(n, n) - (dt / 2.0) * A0;

  DofR u = initial_guess(g, at, pr, force, mf, opt);
  project_mean(g, u);
  DofR nl_prev = mf.projected(state_nonlinear(g, at, pr, force, u, 0.0));

  std::vector<DofR> samples(nt);
  DofR period_start = u;
  bool converged = false;
  for (int p = 0; p < opt.periods_max && !converged; ++p) {
    for (int k = 0; k < nt * nsub; ++k) {
      const Real t = Real(k) * dt;
      if (k % nsub == 0) samples[k / nsub] = u;
      DofR nl = mf.projected(state_nonlinear(g, at, pr, force, u, t));
      DofR rhs = Mexp * u + dt * (1.5 * nl - 0.5 * nl_prev);
      u = lu.solve(rhs);
      mf.project(u);
      project_mean(g, u);
      nl_prev = std::move(nl);
    }
    const Real inc = std::sqrt(l2_gamma_sq(g, (u - period_start).cast<Cplx>(), pr.gamma));
    rep.period_increments.push_back(inc);
    rep.periods_used = p + 1;
    period_start = u;
    if (inc < opt.march_tol && p >= 1) converged = true;
  }
  rep.converged = converged;

  // spectral polish of the periodic system in frequency space; the filtered
  // flat part keeps the mean-mode border nonsingular
  if (opt.polish) {
    const MatR P = mf.matrix();
    TimeFreqSolver tfs(g, MatR(P * A0 * P + MatR::Identity(n, n) - P), nt);
    std::vector<DofC> uc(nt);
    for (int k = 0; k < nt; ++k) uc[k] = samples[k].cast<Cplx>();
    for (int it = 0; it < opt.polish_iters; ++it) {
      std::vector<DofC> F(nt);
      for (int k = 0; k < nt; ++k) {
        DofR ur = uc[k].real();
        F[k] = mf.projected(state_nonlinear(g, at, pr, force, ur, Real(k) / Real(nt))).cast<Cplx>();
      }
      auto unew = tfs.solve(F);
      Real dmax = 0.0;
      for (int k = 0; k < nt; ++k) dmax = std::max(dmax, (unew[k] - uc[k]).norm());
      uc = std::move(unew);
      rep.polish_increments.push_back(dmax);
      if (dmax < opt.polish_tol) break;
    }
    for (int k = 0; k < nt; ++k) {
      samples[k] = uc[k].real();
      project_mean(g, samples[k]);
    }
  }

  PeriodicState st;
  st.g = &g;
  st.pr = pr;
  st.nt = nt;

  // steady forcing gives a static state; detect and collapse
  Real timevar = 0.0;
  for (int k = 1; k < nt; ++k) timevar = std::max(timevar, (samples[k] - samples[0]).norm());
  if (timevar < 1e-12 * std::max(1.0, samples[0].norm())) {
    st.is_static = true;
    st.samples = {samples[0]};
  } else {
    st.is_static = false;
    st.samples = std::move(samples);
  }
  st.slices.reserve(st.samples.size());
  for (const auto& s : st.samples) st.slices.push_back(make_slice(g, at, pr, s));

  rep.residual = state_residual(g, at, pr, force, st);
  rep.mean_rho = st.mean_rho();
  rep.sup_amp = st.sup_amp();
  if (report) *report = rep;
  return st;
}

Real state_residual(const CellGrid& g, const OperatorAtoms& at, const Params& pr,
                    const PeriodicForce& force, const PeriodicState& st) {
  const int nt = st.is_static ? 1 : st.nt;
  std::vector<VecC> uc(std::max(nt, 1));
  for (int k = 0; k < nt; ++k) uc[k] = st.sample(k).cast<Cplx>();
  std::vector<VecC> dud;
  if (nt > 1) dud = time_derivative(uc);
  const MatR A0 = assemble_L(g, at, trivial_slice(g), VecR::Zero(g.hdims()), pr).real();
  const ModeFilter mf(g);
  Real r = 0.0;
  for (int k = 0; k < nt; ++k) {
    DofR def = mf.projected(
        DofR(A0 * st.sample(k) - state_nonlinear(g, at, pr, force, st.sample(k), Real(k) / Real(nt))));
    VecC defc = def.cast<Cplx>();
    if (nt > 1) defc += dud[k];
    r = std::max(r, std::sqrt(l2_gamma_sq(g, defc, pr.gamma)));
  }
  return r;
}

EnergyReport energy_report(const CellGrid& g, const Params& pr, const PeriodicState& st) {
  EnergyReport er;
  const int nt = int(st.samples.size());
  const Real g2 = pr.gamma * pr.gamma;
  const Real nsum = pr.nu + pr.nu_tilde;

  std::vector<VecC> phi(nt);
  std::vector<std::vector<VecC>> w(g.dim_n, std::vector<VecC>(nt));
  std::vector<std::vector<VecC>> gphi(g.dim_n, std::vector<VecC>(nt));
  for (int k = 0; k < nt; ++k) {
    phi[k] = st.samples[k].head(g.ngrid).cast<Cplx>();
    for (int c = 0; c < g.dim_n; ++c) {
      w[c][k] = g.w_full(st.samples[k], c).cast<Cplx>();
      gphi[c][k] = g.D[c] * phi[k];
    }
  }
  for (int m : {1, 2}) {
    VecR E = triple_norm_sq_series(g, phi, m) / g2;
    for (int c = 0; c < g.dim_n; ++c) E += triple_norm_sq_series(g, w[c], m);
    VecR D = VecR::Zero(nt);
    for (int c = 0; c < g.dim_n; ++c)
      D += (pr.nu * pr.nu / nsum) * triple_norm_sq_series(g, w[c], m + 1);
    for (int c = 0; c < g.dim_n; ++c)
      D += (1.0 / nsum) * triple_norm_sq_series(g, gphi[c], m - 1);
    if (m % 2 == 0 && nt > 1) {  // static samples have no time derivative
      std::vector<VecC> dphi = phi;
      for (int j = 0; j < m / 2; ++j) dphi = time_derivative(dphi);
      for (int k = 0; k < nt; ++k) D(k) += (nsum / (g2 * g2)) * hs_norm_sq(g, dphi[k], 0);
    }
    if (m == 1) {
      er.sup_E1 = E.maxCoeff();
      er.avg_D1 = D.mean();
    } else {
      er.sup_E2 = E.maxCoeff();
      er.avg_D2 = D.mean();
    }
  }
  er.sup_amp = st.sup_amp();
  return er;
}

Real energy_m_sup(const CellGrid& g, const Params& pr, const PeriodicState& st, int m) {
  const int nt = int(st.samples.size());
  std::vector<VecC> phi(nt);
  for (int k = 0; k < nt; ++k) phi[k] = st.samples[k].head(g.ngrid).cast<Cplx>();
  VecR E = triple_norm_sq_series(g, phi, m) / (pr.gamma * pr.gamma);
  for (int c = 0; c < g.dim_n; ++c) {
    std::vector<VecC> wc(nt);
    for (int k = 0; k < nt; ++k) wc[k] = g.w_full(st.samples[k], c).cast<Cplx>();
    E += triple_norm_sq_series(g, wc, m);
  }
  return E.maxCoeff();
}

} // namespace floqns
