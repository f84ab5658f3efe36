#include "floqns/operators.hpp"

#include <random>
#include <stdexcept>

#include "floqns/norms.hpp"

namespace floqns {

CoeffSlice trivial_slice(const CellGrid& g) {
  CoeffSlice s;
  s.rho = VecR::Ones(g.ngrid);
  s.dp = VecR::Ones(g.ngrid);  // p'(1) = 1 by normalization
  s.v.assign(g.dim_n, VecR::Zero(g.ngrid));
  s.visc.assign(g.dim_n, VecR::Zero(g.ngrid));
  s.dv.assign(g.dim_n, std::vector<VecR>(g.dim_n, VecR::Zero(g.ngrid)));
  return s;
}

CoeffSlice make_slice(const CellGrid& g, const OperatorAtoms& at, const Params& pr,
                      const DofR& u) {
  CoeffSlice s;
  const Real g2 = pr.gamma * pr.gamma;
  s.rho = VecR::Ones(g.ngrid) + u.head(g.ngrid) / g2;
  if (s.rho.minCoeff() <= 0.0) throw std::runtime_error("slice: nonpositive density");
  s.dp.resize(g.ngrid);
  for (int i = 0; i < g.ngrid; ++i) s.dp(i) = pr.pressure.dp(s.rho(i));
  s.v.resize(g.dim_n);
  for (int c = 0; c < g.dim_n; ++c) s.v[c] = g.w_full(u, c);
  VecR div = VecR::Zero(g.ngrid);
  s.dv.assign(g.dim_n, std::vector<VecR>(g.dim_n));
  for (int c = 0; c < g.dim_n; ++c)
    for (int d = 0; d < g.dim_n; ++d) {
      s.dv[c][d] = g.D[d] * s.v[c];
      if (c == d) div += s.dv[c][d];
    }
  s.visc.resize(g.dim_n);
  for (int c = 0; c < g.dim_n; ++c)
    s.visc[c] = pr.nu * (at.Lap * s.v[c]) + pr.nu_tilde * (g.D[c] * div);
  return s;
}

OperatorAtoms::OperatorAtoms(const CellGrid& g) : g(&g) {
  DD.assign(g.dim_n, std::vector<MatR>(g.dim_n));
  for (int c = 0; c < g.dim_n; ++c)
    for (int d = 0; d < g.dim_n; ++d) DD[c][d] = g.D[c] * g.D[d];
  Lap = MatR::Zero(g.ngrid, g.ngrid);
  for (int j = 0; j < g.dim_n; ++j) Lap += DD[j][j];
}

namespace {

Real eta_of(const VecR& eta, int j, int hd) { return j < hd ? eta(j) : 0.0; }

// D_j + i eta_j on the full grid
MatC shifted_D(const CellGrid& g, const VecR& eta, int j) {
  MatC M = g.D[j].cast<Cplx>();
  const Real e = eta_of(eta, j, g.hdims());
  if (e != 0.0) M += iu * e * MatC::Identity(g.ngrid, g.ngrid);
  return M;
}

} // namespace

MatC assemble_L(const CellGrid& g, const OperatorAtoms& at, const CoeffSlice& s,
                const VecR& eta, const Params& pr) {
  const int n = g.dim_n, hd = g.hdims(), ng = g.ngrid, nwi = g.nwi;
  const Real g2 = pr.gamma * pr.gamma;
  if (int(eta.size()) != hd) throw std::invalid_argument("assemble_L: eta size mismatch");

  std::vector<MatC> De(n);
  for (int j = 0; j < n; ++j) De[j] = shifted_D(g, eta, j);

  MatC LapE = at.Lap.cast<Cplx>();
  for (int j = 0; j < hd; ++j) {
    const Real e = eta(j);
    if (e != 0.0)
      LapE += 2.0 * iu * e * g.D[j].cast<Cplx>() - (e * e) * MatC::Identity(ng, ng);
  }

  const VecC rho = s.rho.cast<Cplx>();
  const VecC dpor = (s.dp.array() / s.rho.array()).matrix().cast<Cplx>();
  const VecC nuor = (pr.nu / s.rho.array()).matrix().cast<Cplx>();
  const VecC ntor = (pr.nu_tilde / s.rho.array()).matrix().cast<Cplx>();

  // advection by the reference velocity, shared by every diagonal w block
  MatC conv = MatC::Zero(ng, ng);
  for (int e = 0; e < n; ++e) conv += s.v[e].cast<Cplx>().asDiagonal() * De[e];

  MatC L = MatC::Zero(g.ndof, g.ndof);

  // mass rows: div_eta(v rho') phi + gamma^2 div_eta(rho w)
  for (int j = 0; j < n; ++j)
    L.topLeftCorner(ng, ng) += De[j] * s.v[j].cast<Cplx>().asDiagonal();
  for (int c = 0; c < n; ++c) {
    MatC M = g2 * (De[c] * rho.asDiagonal());
    L.block(0, g.dof_w(c, 0), ng, nwi) = M(Eigen::all, g.interior);
  }

  // momentum rows
  for (int c = 0; c < n; ++c) {
    // pressure: grad_eta((p'/rho) phi) plus the viscous background correction
    MatC M21 = De[c] * dpor.asDiagonal();
    L.block(g.dof_w(c, 0), 0, nwi, ng) = M21(g.interior, Eigen::all);
    for (int k = 0; k < nwi; ++k) {
      const int gi = g.interior[k];
      L(g.dof_w(c, k), gi) += s.visc[c](gi) / (g2 * s.rho(gi) * s.rho(gi));
    }
    for (int d = 0; d < n; ++d) {
      MatC edc = (c < hd ? iu * eta_of(eta, c, hd) : Cplx(0)) * g.D[d].cast<Cplx>();
      MatC DcDd = at.DD[c][d].cast<Cplx>() + edc +
                  iu * eta_of(eta, d, hd) * g.D[c].cast<Cplx>() -
                  eta_of(eta, c, hd) * eta_of(eta, d, hd) * MatC::Identity(ng, ng);
      MatC blk = MatC(ntor.asDiagonal()) * (-DcDd);
      blk += MatC(s.dv[c][d].cast<Cplx>().asDiagonal());
      if (c == d) {
        blk += MatC(nuor.asDiagonal()) * (-LapE);
        blk += conv;
      }
      L.block(g.dof_w(c, 0), g.dof_w(d, 0), nwi, nwi) = blk(g.interior, g.interior);
    }
  }
  return L;
}

DofC apply_L(const CellGrid& g, const OperatorAtoms& at, const CoeffSlice& s,
             const VecR& eta, const Params& pr, const DofC& u) {
  const int n = g.dim_n, hd = g.hdims(), ng = g.ngrid;
  const Real g2 = pr.gamma * pr.gamma;
  auto Deta = [&](int j, const VecC& f) -> VecC {
    VecC r = g.D[j] * f;
    if (j < hd && eta(j) != 0.0) r += iu * eta(j) * f;
    return r;
  };
  const VecC phi = u.head(ng);
  std::vector<VecC> w(n);
  for (int c = 0; c < n; ++c) w[c] = g.w_full(u, c);

  DofC out = DofC::Zero(g.ndof);
  VecC mass = VecC::Zero(ng);
  for (int j = 0; j < n; ++j)
    mass += Deta(j, s.v[j].cast<Cplx>().cwiseProduct(phi));
  for (int c = 0; c < n; ++c)
    mass += g2 * Deta(c, s.rho.cast<Cplx>().cwiseProduct(w[c]));
  out.head(ng) = mass;

  VecC divw = VecC::Zero(ng);
  for (int d = 0; d < n; ++d) divw += Deta(d, w[d]);
  for (int c = 0; c < n; ++c) {
    VecC mom = Deta(c, (s.dp.array() / s.rho.array()).matrix().cast<Cplx>().cwiseProduct(phi));
    mom += (s.visc[c].array() / (g2 * s.rho.array().square())).matrix().cast<Cplx>().cwiseProduct(phi);
    VecC lap = at.Lap * w[c];
    for (int h = 0; h < hd; ++h)
      if (eta(h) != 0.0) lap += 2.0 * iu * eta(h) * (g.D[h] * w[c]) - eta(h) * eta(h) * w[c];
    mom -= (pr.nu / s.rho.array()).matrix().cast<Cplx>().cwiseProduct(lap);
    mom -= (pr.nu_tilde / s.rho.array()).matrix().cast<Cplx>().cwiseProduct(Deta(c, divw));
    for (int e = 0; e < n; ++e)
      mom += s.v[e].cast<Cplx>().cwiseProduct(Deta(e, w[c]));
    for (int d = 0; d < n; ++d)
      mom += s.dv[c][d].cast<Cplx>().cwiseProduct(w[d]);
    for (int k = 0; k < g.nwi; ++k) out(g.dof_w(c, k)) = mom(g.interior[k]);
  }
  return out;
}

DofC apply_B1(const CellGrid& g, const CoeffSlice& s, int j, const Params& pr, const DofC& u) {
  const int n = g.dim_n, ng = g.ngrid;
  const Real g2 = pr.gamma * pr.gamma;
  const VecC phi = u.head(ng);
  std::vector<VecC> w(n);
  for (int c = 0; c < n; ++c) w[c] = g.w_full(u, c);

  DofC out = DofC::Zero(g.ndof);
  out.head(ng) = iu * (s.v[j].cast<Cplx>().cwiseProduct(phi) +
                       g2 * s.rho.cast<Cplx>().cwiseProduct(w[j]));
  VecC divw_like = VecC::Zero(ng);
  for (int d = 0; d < n; ++d) divw_like += g.D[d] * w[d];
  for (int c = 0; c < n; ++c) {
    VecC mom = VecC::Zero(ng);
    if (c == j) mom += (s.dp.array() / s.rho.array()).matrix().cast<Cplx>().cwiseProduct(phi);
    mom += -2.0 * (pr.nu / s.rho.array()).matrix().cast<Cplx>().cwiseProduct(VecC(g.D[j] * w[c]));
    mom += s.v[j].cast<Cplx>().cwiseProduct(w[c]);
    if (c == j) mom -= (pr.nu_tilde / s.rho.array()).matrix().cast<Cplx>().cwiseProduct(divw_like);
    mom -= (pr.nu_tilde / s.rho.array()).matrix().cast<Cplx>().cwiseProduct(VecC(g.D[c] * w[j]));
    for (int k = 0; k < g.nwi; ++k) out(g.dof_w(c, k)) = iu * mom(g.interior[k]);
  }
  return out;
}

MatC assemble_B1(const CellGrid& g, const OperatorAtoms& at, const CoeffSlice& s,
                 int j, const Params& pr) {
  const int n = g.dim_n, ng = g.ngrid, nwi = g.nwi;
  const Real g2 = pr.gamma * pr.gamma;
  if (j < 0 || j >= g.hdims()) throw std::invalid_argument("assemble_B1: bad direction");

  MatC B = MatC::Zero(g.ndof, g.ndof);
  for (int gi = 0; gi < ng; ++gi) B(gi, gi) = iu * s.v[j](gi);
  for (int k = 0; k < nwi; ++k) {
    const int gi = g.interior[k];
    B(gi, g.dof_w(j, k)) = iu * g2 * s.rho(gi);
    B(g.dof_w(j, k), gi) = iu * s.dp(gi) / s.rho(gi);
  }
  for (int c = 0; c < n; ++c) {
    const VecC nuor = (pr.nu / s.rho.array()).matrix().cast<Cplx>();
    const VecC ntor = (pr.nu_tilde / s.rho.array()).matrix().cast<Cplx>();
    for (int d = 0; d < n; ++d) {
      MatC blk = MatC::Zero(ng, ng);
      if (c == d) {
        blk += -2.0 * iu * (MatC(nuor.asDiagonal()) * g.D[j].cast<Cplx>());
        blk += iu * MatC(s.v[j].cast<Cplx>().asDiagonal());
      }
      if (c == j) blk += -iu * (MatC(ntor.asDiagonal()) * g.D[d].cast<Cplx>());
      if (d == j) blk += -iu * (MatC(ntor.asDiagonal()) * g.D[c].cast<Cplx>());
      if (!blk.isZero(0.0))
        B.block(g.dof_w(c, 0), g.dof_w(d, 0), nwi, nwi) = blk(g.interior, g.interior);
    }
  }
  (void)at;
  return B;
}

MatC assemble_B2(const CellGrid& g, const CoeffSlice& s, int j, int k, const Params& pr) {
  if (j < 0 || j >= g.hdims() || k < 0 || k >= g.hdims())
    throw std::invalid_argument("assemble_B2: bad direction");
  MatC B = MatC::Zero(g.ndof, g.ndof);
  for (int c = 0; c < g.dim_n; ++c)
    for (int d = 0; d < g.dim_n; ++d) {
      Real coef = 0.0;
      if (j == k && c == d) coef += pr.nu;
      if (c == j && d == k) coef += pr.nu_tilde;
      if (coef == 0.0) continue;
      for (int m = 0; m < g.nwi; ++m)
        B(g.dof_w(c, m), g.dof_w(d, m)) += coef / s.rho(g.interior[m]);
    }
  return B;
}

VecR weight_diag(const CellGrid& g, const CoeffSlice& s, Real gamma) {
  VecR w(g.ndof);
  for (int gi = 0; gi < g.ngrid; ++gi) w(gi) = s.dp(gi) / (gamma * gamma * s.rho(gi));
  for (int c = 0; c < g.dim_n; ++c)
    for (int k = 0; k < g.nwi; ++k) w(g.dof_w(c, k)) = s.rho(g.interior[k]);
  return w;
}

MatC adjoint_with_weight(const MatC& L, const VecR& w) {
  MatC A = L.adjoint();
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j) A(i, j) *= w(j) / w(i);
  return A;
}

DofC ustar_packed(const CellGrid& g, const CoeffSlice& s, Real gamma) {
  DofC u = DofC::Zero(g.ndof);
  for (int gi = 0; gi < g.ngrid; ++gi)
    u(gi) = gamma * gamma * s.rho(gi) / s.dp(gi);
  return u;
}

BogovskiiOp::BogovskiiOp(const CellGrid& g) : g_(&g) {
  OperatorAtoms at(g);
  const int n = g.dim_n, nwi = g.nwi, ng = g.ngrid;
  const int N = n * nwi + ng;
  MatR K = MatR::Zero(N, N);
  for (int c = 0; c < n; ++c) {
    K.block(c * nwi, c * nwi, nwi, nwi) = -MatR(at.Lap(g.interior, g.interior));
    K.block(c * nwi, n * nwi, nwi, ng) = MatR(g.D[c](g.interior, Eigen::all));
    K.block(n * nwi, c * nwi, ng, nwi) = MatR(g.D[c](Eigen::all, g.interior));
  }
  cod_.compute(K);
}

std::vector<VecR> BogovskiiOp::apply(const VecR& f) const {
  const CellGrid& g = *g_;
  Real mean = 0.0, nrm = 0.0;
  for (int i = 0; i < g.ngrid; ++i) {
    mean += g.wq(i) * f(i);
    nrm += g.wq(i) * f(i) * f(i);
  }
  if (std::abs(mean) > 1e-8 * std::sqrt(nrm) + 1e-14)
    throw std::invalid_argument("bogovskii: datum must be mean-zero");
  VecR rhs = VecR::Zero(g.dim_n * g.nwi + g.ngrid);
  rhs.tail(g.ngrid) = f;
  VecR x = cod_.solve(rhs);
  std::vector<VecR> v(g.dim_n, VecR::Zero(g.ngrid));
  for (int c = 0; c < g.dim_n; ++c)
    for (int k = 0; k < g.nwi; ++k) v[c](g.interior[k]) = x(c * g.nwi + k);
  return v;
}

std::vector<VecC> BogovskiiOp::apply(const VecC& f) const {
  auto vr = apply(VecR(f.real()));
  auto vi = apply(VecR(f.imag()));
  std::vector<VecC> v(g_->dim_n);
  for (int c = 0; c < g_->dim_n; ++c) v[c] = vr[c] + iu * vi[c];
  return v;
}

Cplx inner_bogovskii(const CellGrid& g, const DofC& u1, const DofC& u2,
                     const CoeffSlice& s, Real gamma, Real delta, const BogovskiiOp& B) {
  Cplx acc = inner_weighted(g, u1, u2, s.rho, s.dp, gamma);
  auto b1 = B.apply(VecC(u1.head(g.ngrid)));
  auto b2 = B.apply(VecC(u2.head(g.ngrid)));
  for (int c = 0; c < g.dim_n; ++c) {
    const VecC w1 = g.w_full(u1, c), w2 = g.w_full(u2, c);
    for (int i = 0; i < g.ngrid; ++i) {
      acc -= delta * g.wq(i) * w1(i) * std::conj(b2[c](i));
      acc -= delta * g.wq(i) * b1[c](i) * std::conj(w2(i));
    }
  }
  return acc;
}

Real bogovskii_delta(const CellGrid& g, const CoeffSlice& s, const Params& pr,
                     const BogovskiiOp& B, int nprobe, unsigned seed) {
  Real delta = 0.25 * std::min({1.0 / (pr.nu + pr.nu_tilde),
                                pr.nu / (pr.gamma * pr.gamma), 1.0 / pr.gamma});
  std::mt19937 rng(seed);
  std::normal_distribution<Real> nd(0.0, 1.0);
  std::vector<DofC> probes;
  for (int p = 0; p < nprobe; ++p) {
    DofC u(g.ndof);
    for (int i = 0; i < g.ndof; ++i) u(i) = Cplx(nd(rng), nd(rng));
    Cplx m = 0.0;
    for (int i = 0; i < g.ngrid; ++i) m += g.wq(i) * u(i);
    u.head(g.ngrid).array() -= m;
    probes.push_back(std::move(u));
  }
  for (int halving = 0; halving < 60; ++halving) {
    bool ok = true;
    for (const auto& u : probes) {
      const Real base = std::real(inner_weighted(g, u, u, s.rho, s.dp, pr.gamma));
      const Real mod = std::real(inner_bogovskii(g, u, u, s, pr.gamma, delta, B));
      if (!(mod >= 0.5 * base && mod <= 1.5 * base)) { ok = false; break; }
    }
    if (ok) return delta;
    delta *= 0.5;
  }
  throw std::runtime_error("bogovskii_delta: no admissible delta found");
}

} // namespace floqns
