#include "floqns/grid.hpp"
#include <cmath>
#include <stdexcept>

namespace floqns {

MatR fourier_diff(int nh, Real alpha) {
  if (nh < 4 || nh % 2 != 0) throw std::invalid_argument("grid: nh must be even and >= 4");
  MatC F(nh, nh), Finv(nh, nh);
  for (int k = 0; k < nh; ++k)
    for (int q = 0; q < nh; ++q) {
      F(k, q) = std::exp(-2.0 * pi * iu * Real(k * q) / Real(nh));
      Finv(q, k) = std::exp(2.0 * pi * iu * Real(k * q) / Real(nh)) / Real(nh);
    }
  VecC sym = VecC::Zero(nh);
  for (int k = 0; k < nh; ++k) {
    int kk = (k <= nh / 2) ? k : k - nh;
    if (kk == nh / 2) kk = 0; // Nyquist dropped from first derivatives
    sym(k) = iu * alpha * Real(kk);
  }
  MatC Dc = Finv * sym.asDiagonal() * F;
  return Dc.real();
}

void chebyshev_layer(int nz, VecR& z, MatR& Dz, VecR& wz) {
  if (nz < 5) throw std::invalid_argument("grid: nz must be >= 5");
  const int N = nz - 1;
  VecR xi(nz);
  for (int i = 0; i <= N; ++i) xi(i) = std::cos(pi * i / N);
  z.resize(nz);
  for (int i = 0; i <= N; ++i) z(i) = 0.5 * (1.0 - xi(i));

  MatR Dxi(nz, nz);
  auto c = [&](int i) { return (i == 0 || i == N) ? 2.0 : 1.0; };
  for (int i = 0; i <= N; ++i)
    for (int j = 0; j <= N; ++j)
      if (i != j)
        Dxi(i, j) = (c(i) / c(j)) * (((i + j) % 2 == 0) ? 1.0 : -1.0) / (xi(i) - xi(j));
  for (int i = 0; i <= N; ++i) {
    Real s = 0.0;
    for (int j = 0; j <= N; ++j)
      if (j != i) s += Dxi(i, j);
    Dxi(i, i) = -s; // negative sum trick
  }
  Dz = -2.0 * Dxi; // z = (1 - xi)/2

  // Clenshaw-Curtis on [0,1] via Chebyshev moments: solve w^T T = m^T
  MatR T(nz, nz);
  VecR m(nz);
  for (int k = 0; k <= N; ++k) {
    for (int i = 0; i <= N; ++i) T(k, i) = std::cos(k * pi * i / N); // T_k(xi_i)
    m(k) = (k % 2 == 1) ? 0.0 : 2.0 / (1.0 - Real(k) * Real(k));
    if (k == 1) m(k) = 0.0;
  }
  wz = T.colPivHouseholderQr().solve(m);
  wz *= 0.5; // [-1,1] -> [0,1]
}

CellGrid CellGrid::make(int dim_n, int nh, int nz, std::vector<Real> alpha) {
  if (dim_n != 2 && dim_n != 3) throw std::invalid_argument("grid: dim_n must be 2 or 3");
  if ((int)alpha.size() != dim_n - 1) throw std::invalid_argument("grid: alpha needs n-1 entries");

  CellGrid g;
  g.dim_n = dim_n;
  g.nh = nh;
  g.nz = nz;
  g.alpha = std::move(alpha);

  const int hd = g.hdims();
  g.nH = 1;
  for (int j = 0; j < hd; ++j) g.nH *= nh;
  g.ngrid = g.nH * nz;
  g.nzi = nz - 2;
  g.nwi = g.nH * g.nzi;
  g.ndof = g.ngrid + dim_n * g.nwi;

  chebyshev_layer(nz, g.z, g.Dz, g.wz);
  g.Dh.resize(hd);
  for (int j = 0; j < hd; ++j) g.Dh[j] = fourier_diff(nh, g.alpha[j]);

  // full-grid first derivatives and coordinates; horizontal index ih = i0 + nh*i1
  g.D.assign(dim_n, MatR::Zero(g.ngrid, g.ngrid));
  g.coords.assign(dim_n, VecR::Zero(g.ngrid));
  g.wq.resize(g.ngrid);

  auto hcomp = [&](int ih, int j) { return (j == 0) ? ih % nh : ih / nh; };
  for (int ih = 0; ih < g.nH; ++ih)
    for (int iz = 0; iz < nz; ++iz) {
      const int a = g.gidx(ih, iz);
      g.wq(a) = g.wz(iz) / Real(g.nH);
      g.coords[dim_n - 1](a) = g.z(iz);
      for (int j = 0; j < hd; ++j)
        g.coords[j](a) = (2.0 * pi / g.alpha[j]) * hcomp(ih, j) / Real(nh);
      for (int kz = 0; kz < nz; ++kz) g.D[dim_n - 1](a, g.gidx(ih, kz)) = g.Dz(iz, kz);
      for (int j = 0; j < hd; ++j)
        for (int q = 0; q < nh; ++q) {
          int ih2 = (j == 0) ? (ih - hcomp(ih, 0) + q) : (ih - nh * hcomp(ih, 1) + nh * q);
          g.D[j](a, g.gidx(ih2, iz)) += g.Dh[j](hcomp(ih, j), q);
        }
    }

  g.interior.reserve(g.nwi);
  for (int ih = 0; ih < g.nH; ++ih)
    for (int iz = 1; iz < nz - 1; ++iz) g.interior.push_back(g.gidx(ih, iz));

  return g;
}

ModeFilter::ModeFilter(const CellGrid& g_) : g(&g_) {
  const int nz = g->nz;
  tz.resize(nz);
  cz.resize(nz);
  for (int i = 0; i < nz; ++i) {
    tz(i) = (i % 2 == 0) ? 1.0 : -1.0;  // T_{nz-1} at the CGL nodes
    cz(i) = ((i == 0 || i == nz - 1) ? 0.5 : 1.0) * tz(i);
  }
  cz /= cz.dot(tz);
  tz.array() -= g->wz.dot(tz);  // mass-neutral removal direction
  nyq = g->nh % 2 == 0;
}

namespace {

// subtract the unpaired Fourier mode along horizontal direction j from a
// full-grid scalar
void kill_nyquist(const CellGrid& g, int j, VecC& f) {
  const int nh = g.nh;
  const int stride = (j == 0) ? g.nz : g.nz * nh;      // grid step along j
  const int nlines = g.ngrid / nh;
  for (int line = 0; line < nlines; ++line) {
    // base index of the line: all nodes with the j-th component zero
    int base = (j == 0) ? (line / g.nz) * (g.nz * nh) + line % g.nz : line;
    Cplx m = 0.0;
    for (int q = 0; q < nh; ++q) m += (q % 2 ? -1.0 : 1.0) * f(base + q * stride);
    m /= Real(nh);
    for (int q = 0; q < nh; ++q) f(base + q * stride) -= (q % 2 ? -1.0 : 1.0) * m;
  }
}

void filter_scalar(const CellGrid& g, const ModeFilter& mf, VecC& f, bool top_z) {
  if (top_z)
    for (int ih = 0; ih < g.nH; ++ih) {
      Cplx coef = 0.0;
      for (int iz = 0; iz < g.nz; ++iz) coef += mf.cz(iz) * f(g.gidx(ih, iz));
      for (int iz = 0; iz < g.nz; ++iz) f(g.gidx(ih, iz)) -= coef * mf.tz(iz);
    }
  if (mf.nyq)
    for (int j = 0; j < g.hdims(); ++j) kill_nyquist(g, j, f);
}

} // namespace

void ModeFilter::project(DofC& u) const {
  VecC phi = u.head(g->ngrid);
  filter_scalar(*g, *this, phi, true);
  u.head(g->ngrid) = phi;
  for (int c = 0; c < g->dim_n; ++c) {
    VecC w = g->w_full(u, c);
    filter_scalar(*g, *this, w, false);
    g->set_w(u, c, w);
  }
}

void ModeFilter::project(DofR& u) const {
  DofC uc = u.cast<Cplx>();
  project(uc);
  u = uc.real();
}

int ModeFilter::dropped() const {
  if (!nyq) return g->nH;  // only the top z mode of phi, every horizontal mode
  int keep = 1;
  for (int j = 0; j < g->hdims(); ++j) keep *= g->nh - 1;
  const int cut = g->nH - keep;  // horizontal modes with a Nyquist component
  return cut * g->nz + keep + g->dim_n * cut * g->nzi;
}

MatR ModeFilter::matrix() const {
  MatR P(g->ndof, g->ndof);
  DofR e = DofR::Zero(g->ndof);
  for (int i = 0; i < g->ndof; ++i) {
    e(i) = 1.0;
    project(e);
    P.col(i) = e;
    e.setZero();
  }
  return P;
}

VecC CellGrid::w_full(const DofC& u, int c) const {
  VecC f = VecC::Zero(ngrid);
  for (int k = 0; k < nwi; ++k) f(interior[k]) = u(dof_w(c, k));
  return f;
}
VecR CellGrid::w_full(const DofR& u, int c) const {
  VecR f = VecR::Zero(ngrid);
  for (int k = 0; k < nwi; ++k) f(interior[k]) = u(dof_w(c, k));
  return f;
}
void CellGrid::set_w(DofC& u, int c, const VecC& full) const {
  for (int k = 0; k < nwi; ++k) u(dof_w(c, k)) = full(interior[k]);
}
void CellGrid::set_w(DofR& u, int c, const VecR& full) const {
  for (int k = 0; k < nwi; ++k) u(dof_w(c, k)) = full(interior[k]);
}

} // namespace floqns
