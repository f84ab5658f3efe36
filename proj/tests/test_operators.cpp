#include <doctest.h>

#include "floqns/operators.hpp"
#include "floqns/floquet.hpp"
#include "floqns/norms.hpp"
#include "helpers.hpp"
#include <cmath>

using namespace floqns;
using tst::tiny_grid;

namespace {

VecR eta1(Real v) { return VecR::Constant(1, v); }

// a smooth in-range state snapshot to linearize about
DofR smooth_snapshot(const CellGrid& g, Real amp) {
  DofR u = DofR::Zero(g.ndof);
  VecR w0(g.ngrid), w1(g.ngrid);
  for (int gi = 0; gi < g.ngrid; ++gi) {
    Real x = g.coords[0](gi), z = g.coords[1](gi);
    u(gi) = amp * std::cos(x) * (0.3 + z * z * (1 - z));
    w0(gi) = amp * std::sin(x) * z * (1 - z);
    w1(gi) = amp * std::cos(2 * x) * z * z * (1 - z) * (1 - z);
  }
  g.set_w(u, 0, w0);
  g.set_w(u, 1, w1);
  return ModeFilter(g).projected(u);
}

} // namespace

TEST_SUITE("operators") {

TEST_CASE("trivial operator acts by the flat-state block form") {
  const CellGrid g = tiny_grid();
  const OperatorAtoms at(g);
  const Params pr = tst::base_params();
  const CoeffSlice s = trivial_slice(g);
  const VecR e0 = eta1(0.0);

  // phi = smooth scalar, w = 0: only the pressure gradient survives,
  // momentum rows get grad(phi) (unit p'(rho)/rho), mass row gets nothing
  DofC u = DofC::Zero(g.ndof);
  for (int gi = 0; gi < g.ngrid; ++gi) {
    Real x = g.coords[0](gi), z = g.coords[1](gi);
    u(gi) = std::sin(x) * (z - 0.5);
  }
  DofC Lu = apply_L(g, at, s, e0, pr, u);
  CHECK(g.phi_of(Lu).cwiseAbs().maxCoeff() < 1e-11);
  VecC gphi_x = g.D[0] * g.phi_of(u), gphi_z = g.D[1] * g.phi_of(u);
  VecC got_x = g.w_full(Lu, 0), got_z = g.w_full(Lu, 1);
  for (int k = 0; k < g.nwi; ++k) {
    int gi = g.interior[k];
    CHECK(std::abs(got_x(gi) - gphi_x(gi)) < 1e-10);
    CHECK(std::abs(got_z(gi) - gphi_z(gi)) < 1e-10);
  }

  // phi = 0, w smooth: mass row gamma^2 div w, momentum rows -nu Lap w - nut grad div w
  DofC v = DofC::Zero(g.ndof);
  VecC wx(g.ngrid), wz(g.ngrid);
  for (int gi = 0; gi < g.ngrid; ++gi) {
    Real x = g.coords[0](gi), z = g.coords[1](gi);
    wx(gi) = std::cos(x) * z * (1 - z);
    wz(gi) = std::sin(x) * z * z * (1 - z) * (1 - z);
  }
  g.set_w(v, 0, wx);
  g.set_w(v, 1, wz);
  DofC Lv = apply_L(g, at, s, e0, pr, v);

  VecC div = g.D[0] * g.w_full(v, 0) + g.D[1] * g.w_full(v, 1);
  CHECK((g.phi_of(Lv) - pr.gamma * pr.gamma * div).cwiseAbs().maxCoeff() < 1e-9);

  const MatR Lap = at.Lap;
  VecC visc_x = -pr.nu * (Lap * g.w_full(v, 0)) - pr.nu_tilde * (g.D[0] * div);
  VecC visc_z = -pr.nu * (Lap * g.w_full(v, 1)) - pr.nu_tilde * (g.D[1] * div);
  VecC gx = g.w_full(Lv, 0), gz = g.w_full(Lv, 1);
  for (int k = 0; k < g.nwi; ++k) {
    int gi = g.interior[k];
    CHECK(std::abs(gx(gi) - visc_x(gi)) < 1e-8);
    CHECK(std::abs(gz(gi) - visc_z(gi)) < 1e-8);
  }
}

TEST_CASE("assembled matrix matches the matrix-free action") {
  const CellGrid g = tiny_grid();
  const OperatorAtoms at(g);
  const Params pr = tst::base_params(1e-4);
  const CoeffSlice s = make_slice(g, at, pr, smooth_snapshot(g, 1e-3));

  for (Real ev : {0.0, 0.07}) {
    const VecR eta = eta1(ev);
    const MatC L = assemble_L(g, at, s, eta, pr);
    for (unsigned seed : {1u, 2u}) {
      DofC u = tst::random_cvec(g.ndof, 70 + seed);
      CHECK(((L * u) - apply_L(g, at, s, eta, pr, u)).cwiseAbs().maxCoeff() < 1e-9);
    }
  }
}

TEST_CASE("quasimomentum expansion is exact in eta") {
  const CellGrid g = tiny_grid();
  const OperatorAtoms at(g);
  const Params pr = tst::base_params(1e-4);
  const CoeffSlice s = make_slice(g, at, pr, smooth_snapshot(g, 1e-3));
  const VecR eta = eta1(0.23);

  MatC Lsum = assemble_L(g, at, s, eta1(0.0), pr);
  Lsum += eta(0) * assemble_B1(g, at, s, 0, pr);
  Lsum += eta(0) * eta(0) * assemble_B2(g, s, 0, 0, pr);
  const MatC Leta = assemble_L(g, at, s, eta, pr);
  Real scale = Leta.cwiseAbs().maxCoeff();
  CHECK((Leta - Lsum).cwiseAbs().maxCoeff() < 1e-10 * scale);

  // B1 action agrees with its assembled form
  DofC u = tst::random_cvec(g.ndof, 81);
  MatC B1 = assemble_B1(g, at, s, 0, pr);
  CHECK(((B1 * u) - apply_B1(g, s, 0, pr, u)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("first-order block is i times a real matrix") {
  const CellGrid g = tiny_grid();
  const OperatorAtoms at(g);
  const Params pr = tst::base_params(1e-4);
  const CoeffSlice s = make_slice(g, at, pr, smooth_snapshot(g, 1e-3));
  MatC B1 = assemble_B1(g, at, s, 0, pr);
  CHECK(B1.real().cwiseAbs().maxCoeff() < 1e-12 * B1.cwiseAbs().maxCoeff());
}

TEST_CASE("second-order block of the flat state is the viscosity stencil") {
  const CellGrid g = tiny_grid();
  const Params pr = tst::base_params();
  const CoeffSlice s = trivial_slice(g);
  const MatC B2 = assemble_B2(g, s, 0, 0, pr);

  DofC u = tst::random_cvec(g.ndof, 90);
  DofC r = B2 * u;
  // phi rows vanish; horizontal w picks up (nu + nut), vertical w picks up nu
  CHECK(g.phi_of(r).cwiseAbs().maxCoeff() < 1e-13);
  VecC wx = g.w_full(u, 0), wz = g.w_full(u, 1);
  VecC rx = g.w_full(r, 0), rz = g.w_full(r, 1);
  for (int k = 0; k < g.nwi; ++k) {
    int gi = g.interior[k];
    CHECK(std::abs(rx(gi) - (pr.nu + pr.nu_tilde) * wx(gi)) < 1e-11);
    CHECK(std::abs(rz(gi) - pr.nu * wz(gi)) < 1e-11);
  }
}

TEST_CASE("discrete mass functional annihilates the whole range") {
  const CellGrid g = tiny_grid();
  const OperatorAtoms at(g);
  const Params pr = tst::base_params(1e-4);
  const CoeffSlice s = make_slice(g, at, pr, smooth_snapshot(g, 2e-3));

  // <phi row of L u> = 0 for every u at eta 0: the mass row is a divergence
  // of fields that vanish at the walls, and the quadrature differentiates
  // exactly; this holds about computed states too
  for (const CoeffSlice* sl : {&s, nullptr}) {
    const CoeffSlice triv = trivial_slice(g);
    const CoeffSlice& use = sl ? *sl : triv;
    for (unsigned seed : {5u, 6u}) {
      DofC u = tst::random_cvec(g.ndof, 95 + seed);
      DofC Lu = apply_L(g, at, use, eta1(0.0), pr, u);
      Cplx mass = g.average(g.phi_of(Lu));
      CHECK(std::abs(mass) < 1e-10 * Lu.cwiseAbs().maxCoeff());
    }
  }
}

TEST_CASE("weighted adjoint: pairing identity, involution, zero mode") {
  const CellGrid g = tiny_grid();
  const OperatorAtoms at(g);
  const Params pr = tst::base_params();
  const CoeffSlice s = trivial_slice(g);
  // adjoint weight carries the quadrature as well as the state factors
  VecR pq(g.ndof);
  pq.head(g.ngrid) = g.wq;
  for (int c = 0; c < g.dim_n; ++c)
    for (int k = 0; k < g.nwi; ++k) pq(g.dof_w(c, k)) = g.wq(g.interior[k]);
  const VecR wd = pq.cwiseProduct(weight_diag(g, s, pr.gamma));
  const MatC L = assemble_L(g, at, s, eta1(0.05), pr);
  const MatC Ls = adjoint_with_weight(L, wd);

  // <L u, v>_W = <u, L* v>_W
  DofC u = tst::random_cvec(g.ndof, 101), v = tst::random_cvec(g.ndof, 102);
  Cplx a = 0, b = 0;
  DofC Lu = L * u, Lsv = Ls * v;
  for (int i = 0; i < g.ndof; ++i) {
    a += wd(i) * Lu(i) * std::conj(v(i));
    b += wd(i) * u(i) * std::conj(Lsv(i));
  }
  CHECK(std::abs(a - b) < 1e-10 * std::abs(a));

  // involution
  CHECK((adjoint_with_weight(Ls, wd) - L).cwiseAbs().maxCoeff() < 1e-10);

  // the packed adjoint zero mode kills L* at eta = 0 exactly
  const MatC L0 = assemble_L(g, at, s, eta1(0.0), pr);
  const DofC us = ustar_packed(g, s, pr.gamma);
  CHECK((adjoint_with_weight(L0, wd) * us).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("spectra come in conjugate pairs across eta reflection") {
  const CellGrid g = tiny_grid();
  const OperatorAtoms at(g);
  const Params pr = tst::base_params();
  const CoeffSlice s = trivial_slice(g);

  auto sorted = [](VecC v) {
    std::vector<Cplx> x(v.data(), v.data() + v.size());
    std::sort(x.begin(), x.end(), [](Cplx p, Cplx q) {
      if (std::abs(p.real() - q.real()) > 1e-8) return p.real() < q.real();
      return p.imag() < q.imag();
    });
    return x;
  };
  EigResult ep = dense_eig(assemble_L(g, at, s, eta1(0.09), pr), false);
  EigResult em = dense_eig(assemble_L(g, at, s, eta1(-0.09), pr), false);
  auto sp = sorted(ep.values), sm = sorted(em.values);
  for (auto& c : sm) c = std::conj(c);
  std::sort(sm.begin(), sm.end(), [](Cplx p, Cplx q) {
    if (std::abs(p.real() - q.real()) > 1e-8) return p.real() < q.real();
    return p.imag() < q.imag();
  });
  Real err = 0;
  for (size_t i = 0; i < sp.size(); ++i) err = std::max(err, std::abs(sp[i] - sm[i]));
  CHECK(err < 1e-6);
}

TEST_CASE("divergence right inverse") {
  const CellGrid g = tiny_grid();
  const BogovskiiOp B(g);

  for (unsigned seed : {7u, 8u, 9u}) {
    VecR f = tst::random_vec(g.ngrid, 110 + seed);
    f.array() -= g.average(f); // mean-zero source
    auto w = B.apply(f);
    VecR div = g.D[0] * w[0] + g.D[1] * w[1];
    CHECK((div - f).norm() < 1e-10 * f.norm());
    for (int c = 0; c < g.dim_n; ++c)
      for (int gi = 0; gi < g.ngrid; ++gi)
        if (g.is_wall(gi)) CHECK(std::abs(w[c](gi)) < 1e-12);
  }

  // complex linearity through the real solver
  VecC fc = tst::random_cvec(g.ngrid, 120);
  fc.array() -= g.average(fc);
  auto wc = B.apply(fc);
  auto wr = B.apply(VecR(fc.real()));
  auto wi = B.apply(VecR(fc.imag()));
  for (int c = 0; c < g.dim_n; ++c)
    CHECK((wc[c] - (wr[c].cast<Cplx>() + Cplx(0, 1) * wi[c].cast<Cplx>()))
              .cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("modified inner product stays comparable to the weighted one") {
  const CellGrid g = tiny_grid();
  const OperatorAtoms at(g);
  const Params pr = tst::base_params(1e-4);
  const CoeffSlice s = make_slice(g, at, pr, smooth_snapshot(g, 1e-3));
  const BogovskiiOp B(g);

  const Real delta = bogovskii_delta(g, s, pr, B);
  const Real dmax = 0.25 * std::min({1.0 / (pr.nu + pr.nu_tilde),
                                     pr.nu / (pr.gamma * pr.gamma), 1.0 / pr.gamma});
  CHECK(delta > 0);
  CHECK(delta <= dmax * (1 + 1e-12));

  for (unsigned seed : {13u, 14u}) {
    DofC u = tst::random_cstate(g, 130 + seed);
    // the delta product needs a mean-zero phi block
    VecC phi = g.phi_of(u);
    phi.array() -= g.average(phi);
    u.head(g.ngrid) = phi;
    Real base = inner_weighted(g, u, u, s.rho, s.dp, pr.gamma).real();
    Real mod = inner_bogovskii(g, u, u, s, pr.gamma, delta, B).real();
    CHECK(mod > 0.5 * base);
    CHECK(mod < 1.5 * base);
  }

  // delta = 0 collapses to the weighted product
  DofC u = tst::random_cstate(g, 140);
  VecC phi = g.phi_of(u);
  phi.array() -= g.average(phi);
  u.head(g.ngrid) = phi;
  Cplx a = inner_bogovskii(g, u, u, s, pr.gamma, 0.0, B);
  Cplx b = inner_weighted(g, u, u, s.rho, s.dp, pr.gamma);
  CHECK(std::abs(a - b) < 1e-12 * std::abs(b));
}

} // TEST_SUITE
