#include <doctest.h>

#include "helpers.hpp"
#include <cmath>

using namespace floqns;
using tst::tiny_grid;

TEST_SUITE("grid") {

TEST_CASE("fourier differentiation is exact below the Nyquist mode") {
  const int nh = 8;
  const Real alpha = 1.0;
  const MatR D = fourier_diff(nh, alpha);
  VecR x(nh);
  for (int i = 0; i < nh; ++i) x(i) = 2.0 * M_PI / (alpha * nh) * i;

  for (int k = 1; k <= nh / 2 - 1; ++k) {
    VecR f = (k * alpha * x.array()).sin();
    VecR df = (k * alpha * x.array()).cos() * (k * alpha);
    CHECK((D * f - df).cwiseAbs().maxCoeff() < 1e-11);
  }

  // derivative of a constant
  CHECK((D * VecR::Ones(nh)).cwiseAbs().maxCoeff() < 1e-12);

  // unpaired Nyquist mode is zeroed by convention
  VecR nyq = (Real(nh / 2) * alpha * x.array()).cos();
  CHECK((D * nyq).cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("chebyshev layer: nodes, derivative, weights") {
  VecR z, wz;
  MatR Dz;
  chebyshev_layer(9, z, Dz, wz);

  CHECK(z(0) == doctest::Approx(0.0));
  CHECK(z(8) == doctest::Approx(1.0));
  CHECK(std::is_sorted(z.data(), z.data() + z.size()));

  // exact derivative of polynomials up to degree nz-1
  for (int m = 0; m <= 8; ++m) {
    VecR f = z.array().pow(m);
    VecR df = m == 0 ? VecR::Zero(9).eval() : VecR(m * z.array().pow(m - 1));
    CHECK((Dz * f - df).cwiseAbs().maxCoeff() < 1e-10);
  }

  // Clenshaw-Curtis on [0,1] integrates degree <= nz-1 exactly, sums to 1
  CHECK(wz.sum() == doctest::Approx(1.0).epsilon(1e-14));
  for (int m = 0; m <= 8; ++m) {
    Real got = wz.dot(VecR(z.array().pow(m)));
    CHECK(got == doctest::Approx(1.0 / (m + 1)).epsilon(1e-13));
  }
}

TEST_CASE("packed layout indexing roundtrip") {
  const CellGrid g = tiny_grid();
  CHECK(g.nH == 8);
  CHECK(g.ngrid == 72);
  CHECK(g.nwi == 8 * 7);
  CHECK(g.ndof == 72 + 2 * 56);

  for (int ih = 0; ih < g.nH; ++ih)
    for (int iz = 0; iz < g.nz; ++iz) {
      int gi = g.gidx(ih, iz);
      CHECK(g.ih_of(gi) == ih);
      CHECK(g.iz_of(gi) == iz);
    }

  int walls = 0;
  for (int gi = 0; gi < g.ngrid; ++gi) walls += g.is_wall(gi);
  CHECK(walls == 2 * g.nH);
  CHECK((int)g.interior.size() == g.nwi);
  for (int k : g.interior) CHECK(!g.is_wall(k));
}

TEST_CASE("cell average and w packing") {
  const CellGrid g = tiny_grid();
  CHECK(g.average(VecR::Ones(g.ngrid)) == doctest::Approx(1.0).epsilon(1e-14));

  // average of sin(x) z over the cell: horizontal mean kills it
  VecR f(g.ngrid);
  for (int gi = 0; gi < g.ngrid; ++gi)
    f(gi) = std::sin(g.coords[0](gi)) * g.coords[1](gi);
  CHECK(std::abs(g.average(f)) < 1e-14);

  // w roundtrip keeps interior values, walls pinned to zero
  DofR u = DofR::Zero(g.ndof);
  VecR full = tst::random_vec(g.ngrid, 11);
  g.set_w(u, 1, full);
  VecR back = g.w_full(u, 1);
  for (int gi = 0; gi < g.ngrid; ++gi)
    CHECK(back(gi) == doctest::Approx(g.is_wall(gi) ? 0.0 : full(gi)));
}

TEST_CASE("mode filter is an idempotent mean-preserving projector") {
  const CellGrid g = tiny_grid();
  const ModeFilter mf(g);
  const MatR P = mf.matrix();

  CHECK((P * P - P).cwiseAbs().maxCoeff() < 1e-13);
  CHECK(std::lround(P.trace()) == g.ndof - mf.dropped());

  // the phi mass functional passes through exactly: P^T wq = wq on phi
  DofR l = DofR::Zero(g.ndof);
  l.head(g.ngrid) = g.wq;
  CHECK((P.transpose() * l - l).cwiseAbs().maxCoeff() < 1e-14);

  // projected(u) and matrix() agree
  DofR u = tst::random_vec(g.ndof, 3);
  CHECK((P * u - mf.projected(u)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("mode filter kills the top phi mode and the Nyquist sector") {
  const CellGrid g = tiny_grid();
  const ModeFilter mf(g);
  DofR u = mf.projected(DofR(tst::random_vec(g.ndof, 5)));

  // top Chebyshev coefficient of every phi column reads zero
  for (int ih = 0; ih < g.nH; ++ih) {
    Real coef = 0;
    for (int iz = 0; iz < g.nz; ++iz) coef += mf.cz(iz) * u(g.gidx(ih, iz));
    CHECK(std::abs(coef) < 1e-13);
  }

  // horizontal Nyquist sector of phi and of each w component reads zero:
  // alternating-sign sum over the nodes of each z line
  auto nyquist_line = [&](const VecR& full, int iz) {
    Real s = 0;
    for (int ih = 0; ih < g.nH; ++ih) s += (ih % 2 ? -1.0 : 1.0) * full(g.gidx(ih, iz));
    return s;
  };
  VecR phi = g.phi_of(u);
  for (int iz = 0; iz < g.nz; ++iz) CHECK(std::abs(nyquist_line(phi, iz)) < 1e-12);
  for (int c = 0; c < g.dim_n; ++c) {
    VecR w = g.w_full(u, c);
    for (int iz = 1; iz < g.nz - 1; ++iz) CHECK(std::abs(nyquist_line(w, iz)) < 1e-12);
  }

  // fields already in the subspace pass through unchanged
  DofR again = mf.projected(u);
  CHECK((again - u).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("mode filter leaves smooth resolved fields nearly intact") {
  const CellGrid g = tiny_grid();
  const ModeFilter mf(g);
  DofR u = DofR::Zero(g.ndof);
  VecR w0(g.ngrid);
  for (int gi = 0; gi < g.ngrid; ++gi) {
    Real x = g.coords[0](gi), z = g.coords[1](gi);
    u(gi) = std::cos(x) * z * (1 - z);
    w0(gi) = std::sin(x) * z * z * (1 - z);
  }
  g.set_w(u, 0, w0);
  DofR v = mf.projected(u);
  CHECK((v - u).cwiseAbs().maxCoeff() < 1e-12);
}

} // TEST_SUITE
