#include <doctest.h>

#include "floqns/norms.hpp"
#include "helpers.hpp"
#include <cmath>

using namespace floqns;
using tst::tiny_grid;

TEST_SUITE("norms") {

TEST_CASE("sobolev norm of a separable field matches the closed form") {
  const CellGrid g = tiny_grid();
  // f = sin(x) z: averages of sin^2, cos^2 are 1/2; z-moments are exact
  VecC f(g.ngrid);
  for (int gi = 0; gi < g.ngrid; ++gi)
    f(gi) = std::sin(g.coords[0](gi)) * g.coords[1](gi);

  const Real l2 = 0.5 * (1.0 / 3.0);          // 1/2 int z^2
  const Real dx = 0.5 * (1.0 / 3.0);          // cos^2 z^2
  const Real dz = 0.5;                        // sin^2 * 1
  CHECK(hs_norm_sq(g, f, 0) == doctest::Approx(l2).epsilon(1e-12));
  CHECK(hs_norm_sq(g, f, 1) == doctest::Approx(l2 + dx + dz).epsilon(1e-12));

  // order 2 adds d_xx (sin^2 z^2), d_xz (cos^2), d_zz (0)
  const Real h2 = l2 + dx + dz + 0.5 / 3.0 + 0.5;
  CHECK(hs_norm_sq(g, f, 2) == doctest::Approx(h2).epsilon(1e-10));

  // real overload agrees
  VecR fr = f.real();
  CHECK(hs_norm_sq(g, fr, 2) == doctest::Approx(hs_norm_sq(g, f, 2)).epsilon(1e-12));
}

TEST_CASE("parabolic norm of a time-constant series reduces to the sobolev norm") {
  const CellGrid g = tiny_grid();
  VecC f(g.ngrid);
  for (int gi = 0; gi < g.ngrid; ++gi)
    f(gi) = std::cos(g.coords[0](gi)) * (1.0 - g.coords[1](gi));
  std::vector<VecC> s(8, f);
  VecR series = triple_norm_sq_series(g, s, 2);
  for (int k = 0; k < 8; ++k) {
    CHECK(series(k) == doctest::Approx(hs_norm_sq(g, f, 2)).epsilon(1e-10));
    CHECK(triple_norm_sq(g, s, 2, k) == doctest::Approx(series(k)).epsilon(1e-12));
  }
}

TEST_CASE("parabolic norm counts time derivatives two orders apiece") {
  const CellGrid g = tiny_grid();
  const int nt = 16;
  // f(t) = cos(2 pi t) h(x,z): [[f]]_2^2 = |f|_H2^2 + |d_t f|_L2^2 at each sample
  VecC h(g.ngrid);
  for (int gi = 0; gi < g.ngrid; ++gi)
    h(gi) = std::sin(g.coords[0](gi)) * g.coords[1](gi) * (1.0 - g.coords[1](gi));
  std::vector<VecC> s(nt);
  for (int k = 0; k < nt; ++k) s[k] = std::cos(2 * M_PI * k / Real(nt)) * h;

  VecR got = triple_norm_sq_series(g, s, 2);
  for (int k = 0; k < nt; ++k) {
    Real c = std::cos(2 * M_PI * k / Real(nt)), d = -2 * M_PI * std::sin(2 * M_PI * k / Real(nt));
    Real want = c * c * hs_norm_sq(g, h, 2) + d * d * hs_norm_sq(g, h, 0);
    CHECK(got(k) == doctest::Approx(want).epsilon(1e-9));
  }
}

TEST_CASE("weighted inner product reduces to the flat one for the trivial state") {
  const CellGrid g = tiny_grid();
  const Real gamma = 40.0;
  DofC u = tst::random_cstate(g, 21), v = tst::random_cstate(g, 22);
  VecR ones = VecR::Ones(g.ngrid);

  Cplx got = inner_weighted(g, u, v, ones, ones, gamma);

  Cplx want = 0;
  // gamma^-2 <phi1, phi2> + sum_c <w1c, w2c>, average measure
  for (int gi = 0; gi < g.ngrid; ++gi)
    want += g.wq(gi) * u(gi) * std::conj(v(gi)) / (gamma * gamma);
  for (int c = 0; c < g.dim_n; ++c) {
    VecC wu = g.w_full(u, c), wv = g.w_full(v, c);
    for (int gi = 0; gi < g.ngrid; ++gi) want += g.wq(gi) * wu(gi) * std::conj(wv(gi));
  }
  CHECK(std::abs(got - want) < 1e-12 * std::abs(want));

  CHECK(l2_gamma_sq(g, u, gamma) ==
        doctest::Approx(inner_weighted(g, u, u, ones, ones, gamma).real()).epsilon(1e-12));
}

TEST_CASE("weighted product is conjugate-symmetric and positive") {
  const CellGrid g = tiny_grid();
  VecR rho = VecR::Ones(g.ngrid), dp = VecR::Ones(g.ngrid);
  // a mildly nonuniform positive weight pair
  for (int gi = 0; gi < g.ngrid; ++gi) {
    rho(gi) = 1.0 + 0.1 * std::sin(g.coords[0](gi));
    dp(gi) = 1.0 + 0.05 * g.coords[1](gi);
  }
  DofC u = tst::random_cstate(g, 31), v = tst::random_cstate(g, 32);
  Cplx a = inner_weighted(g, u, v, rho, dp, 40.0);
  Cplx b = inner_weighted(g, v, u, rho, dp, 40.0);
  CHECK(std::abs(a - std::conj(b)) < 1e-12 * std::abs(a));
  CHECK(inner_weighted(g, u, u, rho, dp, 40.0).real() > 0);
  CHECK(std::abs(inner_weighted(g, u, u, rho, dp, 40.0).imag()) < 1e-14);
}

} // TEST_SUITE
