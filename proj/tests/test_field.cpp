#include <doctest.h>

#include "floqns/field.hpp"
#include "helpers.hpp"
#include <cmath>

using namespace floqns;

namespace {

// band-limited time samples: harmonics below the Nyquist index
std::vector<VecC> harmonic_samples(int nt, int dim, int mmax, unsigned seed) {
  std::vector<VecC> coef(nt, VecC::Zero(dim));
  auto r = tst::random_cvec(dim * (2 * mmax + 1), seed);
  int at = 0;
  for (int m = -mmax; m <= mmax; ++m) {
    int k = (m + nt) % nt;
    coef[k] = r.segment(at, dim);
    at += dim;
  }
  // hermitian symmetry so samples are analytic combinations, not required here
  return idft_time(coef);
}

} // namespace

TEST_SUITE("field") {

TEST_CASE("time transform roundtrip and Parseval") {
  const int nt = 16, dim = 5;
  std::vector<VecC> s(nt);
  for (int k = 0; k < nt; ++k) s[k] = tst::random_cvec(dim, 100 + k);

  auto c = dft_time(s);
  auto back = idft_time(c);
  Real err = 0, ns = 0, nc = 0;
  for (int k = 0; k < nt; ++k) {
    err = std::max(err, (back[k] - s[k]).cwiseAbs().maxCoeff());
    ns += s[k].squaredNorm();
    nc += c[k].squaredNorm();
  }
  CHECK(err < 1e-12);
  CHECK(ns / nt == doctest::Approx(nc).epsilon(1e-12)); // unitary up to 1/nt
}

TEST_CASE("spectral time derivative is exact on resolved harmonics") {
  const int nt = 16;
  std::vector<VecC> s(nt), ds(nt);
  for (int k = 0; k < nt; ++k) {
    Real t = Real(k) / nt;
    s[k] = VecC::Constant(1, std::exp(Cplx(0, 2 * M_PI * 3 * t)));
    ds[k] = VecC::Constant(1, Cplx(0, 2 * M_PI * 3) * std::exp(Cplx(0, 2 * M_PI * 3 * t)));
  }
  auto got = time_derivative(s);
  Real err = 0;
  for (int k = 0; k < nt; ++k) err = std::max(err, std::abs(got[k](0) - ds[k](0)));
  CHECK(err < 1e-10);

  // second derivative brings down the square
  auto got2 = time_derivative(s, 2);
  for (int k = 0; k < nt; ++k)
    CHECK(std::abs(got2[k](0) + std::pow(2 * M_PI * 3, 2) * s[k](0)) < 1e-8);
}

TEST_CASE("trig interpolation hits off-grid values of band-limited data") {
  const int nt = 16;
  auto s = harmonic_samples(nt, 3, 5, 7);
  auto c = dft_time(s);

  auto eval_direct = [&](Real t) {
    VecC v = VecC::Zero(3);
    for (int m = -5; m <= 5; ++m)
      v += c[(m + nt) % nt] * std::exp(Cplx(0, 2 * M_PI * m * t));
    return v;
  };

  for (Real t : {0.13, 0.5, 0.77, 0.999}) {
    VecC want = eval_direct(t);
    CHECK((trig_eval(s, t) - want).cwiseAbs().maxCoeff() < 1e-11);
  }

  // interpolation property: lands on the samples
  for (int k = 0; k < nt; ++k)
    CHECK((trig_eval(s, Real(k) / nt) - s[k]).cwiseAbs().maxCoeff() < 1e-11);

  TrigSeries ts(s);
  for (Real t : {0.2, 0.61})
    CHECK((ts.at(t) - trig_eval(s, t)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("real samples interpolate to real values") {
  const int nt = 8;
  std::vector<VecR> s(nt);
  for (int k = 0; k < nt; ++k) s[k] = tst::random_vec(4, 30 + k);
  std::vector<VecC> sc(nt);
  for (int k = 0; k < nt; ++k) sc[k] = s[k].cast<Cplx>();
  for (Real t : {0.1, 0.35, 0.81}) {
    VecC v = trig_eval(sc, t);
    CHECK(v.imag().cwiseAbs().maxCoeff() < 1e-12);
    CHECK((trig_eval(s, t) - v.real()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("time average is the zeroth coefficient") {
  const int nt = 12;
  auto s = harmonic_samples(nt, 2, 4, 9);
  auto c = dft_time(s);
  CHECK((time_average(s) - c[0]).cwiseAbs().maxCoeff() < 1e-12);
}

} // TEST_SUITE
