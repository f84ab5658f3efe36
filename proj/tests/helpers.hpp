#pragma once

// shared fixtures: small grids and band-limited random data so spectral
// identities hold to roundoff instead of truncation error

#include "floqns/grid.hpp"
#include "floqns/params.hpp"
#include <random>

namespace tst {

using namespace floqns;

inline CellGrid tiny_grid() { return CellGrid::make(2, 8, 9, {1.0}); }

inline Params base_params(Real S = 0.0) {
  Params p;
  p.nu = 10.0;
  p.nu_tilde = 10.0;
  p.gamma = 40.0;
  p.S_force = S;
  return p;
}

inline VecR random_vec(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<Real> d(-1.0, 1.0);
  VecR v(n);
  for (int i = 0; i < n; ++i) v(i) = d(rng);
  return v;
}

inline VecC random_cvec(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<Real> d(-1.0, 1.0);
  VecC v(n);
  for (int i = 0; i < n; ++i) v(i) = Cplx(d(rng), d(rng));
  return v;
}

// random packed state restricted to the physical subspace
inline DofR random_state(const CellGrid& g, unsigned seed) {
  return ModeFilter(g).projected(DofR(random_vec(g.ndof, seed)));
}

inline DofC random_cstate(const CellGrid& g, unsigned seed) {
  return ModeFilter(g).projected(DofC(random_cvec(g.ndof, seed)));
}

inline Real rel_err(Real got, Real want) {
  return std::abs(got - want) / std::max(std::abs(want), Real(1e-300));
}

} // namespace tst
