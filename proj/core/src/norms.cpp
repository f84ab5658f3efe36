#include "floqns/norms.hpp"

#include "floqns/field.hpp"

namespace floqns {

static Real avg_abs2(const CellGrid& g, const VecC& f) {
  Real acc = 0.0;
  for (int i = 0; i < g.ngrid; ++i) acc += g.wq(i) * std::norm(f(i));
  return acc;
}

Real hs_norm_sq(const CellGrid& g, const VecC& f, int s) {
  // mixed partials commute exactly on the tensor grid, so a nondecreasing
  // direction ordering enumerates each one once
  Real acc = 0.0;
  struct Node { VecC f; int order; int minj; };
  std::vector<Node> stack;
  stack.push_back({f, 0, 0});
  while (!stack.empty()) {
    Node nd = std::move(stack.back());
    stack.pop_back();
    acc += avg_abs2(g, nd.f);
    if (nd.order < s) {
      for (int j = nd.minj; j < g.dim_n; ++j)
        stack.push_back({g.D[j] * nd.f, nd.order + 1, j});
    }
  }
  return acc;
}

Real hs_norm_sq(const CellGrid& g, const VecR& f, int s) {
  return hs_norm_sq(g, VecC(f.cast<Cplx>()), s);
}

VecR triple_norm_sq_series(const CellGrid& g, const std::vector<VecC>& samples, int m) {
  const int nt = int(samples.size());
  VecR out = VecR::Zero(nt);
  std::vector<VecC> dj = samples;
  for (int j = 0; 2 * j <= m; ++j) {
    if (j > 0) {
      if (nt == 1) break;  // static sample set, time derivatives vanish
      dj = time_derivative(dj, 1);
    }
    for (int kt = 0; kt < nt; ++kt) out(kt) += hs_norm_sq(g, dj[kt], m - 2 * j);
  }
  return out;
}

Real triple_norm_sq(const CellGrid& g, const std::vector<VecC>& samples, int m, int kt) {
  return triple_norm_sq_series(g, samples, m)(kt);
}

Cplx inner_weighted(const CellGrid& g, const DofC& u1, const DofC& u2,
                    const VecR& rho_p, const VecR& dp_rho_p, Real gamma) {
  Cplx acc = 0.0;
  for (int i = 0; i < g.ngrid; ++i) {
    const Real wphi = dp_rho_p(i) / (gamma * gamma * rho_p(i));
    acc += g.wq(i) * wphi * u1(i) * std::conj(u2(i));
  }
  for (int c = 0; c < g.dim_n; ++c)
    for (int k = 0; k < g.nwi; ++k) {
      const int gi = g.interior[k];
      acc += g.wq(gi) * rho_p(gi) * u1(g.dof_w(c, k)) * std::conj(u2(g.dof_w(c, k)));
    }
  return acc;
}

Real l2_gamma_sq(const CellGrid& g, const DofC& u, Real gamma) {
  Real acc = 0.0;
  for (int i = 0; i < g.ngrid; ++i) acc += g.wq(i) * std::norm(u(i)) / (gamma * gamma);
  for (int c = 0; c < g.dim_n; ++c)
    for (int k = 0; k < g.nwi; ++k)
      acc += g.wq(g.interior[k]) * std::norm(u(g.dof_w(c, k)));
  return acc;
}

Cplx inner_plain(const CellGrid& g, const DofC& u1, const DofC& u2) {
  Cplx acc = 0.0;
  for (int i = 0; i < g.ngrid; ++i) acc += g.wq(i) * u1(i) * std::conj(u2(i));
  for (int c = 0; c < g.dim_n; ++c)
    for (int k = 0; k < g.nwi; ++k) {
      const int d = g.dof_w(c, k);
      acc += g.wq(g.interior[k]) * u1(d) * std::conj(u2(d));
    }
  return acc;
}

} // namespace floqns
