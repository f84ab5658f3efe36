#include "floqns/solver.hpp"

#include <stdexcept>

#include "floqns/field.hpp"

namespace floqns {

TimeFreqSolver::TimeFreqSolver(const CellGrid& g, MatR A0, int nt, size_t cache_budget_bytes)
    : g_(&g), A0_(std::move(A0)), nt_(nt) {
  if (nt < 4 || nt % 2 != 0) throw std::invalid_argument("solver: nt must be even, >= 4");
  const int n = g.ndof;
  if (A0_.rows() != n || A0_.cols() != n) throw std::invalid_argument("solver: A0 size mismatch");

  // bordered mean mode: [A0 k; c^T 0], kernel column k = (phi=1, w=0),
  // constraint row c = quadrature weights on phi
  MatR Bm = MatR::Zero(n + 1, n + 1);
  Bm.topLeftCorner(n, n) = A0_;
  for (int i = 0; i < g.ngrid; ++i) {
    Bm(i, n) = 1.0;
    Bm(n, i) = g.wq(i);
  }
  lu0_.compute(Bm);

  const size_t need = size_t(nt / 2 - 1) * size_t(n) * size_t(n) * sizeof(Cplx);
  cached_ = need <= cache_budget_bytes;
  if (cached_) {
    lu_.reserve(nt / 2 - 1);
    for (int f = 1; f < nt / 2; ++f) lu_.emplace_back(shifted(f));
  }
}

MatC TimeFreqSolver::shifted(int f) const {
  MatC M = A0_.cast<Cplx>();
  M.diagonal().array() += iu * (2.0 * pi * Real(f));
  return M;
}

DofC TimeFreqSolver::solve_mode(int f, const DofC& rhs, Real* defect) const {
  const int n = g_->ndof;
  if (f == 0) {
    VecR br(n + 1), bi(n + 1);
    br.head(n) = rhs.real();
    bi.head(n) = rhs.imag();
    br(n) = 0.0;
    bi(n) = 0.0;
    VecR xr = lu0_.solve(br), xi = lu0_.solve(bi);
    if (defect) *defect = std::hypot(xr(n), xi(n));
    return xr.head(n) + iu * xi.head(n);
  }
  const int fa = std::abs(f);
  DofC b = (f > 0) ? rhs : rhs.conjugate();
  DofC x;
  if (cached_) {
    x = lu_[fa - 1].solve(b);
  } else {
    x = Eigen::PartialPivLU<MatC>(shifted(fa)).solve(b);
  }
  return (f > 0) ? x : DofC(x.conjugate());
}

std::vector<DofC> TimeFreqSolver::solve(const std::vector<DofC>& F, const Coupling& coupling,
                                        int maxit, Real tol) const {
  if (int(F.size()) != nt_) throw std::invalid_argument("solver: sample count mismatch");
  const int n = g_->ndof;
  std::vector<DofC> u(nt_, DofC::Zero(n));
  defect_ = 0.0;
  iters_ = 0;
  for (int it = 0; it < (coupling ? maxit : 1); ++it) {
    std::vector<DofC> rhs(nt_);
    for (int k = 0; k < nt_; ++k) rhs[k] = coupling ? DofC(F[k] - coupling(k, u[k])) : F[k];
    auto rh = dft_time(rhs);
    Real defect = 0.0;
    std::vector<DofC> uh(nt_, DofC::Zero(n));
    for (int m = 0; m < nt_; ++m) {
      if (m == nt_ / 2) continue;  // Nyquist dropped
      const int f = (m <= nt_ / 2) ? m : m - nt_;
      Real d0 = 0.0;
      uh[m] = solve_mode(f, rh[m], f == 0 ? &d0 : nullptr);
      defect = std::max(defect, d0);
    }
    auto unew = idft_time(uh);
    Real dmax = 0.0, scale = 0.0;
    for (int k = 0; k < nt_; ++k) {
      dmax = std::max(dmax, (unew[k] - u[k]).norm());
      scale = std::max(scale, unew[k].norm());
    }
    u = std::move(unew);
    defect_ = defect;
    iters_ = it + 1;
    if (!coupling || dmax <= tol * std::max(scale, Real(1))) return u;
  }
  return u;
}

} // namespace floqns
