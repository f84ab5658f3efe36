#pragma once

#include <functional>

#include "floqns/grid.hpp"
#include "floqns/types.hpp"

namespace floqns {

// periodic solver for (d_t + A0 + M(t)) u = F on the unit time period with a
// constant real stiff part A0; works per time frequency with cached LU
// factors, the remainder M(t) folded in by fixed-point iteration. The mean
// mode is solved in bordered form against the kernel (phi = 1, w = 0) with the
// phi average pinned to zero; its solvability defect is recorded.
class TimeFreqSolver {
 public:
  TimeFreqSolver(const CellGrid& g, MatR A0, int nt,
                 size_t cache_budget_bytes = size_t(2) << 30);

  using Coupling = std::function<DofC(int kt, const DofC&)>;  // M(t_k) u

  std::vector<DofC> solve(const std::vector<DofC>& F, const Coupling& coupling = {},
                          int maxit = 60, Real tol = 1e-12) const;

  Real last_defect() const { return defect_; }
  int last_iters() const { return iters_; }
  int nt() const { return nt_; }

 private:
  const CellGrid* g_;
  MatR A0_;
  int nt_;
  bool cached_;
  std::vector<Eigen::PartialPivLU<MatC>> lu_;  // frequencies 1 .. nt/2 - 1
  Eigen::PartialPivLU<MatR> lu0_;              // bordered mean mode
  mutable Real defect_ = 0.0;
  mutable int iters_ = 0;

  MatC shifted(int f) const;
  DofC solve_mode(int f, const DofC& rhs, Real* defect) const;
};

} // namespace floqns
