#pragma once

#include "floqns/grid.hpp"
#include "floqns/types.hpp"

namespace floqns {

// unitary Bloch transform over an M x .. x M horizontal supercell; fields on
// the supercell are stored cell-by-cell, each cell a full-grid vector valued
// at x + L m with L_j = 2 pi / alpha_j
class BlochTransform {
 public:
  BlochTransform(const CellGrid& g, int M);

  int ncells() const { return ncells_; }
  // quasimomentum of component q
  const VecR& eta(int q) const { return eta_[q]; }

  // forward: physical cells -> Bloch components (periodic parts);
  // inverse undoes it; both unitary, so Parseval holds to roundoff
  std::vector<VecC> forward(const std::vector<VecC>& cells) const;
  std::vector<VecC> inverse(const std::vector<VecC>& comps) const;

  // same for packed (phi, w) states
  std::vector<DofC> forward_packed(const std::vector<DofC>& cells) const;
  std::vector<DofC> inverse_packed(const std::vector<DofC>& comps) const;

 private:
  const CellGrid* g_;
  int M_;
  int ncells_;
  std::vector<VecR> eta_;          // per component index q
  std::vector<VecC> xphase_;       // e^{-i eta_q . x} on the base cell
  std::vector<std::vector<Cplx>> cellphase_;  // e^{-i eta_q . L m} over cells m

  int hd() const { return g_->hdims(); }
  void apply(const std::vector<VecC>& in, std::vector<VecC>& out, bool fwd) const;
};

} // namespace floqns
