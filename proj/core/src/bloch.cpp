#include "floqns/bloch.hpp"

#include <stdexcept>

namespace floqns {

BlochTransform::BlochTransform(const CellGrid& g, int M) : g_(&g), M_(M) {
  if (M < 1) throw std::invalid_argument("bloch: M must be positive");
  ncells_ = 1;
  for (int j = 0; j < hd(); ++j) ncells_ *= M;
  eta_.resize(ncells_);
  xphase_.resize(ncells_);
  cellphase_.assign(ncells_, std::vector<Cplx>(ncells_));
  for (int q = 0; q < ncells_; ++q) {
    VecR e(hd());
    int rq = q;
    for (int j = 0; j < hd(); ++j) {
      e(j) = g.alpha[j] * Real(rq % M) / Real(M);
      rq /= M;
    }
    eta_[q] = e;
    VecC ph(g.ngrid);
    for (int gi = 0; gi < g.ngrid; ++gi) {
      Real s = 0.0;
      for (int j = 0; j < hd(); ++j) s += e(j) * g.coords[j](gi);
      ph(gi) = std::polar(1.0, -s);
    }
    xphase_[q] = std::move(ph);
    for (int m = 0; m < ncells_; ++m) {
      Real s = 0.0;
      int rm = m;
      for (int j = 0; j < hd(); ++j) {
        s += e(j) * (2.0 * pi / g.alpha[j]) * Real(rm % M);
        rm /= M;
      }
      cellphase_[q][m] = std::polar(1.0, -s);
    }
  }
}

void BlochTransform::apply(const std::vector<VecC>& in, std::vector<VecC>& out, bool fwd) const {
  const Real scale = 1.0 / std::pow(Real(M_), Real(hd()) / 2.0);
  out.assign(ncells_, VecC::Zero(in[0].size()));
  for (int q = 0; q < ncells_; ++q)
    for (int m = 0; m < ncells_; ++m) {
      const Cplx ph = fwd ? cellphase_[q][m] : std::conj(cellphase_[q][m]);
      if (fwd)
        out[q] += scale * ph * in[m];
      else
        out[m] += scale * ph * in[q];
    }
}

std::vector<VecC> BlochTransform::forward(const std::vector<VecC>& cells) const {
  if (int(cells.size()) != ncells_) throw std::invalid_argument("bloch: cell count mismatch");
  // strip the x-dependent carrier after the lattice sum so components are periodic parts
  std::vector<VecC> out;
  apply(cells, out, true);
  for (int q = 0; q < ncells_; ++q) out[q].array() *= xphase_[q].array();
  return out;
}

std::vector<VecC> BlochTransform::inverse(const std::vector<VecC>& comps) const {
  if (int(comps.size()) != ncells_) throw std::invalid_argument("bloch: component count mismatch");
  std::vector<VecC> carriered(ncells_);
  for (int q = 0; q < ncells_; ++q)
    carriered[q] = comps[q].array() * xphase_[q].conjugate().array();
  std::vector<VecC> out;
  apply(carriered, out, false);
  return out;
}

// packed variant: apply the x phase at phi nodes and interior w nodes
static VecC packed_phase(const CellGrid& g, const VecC& ph) {
  VecC full(g.ndof);
  full.head(g.ngrid) = ph;
  for (int c = 0; c < g.dim_n; ++c)
    for (int k = 0; k < g.nwi; ++k) full(g.dof_w(c, k)) = ph(g.interior[k]);
  return full;
}

std::vector<DofC> BlochTransform::forward_packed(const std::vector<DofC>& cells) const {
  if (int(cells.size()) != ncells_) throw std::invalid_argument("bloch: cell count mismatch");
  std::vector<VecC> out;
  apply(cells, out, true);
  for (int q = 0; q < ncells_; ++q) out[q].array() *= packed_phase(*g_, xphase_[q]).array();
  return out;
}

std::vector<DofC> BlochTransform::inverse_packed(const std::vector<DofC>& comps) const {
  if (int(comps.size()) != ncells_) throw std::invalid_argument("bloch: component count mismatch");
  std::vector<VecC> carriered(ncells_);
  for (int q = 0; q < ncells_; ++q)
    carriered[q] = comps[q].array() * packed_phase(*g_, xphase_[q]).conjugate().array();
  std::vector<VecC> out;
  apply(carriered, out, false);
  return out;
}

} // namespace floqns
