#pragma once

#include "floqns/grid.hpp"
#include "floqns/params.hpp"
#include "floqns/types.hpp"

namespace floqns {

// coefficient data of the reference state at one time slice, full grid;
// v vanishes at walls, visc = (nu Lap + nut grad div) v, dv[c][d] = D_d v_c
struct CoeffSlice {
  VecR rho;
  std::vector<VecR> v;
  VecR dp;  // p'(rho)
  std::vector<VecR> visc;
  std::vector<std::vector<VecR>> dv;
};

CoeffSlice trivial_slice(const CellGrid& g);

// cached derivative products shared by every assembled block
struct OperatorAtoms {
  explicit OperatorAtoms(const CellGrid& g);
  const CellGrid* g;
  std::vector<std::vector<MatR>> DD;  // D_c D_d
  MatR Lap;
};

// slice of a state snapshot: rho = 1 + phi/gamma^2, v = w, with the derived
// coefficient fields filled in
CoeffSlice make_slice(const CellGrid& g, const OperatorAtoms& at, const Params& pr,
                      const DofR& u);

// quasimomentum-shifted linearized operator about the given slice; evolution
// convention d_t u + L u = 0, unknowns (phi full grid, w interior)
MatC assemble_L(const CellGrid& g, const OperatorAtoms& at, const CoeffSlice& s,
                const VecR& eta, const Params& pr);

// matrix-free action of the same operator
DofC apply_L(const CellGrid& g, const OperatorAtoms& at, const CoeffSlice& s,
             const VecR& eta, const Params& pr, const DofC& u);

// matrix-free action of B1_j
DofC apply_B1(const CellGrid& g, const CoeffSlice& s, int j, const Params& pr, const DofC& u);

// first and second eta-derivative blocks: L_eta = L_0 + sum eta_j B1_j
// + sum eta_j eta_k B2_jk, exactly at the discrete level
MatC assemble_B1(const CellGrid& g, const OperatorAtoms& at, const CoeffSlice& s,
                 int j, const Params& pr);
MatC assemble_B2(const CellGrid& g, const CoeffSlice& s, int j, int k, const Params& pr);

// diagonal of the state-weighted inner product: p'(rho)/(gamma^2 rho) on the
// phi block, rho on the w block
VecR weight_diag(const CellGrid& g, const CoeffSlice& s, Real gamma);

// adjoint of L with respect to the diagonal weight: W^-1 L^H W
MatC adjoint_with_weight(const MatC& L, const VecR& w);

// adjoint zero-mode of the static generator, packed (gamma^2 rho/p'(rho), 0)
DofC ustar_packed(const CellGrid& g, const CoeffSlice& s, Real gamma);

// right inverse of the divergence with wall-clamped velocity, realized as the
// velocity of a Stokes saddle-point solve
class BogovskiiOp {
 public:
  explicit BogovskiiOp(const CellGrid& g);
  // velocity components on the full grid (walls zero); f must be mean-zero
  std::vector<VecR> apply(const VecR& f) const;
  std::vector<VecC> apply(const VecC& f) const;

 private:
  const CellGrid* g_;
  Eigen::CompleteOrthogonalDecomposition<MatR> cod_;
};

// modified inner product underlying the dissipation bound: the weighted one
// minus delta times Bogovskii cross terms; phi blocks must be mean-zero
Cplx inner_bogovskii(const CellGrid& g, const DofC& u1, const DofC& u2,
                     const CoeffSlice& s, Real gamma, Real delta, const BogovskiiOp& B);

// largest delta = (1/4) min(1/(nu+nut), nu/gamma^2, 1/gamma) halved until the
// modified product is between 1/2 and 3/2 of the weighted one on probes
Real bogovskii_delta(const CellGrid& g, const CoeffSlice& s, const Params& pr,
                     const BogovskiiOp& B, int nprobe = 12, unsigned seed = 7);

} // namespace floqns
