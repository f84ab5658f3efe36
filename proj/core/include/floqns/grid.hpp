#pragma once

#include "floqns/types.hpp"
#include <vector>

namespace floqns {

// Periodic layer cell: (n-1) Fourier directions of period 2*pi/alpha_j times
// Chebyshev-Gauss-Lobatto nodes on (0,1). Quadrature weights are normalized to
// the cell average. Packed unknown layout: phi on every grid node, then each w
// component on interior nodes only (Dirichlet walls eliminated).
struct CellGrid {
  int dim_n = 2;
  int nh = 16; // modes per horizontal direction
  int nz = 17; // wall-normal nodes including both walls
  std::vector<Real> alpha{1.0};

  int nH = 0;    // total horizontal nodes
  int ngrid = 0; // nH * nz
  int nzi = 0;   // nz - 2
  int nwi = 0;   // interior nodes per w component
  int ndof = 0;  // ngrid + dim_n * nwi

  VecR z;  // wall-normal nodes, z[0] = 0, z[nz-1] = 1
  VecR wz; // Clenshaw-Curtis weights on [0,1], sum 1
  VecR wq; // per-node average weights, sum 1

  MatR Dz;                  // 1d wall-normal derivative
  std::vector<MatR> Dh;     // 1d horizontal derivatives (Nyquist zeroed)
  std::vector<MatR> D;      // full-grid first derivatives, D[j], j = 0..n-1 (j = n-1 vertical)
  std::vector<VecR> coords; // node coordinates per direction

  std::vector<int> interior; // grid indices of interior nodes, size nwi

  static CellGrid make(int dim_n, int nh, int nz, std::vector<Real> alpha);

  int hdims() const { return dim_n - 1; }
  int gidx(int ih, int iz) const { return ih * nz + iz; }
  int iz_of(int g) const { return g % nz; }
  int ih_of(int g) const { return g / nz; }
  bool is_wall(int g) const { int iz = iz_of(g); return iz == 0 || iz == nz - 1; }

  int dof_phi(int g) const { return g; }
  int dof_w(int c, int k) const { return ngrid + c * nwi + k; }

  // cell average of a full-grid scalar
  Real average(const VecR& f) const { return wq.dot(f); }
  Cplx average(const VecC& f) const { return (wq.cast<Cplx>().array() * f.array()).sum(); }

  // full-grid w component from a packed vector (walls zero)
  VecC w_full(const DofC& u, int c) const;
  VecR w_full(const DofR& u, int c) const;
  // scatter a full-grid component into the packed vector's interior slots
  void set_w(DofC& u, int c, const VecC& full) const;
  void set_w(DofR& u, int c, const VecR& full) const;

  VecC phi_of(const DofC& u) const { return u.head(ngrid); }
  VecR phi_of(const DofR& u) const { return u.head(ngrid); }
};

// Physical-subspace filter. Equal-order collocation of the density/velocity
// pair carries spurious pressure modes: the top Chebyshev mode of phi has a
// derivative that vanishes at every interior node, so per horizontal mode it
// couples into the momentum rows only weakly (and, together with the unpaired
// Fourier mode, it makes the kernel of the flat operator multi-dimensional).
// The filter restricts phi to polynomial degree <= nz-2 and drops the
// unpaired horizontal Nyquist sector of every field. The removal direction
// for the top mode is shifted by a constant so cell averages pass through
// unchanged. Operator stencils stay raw; solves and propagators apply the
// filter at their seams (a Galerkin restriction onto the subspace).
struct ModeFilter {
  explicit ModeFilter(const CellGrid& g);

  const CellGrid* g = nullptr;
  VecR tz;  // mass-neutral removal direction, values on the z nodes
  VecR cz;  // top Chebyshev coefficient functional
  bool nyq = false;  // even nh leaves an unpaired mode

  int dropped() const;  // codimension of the physical subspace
  void project(DofR& u) const;
  void project(DofC& u) const;
  DofR projected(DofR u) const { project(u); return u; }
  DofC projected(DofC u) const { project(u); return u; }
  MatR matrix() const;  // dense projector on packed vectors
};

// trigonometric differentiation matrix on nh uniform nodes, period 2*pi/alpha,
// Nyquist column of the first derivative zeroed
MatR fourier_diff(int nh, Real alpha);
// Chebyshev-Gauss-Lobatto nodes/derivative/weights on [0,1], ordered from z=0
void chebyshev_layer(int nz, VecR& z, MatR& Dz, VecR& wz);

} // namespace floqns
