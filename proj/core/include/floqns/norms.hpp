#pragma once

#include "floqns/grid.hpp"
#include "floqns/types.hpp"

namespace floqns {

// squared Sobolev norm of a full-grid scalar, average measure, all mixed
// partials up to total order s
Real hs_norm_sq(const CellGrid& g, const VecC& f, int s);
Real hs_norm_sq(const CellGrid& g, const VecR& f, int s);

// parabolic norm [[f(t_k)]]_m^2 = sum_{2j<=m} |d_t^j f(t_k)|_{H^{m-2j}}^2
// for a sampled scalar field; returns one value per sample
VecR triple_norm_sq_series(const CellGrid& g, const std::vector<VecC>& samples, int m);
Real triple_norm_sq(const CellGrid& g, const std::vector<VecC>& samples, int m, int kt);

// packed-state inner product weighted by the reference state,
// phi-block weight p'(rho_p)/(gamma^2 rho_p), w-block weight rho_p;
// second argument conjugated
Cplx inner_weighted(const CellGrid& g, const DofC& u1, const DofC& u2,
                    const VecR& rho_p, const VecR& dp_rho_p, Real gamma);

// plain gamma-weighted L2: gamma^-2 |phi|^2 + |w|^2
Real l2_gamma_sq(const CellGrid& g, const DofC& u, Real gamma);

// L2 pairing of packed states without weights (second conjugated)
Cplx inner_plain(const CellGrid& g, const DofC& u1, const DofC& u2);

} // namespace floqns
