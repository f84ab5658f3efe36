#pragma once

#include "floqns/types.hpp"
#include <cmath>
#include <stdexcept>
#include <string>

namespace floqns {

// Pressure law normalized so p'(1) = 1. "isothermal" is p(rho) = rho;
// "power" is p(rho) = rho^kappa / kappa. The averaged kernels
//   p1(r, phi) = int_0^1 p'(r + th*phi) dth
//   p2(r, phi) = int_0^1 (1 - th) p''(r + th*phi) dth
// are evaluated by fixed Gauss-Legendre quadrature (exact for polynomial laws).
struct PressureLaw {
  enum class Kind { Isothermal, Power };
  Kind kind = Kind::Isothermal;
  Real kappa = 1.0;

  static PressureLaw isothermal() { return {}; }
  static PressureLaw power(Real k) {
    if (k <= 0.0) throw std::invalid_argument("pressure law: kappa must be positive");
    return {Kind::Power, k};
  }
  static PressureLaw named(const std::string& name, Real k = 1.4) {
    if (name == "isothermal") return isothermal();
    if (name == "power") return power(k);
    throw std::invalid_argument("pressure law: unknown kind '" + name + "'");
  }

  Real p(Real rho) const {
    return kind == Kind::Isothermal ? rho : std::pow(rho, kappa) / kappa;
  }
  Real dp(Real rho) const {
    return kind == Kind::Isothermal ? 1.0 : std::pow(rho, kappa - 1.0);
  }
  Real ddp(Real rho) const {
    return kind == Kind::Isothermal ? 0.0 : (kappa - 1.0) * std::pow(rho, kappa - 2.0);
  }

  Real p1(Real rho_p, Real phi) const {
    Real acc = 0.0;
    for (int q = 0; q < n_gauss; ++q) acc += gw[q] * dp(rho_p + gx[q] * phi);
    return acc;
  }
  Real p2(Real rho_p, Real phi) const {
    Real acc = 0.0;
    for (int q = 0; q < n_gauss; ++q) acc += gw[q] * (1.0 - gx[q]) * ddp(rho_p + gx[q] * phi);
    return acc;
  }
  // kernel of the quadratic pressure remainder in the marched system, s = phi/gamma^2
  Real g_kernel(Real s) const { return p2(1.0, s); }

private:
  // 16-point Gauss-Legendre on [0,1]
  static constexpr int n_gauss = 16;
  static constexpr Real gx[16] = {
      0.005299532504175031, 0.027712488463383712, 0.067184398806084128, 0.122297795822498445,
      0.191061877798678115, 0.270991611171386371, 0.359198224610370542, 0.452493745081181231,
      0.547506254918818769, 0.640801775389629458, 0.729008388828613629, 0.808938122201321885,
      0.877702204177501555, 0.932815601193915872, 0.972287511536616288, 0.994700467495824969};
  static constexpr Real gw[16] = {
      0.013576229705877047, 0.031126761969323946, 0.047579255841246392, 0.062314485627766936,
      0.074797994408288367, 0.084578259697501269, 0.091301707522461794, 0.094725305227534248,
      0.094725305227534248, 0.091301707522461794, 0.084578259697501269, 0.074797994408288367,
      0.062314485627766936, 0.047579255841246392, 0.031126761969323946, 0.013576229705877047};
};

} // namespace floqns
