#pragma once

#include "floqns/pressure.hpp"
#include "floqns/types.hpp"
#include <stdexcept>
#include <vector>

namespace floqns {

struct Params {
  Real nu = 10.0;        // shear viscosity
  Real nu_tilde = 10.0;  // combined viscosity nu + bulk part
  Real gamma = 40.0;     // sound-speed parameter (gamma^2 multiplies the pressure gradient)
  Real S_force = 0.0;    // force amplitude
  Real mu_star = 2.0;    // bound for mu'/mu
  int dim_n = 2;
  std::vector<Real> alpha{1.0}; // n-1 lattice frequencies
  PressureLaw pressure{};

  int hdims() const { return dim_n - 1; }
  void validate() const;
};

struct RegimeReport {
  bool ok_nu = false;     // nu^2/(nu+nu~) >= nu0
  bool ok_gamma = false;  // gamma^2/(nu+nu~) >= gamma0
  bool ok_S = false;      // S <= threshold
  Real nu_ratio = 0, gamma_ratio = 0;
  Real S_threshold = 0;            // eps0 * nu^2/(gamma^2 sqrt(nu+nu~)) * sqrt(1 - e^{-a(nu+nu~)/gamma^2})
  Real S_threshold_simplified = 0; // eps0 * sqrt(a) * nu^2 / gamma^3
  bool all() const { return ok_nu && ok_gamma && ok_S; }
};

struct RegimeThresholds {
  Real nu0 = 4.0;
  Real gamma0 = 20.0;
  Real eps0 = 0.1;
  Real a_rate = 1.0;
};

Params nondimensionalize(Real mu, Real mu_prime, Real rho_star, Real d, Real T_period,
                         Real p_tilde_prime_at_rho_star, Real force_scale,
                         int dim_n = 2, Real mu_star = 2.0);

RegimeReport check_regime(const Params& p, Real nu0 = 4.0, Real gamma0 = 20.0,
                          Real eps0 = 0.1, Real a_rate = 1.0);

} // namespace floqns
