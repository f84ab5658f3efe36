#include "floqns/params.hpp"
#include <cmath>

namespace floqns {

void Params::validate() const {
  if (nu <= 0.0) throw std::invalid_argument("params: nu must be positive");
  if (nu_tilde < nu) throw std::invalid_argument("params: nu_tilde must satisfy nu <= nu_tilde");
  if (nu + nu_tilde > (2.0 + mu_star) * nu + 1e-12 * nu)
    throw std::invalid_argument("params: nu + nu_tilde exceeds (2 + mu_star) nu");
  if (gamma <= 0.0) throw std::invalid_argument("params: gamma must be positive");
  if (S_force < 0.0) throw std::invalid_argument("params: S must be nonnegative");
  if (dim_n != 2 && dim_n != 3) throw std::invalid_argument("params: dim_n must be 2 or 3");
  if ((int)alpha.size() != dim_n - 1)
    throw std::invalid_argument("params: alpha needs n-1 entries");
  for (Real a : alpha)
    if (a <= 0.0) throw std::invalid_argument("params: lattice frequencies must be positive");
  if (std::abs(pressure.dp(1.0) - 1.0) > 1e-12)
    throw std::invalid_argument("params: pressure law must have p'(1) = 1");
}

Params nondimensionalize(Real mu, Real mu_prime, Real rho_star, Real d, Real T_period,
                         Real p_tilde_prime_at_rho_star, Real force_scale,
                         int dim_n, Real mu_star) {
  if (mu <= 0.0) throw std::invalid_argument("nondimensionalize: mu must be positive");
  if ((2.0 / dim_n) * mu + mu_prime < 0.0)
    throw std::invalid_argument("nondimensionalize: bulk viscosity (2/n)mu + mu' is negative");
  if (mu_prime > mu_star * mu)
    throw std::invalid_argument("nondimensionalize: mu'/mu exceeds mu_star");
  if (rho_star <= 0.0 || d <= 0.0 || T_period <= 0.0)
    throw std::invalid_argument("nondimensionalize: rho*, d, T must be positive");
  if (p_tilde_prime_at_rho_star <= 0.0)
    throw std::invalid_argument("nondimensionalize: p'(rho*) must be positive");

  Params p;
  p.nu = mu * T_period / (rho_star * d * d);
  p.nu_tilde = (mu + mu_prime) * T_period / (rho_star * d * d);
  p.gamma = (T_period / d) * std::sqrt(p_tilde_prime_at_rho_star);
  p.S_force = (T_period * T_period / d) * force_scale;
  p.mu_star = mu_star;
  p.dim_n = dim_n;
  p.alpha.assign(dim_n - 1, 1.0);
  return p;
}

RegimeReport check_regime(const Params& p, Real nu0, Real gamma0, Real eps0, Real a_rate) {
  RegimeReport r;
  const Real nn = p.nu + p.nu_tilde;
  r.nu_ratio = p.nu * p.nu / nn;
  r.gamma_ratio = p.gamma * p.gamma / nn;
  r.ok_nu = r.nu_ratio >= nu0;
  r.ok_gamma = r.gamma_ratio >= gamma0;
  r.S_threshold = eps0 * (p.nu * p.nu / (p.gamma * p.gamma * std::sqrt(nn))) *
                  std::sqrt(1.0 - std::exp(-a_rate * nn / (p.gamma * p.gamma)));
  r.S_threshold_simplified = eps0 * std::sqrt(a_rate) * p.nu * p.nu / (p.gamma * p.gamma * p.gamma);
  r.ok_S = p.S_force <= r.S_threshold;
  return r;
}

} // namespace floqns
