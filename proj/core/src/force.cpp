#include "floqns/force.hpp"

#include <stdexcept>

#include "floqns/norms.hpp"

namespace floqns {

Real profile_z(int id, Real z) {
  switch (id) {
    case 0: return 1.0;
    case 1: return 4.0 * z * (1.0 - z);
    case 2: return std::sin(pi * z);
    case 3: return std::cos(pi * z);
    case 4: return 16.0 * z * z * (1.0 - z) * (1.0 - z);
    default: throw std::invalid_argument("profile_z: unknown profile id");
  }
}

PeriodicForce::PeriodicForce(const CellGrid& g, ForceSpec spec) : g_(&g), spec_(std::move(spec)) {
  if (spec_.modes.empty()) throw std::invalid_argument("force: empty mode list");
  const int hd = g.hdims();
  pattern_.reserve(spec_.modes.size());
  for (auto& m : spec_.modes) {
    if (m.component < 0 || m.component >= g.dim_n)
      throw std::invalid_argument("force: component out of range");
    if (int(m.kh.size()) != hd) throw std::invalid_argument("force: kh size mismatch");
    VecC pat(g.ngrid);
    for (int gi = 0; gi < g.ngrid; ++gi) {
      Real phase = 0.0;
      for (int j = 0; j < hd; ++j) phase += Real(m.kh[j]) * g.alpha[j] * g.coords[j](gi);
      pat(gi) = std::polar(profile_z(m.profile, g.coords[hd](gi)), phase);
    }
    pattern_.push_back(std::move(pat));
  }
  raw_bracket_ = std::sqrt(bracket_sq());
  if (raw_bracket_ < 1e-14) throw std::invalid_argument("force: cannot normalize zero field");
  for (auto& m : spec_.modes) m.amp /= raw_bracket_;
  bracket_ = std::sqrt(bracket_sq());
}

VecC PeriodicForce::component_c(int c, Real t, int tderiv) const {
  VecC out = VecC::Zero(g_->ngrid);
  for (size_t i = 0; i < spec_.modes.size(); ++i) {
    const auto& m = spec_.modes[i];
    if (m.component != c) continue;
    Cplx a = m.amp * std::polar(1.0, 2.0 * pi * Real(m.mt) * t);
    for (int j = 0; j < tderiv; ++j) a *= iu * 2.0 * pi * Real(m.mt);
    // real part of a*pattern, kept as a complex vector for the norm helpers
    out += 0.5 * (a * pattern_[i] + std::conj(a) * pattern_[i].conjugate());
  }
  return out;
}

VecR PeriodicForce::component(int c, Real t) const { return component_c(c, t, 0).real(); }

std::vector<std::vector<VecR>> PeriodicForce::sample(int nt) const {
  std::vector<std::vector<VecR>> out(nt);
  for (int k = 0; k < nt; ++k) {
    out[k].resize(g_->dim_n);
    for (int c = 0; c < g_->dim_n; ++c) out[k][c] = component(c, Real(k) / Real(nt));
  }
  return out;
}

// squared smoothness bracket: time-averaged H^3 of G, H^1 of d_t G, L2 of d_tt G
Real PeriodicForce::bracket_sq() const {
  int mmax = 0;
  for (const auto& m : spec_.modes) mmax = std::max(mmax, std::abs(m.mt));
  const int nt = std::max(8, 4 * mmax + 4); // exact quadrature for the trig products
  Real acc = 0.0;
  for (int k = 0; k < nt; ++k) {
    const Real t = Real(k) / Real(nt);
    for (int j = 0; j <= 2; ++j) {
      const int s = 3 - 2 * j > 0 ? 3 - 2 * j : 0;
      for (int c = 0; c < g_->dim_n; ++c)
        acc += hs_norm_sq(*g_, component_c(c, t, j), s) / Real(nt);
    }
  }
  return acc;
}

} // namespace floqns
