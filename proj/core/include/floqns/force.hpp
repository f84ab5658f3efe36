#pragma once

#include "floqns/grid.hpp"
#include "floqns/types.hpp"

namespace floqns {

// one separable forcing mode: Re(amp e^{i(k.ax + 2 pi mt t)}) prof(z) on one
// velocity component
struct ForceMode {
  int component = 0;
  std::vector<int> kh;  // horizontal integer wavenumbers, one per horizontal dim
  int mt = 0;           // temporal harmonic
  int profile = 1;      // wall-normal profile id, see profile_z
  Cplx amp{1.0, 0.0};
};

struct ForceSpec {
  std::vector<ForceMode> modes;
};

// profile ids: 0 constant, 1 bump 4z(1-z), 2 sin(pi z), 3 cos(pi z), 4 quartic bump
Real profile_z(int id, Real z);

// time-periodic body force with unit smoothness bracket; the physical force is
// S_force times this shape
class PeriodicForce {
 public:
  PeriodicForce(const CellGrid& g, ForceSpec spec);

  // full-grid values of component c at time t
  VecR component(int c, Real t) const;

  // all components at nt uniform samples
  std::vector<std::vector<VecR>> sample(int nt) const;

  Real bracket31() const { return bracket_; }       // after normalization
  Real raw_bracket31() const { return raw_bracket_; }
  const ForceSpec& spec() const { return spec_; }

 private:
  const CellGrid* g_;
  ForceSpec spec_;
  std::vector<VecC> pattern_;  // per-mode spatial pattern e^{ik.ax} prof(z)
  Real raw_bracket_ = 0.0;
  Real bracket_ = 0.0;

  VecC component_c(int c, Real t, int tderiv) const;
  Real bracket_sq() const;
};

} // namespace floqns
