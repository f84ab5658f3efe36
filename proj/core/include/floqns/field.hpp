#pragma once

#include "floqns/types.hpp"

namespace floqns {

// uniformly sampled period-1 data, t_k = k/nt; sums are O(nt^2) which is
// negligible at the sample counts used here
std::vector<VecC> dft_time(const std::vector<VecC>& s);
std::vector<VecC> idft_time(const std::vector<VecC>& c);

// spectral time derivative (Nyquist mode dropped, matching the spatial atoms)
std::vector<VecC> time_derivative(const std::vector<VecC>& s, int order = 1);

// trig interpolation at arbitrary t; Nyquist rendered as a cosine so real
// sample sets interpolate to real values
VecC trig_eval(const std::vector<VecC>& samples, Real t);
VecR trig_eval(const std::vector<VecR>& samples, Real t);

// time average of samples (exact for resolved trig polynomials)
template <class V>
V time_average(const std::vector<V>& s) {
  V acc = s[0];
  for (size_t k = 1; k < s.size(); ++k) acc += s[k];
  return acc / Real(s.size());
}

// coefficient-cached trig interpolant for repeated evaluation
class TrigSeries {
 public:
  TrigSeries() = default;
  explicit TrigSeries(const std::vector<VecC>& samples);
  VecC at(Real t) const;
  int nt() const { return int(coef_.size()); }

 private:
  std::vector<VecC> coef_;
};

} // namespace floqns
