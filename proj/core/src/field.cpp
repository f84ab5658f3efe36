#include "floqns/field.hpp"

#include <stdexcept>

namespace floqns {

std::vector<VecC> dft_time(const std::vector<VecC>& s) {
  const int nt = int(s.size());
  if (nt < 2) throw std::invalid_argument("dft_time: need at least 2 samples");
  std::vector<VecC> c(nt, VecC::Zero(s[0].size()));
  for (int m = 0; m < nt; ++m) {
    for (int k = 0; k < nt; ++k) {
      const Real ph = -2.0 * pi * Real(m) * Real(k) / Real(nt);
      c[m] += std::polar(1.0 / Real(nt), ph) * s[k];
    }
  }
  return c;
}

std::vector<VecC> idft_time(const std::vector<VecC>& c) {
  const int nt = int(c.size());
  std::vector<VecC> s(nt, VecC::Zero(c[0].size()));
  for (int k = 0; k < nt; ++k) {
    for (int m = 0; m < nt; ++m) {
      const Real ph = 2.0 * pi * Real(m) * Real(k) / Real(nt);
      s[k] += std::polar(1.0, ph) * c[m];
    }
  }
  return s;
}

// signed frequency of DFT bin m
static int freq_of(int m, int nt) { return (m <= nt / 2) ? m : m - nt; }

std::vector<VecC> time_derivative(const std::vector<VecC>& s, int order) {
  const int nt = int(s.size());
  auto c = dft_time(s);
  for (int m = 0; m < nt; ++m) {
    int f = freq_of(m, nt);
    if (nt % 2 == 0 && m == nt / 2) f = 0; // Nyquist dropped
    Cplx mul = 1.0;
    for (int j = 0; j < order; ++j) mul *= iu * (2.0 * pi * Real(f));
    c[m] *= mul;
  }
  return idft_time(c);
}

VecC trig_eval(const std::vector<VecC>& samples, Real t) {
  const int nt = int(samples.size());
  auto c = dft_time(samples);
  VecC out = VecC::Zero(samples[0].size());
  for (int m = 0; m < nt; ++m) {
    const int f = freq_of(m, nt);
    if (nt % 2 == 0 && m == nt / 2) {
      // split the Nyquist bin into e^{+i pi nt t}, e^{-i pi nt t} halves -> cosine
      out += c[m] * std::cos(2.0 * pi * Real(nt / 2) * t);
    } else {
      out += c[m] * std::polar(1.0, 2.0 * pi * Real(f) * t);
    }
  }
  return out;
}

VecR trig_eval(const std::vector<VecR>& samples, Real t) {
  std::vector<VecC> sc(samples.size());
  for (size_t k = 0; k < samples.size(); ++k) sc[k] = samples[k].cast<Cplx>();
  return trig_eval(sc, t).real();
}

TrigSeries::TrigSeries(const std::vector<VecC>& samples) : coef_(dft_time(samples)) {}

VecC TrigSeries::at(Real t) const {
  const int nt = int(coef_.size());
  VecC out = VecC::Zero(coef_[0].size());
  for (int m = 0; m < nt; ++m) {
    const int f = freq_of(m, nt);
    if (nt % 2 == 0 && m == nt / 2)
      out += coef_[m] * std::cos(2.0 * pi * Real(nt / 2) * t);
    else
      out += coef_[m] * std::polar(1.0, 2.0 * pi * Real(f) * t);
  }
  return out;
}

} // namespace floqns
