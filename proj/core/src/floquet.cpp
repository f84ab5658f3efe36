#include "floqns/floquet.hpp"

#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

#include "floqns/field.hpp"
#include "floqns/norms.hpp"

namespace floqns {

namespace {

// conserved mass functional, quadrature weights on the phi block
DofR mass_functional(const CellGrid& g) {
  DofR l = DofR::Zero(g.ndof);
  l.head(g.ngrid) = g.wq;
  return l;
}

void sort_by_modulus(VecC& values, MatC* vectors) {
  const int n = int(values.size());
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    return std::abs(values(a)) > std::abs(values(b));
  });
  VecC vs(n);
  MatC vv;
  if (vectors) vv.resize(vectors->rows(), n);
  for (int i = 0; i < n; ++i) {
    vs(i) = values(idx[i]);
    if (vectors) vv.col(i) = vectors->col(idx[i]);
  }
  values = vs;
  if (vectors) *vectors = vv;
}

// one split step over [t, t + h] applied to the columns of X:
// exp(-h A/2) (I - h M + h^2/2 M^2) exp(-h A/2), M sampled at the midpoint
void split_step(MatC& X, const MatC& Ehalf, const MatC& M, Real h) {
  X = Ehalf * X;
  MatC MX = M * X;
  X += -h * MX + (h * h / 2.0) * (M * MX);
  X = Ehalf * X;
}

void split_step_vec(DofC& x, const MatC& Ehalf, const MatC& M, Real h) {
  x = Ehalf * x;
  DofC mx = M * x;
  x += -h * mx + (h * h / 2.0) * (M * mx);
  x = Ehalf * x;
}

struct Stepper {
  const CellGrid& g;
  const OperatorAtoms& at;
  const Params& pr;
  const PeriodicState& st;
  VecR eta;
  ModeFilter mf;
  MatC Pc;        // physical-subspace projector
  MatC Atil_raw;  // trivial operator at the same eta
  MatC Atil;      // filtered stiff part
  TrigSeries series;  // interpolant of the state samples

  Stepper(const CellGrid& g_, const OperatorAtoms& at_, const Params& pr_,
          const PeriodicState& st_, const VecR& eta_)
      : g(g_), at(at_), pr(pr_), st(st_), eta(eta_), mf(g_) {
    Pc = mf.matrix().cast<Cplx>();
    Atil_raw = assemble_L(g, at, trivial_slice(g), eta, pr);
    Atil = Pc * Atil_raw * Pc;
    if (!st.is_static) {
      std::vector<VecC> sc(st.samples.size());
      for (size_t k = 0; k < st.samples.size(); ++k) sc[k] = st.samples[k].cast<Cplx>();
      series = TrigSeries(sc);
    }
  }

  MatC remainder_at(Real t) const {
    const CoeffSlice s = st.is_static ? st.slices[0]
                                      : make_slice(g, at, pr, DofR(series.at(t).real()));
    return Pc * MatC(assemble_L(g, at, s, eta, pr) - Atil_raw) * Pc;
  }

  // full propagator over one period with nsteps split steps; the dropped
  // directions ride along as identity until the caller applies Pc
  MatC pass(int nsteps) const {
    const Real h = 1.0 / Real(nsteps);
    const MatC Ehalf = MatC(-0.5 * h * Atil).exp();
    MatC U = MatC::Identity(g.ndof, g.ndof);
    for (int k = 0; k < nsteps; ++k)
      split_step(U, Ehalf, remainder_at((Real(k) + 0.5) * h), h);
    return U;
  }
};

} // namespace

MonodromyResult monodromy(const CellGrid& g, const OperatorAtoms& at, const Params& pr,
                          const PeriodicState& st, const VecR& eta,
                          const MonodromyOptions& opt) {
  MonodromyResult res;
  if (st.is_static && !opt.force_stepper) {
    const ModeFilter mf(g);
    const MatC Pc = mf.matrix().cast<Cplx>();
    const MatC Lf = Pc * assemble_L(g, at, st.slices[0], eta, pr) * Pc;
    res.U = MatC(-Lf).exp() * Pc;
    res.static_path = true;
  } else {
    Stepper sp(g, at, pr, st, eta);
    MatC Uh = sp.pass(opt.nt);
    if (opt.richardson) {
      MatC U2h = sp.pass(opt.nt / 2);
      res.U = MatC((4.0 * Uh - U2h) / 3.0) * sp.Pc;
    } else {
      res.U = Uh * sp.Pc;
    }
  }

  const DofR l = mass_functional(g);
  res.mass_defect = (res.U.transpose() * l.cast<Cplx>() - l.cast<Cplx>()).norm() / l.norm();

  EigResult e = dense_eig(res.U, opt.want_vectors);
  res.multipliers = e.values;
  if (opt.want_vectors) res.vectors = e.vectors;
  sort_by_modulus(res.multipliers, opt.want_vectors ? &res.vectors : nullptr);

  // the filtered-out directions carry exactly zero multipliers; drop them
  int keep = int(res.multipliers.size());
  while (keep > 1 && std::abs(res.multipliers(keep - 1)) <= 1e-12) --keep;
  res.multipliers.conservativeResize(keep);
  if (opt.want_vectors) res.vectors.conservativeResize(Eigen::NoChange, keep);

  res.exponents.resize(keep);
  for (int i = 0; i < keep; ++i) res.exponents(i) = std::log(res.multipliers(i));
  int mi = 0;
  for (int i = 0; i < keep; ++i)
    if (std::abs(res.multipliers(i) - 1.0) < std::abs(res.multipliers(mi) - 1.0)) mi = i;
  res.mass_index = mi;
  return res;
}

LeadingReport leading_exponent(const MonodromyResult& m, Real margin) {
  if (m.multipliers.size() < 2)
    throw std::runtime_error("leading_exponent: need at least two multipliers");
  const Real m1 = std::abs(m.multipliers(0));
  const Real m2 = std::abs(m.multipliers(1));
  LeadingReport r;
  r.ratio = m2 > 0 ? m1 / m2 : std::numeric_limits<Real>::infinity();
  if (r.ratio <= margin)
    throw std::runtime_error("leading_exponent: simplicity violated, |mu1| = " +
                             std::to_string(m1) + ", |mu2| = " + std::to_string(m2));
  r.lambda = std::log(m.multipliers(0));
  r.beta0_hat = -4.0 * std::log(m2);
  return r;
}

namespace {

DecayFit decay_fit_once(const CellGrid& g, const Params& pr, const MonodromyResult& mono,
                        int periods, int skip, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<Real> nd(0.0, 1.0);
  DofC u(g.ndof);
  for (int i = 0; i < g.ndof; ++i) u(i) = Cplx(nd(rng), nd(rng));
  ModeFilter(g).project(u);  // band-limited data: stay in the physical subspace
  // kill the phi mean so the conserved mass component vanishes exactly
  Cplx m = 0.0;
  for (int i = 0; i < g.ngrid; ++i) m += g.wq(i) * u(i);
  u.head(g.ngrid).array() -= m;

  VecR lognorm(periods + 1);
  for (int k = 0; k <= periods; ++k) {
    lognorm(k) = 0.5 * std::log(l2_gamma_sq(g, u, pr.gamma));
    if (k < periods) u = mono.U * u;
  }
  // least squares line on k >= skip
  const int n = periods + 1 - skip;
  Real sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int k = skip; k <= periods; ++k) {
    sx += k;
    sy += lognorm(k);
    sxx += Real(k) * k;
    sxy += Real(k) * lognorm(k);
  }
  const Real slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const Real icept = (sy - slope * sx) / n;
  Real ssr = 0, sst = 0, ym = sy / n;
  for (int k = skip; k <= periods; ++k) {
    ssr += std::pow(lognorm(k) - (icept + slope * k), 2);
    sst += std::pow(lognorm(k) - ym, 2);
  }
  DecayFit f;
  f.amp_rate = slope;
  f.energy_rate = 2.0 * slope;
  f.beta0_hat = -4.0 * slope;
  f.r2 = sst > 0 ? 1.0 - ssr / sst : 1.0;
  return f;
}

} // namespace

DecayFit decay_rate(const CellGrid& g, const Params& pr, const MonodromyResult& mono,
                    int trials, int periods, int skip, unsigned seed) {
  if (trials < 1) throw std::invalid_argument("decay_rate: trials must be positive");
  DecayFit worst;
  for (int t = 0; t < trials; ++t) {
    DecayFit f = decay_fit_once(g, pr, mono, periods, skip, seed + unsigned(t));
    if (t == 0 || f.amp_rate > worst.amp_rate) worst = f;  // slowest decay
  }
  return worst;
}

std::vector<DofC> propagate_samples(const CellGrid& g, const OperatorAtoms& at,
                                    const Params& pr, const PeriodicState& st,
                                    const VecR& eta, const DofC& v, int nt) {
  Stepper sp(g, at, pr, st, eta);
  const Real h = 1.0 / Real(nt);
  const MatC Ehalf = MatC(-0.5 * h * sp.Atil).exp();
  std::vector<DofC> out(nt);
  DofC x = sp.mf.projected(v);
  for (int k = 0; k < nt; ++k) {
    out[k] = x;
    split_step_vec(x, Ehalf, sp.remainder_at((Real(k) + 0.5) * h), h);
  }
  return out;
}

FloquetEigenfunction eigenfunction_eta(const CellGrid& g, const OperatorAtoms& at,
                                       const Params& pr, const PeriodicState& st,
                                       const VecR& eta, const std::vector<DofC>& ustar,
                                       const MonodromyOptions& opt) {
  FloquetEigenfunction fe;
  if (st.is_static) {
    MonodromyOptions mo = opt;
    mo.want_vectors = true;
    mo.force_stepper = false;
    MonodromyResult mono = monodromy(g, at, pr, st, eta, mo);
    fe.lambda = std::log(mono.multipliers(mono.mass_index));
    DofC v = mono.vectors.col(mono.mass_index);
    fe.overlap = inner_weighted(g, v, ustar[0], st.slices[0].rho, st.slices[0].dp, pr.gamma);
    if (std::abs(fe.overlap) < 1e-12) throw std::runtime_error("eigenfunction: branch overlap vanished");
    v /= fe.overlap;
    const ModeFilter mf(g);
    DofC def = mf.projected(DofC(assemble_L(g, at, st.slices[0], eta, pr) * v)) + fe.lambda * v;
    fe.residual = std::sqrt(l2_gamma_sq(g, def, pr.gamma) / l2_gamma_sq(g, v, pr.gamma));
    fe.p = {std::move(v)};
    return fe;
  }

  MonodromyOptions mo = opt;
  mo.want_vectors = true;
  MonodromyResult mono = monodromy(g, at, pr, st, eta, mo);
  const Cplx mu = mono.multipliers(mono.mass_index);
  fe.lambda = std::log(mu);
  DofC v1 = mono.vectors.col(mono.mass_index);

  // sample the periodic part on the coarse grid, Richardson-combining the
  // fine and coarse stepped propagations
  const int nc = opt.nt / 2;
  auto fine = propagate_samples(g, at, pr, st, eta, v1, opt.nt);
  auto coarse = propagate_samples(g, at, pr, st, eta, v1, nc);
  std::vector<DofC> p(nc);
  for (int k = 0; k < nc; ++k) {
    const Real t = Real(k) / Real(nc);
    p[k] = std::exp(-fe.lambda * t) * DofC((4.0 * fine[2 * k] - coarse[k]) / 3.0);
  }

  // align the state slices with the coarse sample times
  std::vector<CoeffSlice> slices(nc);
  for (int k = 0; k < nc; ++k) slices[k] = st.is_static ? st.slices[0]
      : make_slice(g, at, pr, st.at(Real(k) / Real(nc)));

  Cplx ov = 0.0;
  for (int k = 0; k < nc; ++k) {
    const auto& us = ustar[(k * int(ustar.size())) / nc];
    ov += inner_weighted(g, p[k], us, slices[k].rho, slices[k].dp, pr.gamma);
  }
  ov /= Real(nc);
  fe.overlap = ov;
  if (std::abs(ov) < 1e-12) throw std::runtime_error("eigenfunction: branch overlap vanished");
  for (auto& pk : p) pk /= ov;

  auto dpdt = time_derivative(p);
  const ModeFilter mf(g);
  Real rnum = 0.0, rden = 0.0;
  for (int k = 0; k < nc; ++k) {
    DofC def = dpdt[k] + mf.projected(apply_L(g, at, slices[k], eta, pr, p[k])) + fe.lambda * p[k];
    rnum = std::max(rnum, l2_gamma_sq(g, def, pr.gamma));
    rden = std::max(rden, l2_gamma_sq(g, p[k], pr.gamma));
  }
  fe.residual = std::sqrt(rnum / rden);
  fe.p = std::move(p);
  return fe;
}

} // namespace floqns
