#include "floqns/pipeline.hpp"

#include "floqns/norms.hpp"

#include <Eigen/Eigenvalues>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>

namespace floqns {

namespace {

using nlohmann::json;

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

json jvec(const VecR& v) {
  json a = json::array();
  for (long i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json jmat(const MatR& m) {
  json a = json::array();
  for (long i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (long j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    a.push_back(row);
  }
  return a;
}

json jcvec(const VecC& v) {
  return json{{"re", jvec(v.real())}, {"im", jvec(v.imag())}};
}

json jcmat(const MatC& m) {
  return json{{"re", jmat(m.real())}, {"im", jmat(m.imag())}};
}

VecR pvec(const json& a) {
  VecR v(a.size());
  for (size_t i = 0; i < a.size(); ++i) v[long(i)] = a[i].get<Real>();
  return v;
}

MatR pmat(const json& a) {
  long rows = long(a.size());
  long cols = rows ? long(a[0].size()) : 0;
  MatR m(rows, cols);
  for (long i = 0; i < rows; ++i)
    for (long j = 0; j < cols; ++j) m(i, j) = a[size_t(i)][size_t(j)].get<Real>();
  return m;
}

json load_json_file(const std::string& path) {
  return json::parse(read_text(path));
}

// flattens state-grid samples into one flqb field
FlqbField pack_samples(const std::string& name, const std::vector<DofR>& samples) {
  FlqbField f;
  f.name = name;
  f.shape = {long(samples.size()), samples.empty() ? 0 : long(samples[0].size())};
  f.data.reserve(size_t(f.count()));
  for (const auto& s : samples)
    for (long i = 0; i < s.size(); ++i) f.data.push_back(s[i]);
  return f;
}

FlqbField pack_samples_c(const std::string& name, const std::vector<DofC>& samples) {
  FlqbField f;
  f.name = name;
  f.is_complex = true;
  f.shape = {long(samples.size()), samples.empty() ? 0 : long(samples[0].size())};
  f.data.reserve(size_t(2 * f.count()));
  for (const auto& s : samples)
    for (long i = 0; i < s.size(); ++i) {
      f.data.push_back(s[i].real());
      f.data.push_back(s[i].imag());
    }
  return f;
}

struct StageClock {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double lap() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

// shared check plumbing for verify_outputs
void push_upper(std::vector<VerifyCheck>& cs, const std::string& name, Real value,
                Real tol, const std::string& note = {}) {
  cs.push_back({name, std::abs(value) <= tol, std::abs(value), tol, note});
}
void push_lower(std::vector<VerifyCheck>& cs, const std::string& name, Real value,
                Real tol, const std::string& note = {}) {
  cs.push_back({name, value >= tol, value, tol, note});
}
void push_flag(std::vector<VerifyCheck>& cs, const std::string& name, bool ok,
               Real value, const std::string& note = {}) {
  cs.push_back({name, ok, value, 0.0, note});
}

} // namespace

json VerifyReport::to_json() const {
  json checks_j = json::array();
  for (const auto& c : checks)
    checks_j.push_back(json{{"name", c.name},
                            {"pass", c.pass},
                            {"value", c.value},
                            {"tol", c.tol},
                            {"note", c.note}});
  return json{{"all_pass", all_pass}, {"error", error}, {"checks", checks_j}};
}

VerifyReport verify_outputs(const std::string& out_dir, bool write_report) {
  VerifyReport rep;
  auto& cs = rep.checks;

  std::string current;
  try {
    current = "coefficients.json";
    json coef = load_json_file(join(out_dir, current));
    current = "fit.json";
    json fit = load_json_file(join(out_dir, current));
    current = "u0.json";
    json u0 = load_json_file(join(out_dir, current));
    current = "state_stats.csv";
    std::vector<std::string> stats_hdr;
    auto stats = read_csv(join(out_dir, current), &stats_hdr);
    current = "";

    const Real nu = coef.at("params").at("nu").get<Real>();
    const Real gamma = coef.at("params").at("gamma").get<Real>();
    const Real S = coef.at("params").at("S").get<Real>();
    const Real rel = (S == 0.0) ? 0.02 : 0.05;

    VecR a = pvec(coef.at("a"));
    MatR A = pmat(coef.at("A"));
    VecR a_fit = pvec(fit.at("a_fit"));
    MatR A_fit = pmat(fit.at("A_fit"));
    if (a_fit.size() != a.size() || A_fit.rows() != A.rows())
      throw std::runtime_error("fit.json dimensions do not match coefficients.json");

    // the central cross-validation: perturbation coefficients against the
    // sweep fit, entrywise with an absolute floor under the relative band
    Real worst_a = 0.0;
    for (long j = 0; j < a.size(); ++j)
      worst_a = std::max(worst_a, std::abs(a[j] - a_fit[j]) /
                                      std::max(rel * std::abs(a[j]), Real(1e-6)));
    push_flag(cs, "drift_matches_fit", worst_a <= 1.0, worst_a,
              "max_j |a_j - a_fit_j| / max(rel |a_j|, 1e-6), rel = " + std::to_string(rel));

    Real worst_A = 0.0;
    for (long j = 0; j < A.rows(); ++j)
      for (long l = 0; l < A.cols(); ++l)
        worst_A = std::max(worst_A, std::abs(A(j, l) - A_fit(j, l)) /
                                        std::max(rel * std::abs(A(j, l)), Real(1e-6)));
    push_flag(cs, "diffusion_matches_fit", worst_A <= 1.0, worst_A,
              "same entrywise band on A");

    push_lower(cs, "remainder_slope", fit.at("slope").get<Real>(), 2.7,
               "log-log slope of |lambda - model| vs |eta|");

    const Real kappa0 = coef.at("stokes").at("kappa0").get<Real>();
    push_lower(cs, "kappa0_positive", kappa0, 0.0, "working definiteness constant");
    Eigen::SelfAdjointEigenSolver<MatR> es(0.5 * (A + A.transpose()));
    push_lower(cs, "diffusion_definite", es.eigenvalues().minCoeff() * nu / (gamma * gamma),
               kappa0, "lambda_min(A) nu/gamma^2 against the cell constant");

    push_flag(cs, "attenuation_bound", fit.at("bound_ok").get<bool>(),
              fit.at("bound_margin").get<Real>(),
              "Re lambda under the quadratic bound at every sweep point");
    push_lower(cs, "simplicity_radius", fit.at("r0_hat").get<Real>(), 1e-12,
               "largest radius with a simple leading multiplier");

    const MatR a_tilde = pmat(coef.at("stokes").at("a_tilde"));
    Real agree_tol = 1e-9 * std::max(Real(1), a_tilde.cwiseAbs().maxCoeff());
    push_upper(cs, "stokes_forms_agree", coef.at("stokes").at("agree").get<Real>(),
               agree_tol, "gradient form vs flux form of the cell matrix");

    push_upper(cs, "u0_residual", u0.at("residual").get<Real>(), 1e-7);
    push_upper(cs, "u0_adjoint_residual", u0.at("adjoint_residual").get<Real>(), 1e-7);
    Cplx pairing{u0.at("pairing_re").get<Real>(), u0.at("pairing_im").get<Real>()};
    push_upper(cs, "u0_pairing", std::abs(pairing - Cplx(1.0, 0.0)), 1e-8,
               "<<u0, u*>> normalization");
    push_upper(cs, "first_order_real_part",
               coef.at("first_order_re_residual").get<Real>(), 1e-6,
               "lambda1 should be purely imaginary");
    push_upper(cs, "cell_plugback", coef.at("cell_plugback").get<Real>(), 1e-7);
    push_upper(cs, "cell_mean_phi", coef.at("cell_mean_phi").get<Real>(), 1e-10);

    long mr_col = -1;
    for (size_t i = 0; i < stats_hdr.size(); ++i)
      if (stats_hdr[i] == "mean_rho") mr_col = long(i);
    if (mr_col < 0 || stats.empty())
      throw std::runtime_error("state_stats.csv lacks a mean_rho column");
    Real worst_rho = 0.0;
    for (const auto& row : stats)
      worst_rho = std::max(worst_rho, std::abs(row[size_t(mr_col)] - 1.0));
    push_upper(cs, "state_mean_density", worst_rho, 1e-10,
               "space average of rho at every sample");
  } catch (const std::exception& e) {
    rep.error = current.empty() ? std::string(e.what())
                                : "failed reading '" + current + "': " + e.what();
    rep.all_pass = false;
    if (write_report)
      write_text(join(out_dir, "verify.json"), rep.to_json().dump(2) + "\n");
    return rep;
  }

  rep.all_pass = true;
  for (const auto& c : rep.checks) rep.all_pass = rep.all_pass && c.pass;
  if (write_report)
    write_text(join(out_dir, "verify.json"), rep.to_json().dump(2) + "\n");
  return rep;
}

PipelineResult run_pipeline(const Config& cfg, const std::string& config_bytes,
                            const PipelineOptions& opt) {
  PipelineResult res;
  RunManifest& man = res.manifest;

  std::filesystem::create_directories(opt.out_dir);
  const unsigned seed = opt.seed ? opt.seed : cfg.seed;

  CellGrid g = config_grid(cfg);
  OperatorAtoms at(g);
  Params pr = config_params(cfg);

  man.config_hash = content_hash(config_bytes);
  man.parameters = json{{"dim_n", pr.dim_n},     {"nh", cfg.nh},
                        {"nz", cfg.nz},          {"alpha", cfg.alpha},
                        {"nu", pr.nu},           {"nu_tilde", pr.nu_tilde},
                        {"gamma", pr.gamma},     {"S", pr.S_force},
                        {"pressure", cfg.pressure}, {"nt", cfg.nt},
                        {"mono_nt", cfg.mono_nt}, {"richardson", cfg.richardson},
                        {"radii", cfg.radii},    {"seed", seed}};
  man.tolerances = json{{"fit_rel_flat", 0.02},   {"fit_rel_forced", 0.05},
                        {"fit_abs_floor", 1e-6},  {"remainder_slope_min", 2.7},
                        {"u0_residual", 1e-7},    {"cell_plugback", 1e-7},
                        {"cell_mean_phi", 1e-10}, {"mean_density", 1e-10},
                        {"pairing", 1e-8},        {"bound_slack", 0.9},
                        {"ratio_floor", 1.5}};

  auto emit = [&](const std::string& name) { man.outputs.push_back(name); };
  auto finish = [&](int code) {
    man.verified = (code == 0) && man.stages.size() >= 5;
    write_text(join(opt.out_dir, "manifest.json"), man.to_json().dump(2) + "\n");
    res.exit_code = code;
    return res;
  };
  auto run_stage = [&](const std::string& name, const std::function<void()>& body) {
    StageTiming t;
    t.name = name;
    StageClock clock;
    try {
      body();
      t.ok = true;
    } catch (const std::exception& e) {
      t.message = "stage " + name + ": " + e.what();
    }
    t.seconds = clock.lap();
    man.stages.push_back(t);
    return t.ok;
  };

  // ---- stage 1: periodic reference state ----
  PeriodicState st;
  bool ok = run_stage("state", [&] {
    StateSolveReport srep;
    Real residual = 0.0;
    if (pr.S_force == 0.0) {
      st = trivial_state(g, pr, cfg.nt);
      srep.converged = true;
      srep.static_detected = true;
      srep.mean_rho = st.mean_rho();
      srep.sup_amp = st.sup_amp();
    } else {
      PeriodicForce force(g, config_force(cfg));
      StateSolveOptions sopt;
      sopt.nt = cfg.nt;
      sopt.substeps = cfg.substeps;
      st = solve_periodic_state(g, at, pr, force, sopt, &srep);
      residual = srep.residual;
      if (!srep.converged)
        throw std::runtime_error("periodic state solve did not converge, defect " +
                                 std::to_string(residual));
    }

    const int nt_s = int(st.samples.size());
    json meta{{"nt", st.nt},
              {"is_static", st.is_static},
              {"ndof", g.ndof},
              {"dim_n", g.dim_n},
              {"nh", g.nh},
              {"nz", g.nz},
              {"alpha", cfg.alpha},
              {"nu", pr.nu},
              {"nu_tilde", pr.nu_tilde},
              {"gamma", pr.gamma},
              {"S", pr.S_force},
              {"pressure", cfg.pressure},
              {"residual", residual},
              {"mean_rho", srep.mean_rho},
              {"sup_amp", srep.sup_amp}};
    flqb_write(join(opt.out_dir, "state.flqb"), {pack_samples("samples", st.samples)}, meta);
    emit("state.flqb");

    std::vector<std::vector<Real>> stats;
    for (int k = 0; k < nt_s; ++k) {
      const auto& s = st.slice(k);
      Real amp = std::sqrt(l2_gamma_sq(g, st.sample(k).cast<Cplx>(), pr.gamma));
      stats.push_back({Real(k), Real(k) / Real(nt_s), g.average(s.rho), amp});
    }
    write_csv(join(opt.out_dir, "state_stats.csv"), {"k", "t", "mean_rho", "amp"}, stats);
    emit("state_stats.csv");

    EnergyReport er = energy_report(g, pr, st);
    Real e4 = energy_m_sup(g, pr, st, 4);
    write_csv(join(opt.out_dir, "energy.csv"),
              {"sup_E1", "sup_E2", "avg_D1", "avg_D2", "sup_amp", "sup_E4"},
              {{er.sup_E1, er.sup_E2, er.avg_D1, er.avg_D2, er.sup_amp, e4}});
    emit("energy.csv");

    std::vector<std::vector<Real>> hist;
    for (size_t i = 0; i < srep.period_increments.size(); ++i)
      hist.push_back({0.0, Real(i), srep.period_increments[i]});
    for (size_t i = 0; i < srep.polish_increments.size(); ++i)
      hist.push_back({1.0, Real(i), srep.polish_increments[i]});
    write_csv(join(opt.out_dir, "defect_history.csv"), {"phase", "iter", "increment"}, hist);
    emit("defect_history.csv");
  });
  if (!ok) return finish(2);
  if (opt.stop_after == 1) return finish(0);

  // ---- stage 2: zero eigenpair ----
  Eigenfunction0 e0;
  ok = run_stage("u0", [&] {
    e0 = eigenfunction_u0(g, at, pr, st);
    json meta{{"pairing_re", e0.pairing.real()}, {"pairing_im", e0.pairing.imag()}};
    flqb_write(join(opt.out_dir, "u0.flqb"),
               {pack_samples_c("u", e0.u), pack_samples_c("ustar", e0.ustar)}, meta);
    emit("u0.flqb");
    json diag{{"solve_defect", e0.solve_defect},
              {"residual", e0.residual},
              {"adjoint_residual", e0.adjoint_residual},
              {"pairing_re", e0.pairing.real()},
              {"pairing_im", e0.pairing.imag()},
              {"size_sq", e0.size_sq},
              {"size_scale", e0.size_scale}};
    write_text(join(opt.out_dir, "u0.json"), diag.dump(2) + "\n");
    emit("u0.json");
  });
  if (!ok) return finish(2);
  if (opt.stop_after == 2) return finish(0);

  // ---- stage 3: dispersion coefficients ----
  DispersionCoefficients dc;
  ok = run_stage("coefficients", [&] {
    dc = dispersion_coefficients(g, at, pr, st, e0);
    json out{{"a", jvec(dc.a)},
             {"A", jmat(dc.A)},
             {"lambda1", jcvec(dc.lambda1)},
             {"lambda2", jcmat(dc.lambda2)},
             {"kappa0_hat", dc.kappa0_hat},
             {"sigma", dc.sigma},
             {"first_order_re_residual", dc.first_order_re_residual},
             {"cell_plugback", dc.cell_plugback},
             {"cell_mean_phi", dc.cell_mean_phi},
             {"stokes",
              json{{"a_tilde", jmat(dc.stokes.a_tilde)},
                   {"a_tilde_alt", jmat(dc.stokes.a_tilde_alt)},
                   {"agree", dc.stokes.agree},
                   {"kappa0_sharp", dc.stokes.kappa0_sharp},
                   {"kappa0", dc.stokes.kappa0},
                   {"phi_mean", jvec(dc.stokes.phi_mean)}}},
             {"calibration",
              json{{"sigma", dc.calibration.sigma},
                   {"res_plus", dc.calibration.res_plus},
                   {"res_minus", dc.calibration.res_minus},
                   {"A_fit", jmat(dc.calibration.A_fit)}}},
             {"params", json{{"nu", pr.nu},
                             {"nu_tilde", pr.nu_tilde},
                             {"gamma", pr.gamma},
                             {"S", pr.S_force},
                             {"dim_n", pr.dim_n}}}};
    write_text(join(opt.out_dir, "coefficients.json"), out.dump(2) + "\n");
    emit("coefficients.json");
  });
  if (!ok) return finish(2);
  if (opt.stop_after == 3) return finish(0);

  // ---- stage 4: quasimomentum sweep and fit ----
  ok = run_stage("sweep", [&] {
    std::vector<VecR> etas;
    auto from_lists = [&](const std::vector<std::vector<Real>>& lists) {
      for (const auto& e : lists) {
        if (int(e.size()) != g.hdims())
          throw std::runtime_error("sweep point has wrong dimension");
        VecR v(g.hdims());
        for (int j = 0; j < g.hdims(); ++j) v[j] = e[size_t(j)];
        etas.push_back(v);
      }
    };
    if (!opt.eta_override.empty())
      from_lists(opt.eta_override);
    else if (!cfg.eta_list.empty())
      from_lists(cfg.eta_list);
    else
      etas = sweep_etas(g, cfg.radii);

    SweepOptions sopt;
    sopt.mono.nt = cfg.mono_nt;
    sopt.mono.richardson = cfg.richardson;
    sopt.mono.want_vectors = false;
    sopt.kappa0 = dc.stokes.kappa0;
    SweepResult sw = dispersion_sweep(g, at, pr, st, etas, dc.a, dc.A, sopt);

    std::vector<std::string> hdr;
    for (int j = 0; j < g.hdims(); ++j) hdr.push_back("eta_" + std::to_string(j));
    for (const char* c : {"abs_eta", "re_lambda", "im_lambda", "model_re", "model_im",
                          "remainder", "ratio", "mass_defect"})
      hdr.push_back(c);
    std::vector<std::vector<Real>> rows;
    for (const auto& p : sw.points) {
      std::vector<Real> r;
      for (int j = 0; j < g.hdims(); ++j) r.push_back(p.eta[j]);
      r.insert(r.end(), {p.eta.norm(), p.lambda.real(), p.lambda.imag(), p.model.real(),
                         p.model.imag(), p.remainder, p.ratio, p.mass_defect});
      rows.push_back(r);
    }
    write_csv(join(opt.out_dir, "sweep.csv"), hdr, rows);
    emit("sweep.csv");

    json fj{{"a_fit", jvec(sw.a_fit)},
            {"A_fit", jmat(sw.A_fit)},
            {"fit_residual", sw.fit_residual},
            {"slope", sw.slope},
            {"r0_hat", sw.r0_hat},
            {"bound_ok", sw.bound_ok},
            {"bound_margin", sw.bound_margin},
            {"kappa0_used", sopt.kappa0},
            {"ratio_floor", sopt.ratio_floor},
            {"bound_slack", sopt.bound_slack}};
    write_text(join(opt.out_dir, "fit.json"), fj.dump(2) + "\n");
    emit("fit.json");

    // attenuation picture: measured Re lambda against the quadratic bound
    SvgSeries pts{"Re lambda", {}, "#1f6feb", false, true};
    Real xmax = 0.0;
    for (const auto& p : sw.points) {
      Real x = p.eta.squaredNorm();
      pts.pts.push_back({x, p.lambda.real()});
      xmax = std::max(xmax, x);
    }
    Real coef = dc.kappa0_hat * pr.gamma * pr.gamma / (2.0 * pr.nu);
    SvgSeries ref{"-(kappa0 gamma^2/2nu)|eta|^2", {}, "#d1242f", true, false};
    for (int i = 0; i <= 32; ++i) {
      Real x = xmax * Real(i) / 32.0;
      ref.pts.push_back({x, -coef * x});
    }
    write_svg_plot(join(opt.out_dir, "plot.svg"), "leading exponent vs |eta|^2",
                   "|eta|^2", "Re lambda", {pts, ref});
    emit("plot.svg");
  });
  if (!ok) return finish(2);
  if (opt.stop_after == 4) return finish(0);

  // ---- stage 5: verification over the artifacts just written ----
  VerifyReport vrep;
  ok = run_stage("verify", [&] {
    vrep = verify_outputs(opt.out_dir, true);
    emit("verify.json");
    if (!vrep.error.empty()) throw std::runtime_error(vrep.error);
  });
  if (!ok) return finish(2);
  return finish(vrep.all_pass ? 0 : 1);
}

} // namespace floqns
