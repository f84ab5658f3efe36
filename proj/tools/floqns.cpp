// command line front end: compute periodic states, Floquet spectra, and
// dispersion coefficients from a JSON config, and verify finished output
// directories. Thread count comes from FLOQNS_THREADS only.

#include <cstdio>
#include <cstdlib>
#include <filesystem>

#include <CLI11.hpp>
#include <Eigen/Core>

#include "floqns/pipeline.hpp"

extern "C" void openblas_set_num_threads(int);

using namespace floqns;

namespace {

void setup_threads() {
  int threads = 1;
  if (const char* env = std::getenv("FLOQNS_THREADS")) {
    threads = std::max(1, std::atoi(env));
  }
  Eigen::setNbThreads(threads);
  openblas_set_num_threads(threads);
}

std::vector<std::vector<Real>> parse_eta_list(const std::string& csv, int hd) {
  std::vector<Real> flat;
  std::string tok;
  for (size_t i = 0; i <= csv.size(); ++i) {
    if (i == csv.size() || csv[i] == ',') {
      if (!tok.empty()) flat.push_back(std::stod(tok));
      tok.clear();
    } else {
      tok += csv[i];
    }
  }
  if (flat.size() % size_t(hd) != 0)
    throw std::runtime_error("--eta needs groups of " + std::to_string(hd) + " values");
  std::vector<std::vector<Real>> pts;
  for (size_t i = 0; i < flat.size(); i += size_t(hd))
    pts.emplace_back(flat.begin() + long(i), flat.begin() + long(i) + hd);
  return pts;
}

void print_stages(const RunManifest& man) {
  for (const auto& s : man.stages) {
    if (s.ok)
      std::printf("[%s] ok  %.2fs\n", s.name.c_str(), s.seconds);
    else
      std::printf("[%s] FAILED  %.2fs  %s\n", s.name.c_str(), s.seconds,
                  s.message.c_str());
  }
}

int run_stages(const std::string& config_path, const std::string& out_dir,
               unsigned seed, const std::string& eta_csv, int stop_after) {
  std::string bytes = read_text(config_path);
  Config cfg = parse_config(nlohmann::json::parse(bytes));
  PipelineOptions opt;
  opt.out_dir = out_dir;
  opt.seed = seed;
  opt.stop_after = stop_after;
  if (!eta_csv.empty())
    opt.eta_override = parse_eta_list(eta_csv, cfg.dim_n - 1);
  PipelineResult res = run_pipeline(cfg, bytes, opt);
  print_stages(res.manifest);
  if (res.exit_code == 0 && res.manifest.verified)
    std::printf("verified: PASS\n");
  else if (res.exit_code == 1)
    std::printf("verified: FAIL\n");
  return res.exit_code;
}

// state container loader shared by the floquet subcommand: reuses a previously
// written state.flqb when present, otherwise solves fresh
PeriodicState load_or_solve_state(const Config& cfg, const CellGrid& g,
                                  const OperatorAtoms& at, const Params& pr,
                                  const std::string& out_dir) {
  std::string path = (std::filesystem::path(out_dir) / "state.flqb").string();
  if (std::filesystem::exists(path)) {
    nlohmann::json meta;
    auto fields = flqb_read(path, &meta);
    for (const auto& f : fields) {
      if (f.name != "samples") continue;
      PeriodicState st;
      st.g = &g;
      st.pr = pr;
      st.nt = meta.value("nt", cfg.nt);
      st.is_static = meta.value("is_static", true);
      long nsamp = f.shape.at(0), nd = f.shape.at(1);
      if (nd != g.ndof)
        throw std::runtime_error("state.flqb dof count does not match the config grid");
      for (long k = 0; k < nsamp; ++k) {
        DofR u = Eigen::Map<const VecR>(f.data.data() + k * nd, nd);
        st.samples.push_back(u);
        st.slices.push_back(make_slice(g, at, pr, u));
      }
      std::printf("state: loaded %s (%ld samples)\n", path.c_str(), nsamp);
      return st;
    }
  }
  if (pr.S_force == 0.0) return trivial_state(g, pr, cfg.nt);
  PeriodicForce force(g, config_force(cfg));
  StateSolveOptions sopt;
  sopt.nt = cfg.nt;
  sopt.substeps = cfg.substeps;
  return solve_periodic_state(g, at, pr, force, sopt);
}

int cmd_floquet(const std::string& config_path, const std::string& out_dir,
                const std::string& eta_csv) {
  std::string bytes = read_text(config_path);
  Config cfg = parse_config(nlohmann::json::parse(bytes));
  CellGrid g = config_grid(cfg);
  OperatorAtoms at(g);
  Params pr = config_params(cfg);
  std::filesystem::create_directories(out_dir);

  PeriodicState st = load_or_solve_state(cfg, g, at, pr, out_dir);

  std::vector<std::vector<Real>> pts;
  if (!eta_csv.empty()) {
    pts = parse_eta_list(eta_csv, g.hdims());
  } else {
    pts.push_back(std::vector<Real>(size_t(g.hdims()), 0.0));
    std::vector<Real> p(size_t(g.hdims()), 0.0);
    p[0] = 0.1;
    pts.push_back(p);
  }

  MonodromyOptions mo;
  mo.nt = cfg.mono_nt;
  mo.richardson = cfg.richardson;
  mo.want_vectors = false;

  std::vector<std::string> hdr;
  for (int j = 0; j < g.hdims(); ++j) hdr.push_back("eta_" + std::to_string(j));
  for (const char* c : {"k", "re_mu", "im_mu", "abs_mu", "re_lambda", "im_lambda"})
    hdr.push_back(c);
  std::vector<std::vector<Real>> rows;
  nlohmann::json gaps = nlohmann::json::array();

  for (const auto& p : pts) {
    VecR eta(g.hdims());
    for (int j = 0; j < g.hdims(); ++j) eta[j] = p[size_t(j)];
    MonodromyResult m = monodromy(g, at, pr, st, eta, mo);
    for (long k = 0; k < m.multipliers.size(); ++k) {
      std::vector<Real> row;
      for (int j = 0; j < g.hdims(); ++j) row.push_back(eta[j]);
      row.insert(row.end(),
                 {Real(k), m.multipliers[k].real(), m.multipliers[k].imag(),
                  std::abs(m.multipliers[k]), m.exponents[k].real(),
                  m.exponents[k].imag()});
      rows.push_back(row);
    }
    LeadingReport lead = leading_exponent(m);
    gaps.push_back(nlohmann::json{{"eta", p},
                                  {"re_lambda", lead.lambda.real()},
                                  {"im_lambda", lead.lambda.imag()},
                                  {"beta0_hat", lead.beta0_hat},
                                  {"ratio", lead.ratio},
                                  {"mass_defect", m.mass_defect},
                                  {"static_path", m.static_path}});
    std::printf("eta = %s: lambda = %.6e %+.6ei, gap ratio %.3g\n",
                [&] {
                  std::string s;
                  for (size_t j = 0; j < p.size(); ++j)
                    s += (j ? "," : "") + std::to_string(p[j]);
                  return s;
                }()
                    .c_str(),
                lead.lambda.real(), lead.lambda.imag(), lead.ratio);
  }

  write_csv((std::filesystem::path(out_dir) / "multipliers.csv").string(), hdr, rows);
  write_text((std::filesystem::path(out_dir) / "gap.json").string(),
             gaps.dump(2) + "\n");
  std::printf("wrote multipliers.csv, gap.json\n");
  return 0;
}

int cmd_verify(const std::string& out_dir) {
  VerifyReport rep = verify_outputs(out_dir, true);
  if (!rep.error.empty()) {
    std::printf("verify: ERROR  %s\n", rep.error.c_str());
    return 1;
  }
  for (const auto& c : rep.checks)
    std::printf("  %-24s %s  value %.3e  tol %.3e\n", c.name.c_str(),
                c.pass ? "pass" : "FAIL", c.value, c.tol);
  std::printf("verify: %s\n", rep.all_pass ? "PASS" : "FAIL");
  return rep.all_pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
  setup_threads();

  CLI::App app{
      "periodic layer states, Floquet spectra, and effective dispersion "
      "coefficients for a compressible flow cell"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", eta_csv;
  unsigned seed = 0;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    if (needs_config)
      sub->add_option("--config", config_path, "JSON config path")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "RNG seed override (0 keeps the config seed)");
    return sub;
  };

  auto* c_state = add_common(app.add_subcommand("state", "solve the periodic state"), true);
  auto* c_floq = add_common(
      app.add_subcommand("floquet", "monodromy spectra at chosen quasimomenta"), true);
  c_floq->add_option("--eta", eta_csv, "comma list of quasimomentum values");
  auto* c_coef = add_common(
      app.add_subcommand("coeffs", "perturbation coefficients a, A"), true);
  auto* c_disp = add_common(
      app.add_subcommand("dispersion", "coefficients plus the sweep cross-check"), true);
  c_disp->add_option("--eta", eta_csv, "comma list overriding the sweep points");
  auto* c_verify = add_common(
      app.add_subcommand("verify", "validate a finished output directory"), false);
  auto* c_run = add_common(app.add_subcommand("run", "full pipeline with verification"), true);
  c_run->add_option("--eta", eta_csv, "comma list overriding the sweep points");

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_state->parsed()) return run_stages(config_path, out_dir, seed, "", 1);
    if (c_floq->parsed()) return cmd_floquet(config_path, out_dir, eta_csv);
    if (c_coef->parsed()) return run_stages(config_path, out_dir, seed, "", 3);
    if (c_disp->parsed()) return run_stages(config_path, out_dir, seed, eta_csv, 4);
    if (c_verify->parsed()) return cmd_verify(out_dir);
    if (c_run->parsed()) return run_stages(config_path, out_dir, seed, eta_csv, 0);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
