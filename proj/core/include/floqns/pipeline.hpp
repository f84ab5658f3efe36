#pragma once

#include "floqns/dispersion.hpp"
#include "floqns/io.hpp"

namespace floqns {

struct PipelineOptions {
  std::string out_dir = ".";
  unsigned seed = 0;  // 0 takes the config seed
  std::vector<std::vector<Real>> eta_override;
  int stop_after = 0;  // 0 runs everything; 1 state, 2 u0, 3 coefficients, 4 sweep
};

struct PipelineResult {
  RunManifest manifest;
  int exit_code = 0;  // 0 verified, 1 verify failed, 2 stage failure
};

// stages: state -> u0 -> coefficients -> sweep -> verify, short-circuiting on
// failure; every stage leaves its artifacts in out_dir and the manifest lists
// them with timings
PipelineResult run_pipeline(const Config& cfg, const std::string& config_bytes,
                            const PipelineOptions& opt = {});

// read-only validation of a pipeline output directory; optionally writes
// verify.json there; missing or corrupt artifacts become named failures
struct VerifyCheck {
  std::string name;
  bool pass = false;
  Real value = 0.0;
  Real tol = 0.0;
  std::string note;
};
struct VerifyReport {
  std::vector<VerifyCheck> checks;
  bool all_pass = false;
  std::string error;  // set when an artifact is missing or unreadable

  nlohmann::json to_json() const;
};
VerifyReport verify_outputs(const std::string& out_dir, bool write_report = true);

} // namespace floqns
