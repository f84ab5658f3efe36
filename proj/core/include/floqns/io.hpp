#pragma once

#include <map>
#include <string>
#include <vector>

#include "floqns/force.hpp"
#include "floqns/params.hpp"
#include "floqns/types.hpp"

#include <json.hpp>

namespace floqns {

// ---- self-describing binary container ----
// layout: "FLQB" magic, u32 version, u64 header length, JSON header with the
// field table and free-form metadata, then the payloads as little-endian
// doubles in field order (complex fields interleave re, im)
struct FlqbField {
  std::string name;
  std::vector<long> shape;
  bool is_complex = false;
  std::vector<Real> data;  // shape product values, twice that when complex

  long count() const {
    long n = 1;
    for (long s : shape) n *= s;
    return n;
  }
};

void flqb_write(const std::string& path, const std::vector<FlqbField>& fields,
                const nlohmann::json& meta = {});
std::vector<FlqbField> flqb_read(const std::string& path, nlohmann::json* meta = nullptr);

// ---- CSV ----
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<Real>>& rows);
std::vector<std::vector<Real>> read_csv(const std::string& path,
                                        std::vector<std::string>* header = nullptr);

// ---- SVG line/scatter plot ----
struct SvgSeries {
  std::string label;
  std::vector<std::pair<Real, Real>> pts;
  std::string color = "#1f6feb";
  bool line = true;
  bool marks = true;
};
void write_svg_plot(const std::string& path, const std::string& title,
                    const std::string& xlabel, const std::string& ylabel,
                    const std::vector<SvgSeries>& series);

// ---- configuration ----
struct ForceModeConfig {
  int component = 0;
  std::vector<int> kh;
  int mt = 0;
  int profile = 1;
  Real amp = 1.0;
};

struct Config {
  // grid
  int dim_n = 2;
  int nh = 16;
  int nz = 17;
  std::vector<Real> alpha{1.0};
  // parameters
  Real nu = 10.0;
  Real nu_tilde = 10.0;
  Real gamma = 40.0;
  Real S = 0.0;                       // direct amplitude, or
  Real S_factor_of_threshold = -1.0;  // fraction of the regime threshold
  std::string pressure = "isothermal";
  Real adiabatic = 1.4;
  // force
  std::vector<ForceModeConfig> force_modes;
  // state solve
  int nt = 64;
  int substeps = 4;
  // floquet / sweep
  int mono_nt = 64;
  bool richardson = true;
  std::vector<Real> radii{0.01, 0.02, 0.04};
  std::vector<std::vector<Real>> eta_list;  // explicit sweep points, optional
  unsigned seed = 1;
};

// throws std::runtime_error naming the missing or malformed section
Config parse_config(const nlohmann::json& j);
Config load_config(const std::string& path);

CellGrid config_grid(const Config& c);
Params config_params(const Config& c);  // resolves the threshold fraction
ForceSpec config_force(const Config& c);

// 64-bit FNV-1a of a byte string, hex-encoded
std::string content_hash(const std::string& bytes);

// ---- run manifest ----
struct StageTiming {
  std::string name;
  double seconds = 0.0;
  bool ok = false;
  std::string message;
};

struct RunManifest {
  std::string config_hash;
  nlohmann::json parameters;
  nlohmann::json tolerances;
  std::vector<StageTiming> stages;
  std::vector<std::string> outputs;
  bool verified = false;

  nlohmann::json to_json() const;
};

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

} // namespace floqns
