#include "floqns/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace floqns {

namespace {

void put_u32(std::ostream& os, uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = (v >> (8 * i)) & 0xff;
  os.write(reinterpret_cast<char*>(b), 4);
}

void put_u64(std::ostream& os, uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = (v >> (8 * i)) & 0xff;
  os.write(reinterpret_cast<char*>(b), 8);
}

uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= uint32_t(b[i]) << (8 * i);
  return v;
}

uint64_t get_u64(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= uint64_t(b[i]) << (8 * i);
  return v;
}

std::string fmt_real(Real v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_tick(Real v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

} // namespace

void flqb_write(const std::string& path, const std::vector<FlqbField>& fields,
                const nlohmann::json& meta) {
  nlohmann::json header;
  header["format"] = "FLQB";
  header["endian"] = "little";
  header["dtype"] = "f64";
  header["fields"] = nlohmann::json::array();
  for (const auto& f : fields) {
    const long vals = f.count() * (f.is_complex ? 2 : 1);
    if (long(f.data.size()) != vals)
      throw std::runtime_error("flqb: field '" + f.name + "' size does not match shape");
    header["fields"].push_back({{"name", f.name},
                                {"shape", f.shape},
                                {"complex", f.is_complex}});
  }
  if (!meta.is_null()) header["meta"] = meta;
  const std::string hs = header.dump();

  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("flqb: cannot open '" + path + "' for writing");
  os.write("FLQB", 4);
  put_u32(os, 1);
  put_u64(os, hs.size());
  os.write(hs.data(), std::streamsize(hs.size()));
  for (const auto& f : fields)
    os.write(reinterpret_cast<const char*>(f.data.data()),
             std::streamsize(f.data.size() * sizeof(Real)));
  if (!os) throw std::runtime_error("flqb: write failed for '" + path + "'");
}

std::vector<FlqbField> flqb_read(const std::string& path, nlohmann::json* meta) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("flqb: cannot open '" + path + "'");
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "FLQB", 4) != 0)
    throw std::runtime_error("flqb: '" + path + "' is not a FLQB container");
  const uint32_t version = get_u32(is);
  if (version != 1)
    throw std::runtime_error("flqb: unsupported version in '" + path + "'");
  const uint64_t hlen = get_u64(is);
  std::string hs(hlen, '\0');
  is.read(hs.data(), std::streamsize(hlen));
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(hs);
  } catch (const std::exception& e) {
    throw std::runtime_error("flqb: corrupt header in '" + path + "': " + e.what());
  }
  if (meta) *meta = header.value("meta", nlohmann::json());

  std::vector<FlqbField> out;
  for (const auto& jf : header.at("fields")) {
    FlqbField f;
    f.name = jf.at("name").get<std::string>();
    f.shape = jf.at("shape").get<std::vector<long>>();
    f.is_complex = jf.value("complex", false);
    f.data.resize(size_t(f.count()) * (f.is_complex ? 2 : 1));
    is.read(reinterpret_cast<char*>(f.data.data()),
            std::streamsize(f.data.size() * sizeof(Real)));
    if (!is) throw std::runtime_error("flqb: truncated payload in '" + path + "'");
    out.push_back(std::move(f));
  }
  return out;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<Real>>& rows) {
  std::ofstream os(path, std::ios::binary);  // binary keeps line endings stable
  if (!os) throw std::runtime_error("csv: cannot open '" + path + "' for writing");
  for (size_t i = 0; i < header.size(); ++i)
    os << (i ? "," : "") << header[i];
  os << "\n";
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i)
      os << (i ? "," : "") << fmt_real(row[i]);
    os << "\n";
  }
  if (!os) throw std::runtime_error("csv: write failed for '" + path + "'");
}

std::vector<std::vector<Real>> read_csv(const std::string& path,
                                        std::vector<std::string>* header) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("csv: cannot open '" + path + "'");
  std::string line;
  if (!std::getline(is, line))
    throw std::runtime_error("csv: '" + path + "' is empty");
  if (header) {
    header->clear();
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header->push_back(cell);
  }
  std::vector<std::vector<Real>> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<Real> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw std::runtime_error("csv: bad number '" + cell + "' in '" + path + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_svg_plot(const std::string& path, const std::string& title,
                    const std::string& xlabel, const std::string& ylabel,
                    const std::vector<SvgSeries>& series) {
  const int W = 720, H = 480, ML = 70, MR = 20, MT = 40, MB = 50;
  Real xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  bool first = true;
  for (const auto& s : series)
    for (const auto& p : s.pts) {
      if (first) {
        xmin = xmax = p.first;
        ymin = ymax = p.second;
        first = false;
      }
      xmin = std::min(xmin, p.first);
      xmax = std::max(xmax, p.first);
      ymin = std::min(ymin, p.second);
      ymax = std::max(ymax, p.second);
    }
  if (xmax - xmin < 1e-300) xmax = xmin + 1;
  if (ymax - ymin < 1e-300) ymax = ymin + 1;
  const Real xpad = 0.05 * (xmax - xmin), ypad = 0.08 * (ymax - ymin);
  xmin -= xpad; xmax += xpad; ymin -= ypad; ymax += ypad;
  auto X = [&](Real x) { return ML + (x - xmin) / (xmax - xmin) * (W - ML - MR); };
  auto Y = [&](Real y) { return H - MB - (y - ymin) / (ymax - ymin) * (H - MT - MB); };

  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("svg: cannot open '" + path + "' for writing");
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
     << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
  os << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\" "
        "font-family=\"sans-serif\">" << title << "</text>\n";

  // frame and ticks
  os << "<rect x=\"" << ML << "\" y=\"" << MT << "\" width=\"" << W - ML - MR
     << "\" height=\"" << H - MT - MB << "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const Real xv = xmin + (xmax - xmin) * k / 4.0;
    const Real yv = ymin + (ymax - ymin) * k / 4.0;
    os << "<line x1=\"" << X(xv) << "\" y1=\"" << H - MB << "\" x2=\"" << X(xv)
       << "\" y2=\"" << H - MB + 5 << "\" stroke=\"#444\"/>\n";
    os << "<text x=\"" << X(xv) << "\" y=\"" << H - MB + 20
       << "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">"
       << fmt_tick(xv) << "</text>\n";
    os << "<line x1=\"" << ML - 5 << "\" y1=\"" << Y(yv) << "\" x2=\"" << ML
       << "\" y2=\"" << Y(yv) << "\" stroke=\"#444\"/>\n";
    os << "<text x=\"" << ML - 8 << "\" y=\"" << Y(yv) + 4
       << "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">"
       << fmt_tick(yv) << "</text>\n";
  }
  os << "<text x=\"" << (ML + W - MR) / 2 << "\" y=\"" << H - 12
     << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\">" << xlabel
     << "</text>\n";
  os << "<text x=\"16\" y=\"" << (MT + H - MB) / 2
     << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\" "
        "transform=\"rotate(-90 16 " << (MT + H - MB) / 2 << ")\">" << ylabel
     << "</text>\n";

  int li = 0;
  for (const auto& s : series) {
    if (s.line && s.pts.size() > 1) {
      os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
      for (const auto& p : s.pts) os << X(p.first) << "," << Y(p.second) << " ";
      os << "\"/>\n";
    }
    if (s.marks)
      for (const auto& p : s.pts)
        os << "<circle cx=\"" << X(p.first) << "\" cy=\"" << Y(p.second)
           << "\" r=\"3\" fill=\"" << s.color << "\"/>\n";
    os << "<text x=\"" << W - MR - 8 << "\" y=\"" << MT + 18 + 16 * li
       << "\" text-anchor=\"end\" font-size=\"12\" font-family=\"sans-serif\" fill=\""
       << s.color << "\">" << s.label << "</text>\n";
    ++li;
  }
  os << "</svg>\n";
  if (!os) throw std::runtime_error("svg: write failed for '" + path + "'");
}

namespace {

const nlohmann::json& need_section(const nlohmann::json& j, const char* name) {
  if (!j.contains(name))
    throw std::runtime_error(std::string("config: missing section '") + name + "'");
  if (!j.at(name).is_object())
    throw std::runtime_error(std::string("config: section '") + name + "' must be an object");
  return j.at(name);
}

} // namespace

Config parse_config(const nlohmann::json& j) {
  Config c;
  try {
    const auto& grid = need_section(j, "grid");
    c.dim_n = grid.contains("dim_n") ? grid.value("dim_n", 2) : grid.value("n", 2);
    c.nh = grid.value("nh", 16);
    c.nz = grid.value("nz", 17);
    c.alpha = grid.value("alpha", std::vector<Real>(size_t(c.dim_n - 1), 1.0));

    const auto& prm = need_section(j, "params");
    c.nu = prm.value("nu", 10.0);
    c.nu_tilde = prm.value("nu_tilde", 10.0);
    c.gamma = prm.value("gamma", 40.0);
    c.S = prm.value("S", 0.0);
    c.S_factor_of_threshold = prm.value("S_factor_of_threshold", -1.0);
    c.pressure = prm.value("pressure", std::string("isothermal"));
    c.adiabatic = prm.value("adiabatic", 1.4);

    if (j.contains("force")) {
      const auto& frc = j.at("force");
      for (const auto& jm : frc.value("modes", nlohmann::json::array())) {
        ForceModeConfig m;
        m.component = jm.value("component", 0);
        m.kh = jm.value("kh", std::vector<int>(size_t(c.dim_n - 1), 0));
        m.mt = jm.value("mt", 0);
        m.profile = jm.value("profile", 1);
        m.amp = jm.value("amp", 1.0);
        c.force_modes.push_back(m);
      }
    }
    if (j.contains("state")) {
      c.nt = j.at("state").value("nt", 64);
      c.substeps = j.at("state").value("substeps", 4);
    }
    if (j.contains("floquet")) {
      const auto& flq = j.at("floquet");
      c.mono_nt = flq.contains("mono_nt") ? flq.value("mono_nt", 64) : flq.value("nt", 64);
      c.richardson = flq.value("richardson", true);
    }
    if (j.contains("dispersion")) {
      c.radii = j.at("dispersion").value("radii", c.radii);
      c.eta_list = j.at("dispersion").value("eta", std::vector<std::vector<Real>>{});
    }
    c.seed = j.value("seed", 1u);
    if (j.contains("dispersion")) c.seed = j.at("dispersion").value("seed", c.seed);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("config: ") + e.what());
  }
  return c;
}

Config load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("config: cannot open '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(is);
  } catch (const std::exception& e) {
    throw std::runtime_error("config: parse error in '" + path + "': " + e.what());
  }
  return parse_config(j);
}

CellGrid config_grid(const Config& c) {
  return CellGrid::make(c.dim_n, c.nh, c.nz, c.alpha);
}

Params config_params(const Config& c) {
  Params p;
  p.nu = c.nu;
  p.nu_tilde = c.nu_tilde;
  p.gamma = c.gamma;
  p.dim_n = c.dim_n;
  p.alpha = c.alpha;
  p.pressure = PressureLaw::named(c.pressure, c.adiabatic);
  if (c.S_factor_of_threshold >= 0.0) {
    p.S_force = 0.0;
    p.S_force = c.S_factor_of_threshold * check_regime(p).S_threshold;
  } else {
    p.S_force = c.S;
  }
  p.validate();
  return p;
}

ForceSpec config_force(const Config& c) {
  ForceSpec spec;
  for (const auto& m : c.force_modes) {
    ForceMode fm;
    fm.component = m.component;
    fm.kh = m.kh;
    fm.mt = m.mt;
    fm.profile = m.profile;
    fm.amp = m.amp;
    spec.modes.push_back(fm);
  }
  return spec;
}

std::string content_hash(const std::string& bytes) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

nlohmann::json RunManifest::to_json() const {
  nlohmann::json j;
  j["config_hash"] = config_hash;
  j["parameters"] = parameters;
  j["tolerances"] = tolerances;
  j["stages"] = nlohmann::json::array();
  for (const auto& s : stages)
    j["stages"].push_back({{"name", s.name},
                           {"seconds", s.seconds},
                           {"ok", s.ok},
                           {"message", s.message}});
  j["outputs"] = outputs;
  j["verified"] = verified;
  return j;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("io: cannot open '" + path + "' for writing");
  os << text;
  if (!os) throw std::runtime_error("io: write failed for '" + path + "'");
}

std::string read_text(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("io: cannot open '" + path + "'");
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

} // namespace floqns
