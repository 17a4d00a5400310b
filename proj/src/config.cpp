#include "lab/config.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace lab::config {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  if (!out.empty() && out.back().empty()) out.pop_back();
  return out;
}

double parse_num(const std::string& s, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: bad number '" + s + "' for key " + key);
  }
}

std::vector<double> parse_group(const std::string& s, const std::string& key) {
  std::stringstream ss(s);
  std::vector<double> v;
  std::string tok;
  while (ss >> tok) v.push_back(parse_num(tok, key));
  return v;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = {
      "fs-baseline", "nu-third", "nu-half",   "nu-one",
      "poincare-vol", "product-fs", "atom-line", "custom"};
  return names;
}

ExperimentConfig parse(const std::string& text) {
  ExperimentConfig c;
  c.p_list.clear();
  std::string section;
  std::istringstream in(text);
  std::string rawline;
  int lineno = 0;
  bool saw_plist = false;
  while (std::getline(in, rawline)) {
    ++lineno;
    std::string line = trim(rawline);
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = trim(line.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": malformed section header");
      section = line.substr(1, line.size() - 2);
      const std::vector<std::string> known = {"experiment", "weight", "volume",
                                              "grid", "regions", "output"};
      if (std::find(known.begin(), known.end(), section) == known.end())
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    const std::string qual = section + "." + key;

    if (qual == "experiment.scenario") {
      c.scenario = val;
      const auto& names = scenario_names();
      if (std::find(names.begin(), names.end(), val) == names.end())
        throw ConfigError("config: unknown scenario '" + val + "'");
    } else if (qual == "experiment.kind") {
      const std::vector<std::string> kinds = {"dim",   "bergman",     "fscurrent",
                                              "zeros", "expectation", "ma2",
                                              "report-all"};
      if (std::find(kinds.begin(), kinds.end(), val) == kinds.end())
        throw ConfigError("config: unknown experiment kind '" + val + "'");
      c.kind = val;
    } else if (qual == "experiment.p_list") {
      saw_plist = true;
      for (const auto& s : split(val, ','))
        c.p_list.push_back((int)parse_num(s, key));
    } else if (qual == "experiment.seed") {
      c.seed = (std::uint64_t)parse_num(val, key);
    } else if (qual == "experiment.samples") {
      c.samples = (int)parse_num(val, key);
    } else if (qual == "weight.fs_coeff") {
      c.has_weight_override = true;
      c.w_fs_coeff = parse_num(val, key);
    } else if (qual == "weight.quad_coeff") {
      c.has_weight_override = true;
      c.w_quad_coeff = parse_num(val, key);
    } else if (qual == "weight.atoms") {
      c.has_weight_override = true;
      for (const auto& s : split(val, ',')) {
        const auto g = parse_group(s, key);
        if (g.size() != 3)
          throw ConfigError("config: atom entries need 're im nu'");
        c.w_atoms.push_back({cplx(g[0], g[1]), g[2]});
      }
    } else if (qual == "weight.eps") {
      c.has_weight_override = true;
      c.w_eps = parse_num(val, key);
    } else if (qual == "weight.punctures") {
      c.has_weight_override = true;
      for (const auto& s : split(val, ',')) {
        const auto g = parse_group(s, key);
        if (g.size() != 2)
          throw ConfigError("config: puncture entries need 're im'");
        c.w_punctures.push_back(cplx(g[0], g[1]));
      }
    } else if (qual == "volume.kind") {
      c.has_volume_override = true;
      if (val != "fs" && val != "poincare")
        throw ConfigError("config: unknown volume kind '" + val + "'");
      c.vol_kind = val;
    } else if (qual == "volume.punctures") {
      c.has_volume_override = true;
      for (const auto& s : split(val, ',')) {
        const auto g = parse_group(s, key);
        if (g.size() != 2)
          throw ConfigError("config: puncture entries need 're im'");
        c.vol_punctures.push_back(cplx(g[0], g[1]));
      }
    } else if (qual == "grid.r0") {
      c.grid_r0 = parse_num(val, key);
    } else if (qual == "grid.r1") {
      c.grid_r1 = parse_num(val, key);
    } else if (qual == "grid.nr") {
      c.grid_nr = (int)parse_num(val, key);
    } else if (qual == "grid.ntheta") {
      c.grid_ntheta = (int)parse_num(val, key);
    } else if (qual == "grid.delta") {
      c.grid_delta = parse_num(val, key);
    } else if (qual == "regions.boxes") {
      for (const auto& s : split(val, ',')) {
        const auto g = parse_group(s, key);
        if (g.size() != 4)
          throw ConfigError("config: region entries need 's0 s1 t0 t1'");
        c.region_boxes.push_back({g[0], g[1], g[2], g[3]});
      }
    } else if (qual == "output.dir") {
      c.out_dir = val;
    } else if (qual == "output.svg") {
      if (val != "true" && val != "false")
        throw ConfigError("config: output.svg must be true or false");
      c.svg = (val == "true");
    } else {
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": unknown key '" + qual + "'");
    }
  }
  if (!saw_plist) c.p_list = {4, 8, 16, 32};
  if (c.p_list.empty())
    throw ConfigError("config: experiment.p_list must not be empty");
  return c;
}

ExperimentConfig parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string emit(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "[experiment]\n";
  out << "scenario = " << c.scenario << "\n";
  out << "kind = " << c.kind << "\n";
  out << "p_list = ";
  for (std::size_t i = 0; i < c.p_list.size(); ++i)
    out << (i ? ", " : "") << c.p_list[i];
  out << "\n";
  out << "seed = " << c.seed << "\n";
  out << "samples = " << c.samples << "\n";
  if (c.has_weight_override) {
    out << "\n[weight]\n";
    out << "fs_coeff = " << fmt(c.w_fs_coeff) << "\n";
    out << "quad_coeff = " << fmt(c.w_quad_coeff) << "\n";
    if (!c.w_atoms.empty()) {
      out << "atoms = ";
      for (std::size_t i = 0; i < c.w_atoms.size(); ++i)
        out << (i ? ", " : "") << fmt(c.w_atoms[i].point.real()) << " "
            << fmt(c.w_atoms[i].point.imag()) << " " << fmt(c.w_atoms[i].nu);
      out << "\n";
    }
    out << "eps = " << fmt(c.w_eps) << "\n";
    if (!c.w_punctures.empty()) {
      out << "punctures = ";
      for (std::size_t i = 0; i < c.w_punctures.size(); ++i)
        out << (i ? ", " : "") << fmt(c.w_punctures[i].real()) << " "
            << fmt(c.w_punctures[i].imag());
      out << "\n";
    }
  }
  if (c.has_volume_override) {
    out << "\n[volume]\n";
    out << "kind = " << c.vol_kind << "\n";
    if (!c.vol_punctures.empty()) {
      out << "punctures = ";
      for (std::size_t i = 0; i < c.vol_punctures.size(); ++i)
        out << (i ? ", " : "") << fmt(c.vol_punctures[i].real()) << " "
            << fmt(c.vol_punctures[i].imag());
      out << "\n";
    }
  }
  out << "\n[grid]\n";
  out << "r0 = " << fmt(c.grid_r0) << "\n";
  out << "r1 = " << fmt(c.grid_r1) << "\n";
  out << "nr = " << c.grid_nr << "\n";
  out << "ntheta = " << c.grid_ntheta << "\n";
  out << "delta = " << fmt(c.grid_delta) << "\n";
  if (!c.region_boxes.empty()) {
    out << "\n[regions]\n";
    out << "boxes = ";
    for (std::size_t i = 0; i < c.region_boxes.size(); ++i) {
      const auto& b = c.region_boxes[i];
      out << (i ? ", " : "") << fmt(b[0]) << " " << fmt(b[1]) << " "
          << fmt(b[2]) << " " << fmt(b[3]);
    }
    out << "\n";
  }
  out << "\n[output]\n";
  out << "dir = " << c.out_dir << "\n";
  out << "svg = " << (c.svg ? "true" : "false") << "\n";
  return out.str();
}

std::uint64_t config_hash(const ExperimentConfig& c) { return fnv1a(emit(c)); }

}  // namespace lab::config
