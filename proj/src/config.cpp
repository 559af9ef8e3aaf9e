#include "shell_lab/config.hpp"

#include "shell_lab/isospace.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace shell_lab {

namespace {

const std::map<std::string, std::string>& aliases() {
  static const std::map<std::string, std::string> a = {
      {"beta", "gamma.beta"},       {"h_list", "gamma.h_list"},        {"rings", "mesh.rings"},
      {"order", "mesh.order"},      {"mu", "material.mu"},             {"lambda", "material.lambda"},
      {"mode", "iso.modes"},        {"modes", "iso.modes"},            {"force_profile", "loads.force_profile"},
      {"seed", "run.seed"},         {"out", "output.dir"},             {"kernel_tol", "symgrad.kernel_tol"},
      {"tol_fixed_point", "match.tol"}};
  return a;
}

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> k = {
      "chart.kind",      "chart.radius",          "chart.extent",        "chart.axes",
      "chart.k1",        "chart.k2",              "chart.quartic",       "mesh.rings",
      "mesh.order",      "material.mu",           "material.lambda",     "gamma.beta",
      "gamma.h_list",    "gamma.thickness_points", "gamma.max_iter", "iso.modes",          "iso.integrability_tol",
      "iso.residual_tol", "symgrad.method",       "symgrad.case",        "symgrad.kernel_tol",
      "symgrad.alpha",   "match.h_list",          "match.tol",           "match.max_iter",
      "match.smoothing", "energy.h",              "loads.force_profile", "loads.force_file",
      "loads.modes",     "loads.kernel_tol",      "output.dir",          "run.seed"};
  return k;
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n"), b = s.find_last_not_of(" \t\r\n");
  return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double x = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(x))
    throw ConfigError(key, "expected a number, got '" + v + "'");
  return x;
}

long long to_int(const std::string& key, const std::string& v) {
  long long x = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw ConfigError(key, "expected an integer, got '" + v + "'");
  return x;
}

std::vector<std::string> split(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  for (std::string item; std::getline(ss, item, ',');) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// shortest round-trip form
std::string fmt(double x) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

std::string join(const std::vector<double>& xs) {
  std::string s;
  for (size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + fmt(xs[i]);
  return s;
}

}  // namespace

std::vector<double> parse_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  for (const std::string& s : split(value)) out.push_back(to_double(key, s));
  return out;
}

std::string canonical_key(const std::string& key) {
  auto it = aliases().find(key);
  std::string k = it == aliases().end() ? key : it->second;
  for (const std::string& known : known_keys())
    if (k == known) return k;
  throw ConfigError(key, "unknown key");
}

ConfigMap parse_config_text(const std::string& text, const std::string& source) {
  ConfigMap out;
  std::stringstream ss(text);
  int line_no = 0;
  for (std::string line; std::getline(ss, line);) {
    ++line_no;
    if (size_t c = line.find('#'); c != std::string::npos) line.resize(c);
    line = trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(source + ":" + std::to_string(line_no), "expected key=value, got '" + line + "'");
    out[canonical_key(trim(line.substr(0, eq)))] = trim(line.substr(eq + 1));
  }
  return out;
}

ConfigMap read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

SurfaceChart RunConfig::chart() const {
  if (chart_kind == "sphere_cap") return SurfaceChart::sphere_cap(radius, extent);
  if (chart_kind == "ellipsoid_cap") return SurfaceChart::ellipsoid_cap(axes(0), axes(1), axes(2), extent);
  if (chart_kind == "graph") return SurfaceChart::graph(k1, k2, quartic);
  if (chart_kind == "flat") return SurfaceChart::flat();
  throw ConfigError("chart.kind", "unknown chart '" + chart_kind + "' (sphere_cap, ellipsoid_cap, graph, flat)");
}

RunConfig parse_config(const ConfigMap& file_entries, const ConfigMap& overrides) {
  ConfigMap m;
  for (const auto& [k, v] : file_entries) m[canonical_key(k)] = v;
  for (const auto& [k, v] : overrides) m[canonical_key(k)] = v;

  RunConfig c;
  auto num = [&](const char* key, double& dst) {
    if (auto it = m.find(key); it != m.end()) dst = to_double(key, it->second);
  };
  auto integer = [&](const char* key, auto& dst) {
    if (auto it = m.find(key); it != m.end()) dst = decltype(dst + 0)(to_int(key, it->second));
  };
  auto str = [&](const char* key, std::string& dst) {
    if (auto it = m.find(key); it != m.end()) dst = it->second;
  };

  str("chart.kind", c.chart_kind);
  num("chart.radius", c.radius);
  num("chart.extent", c.extent);
  if (auto it = m.find("chart.axes"); it != m.end()) {
    std::vector<double> a = parse_list("chart.axes", it->second);
    if (a.size() != 3) throw ConfigError("chart.axes", "expected three semi-axes a,b,c");
    c.axes = Vec3(a[0], a[1], a[2]);
  }
  num("chart.k1", c.k1);
  num("chart.k2", c.k2);
  num("chart.quartic", c.quartic);
  integer("mesh.rings", c.rings);
  integer("mesh.order", c.order);
  num("material.mu", c.mu);
  num("material.lambda", c.lambda);
  num("gamma.beta", c.gamma.beta);
  if (auto it = m.find("gamma.h_list"); it != m.end()) c.gamma.hs = parse_list("gamma.h_list", it->second);
  integer("gamma.thickness_points", c.gamma.thickness_points);
  integer("gamma.max_iter", c.gamma_max_iter);
  if (auto it = m.find("iso.modes"); it != m.end()) c.modes = split(it->second);
  num("iso.integrability_tol", c.integrability_tol);
  num("iso.residual_tol", c.residual_tol);
  str("symgrad.method", c.symgrad_method);
  str("symgrad.case", c.symgrad_case);
  num("symgrad.kernel_tol", c.kernel_tol);
  num("symgrad.alpha", c.alpha);
  if (auto it = m.find("match.h_list"); it != m.end()) c.match_hs = parse_list("match.h_list", it->second);
  num("match.tol", c.match.tol);
  integer("match.max_iter", c.match.max_iter);
  num("match.smoothing", c.match.smoothing);
  num("energy.h", c.energy_h);
  str("loads.force_profile", c.force_profile);
  str("loads.force_file", c.force_file);
  integer("loads.modes", c.loads_modes);
  num("loads.kernel_tol", c.loads_kernel_tol);
  str("output.dir", c.output_dir);
  if (auto it = m.find("run.seed"); it != m.end()) {
    long long s = to_int("run.seed", it->second);
    if (s < 0) throw ConfigError("run.seed", "seed must be non-negative");
    c.seed = std::uint64_t(s);
  }

  // validation
  c.chart();
  if (c.rings < 1) throw ConfigError("mesh.rings", "rings must be >= 1");
  if (c.order != 1 && c.order != 2) throw ConfigError("mesh.order", "order must be 1 or 2");
  MaterialModel(c.mu, c.lambda);
  c.gamma.validate();
  if (c.modes.empty()) throw ConfigError("iso.modes", "needs at least one boundary mode");
  for (const std::string& mode : c.modes) mode_function(mode);
  if (!(c.integrability_tol > 0)) throw ConfigError("iso.integrability_tol", "tolerance must be positive");
  if (!(c.residual_tol > 0)) throw ConfigError("iso.residual_tol", "tolerance must be positive");
  if (c.symgrad_method != "reconstruction" && c.symgrad_method != "least_squares" &&
      c.symgrad_method != "minimal_norm")
    throw ConfigError("symgrad.method", "expected reconstruction, least_squares or minimal_norm");
  if (!(c.kernel_tol > 0)) throw ConfigError("symgrad.kernel_tol", "tolerance must be positive");
  if (!(c.alpha > 0)) throw ConfigError("symgrad.alpha", "regularization weight must be positive");
  if (c.match_hs.empty()) throw ConfigError("match.h_list", "needs at least one h");
  for (size_t i = 0; i < c.match_hs.size(); ++i) {
    if (!(c.match_hs[i] > 0)) throw ConfigError("match.h_list", "h must be positive");
    if (i > 0 && !(c.match_hs[i] < c.match_hs[i - 1]))
      throw ConfigError("match.h_list", "h must be strictly decreasing");
  }
  if (!(c.match.tol > 0)) throw ConfigError("match.tol", "tolerance must be positive");
  if (c.match.max_iter < 1) throw ConfigError("match.max_iter", "need at least one iteration");
  if (!(c.match.smoothing >= 0)) throw ConfigError("match.smoothing", "smoothing must be non-negative");
  if (c.gamma_max_iter < 1) throw ConfigError("gamma.max_iter", "need at least one iteration");
  if (!(c.energy_h > 0)) throw ConfigError("energy.h", "thickness must be positive");
  if (c.force_profile != "axial" && c.force_profile != "shear" && c.force_profile != "file")
    throw ConfigError("loads.force_profile", "expected axial, shear or file");
  if (c.force_profile == "file" && c.force_file.empty())
    throw ConfigError("loads.force_file", "force_profile=file needs loads.force_file");
  if (c.loads_modes < 1) throw ConfigError("loads.modes", "need K >= 1 so the rigid modes are included");
  if (!(c.loads_kernel_tol > 0)) throw ConfigError("loads.kernel_tol", "tolerance must be positive");
  if (c.output_dir.empty()) throw ConfigError("output.dir", "output directory must be nonempty");

  // effective values
  ConfigMap& e = c.entries;
  e["chart.kind"] = c.chart_kind;
  e["chart.radius"] = fmt(c.radius);
  e["chart.extent"] = fmt(c.extent);
  e["chart.axes"] = join({c.axes(0), c.axes(1), c.axes(2)});
  e["chart.k1"] = fmt(c.k1);
  e["chart.k2"] = fmt(c.k2);
  e["chart.quartic"] = fmt(c.quartic);
  e["mesh.rings"] = std::to_string(c.rings);
  e["mesh.order"] = std::to_string(c.order);
  e["material.mu"] = fmt(c.mu);
  e["material.lambda"] = fmt(c.lambda);
  e["gamma.beta"] = fmt(c.gamma.beta);
  e["gamma.h_list"] = join(c.gamma.hs);
  e["gamma.thickness_points"] = std::to_string(c.gamma.thickness_points);
  e["gamma.max_iter"] = std::to_string(c.gamma_max_iter);
  std::string modes;
  for (size_t i = 0; i < c.modes.size(); ++i) modes += (i ? "," : "") + c.modes[i];
  e["iso.modes"] = modes;
  e["iso.integrability_tol"] = fmt(c.integrability_tol);
  e["iso.residual_tol"] = fmt(c.residual_tol);
  e["symgrad.method"] = c.symgrad_method;
  e["symgrad.case"] = c.symgrad_case;
  e["symgrad.kernel_tol"] = fmt(c.kernel_tol);
  e["symgrad.alpha"] = fmt(c.alpha);
  e["match.h_list"] = join(c.match_hs);
  e["match.tol"] = fmt(c.match.tol);
  e["match.max_iter"] = std::to_string(c.match.max_iter);
  e["match.smoothing"] = fmt(c.match.smoothing);
  e["energy.h"] = fmt(c.energy_h);
  e["loads.force_profile"] = c.force_profile;
  e["loads.force_file"] = c.force_file;
  e["loads.modes"] = std::to_string(c.loads_modes);
  e["loads.kernel_tol"] = fmt(c.loads_kernel_tol);
  e["output.dir"] = c.output_dir;
  e["run.seed"] = std::to_string(c.seed);
  return c;
}

}  // namespace shell_lab
