#pragma once

#include "shell_lab/energy.hpp"
#include "shell_lab/geometry.hpp"
#include "shell_lab/matching.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace shell_lab {

// key -> raw value, keys canonical (dotted)
using ConfigMap = std::map<std::string, std::string>;

struct RunConfig {
  std::string chart_kind = "sphere_cap";
  double radius = 1.0, extent = 1.0;
  Vec3 axes = Vec3(1.0, 0.8, 0.6);
  double k1 = 1.0, k2 = 1.0, quartic = 0.0;

  int rings = 24;
  int order = 2;
  double mu = 1.0, lambda = 1.0;
  GammaConfig gamma;

  std::vector<std::string> modes{"cos2"};
  double integrability_tol = 0.05, residual_tol = 0.05;

  std::string symgrad_method = "reconstruction";
  std::string symgrad_case = "poly_trig";
  double kernel_tol = 1e-8;
  double alpha = 1e-6;

  std::vector<double> match_hs{0.2, 0.1, 0.05};
  MatchOptions match;

  double energy_h = 0.1;
  int gamma_max_iter = 60;  // matching iterations inside the sweep (large eps converges slowly)

  std::string force_profile = "axial";
  std::string force_file;
  int loads_modes = 3;
  double loads_kernel_tol = 1e-3;

  std::string output_dir = "out";
  std::uint64_t seed = 1;

  ConfigMap entries;  // every key with its effective value, for echoing

  SurfaceChart chart() const;
  MatchOptions match_options() const { return match; }
};

// "key = value" lines; '#' starts a comment; blank lines ignored
ConfigMap parse_config_text(const std::string& text, const std::string& source = "<text>");
ConfigMap read_config_file(const std::string& path);

// maps short aliases (beta, h_list, rings, ...) to canonical keys; unknown keys throw
std::string canonical_key(const std::string& key);

// defaults, then file entries, then overrides; validated
RunConfig parse_config(const ConfigMap& entries, const ConfigMap& overrides = {});

std::vector<double> parse_list(const std::string& key, const std::string& value);

}  // namespace shell_lab
