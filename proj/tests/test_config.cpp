#include "doctest.h"

#include "shell_lab/config.hpp"

using namespace shell_lab;

namespace {

std::string rejected_key(const ConfigMap& m) {
  try {
    parse_config(m);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "";
}

}  // namespace

TEST_CASE("defaults validate") {
  RunConfig c = parse_config({});
  CHECK(c.gamma.beta == 3.0);
  CHECK(c.rings == 24);
  CHECK(c.entries.at("gamma.h_list") == "0.2,0.1,0.05,0.025");
}

TEST_CASE("text parsing, aliases, comments") {
  ConfigMap m = parse_config_text("# sweep\nbeta=3.0\nh_list = 0.2,0.1,0.05  # three\n\nchart.kind=sphere_cap\n");
  CHECK(m.at("gamma.beta") == "3.0");
  CHECK(m.at("gamma.h_list") == "0.2,0.1,0.05");
  RunConfig c = parse_config(m);
  REQUIRE(c.gamma.hs.size() == 3);
  CHECK(c.gamma.hs[2] == 0.05);
  CHECK_THROWS_AS(parse_config_text("beta 3"), ConfigError);
}

TEST_CASE("overrides win over file entries") {
  RunConfig c = parse_config({{"gamma.beta", "3.0"}, {"mesh.rings", "8"}}, {{"beta", "2.5"}});
  CHECK(c.gamma.beta == 2.5);
  CHECK(c.rings == 8);
}

TEST_CASE("rejections name the key") {
  CHECK(rejected_key({{"beta", "4.0"}}) == "gamma.beta");
  CHECK(rejected_key({{"beta", "2.0"}}) == "gamma.beta");
  CHECK(rejected_key({{"rings", "0"}}) == "mesh.rings");
  CHECK(rejected_key({{"rings", "two"}}) == "mesh.rings");
  CHECK(rejected_key({{"h_list", "0.1,0.2"}}) == "gamma.h_list");
  CHECK(rejected_key({{"h_list", "0.1,-0.05"}}) == "gamma.h_list");
  CHECK(rejected_key({{"match.tol", "0"}}) == "match.tol");
  CHECK(rejected_key({{"symgrad.kernel_tol", "-1e-8"}}) == "symgrad.kernel_tol");
  CHECK(rejected_key({{"loads.modes", "0"}}) == "loads.modes");
  CHECK(rejected_key({{"material.mu", "0"}}) == "material.mu");
  CHECK(rejected_key({{"iso.modes", "cosine2"}}) == "iso.modes");
  CHECK(rejected_key({{"chart.kind", "torus"}}) == "chart.kind");
  CHECK(rejected_key({{"chart.extent", "4"}}) == "chart.extent");
  CHECK(rejected_key({{"loads.force_profile", "file"}}) == "loads.force_file");
  CHECK(rejected_key({{"colour", "red"}}) == "colour");
  try {
    parse_config({{"beta", "4.0"}});
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("beta must lie in (2,4)") != std::string::npos);
  }
}
