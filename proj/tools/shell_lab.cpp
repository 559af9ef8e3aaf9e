#include "CLI11.hpp"
#include "json.hpp"

#include "shell_lab/config.hpp"
#include "shell_lab/energy.hpp"
#include "shell_lab/isospace.hpp"
#include "shell_lab/loads.hpp"
#include "shell_lab/manufactured.hpp"
#include "shell_lab/matching.hpp"
#include "shell_lab/parallel.hpp"
#include "shell_lab/symgrad.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace shell_lab;
using nlohmann::ordered_json;
namespace fs = std::filesystem;

#ifndef SHELL_LAB_VERSION
#define SHELL_LAB_VERSION "0.0.0"
#endif

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

class Run {
 public:
  Run(std::string name, RunConfig cfg) : name_(std::move(name)), cfg_(std::move(cfg)) {
    fs::create_directories(cfg_.output_dir);
  }
  const RunConfig& cfg() const { return cfg_; }

  std::ofstream open(const std::string& file) {
    outputs_.push_back(file);
    std::ofstream os(fs::path(cfg_.output_dir) / file);
    if (!os) throw ConfigError("output.dir", "cannot write " + file);
    return os;
  }
  void csv(const std::string& file, const std::string& header, const std::vector<std::vector<double>>& rows) {
    std::ofstream os = open(file);
    os << header << '\n';
    for (const auto& r : rows) {
      for (size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << num(r[i]);
      os << '\n';
    }
  }
  void json(const std::string& file, const ordered_json& j) { open(file) << j.dump(2) << '\n'; }
  void field(const std::string& file, const VectorField3& V) {
    std::vector<std::vector<double>> rows;
    const auto& pts = V.space->dof_coords();
    for (int i = 0; i < V.values.rows(); ++i)
      rows.push_back({double(i), pts[i](0), pts[i](1), V.values(i, 0), V.values(i, 1), V.values(i, 2)});
    csv(file, "dof,p1,p2,vx,vy,vz", rows);
  }

  template <class F>
  auto timed(const std::string& label, F&& f) {
    auto t0 = std::chrono::steady_clock::now();
    auto finish = [&] {
      timings_[label] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };
    if constexpr (std::is_void_v<decltype(f())>) {
      f();
      finish();
    } else {
      auto r = f();
      finish();
      return r;
    }
  }

  void metadata(const std::string& status) {
    ordered_json j;
    j["subcommand"] = name_;
    j["status"] = status;
    j["version"] = SHELL_LAB_VERSION;
    j["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                 std::to_string(EIGEN_MINOR_VERSION);
    j["threads"] = thread_count();
    j["config"] = ordered_json::object();
    for (const auto& [k, v] : cfg_.entries) j["config"][k] = v;
    j["timings_s"] = ordered_json::object();
    for (const auto& [k, v] : timings_) j["timings_s"][k] = v;
    j["outputs"] = outputs_;
    std::ofstream(fs::path(cfg_.output_dir) / "run_metadata.json") << j.dump(2) << '\n';
  }

 private:
  std::string name_;
  RunConfig cfg_;
  std::vector<std::string> outputs_;
  std::map<std::string, double> timings_;
};

ordered_json matrix_json(const Mat3& Q) {
  ordered_json j = ordered_json::array();
  for (int i = 0; i < 3; ++i) j.push_back({Q(i, 0), Q(i, 1), Q(i, 2)});
  return j;
}

ordered_json vector_json(const VecX& v) {
  ordered_json j = ordered_json::array();
  for (int i = 0; i < v.size(); ++i) j.push_back(v(i));
  return j;
}

IsoOptions iso_options(const RunConfig& c) {
  IsoOptions o;
  o.integrability_tol = c.integrability_tol;
  o.residual_tol = c.residual_tol;
  return o;
}

SymGradMethod method_of(const std::string& m) {
  if (m == "least_squares") return SymGradMethod::least_squares;
  if (m == "minimal_norm") return SymGradMethod::minimal_norm;
  return SymGradMethod::reconstruction;
}

void require_order2(const RunConfig& c, const char* what) {
  if (c.order != 2) throw ConfigError("mesh.order", std::string(what) + " needs order-2 elements");
}

void run_geom(Run& run) {
  const RunConfig& c = run.cfg();
  SurfaceChart chart = c.chart();
  Surface S = run.timed("setup", [&] { return Surface(chart, c.rings, c.order); });
  std::vector<std::vector<double>> rows;
  const auto& pts = S.space().dof_coords();
  for (size_t i = 0; i < pts.size(); ++i) {
    GeometryFields G = geometry_at(chart, pts[i]);
    Eigen::EigenSolver<Mat2> es(G.weingarten());
    Vec2 k = es.eigenvalues().real();
    rows.push_back({double(i), pts[i](0), pts[i](1), G.r(0), G.r(1), G.r(2), G.mean_curvature, G.gauss_curvature,
                    k.minCoeff(), k.maxCoeff()});
  }
  run.csv("geom.csv", "dof,p1,p2,x,y,z,mean_curvature,gauss_curvature,k_min,k_max", rows);
  std::ofstream mesh_out = run.open("mesh.txt");
  write_mesh(mesh_out, S.space().mesh());
  ordered_json j;
  j["chart"] = chart.describe();
  j["nodes"] = S.space().mesh().num_nodes();
  j["elements"] = S.space().num_elements();
  j["dofs"] = S.space().num_dofs();
  j["area"] = S.area();
  if (chart.elliptic_expected()) {
    EllipticityBounds b = check_ellipticity(chart, disk_samples(32, 64));
    j["ellipticity"] = {{"c_min", b.c_min}, {"c_max", b.c_max}, {"constant", b.constant}};
  }
  run.json("geom.json", j);
}

void run_symgrad(Run& run) {
  const RunConfig& c = run.cfg();
  require_order2(c, "solve-symgrad");
  Surface S(c.chart(), c.rings, c.order);
  ManufacturedCase mc = manufactured_case(c.symgrad_case);
  SymGradSolver solver(S, c.kernel_tol, method_of(c.symgrad_method), c.alpha);
  SymGradSolution sol = run.timed("solve", [&] { return solver.solve(manufactured_B(S, mc)); });
  double err = w12_distance_mod_constants(S, sol.w, manufactured_field(S, mc));
  ordered_json j;
  j["case"] = mc.name;
  j["method"] = sol.report.method;
  j["residual"] = sol.report.residual;
  j["boundary_curl"] = sol.report.boundary_curl;
  j["kernel_dim"] = sol.report.kernel_dim;
  j["korn_constant"] = sol.report.korn_constant;
  j["b_norm"] = sol.report.b_norm;
  j["integrability"] = sol.report.integrability;
  j["w12_error"] = err;
  j["solver_history"] = sol.report.solver_history;
  run.json("symgrad.json", j);
  run.field("symgrad_w.csv", sol.w);
}

void run_isogen(Run& run) {
  const RunConfig& c = run.cfg();
  require_order2(c, "isogen");
  Surface S(c.chart(), c.rings, c.order);
  CurlOperator op = CurlOperator::assemble(S, CurlMode::surface, c.kernel_tol);
  std::vector<std::vector<double>> rows;
  ordered_json j = ordered_json::array();
  for (size_t k = 0; k < c.modes.size(); ++k) {
    const std::string& mode = c.modes[k];
    InfIsometry iso = run.timed("mode " + mode, [&] {
      return generate_iso(op, mode_function(mode), iso_options(c), mode);
    });
    double m1 = metric_change(S, iso.V, 1e-1), m3 = metric_change(S, iso.V, 1e-3);
    double slope = std::log10(m1 / m3) / 2;
    rows.push_back({double(k), iso.sym_grad_residual, iso.integrability, iso.skew_defect, slope,
                    iso.flagged ? 1.0 : 0.0});
    j.push_back({{"mode", mode},
                 {"sym_grad_residual", iso.sym_grad_residual},
                 {"integrability", iso.integrability},
                 {"skew_defect", iso.skew_defect},
                 {"metric_slope", slope},
                 {"flagged", iso.flagged}});
    run.field("iso_" + mode + ".csv", iso.V);
  }
  run.csv("isogen.csv", "index,sym_grad_residual,integrability,skew_defect,metric_slope,flagged", rows);
  run.json("isogen.json", j);
}

struct IsoSetup {
  Surface S;
  SymGradSolver solver;
  InfIsometry iso;
  explicit IsoSetup(const RunConfig& c)
      : S(c.chart(), c.rings, c.order),
        solver(S, c.kernel_tol, SymGradMethod::minimal_norm, c.alpha),
        iso(generate_iso(solver.curl_operator(), mode_function(c.modes.front()), iso_options(c), c.modes.front())) {}
};

int run_match(Run& run) {
  const RunConfig& c = run.cfg();
  require_order2(c, "match");
  auto setup = run.timed("setup", [&] { return std::make_unique<IsoSetup>(c); });
  IsoSetup& s = *setup;
  std::vector<std::vector<double>> rows;
  ordered_json runs = ordered_json::array();
  for (double h : c.match_hs) {
    try {
      MatchResult r = run.timed("h " + num(h), [&] { return match_isometry(s.solver, s.iso.V, h, c.match); });
      double rho = r.update_norms.size() >= 3 ? contraction_rate(r) : std::nan("");
      rows.push_back({h, double(r.iterations), rho, r.defect, r.defect_unmatched, r.w_norm});
      runs.push_back({{"h", h},
                      {"status", "converged"},
                      {"iterations", r.iterations},
                      {"contraction_rate", rho},
                      {"defect", r.defect},
                      {"defect_unmatched", r.defect_unmatched},
                      {"w_norm", r.w_norm},
                      {"history", r.update_norms}});
    } catch (const NumericalError& e) {
      double rho = e.history().size() >= 3 ? contraction_rate(e.history()) : std::nan("");
      runs.push_back({{"h", h},
                      {"status", "diverged"},
                      {"message", e.what()},
                      {"contraction_rate", rho},
                      {"history", e.history()}});
      run.csv("match.csv", "h,iterations,rho,defect,defect_unmatched,w_norm", rows);
      run.json("match.json", {{"mode", c.modes.front()}, {"runs", runs}});
      throw;
    }
  }
  run.csv("match.csv", "h,iterations,rho,defect,defect_unmatched,w_norm", rows);
  run.json("match.json", {{"mode", c.modes.front()}, {"runs", runs}});
  run.field("match_V.csv", s.iso.V);
  return 0;
}

void run_energy(Run& run) {
  const RunConfig& c = run.cfg();
  require_order2(c, "energy");
  auto setup = run.timed("setup", [&] { return std::make_unique<IsoSetup>(c); });
  IsoSetup& s = *setup;
  MaterialModel material(c.mu, c.lambda);
  double I = bending_energy(s.S, material, s.iso.V);
  double Ih = bending_energy(s.S, material, bending_form_hessian(s.S, s.iso.V));
  MatchOptions opt = c.match;
  opt.max_iter = std::max(opt.max_iter, c.gamma_max_iter);
  RecoveryDeformation rec =
      run.timed("recovery", [&] { return build_recovery(s.solver, material, s.iso.V, c.energy_h, c.gamma, opt); });
  double E = run.timed("shell energy", [&] {
    return shell_energy(s.S, material, rec.map, c.energy_h, c.gamma.thickness_points);
  });
  double e = c.gamma.e(c.energy_h);
  ordered_json j;
  j["mode"] = c.modes.front();
  j["I_V"] = I;
  j["I_V_hessian"] = Ih;
  j["h"] = c.energy_h;
  j["eps"] = rec.eps;
  j["shell_energy"] = E;
  j["scaled_energy"] = E / e;
  j["ratio"] = E / e / I;
  j["match_iterations"] = rec.match.iterations;
  j["match_defect"] = rec.match.defect;
  run.json("energy.json", j);
}

void run_gamma(Run& run) {
  const RunConfig& c = run.cfg();
  require_order2(c, "gamma-sweep");
  auto setup = run.timed("setup", [&] { return std::make_unique<IsoSetup>(c); });
  IsoSetup& s = *setup;
  MaterialModel material(c.mu, c.lambda);
  MatchOptions opt = c.match;
  opt.max_iter = c.gamma_max_iter;
  std::vector<GammaRow> rows = run.timed("sweep", [&] { return gamma_sweep(s.solver, material, s.iso.V, c.gamma, opt); });
  std::vector<std::vector<double>> main, diag;
  for (const GammaRow& r : rows) {
    main.push_back({r.h, r.eps, r.scaled_energy, r.I_V, r.ratio});
    diag.push_back({r.h, double(r.iterations), r.defect, r.vh_error, r.s_h});
  }
  run.csv("gamma.csv", "h,eps,scaled_energy,I_V,ratio", main);
  run.csv("gamma_diagnostics.csv", "h,iterations,defect,vh_error,s_h", diag);
}

VectorField3 read_force_file(const Surface& S, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("loads.force_file", "cannot open '" + path + "'");
  VectorField3 f = VectorField3::zero(S.space_ptr());
  std::string line;
  std::getline(in, line);
  if (line.rfind("fx,fy,fz", 0) != 0) throw ConfigError("loads.force_file", "expected header fx,fy,fz");
  int row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (row >= f.values.rows()) throw ConfigError("loads.force_file", "more rows than dofs");
    std::stringstream ss(line);
    std::string cell;
    for (int k = 0; k < 3; ++k) {
      if (!std::getline(ss, cell, ',')) throw ConfigError("loads.force_file", "row " + std::to_string(row) + ": need 3 values");
      try {
        f.values(row, k) = std::stod(cell);
      } catch (const std::exception&) {
        throw ConfigError("loads.force_file", "row " + std::to_string(row) + ": bad number '" + cell + "'");
      }
    }
    ++row;
  }
  if (row != f.values.rows())
    throw ConfigError("loads.force_file", "expected " + std::to_string(f.values.rows()) + " rows (one per dof), got " +
                                              std::to_string(row));
  return mean_free_force(S, f);
}

void run_loads(Run& run) {
  const RunConfig& c = run.cfg();
  require_order2(c, "loads");
  Surface S(c.chart(), c.rings, c.order);
  CurlOperator op = CurlOperator::assemble(S, CurlMode::surface, c.kernel_tol);
  MaterialModel material(c.mu, c.lambda);
  IsoBasis basis = run.timed("basis", [&] { return iso_basis(op, fourier_modes(c.loads_modes), iso_options(c)); });
  LimitProblem P = run.timed("assemble", [&] { return assemble_limit_problem(S, material, basis, c.loads_kernel_tol); });
  VectorField3 f = c.force_profile == "file" ? read_force_file(S, c.force_file) : force_profile(S, c.force_profile);
  LimitSolution sol = run.timed("solve", [&] { return minimize_limit_energy(S, P, f); });
  ordered_json j;
  j["force_profile"] = c.force_profile;
  j["Q"] = matrix_json(sol.Q);
  j["m"] = sol.m;
  j["J"] = sol.J;
  j["degenerate"] = sol.degenerate;
  j["labels"] = P.labels;
  j["coefficients"] = vector_json(sol.coefficients);
  j["el_residual"] = sol.el_residual;
  j["kernel_load"] = sol.kernel_load;
  j["kernel_dim"] = sol.kernel_dim;
  j["spectrum"] = vector_json(P.spectrum);
  run.json("loads.json", j);
  run.field("loads_V.csv", sol.V);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Thin elastic shells: infinitesimal isometries, matching, energies, loads"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path;
  std::vector<std::string> sets;
  std::map<std::string, std::string> flags;
  app.add_option("-c,--config", config_path, "key=value config file");
  app.add_option("-s,--set", sets, "override, key=value (repeatable)");
  auto flag = [&](CLI::App* sub, const std::string& name, const std::string& key, const std::string& help) {
    sub->add_option_function<std::string>(name, [&flags, key](const std::string& v) { flags[key] = v; }, help);
  };
  auto common = [&](CLI::App* sub) {
    flag(sub, "--out", "output.dir", "output directory");
    flag(sub, "--rings", "mesh.rings", "mesh rings");
    flag(sub, "--chart", "chart.kind", "sphere_cap, ellipsoid_cap, graph or flat");
  };

  const std::vector<std::pair<std::string, std::string>> subs = {
      {"geom", "geometry fields, ellipticity bounds and mesh dump"},
      {"solve-symgrad", "solve sym grad w = B for a manufactured case"},
      {"isogen", "generate infinitesimal isometries for boundary modes"},
      {"match", "match an infinitesimal isometry to exact isometries"},
      {"energy", "bending energy and one recovery-sequence energy"},
      {"gamma-sweep", "scaled shell energy against I(V) over a thickness list"},
      {"loads", "optimal rotation and limit minimizer for a force"}};
  std::map<std::string, CLI::App*> cmd;
  for (const auto& [name, help] : subs) {
    cmd[name] = app.add_subcommand(name, help);
    common(cmd[name]);
  }
  flag(cmd["solve-symgrad"], "--case", "symgrad.case", "poly_trig, exp_mix or rational");
  flag(cmd["solve-symgrad"], "--method", "symgrad.method", "reconstruction, least_squares or minimal_norm");
  for (const char* n : {"isogen", "match", "energy", "gamma-sweep"}) flag(cmd[n], "--mode", "iso.modes", "boundary mode(s)");
  flag(cmd["match"], "--h-list", "match.h_list", "decreasing h list");
  flag(cmd["energy"], "--thickness", "energy.h", "thickness h");
  for (const char* n : {"energy", "gamma-sweep", "loads"}) {
    flag(cmd[n], "--mu", "material.mu", "Lame mu");
    flag(cmd[n], "--lambda", "material.lambda", "Lame lambda");
  }
  flag(cmd["gamma-sweep"], "--beta", "gamma.beta", "energy scaling exponent in (2,4)");
  flag(cmd["gamma-sweep"], "--h-list", "gamma.h_list", "decreasing thickness list");
  flag(cmd["loads"], "--force-profile", "loads.force_profile", "axial, shear or file");
  flag(cmd["loads"], "--force-file", "loads.force_file", "CSV fx,fy,fz, one row per dof");
  flag(cmd["loads"], "--modes", "loads.modes", "Fourier modes K (basis 1, cos1..sinK)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  std::string name;
  for (const auto& [n, sub] : cmd)
    if (sub->parsed()) name = n;

  std::unique_ptr<Run> run;
  try {
    ConfigMap file = config_path.empty() ? ConfigMap{} : read_config_file(config_path);
    ConfigMap over;
    for (const std::string& s : sets) {
      size_t eq = s.find('=');
      if (eq == std::string::npos) throw ConfigError(s, "--set expects key=value");
      over[canonical_key(s.substr(0, eq))] = s.substr(eq + 1);
    }
    for (const auto& [k, v] : flags) over[k] = v;
    run = std::make_unique<Run>(name, parse_config(file, over));
    if (name == "geom") run_geom(*run);
    else if (name == "solve-symgrad") run_symgrad(*run);
    else if (name == "isogen") run_isogen(*run);
    else if (name == "match") run_match(*run);
    else if (name == "energy") run_energy(*run);
    else if (name == "gamma-sweep") run_gamma(*run);
    else run_loads(*run);
    run->metadata("ok");
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    if (run) run->metadata("config_error");
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    if (run) run->metadata("numerical_error");
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    if (run) run->metadata("error");
    return 1;
  }
}
