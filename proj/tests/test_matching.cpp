#include "doctest.h"

#include "shell_lab/isospace.hpp"
#include "shell_lab/matching.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

using namespace shell_lab;

namespace {

const SurfaceChart& cap() {
  static SurfaceChart c = SurfaceChart::sphere_cap(1.0, 1.0);
  return c;
}

struct Setup {
  Surface S;
  SymGradSolver solver;
  InfIsometry iso;
  explicit Setup(int rings)
      : S(cap(), rings),
        solver(S, 1e-8, SymGradMethod::minimal_norm),
        iso(generate_iso(solver.curl_operator(), mode_function("cos2"))) {}
};

Setup& setup24() {
  static Setup s(24);
  return s;
}

}  // namespace

TEST_CASE("isometry defect of rigid maps") {
  Surface S(cap(), 6);
  std::vector<Mat32> du(S.num_qp());
  for (int i = 0; i < S.num_qp(); ++i) du[i] = S.geo(i).tangents();
  CHECK(isometry_defect(S, du) < 1e-14);
  Mat3 Q = Eigen::AngleAxisd(0.7, Vec3(1, 2, -1).normalized()).toRotationMatrix();
  for (int i = 0; i < S.num_qp(); ++i) du[i] = Q * S.geo(i).tangents();
  CHECK(isometry_defect(S, du) < 1e-13);
  CHECK(displacement_defect(S, VectorField3::zero(S.space_ptr())) < 1e-14);
}

TEST_CASE("zero isometry matches to zero in one iteration") {
  Setup& s = setup24();
  MatchResult r = match_isometry(s.solver, VectorField3::zero(s.S.space_ptr()), 0.1);
  CHECK(r.iterations == 1);
  CHECK(r.w.values.cwiseAbs().maxCoeff() == 0.0);
  CHECK(r.defect < 1e-14);
  CHECK_THROWS_AS(contraction_rate(r), NumericalError);
}

TEST_CASE("matching needs the minimal-norm solver and valid parameters") {
  Setup& s = setup24();
  SymGradSolver rec(s.S);
  CHECK_THROWS_AS(match_isometry(rec, s.iso.V, 0.1), ConfigError);
  CHECK_THROWS_AS(match_isometry(s.solver, s.iso.V, 0.0), ConfigError);
  CHECK_THROWS_AS(match_isometry(s.solver, s.iso.V, 0.1, {-1.0}), ConfigError);
}

TEST_CASE("unmatched defect is quadratic in h") {
  Setup& s = setup24();
  std::vector<double> d;
  for (double h : {0.2, 0.1, 0.05})
    d.push_back(isometry_defect(s.S, matched_gradients(s.S, s.iso.V, VectorField3::zero(s.S.space_ptr()), h)));
  for (int i = 0; i < 2; ++i) {
    double slope = std::log2(d[i] / d[i + 1]);
    CHECK(slope >= 1.8);
    CHECK(slope <= 2.2);
  }
}

TEST_CASE("cap mode cos 2theta: contraction, defect reduction, bounded w") {
  Setup& s = setup24();
  std::vector<double> hs{0.2, 0.1, 0.05};
  std::vector<MatchResult> runs = match_sweep(s.solver, s.iso.V, hs);
  std::vector<double> rho;
  for (const MatchResult& r : runs) {
    CAPTURE(r.h);
    CHECK(r.iterations <= 25);
    CHECK(r.defect <= r.defect_unmatched / 10);
    rho.push_back(contraction_rate(r));
    MESSAGE("h " << r.h << ": " << r.iterations << " iterations, rho " << rho.back() << ", defect " << r.defect
                 << " vs " << r.defect_unmatched << ", |w| " << r.w_norm);
  }
  for (int i = 0; i < 2; ++i) {
    CHECK(rho[i + 1] < rho[i]);
    CHECK(rho[i + 1] / rho[i] >= 0.3);
    CHECK(rho[i + 1] / rho[i] <= 0.8);
    CHECK(runs[i + 1].w_norm <= 1.05 * runs[i].w_norm);
  }
  // (u_h - id) / h - V = h w_h
  for (int i = 0; i < 2; ++i) {
    double e0 = runs[i].h * runs[i].w_norm, e1 = runs[i + 1].h * runs[i + 1].w_norm;
    CHECK(std::log2(e0 / e1) >= 0.9);
  }

  SUBCASE("a sweep equals independent runs") {
    MatchResult r = match_isometry(s.solver, s.iso.V, 0.1);
    CHECK((r.w.values - runs[1].w.values).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("too large h does not contract") {
  Setup& s = setup24();
  try {
    match_isometry(s.solver, s.iso.V, 1.5, {1e-8, 12});
    FAIL("expected divergence");
  } catch (const NumericalError& e) {
    REQUIRE(e.history().size() >= 3);
    double rho = contraction_rate(e.history());
    MESSAGE("rho at h = 1.5: " << rho);
    CHECK(rho >= 1.0);
  }
}

TEST_CASE("rigid rotation matches the matrix exponential") {
  Setup& s = setup24();
  const Vec3 b(0.3, -0.5, 0.8);
  const Mat3 K = skew(b);
  VectorField3 V = interpolate(s.S.space_ptr(), [&](const Vec2& p) { return Vec3(K * cap().jet(p).r); });
  for (double h : {0.1, 0.05}) {
    MatchResult r = match_isometry(s.solver, V, h);
    Mat3 E = (h * K).exp();
    VectorField3 we = interpolate(s.S.space_ptr(), [&](const Vec2& p) {
      Vec3 x = cap().jet(p).r;
      return Vec3((E * x - x - h * K * x) / (h * h));
    });
    double exact = isometry_defect(s.S, matched_gradients(s.S, V, we, h));
    MESSAGE("h " << h << ": matched defect " << r.defect << ", interpolated exact " << exact);
    CHECK(r.defect <= 10 * exact);
  }
}
