#include "doctest.h"

#include "shell_lab/elliptic.hpp"

#include <cmath>
#include <complex>
#include <cstring>

using namespace shell_lab;

namespace {

double omega_star(const Vec2& p) { return std::exp(p(0)) * std::cos(p(1)) + p(0) * p(1) * p(1); }
Vec2 domega_star(const Vec2& p) {
  return Vec2(std::exp(p(0)) * std::cos(p(1)) + p(1) * p(1),
              -std::exp(p(0)) * std::sin(p(1)) + 2 * p(0) * p(1));
}
Mat2 ddomega_star(const Vec2& p) {
  double e = std::exp(p(0)), c = std::cos(p(1)), s = std::sin(p(1));
  Mat2 H;
  H << e * c, -e * s + 2 * p(1), -e * s + 2 * p(1), -e * c + 2 * p(0);
  return H;
}

// L w* from analytic coefficient derivatives
double L_omega_star(const SurfaceChart& c, const Vec2& p) {
  GeometryFields G = geometry_at(c, p);
  GeometryDerivatives D = geometry_derivatives_at(c, p);
  Vec2 dw = domega_star(p);
  Mat2 ddw = ddomega_star(p);
  double div = 0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      double coef_i = D.dsqrt_det_g[i] * G.h_inv(i, j) + G.sqrt_det_g * D.dh_inv[i](i, j);
      div += coef_i * dw(j) + G.sqrt_det_g * G.h_inv(i, j) * ddw(i, j);
    }
  return -div - 2 * G.sqrt_det_g * G.mean_curvature * omega_star(p);
}

double l2_error(const ScalarField& f, const std::function<double(const Vec2&)>& exact) {
  const FESpace& s = *f.space;
  std::vector<double> v = qp_values(f);
  double err = 0;
  for (int e = 0; e < s.num_elements(); ++e)
    for (int q = 0; q < 6; ++q) {
      double d = v[e * 6 + q] - exact(s.qp_point(e, q));
      err += s.qp_weight(e, q) * d * d;
    }
  return std::sqrt(err);
}

}  // namespace

TEST_CASE("flat-Laplacian mode equals the stiffness matrix") {
  Surface S(SurfaceChart::flat(), 4, 2);
  CurlOperator op = CurlOperator::assemble(S, CurlMode::flat_laplacian);
  SparseMatrix D = op.matrix() - S.space().stiffness_matrix();
  CHECK(D.coeffs().cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(CurlOperator::assemble(S, CurlMode::surface), NumericalError);
}

TEST_CASE("sphere cap operator: exact symmetry, shifted interior block positive definite") {
  Surface S(SurfaceChart::sphere_cap(1.0, 1.0), 6, 2);
  CurlOperator op = CurlOperator::assemble(S);
  SparseMatrix T = op.matrix().transpose();
  CHECK(SparseMatrix(op.matrix() - T).coeffs().cwiseAbs().maxCoeff() == 0.0);
  CHECK(op.default_shift() == doctest::Approx(3.0).epsilon(1e-3));
  CurlOperator sh = op.shifted(op.default_shift());
  const auto& I = op.interior_dofs();
  CHECK_NOTHROW(SpdFactor(submatrix(sh.matrix(), I, I)));
  // the full (unconstrained) operator is indefinite: constants give -2 int sqrt|g| w^2
  VecX ones = VecX::Ones(S.space().num_dofs());
  CHECK(ones.dot(op.matrix() * ones) < 0);
}

TEST_CASE("Dirichlet solve: trivial data, residual, linearity") {
  Surface S(SurfaceChart::sphere_cap(1.0, 1.0), 8, 2);
  CurlOperator op = CurlOperator::assemble(S);
  const int nb = int(op.boundary_dofs().size());
  ScalarField zero = op.solve_dirichlet(VecX::Zero(nb));
  CHECK(zero.values.cwiseAbs().maxCoeff() == 0.0);

  VecX t1 = boundary_trace(S.space(), [](double th) { return std::cos(2 * th); });
  VecX t2 = boundary_trace(S.space(), [](double th) { return std::sin(th) + 0.3; });
  ScalarField rhs = interpolate(S.space_ptr(), [](const Vec2& p) { return 1.0 + p(0); });
  ScalarField w1 = op.solve_dirichlet(t1, rhs);
  // interior residual
  const auto& I = op.interior_dofs();
  VecX r = op.matrix() * w1.values - S.space().mass_matrix() * rhs.values;
  VecX b = S.space().mass_matrix() * rhs.values;
  double rn = 0, bn = 0;
  for (int i : I) {
    rn += r(i) * r(i);
    bn += b(i) * b(i);
  }
  CHECK(std::sqrt(rn / bn) < 1e-10);
  for (size_t k = 0; k < op.boundary_dofs().size(); ++k) CHECK(w1.values(op.boundary_dofs()[k]) == t1(k));

  ScalarField a = op.solve_dirichlet(t1), c = op.solve_dirichlet(t2);
  ScalarField comb = op.solve_dirichlet(2.5 * t1 + t2);
  CHECK((comb.values - (2.5 * a.values + c.values)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("flat Laplacian: harmonic polynomial traces") {
  for (int k : {1, 3}) {
    std::vector<double> err;
    for (int R : {4, 8, 16}) {
      Surface S(SurfaceChart::flat(), R, 2);
      CurlOperator op = CurlOperator::assemble(S, CurlMode::flat_laplacian);
      auto exact = [k](const Vec2& p) { return std::pow(std::complex<double>(p(0), p(1)), k).real(); };
      VecX t(op.boundary_dofs().size());
      for (size_t i = 0; i < op.boundary_dofs().size(); ++i) t(i) = exact(S.space().dof_coords()[op.boundary_dofs()[i]]);
      err.push_back(l2_error(op.solve_dirichlet(t), exact));
    }
    MESSAGE("k = " << k << " errors " << err[0] << " " << err[1] << " " << err[2]);
    if (k == 1) {
      // linear functions lie in the P2 space
      for (double e : err) CHECK(e < 1e-13);
    } else {
      CHECK(err.back() < 1e-4);
      for (size_t i = 0; i + 1 < err.size(); ++i) CHECK(std::log2(err[i] / err[i + 1]) > 1.9);
    }
  }
}

TEST_CASE("manufactured solution on the sphere cap converges at order >= 1.7") {
  SurfaceChart chart = SurfaceChart::sphere_cap(1.0, 1.0);
  std::vector<double> err;
  for (int R : {4, 8, 16}) {
    Surface S(chart, R, 2);
    CurlOperator op = CurlOperator::assemble(S);
    ScalarField rhs = interpolate(S.space_ptr(), [&](const Vec2& p) { return L_omega_star(chart, p); });
    VecX t(op.boundary_dofs().size());
    for (size_t i = 0; i < op.boundary_dofs().size(); ++i) t(i) = omega_star(S.space().dof_coords()[op.boundary_dofs()[i]]);
    err.push_back(l2_error(op.solve_dirichlet(t, rhs), omega_star));
  }
  MESSAGE("manufactured L2 errors: " << err[0] << " " << err[1] << " " << err[2]);
  for (size_t i = 0; i + 1 < err.size(); ++i) CHECK(std::log2(err[i] / err[i + 1]) >= 1.7);
}

TEST_CASE("numerical kernels") {
  Surface F(SurfaceChart::flat(), 8, 2);
  CHECK(CurlOperator::assemble(F, CurlMode::flat_laplacian).kernel_basis(KernelMode::dirichlet).empty());

  std::vector<size_t> dims;
  for (int R : {8, 16}) {
    Surface S(SurfaceChart::sphere_cap(1.0, 1.0), R, 2);
    CurlOperator op = CurlOperator::assemble(S);
    dims.push_back(op.kernel_basis(KernelMode::dirichlet).size());
    CHECK(op.shifted(op.default_shift()).kernel_basis(KernelMode::dirichlet).empty());
  }
  MESSAGE("sphere cap Dirichlet kernel dimensions: " << dims[0] << ", " << dims[1]);
  CHECK(dims[0] == dims[1]);
}

TEST_CASE("kernel basis is L2-orthonormal and annihilated by the operator") {
  // shift the flat Laplacian by its first Dirichlet eigenvalue: a one-dimensional kernel
  Surface S(SurfaceChart::flat(), 8, 2);
  CurlOperator op = CurlOperator::assemble(S, CurlMode::flat_laplacian);
  double lam = op.smallest_eigenvalues(KernelMode::dirichlet, 1)(0);
  CurlOperator res = op.shifted(-lam);
  auto ker = res.kernel_basis(KernelMode::dirichlet);
  REQUIRE(ker.size() == 1);
  const SparseMatrix& M = res.weighted_mass();
  CHECK(ker[0].values.dot(M * ker[0].values) == doctest::Approx(1.0).epsilon(1e-10));
  VecX Kv = res.matrix() * ker[0].values;
  double worst = 0;
  for (int i : res.interior_dofs()) worst = std::max(worst, std::abs(Kv(i)));
  CHECK(worst < 1e-8);
  CHECK_THROWS_WITH_AS(res.solve_dirichlet(VecX::Zero(res.boundary_dofs().size())),
                       doctest::Contains("resonant operator"), NumericalError);
}

TEST_CASE("Dirichlet eigenvalue calibration, rings = 16") {
  Surface S(SurfaceChart::flat(), 16, 2);
  CurlOperator op = CurlOperator::assemble(S, CurlMode::flat_laplacian);
  const double j01 = 2.404825557695773;
  CHECK(op.smallest_eigenvalues(KernelMode::dirichlet, 1)(0) == doctest::Approx(j01 * j01).epsilon(0.01));
}
