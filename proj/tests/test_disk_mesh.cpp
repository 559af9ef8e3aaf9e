#include "doctest.h"

#include "shell_lab/fields.hpp"
#include "shell_lab/linalg.hpp"

#include <cmath>
#include <numbers>
#include <cstring>
#include <sstream>

using namespace shell_lab;

namespace {

SpacePtr make_space(int rings, int order) {
  return FESpace::create(std::make_shared<const Mesh>(triangulate_disk(rings)), order);
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

TEST_CASE("ring triangulation counts") {
  Mesh m1 = triangulate_disk(1);
  CHECK(m1.num_nodes() == 7);
  CHECK(m1.num_triangles() == 6);
  for (int R : {1, 2, 5, 16, 33}) {
    Mesh m = triangulate_disk(R);
    CHECK(m.num_nodes() == 1 + 3 * R * (R + 1));
    CHECK(m.num_triangles() == 6 * R * R);
    CHECK(m.num_nodes() - m.num_edges() + m.num_triangles() == 1);
    for (int t = 0; t < m.num_triangles(); ++t) CHECK(m.triangle_area(t) > 0);
    for (int i = 0; i < m.num_nodes(); ++i) {
      if (m.boundary[i])
        CHECK(std::abs(m.nodes[i].norm() - 1.0) < 1e-12);
      else
        CHECK(m.nodes[i].norm() < 1.0);
    }
  }
  CHECK_THROWS_AS(triangulate_disk(0), ConfigError);
}

TEST_CASE("polygon area deficit at rings = 16") {
  Mesh m = triangulate_disk(16);
  double area = 0;
  for (int t = 0; t < m.num_triangles(); ++t) area += m.triangle_area(t);
  // inscribed regular 96-gon
  const int n = 96;
  double polygon = 0.5 * n * std::sin(2 * std::numbers::pi / n);
  CHECK(area == doctest::Approx(polygon).epsilon(1e-12));
  CHECK(std::abs(area - std::numbers::pi) < 6e-3);
}

TEST_CASE("FE space dof counts and boundary tags") {
  auto mesh = std::make_shared<const Mesh>(triangulate_disk(4));
  SpacePtr p1 = FESpace::create(mesh, 1), p2 = FESpace::create(mesh, 2);
  CHECK(p1->num_dofs() == mesh->num_nodes());
  CHECK(p2->num_dofs() == mesh->num_nodes() + mesh->num_edges());
  CHECK(int(p2->boundary_dofs().size()) == 2 * 6 * 4);
  CHECK(int(p1->boundary_dofs().size()) == 6 * 4);
  CHECK_THROWS_AS(FESpace::create(mesh, 3), ConfigError);
}

TEST_CASE("mesh dump format") {
  Mesh m = triangulate_disk(1);
  std::ostringstream os;
  write_mesh(os, m);
  std::istringstream is(os.str());
  std::string w1, w2;
  int n, e;
  is >> w1 >> n >> w2 >> e;
  CHECK(w1 == "nodes");
  CHECK(w2 == "elements");
  CHECK(n == 7);
  CHECK(e == 6);
  int id, b;
  double x, y;
  is >> id >> x >> y >> b;
  CHECK(id == 0);
  CHECK(b == 0);
  for (int i = 1; i < 7; ++i) is >> id >> x >> y >> b;
  CHECK(b == 1);
  int t, a0, a1, a2;
  is >> t >> a0 >> a1 >> a2;
  CHECK(t == 0);
  CHECK(a0 == 0);
}

TEST_CASE("quadrature integrates degree-4 monomials exactly on the reference triangle") {
  // int xi^a eta^b = a! b! / (a + b + 2)!
  auto fact = [](int n) { return std::tgamma(n + 1.0); };
  const auto& Q = TriangleQuadrature::degree4();
  double wsum = 0;
  for (double w : Q.weights) wsum += w;
  CHECK(wsum == doctest::Approx(1.0).epsilon(1e-14));
  for (int a = 0; a <= 4; ++a)
    for (int b = 0; a + b <= 4; ++b) {
      double rule = 0;
      for (int q = 0; q < 6; ++q) rule += 0.5 * Q.weights[q] * std::pow(Q.points[q](0), a) * std::pow(Q.points[q](1), b);
      CHECK(rule == doctest::Approx(fact(a) * fact(b) / fact(a + b + 2)).epsilon(1e-13));
    }
}

TEST_CASE("assemble_bilinear: Laplacian rows sum to zero, symmetric, mass gives area") {
  for (int order : {1, 2}) {
    SpacePtr s = make_space(4, order);
    SparseMatrix K = assemble_bilinear(
        *s, [](int) { return Mat2::Identity().eval(); }, [](int) { return 0.0; });
    VecX ones = VecX::Ones(s->num_dofs());
    CHECK((K * ones).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(SparseMatrix(K - SparseMatrix(K.transpose())).coeffs().cwiseAbs().maxCoeff() == 0.0);
    SparseMatrix KM = assemble_bilinear(
        *s, [](int) { return Mat2::Identity().eval(); }, [](int) { return 1.0; });
    double area = ones.dot(KM * ones);
    double polygon = 0.5 * 24 * std::sin(2 * std::numbers::pi / 24);
    CHECK(area == doctest::Approx(polygon).epsilon(1e-12));
    CHECK(std::abs(area - std::numbers::pi) < 0.05);
  }
}

TEST_CASE("assemble_bilinear rejects non-SPD coefficients") {
  SpacePtr s = make_space(2, 1);
  Mat2 bad;
  bad << 1, 0, 0, -1;
  CHECK_THROWS_AS(assemble_bilinear(
                      *s, [&](int) { return bad; }, [](int) { return 0.0; }),
                  NumericalError);
}

TEST_CASE("first Dirichlet eigenvalue of the unit disk") {
  SpacePtr s = make_space(32, 2);
  SparseMatrix K = assemble_bilinear(
      *s, [](int) { return Mat2::Identity().eval(); }, [](int) { return 0.0; });
  SparseMatrix M = s->mass_matrix();
  auto I = s->interior_dofs();
  EigenPairs ep = nearest_eigenpairs(submatrix(K, I, I), submatrix(M, I, I), 0.0, 1);
  CHECK(ep.converged);
  const double j01 = 2.404825557695773;
  CHECK(ep.values(0) == doctest::Approx(j01 * j01).epsilon(0.01));
}

TEST_CASE("interpolation error decays at order p + 1") {
  auto f = [](const Vec2& p) { return std::sin(2 * p(0)) * std::exp(p(1)); };
  for (int order : {1, 2}) {
    std::vector<double> err;
    for (int R : {4, 8, 16}) err.push_back(l2_error(interpolate(make_space(R, order), f), f));
    for (int i = 0; i + 1 < int(err.size()); ++i) CHECK(std::log2(err[i] / err[i + 1]) >= order + 0.7);
  }
}

TEST_CASE("recover_potential") {
  SUBCASE("manufactured gradient x^2 - y^2") {
    auto u = [](const Vec2& p) { return p(0) * p(0) - p(1) * p(1); };
    SpacePtr s = make_space(8, 2);
    std::vector<Vec2> G(s->num_qp());
    for (int e = 0; e < s->num_elements(); ++e)
      for (int q = 0; q < 6; ++q) {
        Vec2 p = s->qp_point(e, q);
        G[e * 6 + q] = Vec2(2 * p(0), -2 * p(1));
      }
    PotentialResult r = recover_potential(s, G);
    CHECK(r.residual < 1e-10);
    CHECK(std::abs(mean_value(r.u)) < 1e-13);
    double m = mean_value(interpolate(s, u));
    CHECK(l2_error(r.u, [&](const Vec2& p) { return u(p) - m; }) < 1e-10);
  }
  SUBCASE("zero target") {
    SpacePtr s = make_space(4, 2);
    PotentialResult r = recover_potential(s, std::vector<Vec2>(s->num_qp(), Vec2::Zero()));
    CHECK(r.u.values.norm() == 0.0);
    CHECK(r.residual == 0.0);
  }
  SUBCASE("rotational field (-y, x) is pure curl: u = 0, residual = ||G||") {
    SpacePtr s = make_space(6, 2);
    std::vector<Vec2> G(s->num_qp());
    double nrm = 0;
    for (int e = 0; e < s->num_elements(); ++e)
      for (int q = 0; q < 6; ++q) {
        Vec2 p = s->qp_point(e, q);
        G[e * 6 + q] = Vec2(-p(1), p(0));
        nrm += s->qp_weight(e, q) * p.squaredNorm();
      }
    PotentialResult r = recover_potential(s, G);
    // on the polygon (-y, x) is tangential only approximately; the gradient part is tiny
    CHECK(r.u.values.cwiseAbs().maxCoeff() < 1e-3);
    CHECK(r.residual == doctest::Approx(std::sqrt(nrm)).epsilon(1e-4));
  }
}

TEST_CASE("L2 projection reproduces P2 functions and recovered Hessians are exact for quadratics") {
  SpacePtr s = make_space(5, 2);
  auto f = [](const Vec2& p) { return Vec3(p(0) * p(0), p(0) * p(1) - 2 * p(1), 3.0 + p(1) * p(1)); };
  VectorField3 F = interpolate(s, f);
  VectorField3 P = project(s, qp_values(F));
  CHECK((P.values - F.values).cwiseAbs().maxCoeff() < 1e-12);
  auto H = qp_recovered_hessians(F);
  for (const auto& h : H) {
    CHECK((h[0] - Vec3(2, 0, 0)).norm() < 1e-11);
    CHECK((h[1] - Vec3(0, 1, 0)).norm() < 1e-11);
    CHECK((h[2] - Vec3(0, 0, 2)).norm() < 1e-11);
  }
  auto G = recovered_nodal_gradients(F);
  for (int i = 0; i < s->num_dofs(); ++i) {
    Vec2 p = s->dof_coords()[i];
    Mat32 ex;
    ex << 2 * p(0), 0, p(1), p(0) - 2, 0, 2 * p(1);
    CHECK((G[i] - ex).norm() < 1e-11);
  }
}

TEST_CASE("assembly is deterministic") {
  SpacePtr s = make_space(6, 2);
  auto a = [](int i) { return (Mat2() << 2 + std::sin(i), 0.1, 0.1, 1.5).finished(); };
  auto c = [](int i) { return std::cos(0.3 * i); };
  SparseMatrix A = assemble_bilinear(*s, a, c), B = assemble_bilinear(*s, a, c);
  CHECK(A.nonZeros() == B.nonZeros());
  CHECK(std::memcmp(A.valuePtr(), B.valuePtr(), sizeof(double) * A.nonZeros()) == 0);
}
