#include "shell_lab/mesh.hpp"

#include "shell_lab/linalg.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <ostream>

namespace shell_lab {

double Mesh::triangle_area(int t) const {
  const auto& T = triangles[t];
  Vec2 a = nodes[T[1]] - nodes[T[0]], b = nodes[T[2]] - nodes[T[0]];
  return 0.5 * (a(0) * b(1) - a(1) * b(0));
}

Mesh triangulate_disk(int rings) {
  if (rings < 1) throw ConfigError("mesh.rings", "rings must be >= 1");
  Mesh m;
  m.rings = rings;
  m.nodes.emplace_back(0.0, 0.0);
  m.boundary.push_back(0);
  std::vector<int> first(rings + 1, 0);
  for (int k = 1; k <= rings; ++k) {
    first[k] = m.num_nodes();
    double rad = double(k) / rings;
    for (int j = 0; j < 6 * k; ++j) {
      double t = 2 * std::numbers::pi * j / (6 * k);
      m.nodes.emplace_back(rad * std::cos(t), rad * std::sin(t));
      m.boundary.push_back(k == rings ? 1 : 0);
    }
  }
  auto inner = [&](int k, int idx) {
    if (k == 1) return 0;
    int n = 6 * (k - 1);
    return first[k - 1] + ((idx % n) + n) % n;
  };
  auto outer = [&](int k, int idx) {
    int n = 6 * k;
    return first[k] + ((idx % n) + n) % n;
  };
  for (int k = 1; k <= rings; ++k)
    for (int s = 0; s < 6; ++s) {
      for (int mm = 0; mm < k; ++mm)
        m.triangles.push_back({inner(k, s * (k - 1) + mm), outer(k, s * k + mm), outer(k, s * k + mm + 1)});
      for (int mm = 0; mm + 1 < k; ++mm)
        m.triangles.push_back({inner(k, s * (k - 1) + mm), outer(k, s * k + mm + 1),
                               inner(k, s * (k - 1) + mm + 1)});
    }

  std::map<std::pair<int, int>, int> edge_id;
  m.triangle_edges.resize(m.triangles.size());
  for (size_t t = 0; t < m.triangles.size(); ++t)
    for (int l = 0; l < 3; ++l) {
      int a = m.triangles[t][l], b = m.triangles[t][(l + 1) % 3];
      auto key = std::make_pair(std::min(a, b), std::max(a, b));
      auto it = edge_id.find(key);
      if (it == edge_id.end()) {
        it = edge_id.emplace(key, m.num_edges()).first;
        m.edges.push_back({key.first, key.second});
      }
      m.triangle_edges[t][l] = it->second;
    }
  std::vector<int> count(m.edges.size(), 0);
  for (const auto& te : m.triangle_edges)
    for (int e : te) ++count[e];
  m.boundary_edge.resize(m.edges.size());
  for (size_t e = 0; e < m.edges.size(); ++e) m.boundary_edge[e] = count[e] == 1;
  return m;
}

void write_mesh(std::ostream& os, const Mesh& mesh) {
  char buf[128];
  os << "nodes " << mesh.num_nodes() << " elements " << mesh.num_triangles() << "\n";
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    std::snprintf(buf, sizeof buf, "%d %.17g %.17g %d\n", i, mesh.nodes[i](0), mesh.nodes[i](1),
                  int(mesh.boundary[i]));
    os << buf;
  }
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& T = mesh.triangles[t];
    os << t << " " << T[0] << " " << T[1] << " " << T[2] << "\n";
  }
}

const TriangleQuadrature& TriangleQuadrature::degree4() {
  static const TriangleQuadrature rule = [] {
    TriangleQuadrature r;
    const double a = 0.445948490915965, wa = 0.223381589678011;
    const double b = 0.091576213509771, wb = 0.109951743655322;
    r.points = {Vec2(a, a), Vec2(1 - 2 * a, a), Vec2(a, 1 - 2 * a),
                Vec2(b, b), Vec2(1 - 2 * b, b), Vec2(b, 1 - 2 * b)};
    r.weights = {wa, wa, wa, wb, wb, wb};
    return r;
  }();
  return rule;
}

void reference_shape(int order, const Vec2& xi, double* N, Vec2* dN) {
  const double l0 = 1 - xi(0) - xi(1), l1 = xi(0), l2 = xi(1);
  const Vec2 g0(-1, -1), g1(1, 0), g2(0, 1);
  if (order == 1) {
    if (N) {
      N[0] = l0;
      N[1] = l1;
      N[2] = l2;
    }
    if (dN) {
      dN[0] = g0;
      dN[1] = g1;
      dN[2] = g2;
    }
    return;
  }
  if (N) {
    N[0] = l0 * (2 * l0 - 1);
    N[1] = l1 * (2 * l1 - 1);
    N[2] = l2 * (2 * l2 - 1);
    N[3] = 4 * l0 * l1;
    N[4] = 4 * l1 * l2;
    N[5] = 4 * l2 * l0;
  }
  if (dN) {
    dN[0] = (4 * l0 - 1) * g0;
    dN[1] = (4 * l1 - 1) * g1;
    dN[2] = (4 * l2 - 1) * g2;
    dN[3] = 4 * (l1 * g0 + l0 * g1);
    dN[4] = 4 * (l2 * g1 + l1 * g2);
    dN[5] = 4 * (l0 * g2 + l2 * g0);
  }
}

Mat2 reference_hessian(int order, int a) {
  if (order == 1) return Mat2::Zero();
  const Vec2 g[3] = {Vec2(-1, -1), Vec2(1, 0), Vec2(0, 1)};
  static const int pairs[3][2] = {{0, 1}, {1, 2}, {2, 0}};
  if (a < 3) return 4 * g[a] * g[a].transpose();
  const Vec2& u = g[pairs[a - 3][0]];
  const Vec2& v = g[pairs[a - 3][1]];
  return 4 * (u * v.transpose() + v * u.transpose());
}

struct FESpace::Cache {
  SparseMatrix mass, stiffness;
  std::unique_ptr<SpdFactor> mass_factor, lap_factor;
};

FESpace::~FESpace() = default;

SpacePtr FESpace::create(std::shared_ptr<const Mesh> mesh, int order) {
  if (order != 1 && order != 2) throw ConfigError("mesh.order", "order must be 1 or 2");
  std::shared_ptr<FESpace> s(new FESpace());
  s->build(std::move(mesh), order);
  return s;
}

void FESpace::build(std::shared_ptr<const Mesh> mesh, int order) {
  mesh_ = std::move(mesh);
  order_ = order;
  cache_ = std::make_unique<Cache>();
  const Mesh& m = *mesh_;
  const int nv = m.num_nodes();
  dof_coords_ = m.nodes;
  boundary_ = m.boundary;
  if (order == 2) {
    for (int e = 0; e < m.num_edges(); ++e) {
      dof_coords_.push_back(0.5 * (m.nodes[m.edges[e][0]] + m.nodes[m.edges[e][1]]));
      boundary_.push_back(m.boundary_edge[e]);
    }
  }
  for (int i = 0; i < num_dofs(); ++i) (boundary_[i] ? boundary_dofs_ : interior_dofs_).push_back(i);

  const int ne = m.num_triangles(), nl = dofs_per_element();
  elem_dofs_.resize(size_t(ne) * nl);
  x0_.resize(ne);
  jac_.resize(ne);
  jinv_t_.resize(ne);
  area_.resize(ne);
  patches_.assign(num_dofs(), {});
  for (int e = 0; e < ne; ++e) {
    const auto& T = m.triangles[e];
    for (int a = 0; a < 3; ++a) elem_dofs_[size_t(e) * nl + a] = T[a];
    if (order == 2)
      for (int a = 0; a < 3; ++a) elem_dofs_[size_t(e) * nl + 3 + a] = nv + m.triangle_edges[e][a];
    x0_[e] = m.nodes[T[0]];
    Mat2 J;
    J.col(0) = m.nodes[T[1]] - m.nodes[T[0]];
    J.col(1) = m.nodes[T[2]] - m.nodes[T[0]];
    jac_[e] = J;
    jinv_t_[e] = J.inverse().transpose();
    area_[e] = 0.5 * J.determinant();
    if (!(area_[e] > 0)) throw NumericalError("degenerate or inverted triangle " + std::to_string(e));
    for (int a = 0; a < nl; ++a) patches_[elem_dofs_[size_t(e) * nl + a]].emplace_back(e, a);
  }
  const auto& rule = TriangleQuadrature::degree4();
  qp_values_.assign(6 * 6, 0.0);
  qp_ref_grads_.assign(6 * 6, Vec2::Zero());
  for (int q = 0; q < qp_per_element; ++q)
    reference_shape(order, rule.points[q], &qp_values_[q * 6], &qp_ref_grads_[q * 6]);
}

Vec2 FESpace::qp_point(int e, int q) const {
  return x0_[e] + jac_[e] * TriangleQuadrature::degree4().points[q];
}

double FESpace::qp_weight(int e, int q) const {
  return area_[e] * TriangleQuadrature::degree4().weights[q];
}

Mat2 FESpace::basis_hessian(int e, int a) const {
  return jinv_t_[e] * reference_hessian(order_, a) * jinv_t_[e].transpose();
}

void FESpace::shape_at(int e, const Vec2& p, double* values, Vec2* grads) const {
  Vec2 xi = jac_[e].inverse() * (p - x0_[e]);
  Vec2 ref[6];
  reference_shape(order_, xi, values, grads ? ref : nullptr);
  if (grads)
    for (int a = 0; a < dofs_per_element(); ++a) grads[a] = jinv_t_[e] * ref[a];
}

Vec2 FESpace::local_dof_ref(int a) const {
  static const Vec2 pts[6] = {Vec2(0, 0), Vec2(1, 0), Vec2(0, 1),
                              Vec2(0.5, 0), Vec2(0.5, 0.5), Vec2(0, 0.5)};
  return pts[a];
}

const SparseMatrix& FESpace::mass_matrix() const {
  std::call_once(mass_once_, [this] {
    cache_->mass = assemble_bilinear(
        *this, [](int) { return Mat2::Zero().eval(); }, [](int) { return 1.0; });
    cache_->mass_factor = std::make_unique<SpdFactor>(cache_->mass);
  });
  return cache_->mass;
}

VecX FESpace::solve_mass(const VecX& rhs) const {
  mass_matrix();
  return cache_->mass_factor->solve(rhs);
}

const SparseMatrix& FESpace::stiffness_matrix() const {
  std::call_once(lap_once_, [this] {
    cache_->stiffness = assemble_bilinear(
        *this, [](int) { return Mat2::Identity().eval(); }, [](int) { return 0.0; });
    SparseMatrix P = cache_->stiffness;
    // pin dof 0
    for (int k = 0; k < P.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(P, k); it; ++it)
        if (it.row() == 0 || it.col() == 0) it.valueRef() = (it.row() == it.col()) ? 1.0 : 0.0;
    P.prune(0.0);
    cache_->lap_factor = std::make_unique<SpdFactor>(P);
  });
  return cache_->stiffness;
}

VecX FESpace::solve_pinned_laplacian(const VecX& rhs) const {
  stiffness_matrix();
  VecX b = rhs;
  b(0) = 0.0;
  return cache_->lap_factor->solve(b);
}

SparseMatrix assemble_bilinear(const FESpace& space, const std::function<Mat2(int)>& coeff_a,
                               const std::function<double(int)>& coeff_c) {
  const int ne = space.num_elements(), nl = space.dofs_per_element();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(size_t(ne) * nl * nl);
  MatX Ke(nl, nl);
  for (int e = 0; e < ne; ++e) {
    Ke.setZero();
    for (int q = 0; q < FESpace::qp_per_element; ++q) {
      const int idx = e * FESpace::qp_per_element + q;
      Mat2 a = coeff_a(idx);
      double c = coeff_c(idx);
      if (a.squaredNorm() > 0) {
        Mat2 as = 0.5 * (a + a.transpose());
        if (!(as(0, 0) > 0 && as.determinant() > 0)) {
          Vec2 p = space.qp_point(e, q);
          throw NumericalError("coefficient not SPD at quadrature point (" + std::to_string(p(0)) +
                               ", " + std::to_string(p(1)) + ")");
        }
      }
      const double w = space.qp_weight(e, q);
      Vec2 grads[6];
      for (int i = 0; i < nl; ++i) grads[i] = space.basis_grad(e, q, i);
      for (int i = 0; i < nl; ++i) {
        Vec2 agi = a * grads[i];
        double ni = space.basis_value(q, i);
        for (int j = 0; j < nl; ++j)
          Ke(j, i) += w * (agi.dot(grads[j]) + c * ni * space.basis_value(q, j));
      }
    }
    auto dofs = space.element_dofs(e);
    for (int i = 0; i < nl; ++i)
      for (int j = 0; j < nl; ++j) {
        // symmetrize elementwise so the assembled matrix is exactly symmetric
        double v = 0.5 * (Ke(i, j) + Ke(j, i));
        trip.emplace_back(dofs[i], dofs[j], v);
      }
  }
  SparseMatrix K(space.num_dofs(), space.num_dofs());
  K.setFromTriplets(trip.begin(), trip.end());
  return K;
}

SparseMatrix assemble_bilinear_at(const FESpace& space,
                                  const std::function<Mat2(const Vec2&)>& coeff_a,
                                  const std::function<double(const Vec2&)>& coeff_c) {
  const int nq = FESpace::qp_per_element;
  return assemble_bilinear(
      space, [&](int idx) { return coeff_a(space.qp_point(idx / nq, idx % nq)); },
      [&](int idx) { return coeff_c(space.qp_point(idx / nq, idx % nq)); });
}

}  // namespace shell_lab
