#include "shell_lab/fields.hpp"

#include <cmath>

namespace shell_lab {

namespace {
constexpr int NQ = FESpace::qp_per_element;

void check_space(const SpacePtr& s) {
  if (!s) throw Error("field has no space");
}
}  // namespace

ScalarField ScalarField::zero(SpacePtr s) { return {s, VecX::Zero(s->num_dofs())}; }
VectorField3 VectorField3::zero(SpacePtr s) { return {s, NodalMatrix::Zero(s->num_dofs(), 3)}; }
SymTensorField2 SymTensorField2::zero(SpacePtr s) {
  return {s, NodalMatrix::Zero(s->num_dofs(), 3)};
}

Mat2 SymTensorField2::at(int dof) const {
  Mat2 B;
  B << values(dof, 0), values(dof, 1), values(dof, 1), values(dof, 2);
  return B;
}

Mat3 SkewField3::at(int dof) const {
  Mat3 A;
  A << 0, values(dof, 0), values(dof, 1),
       -values(dof, 0), 0, values(dof, 2),
       -values(dof, 1), -values(dof, 2), 0;
  return A;
}

ScalarField interpolate(SpacePtr s, const std::function<double(const Vec2&)>& f) {
  ScalarField out = ScalarField::zero(s);
  for (int i = 0; i < s->num_dofs(); ++i) out.values(i) = f(s->dof_coords()[i]);
  return out;
}

VectorField3 interpolate(SpacePtr s, const std::function<Vec3(const Vec2&)>& f) {
  VectorField3 out = VectorField3::zero(s);
  for (int i = 0; i < s->num_dofs(); ++i) out.values.row(i) = f(s->dof_coords()[i]).transpose();
  return out;
}

SymTensorField2 interpolate_sym(SpacePtr s, const std::function<Mat2(const Vec2&)>& f) {
  SymTensorField2 out = SymTensorField2::zero(s);
  for (int i = 0; i < s->num_dofs(); ++i) {
    Mat2 B = f(s->dof_coords()[i]);
    out.values.row(i) << B(0, 0), 0.5 * (B(0, 1) + B(1, 0)), B(1, 1);
  }
  return out;
}

std::vector<double> qp_values(const ScalarField& f) {
  check_space(f.space);
  const FESpace& s = *f.space;
  std::vector<double> out(s.num_qp(), 0.0);
  for (int e = 0; e < s.num_elements(); ++e) {
    auto dofs = s.element_dofs(e);
    for (int q = 0; q < NQ; ++q) {
      double v = 0;
      for (size_t a = 0; a < dofs.size(); ++a) v += s.basis_value(q, int(a)) * f.values(dofs[a]);
      out[e * NQ + q] = v;
    }
  }
  return out;
}

std::vector<Vec2> qp_gradients(const ScalarField& f) {
  check_space(f.space);
  const FESpace& s = *f.space;
  std::vector<Vec2> out(s.num_qp(), Vec2::Zero());
  for (int e = 0; e < s.num_elements(); ++e) {
    auto dofs = s.element_dofs(e);
    for (int q = 0; q < NQ; ++q) {
      Vec2 g = Vec2::Zero();
      for (size_t a = 0; a < dofs.size(); ++a) g += f.values(dofs[a]) * s.basis_grad(e, q, int(a));
      out[e * NQ + q] = g;
    }
  }
  return out;
}

std::vector<Vec3> qp_values(const VectorField3& f) {
  check_space(f.space);
  const FESpace& s = *f.space;
  std::vector<Vec3> out(s.num_qp(), Vec3::Zero());
  for (int e = 0; e < s.num_elements(); ++e) {
    auto dofs = s.element_dofs(e);
    for (int q = 0; q < NQ; ++q) {
      Vec3 v = Vec3::Zero();
      for (size_t a = 0; a < dofs.size(); ++a)
        v += s.basis_value(q, int(a)) * f.values.row(dofs[a]).transpose();
      out[e * NQ + q] = v;
    }
  }
  return out;
}

std::vector<Mat32> qp_gradients(const VectorField3& f) {
  check_space(f.space);
  const FESpace& s = *f.space;
  std::vector<Mat32> out(s.num_qp(), Mat32::Zero());
  for (int e = 0; e < s.num_elements(); ++e) {
    auto dofs = s.element_dofs(e);
    for (int q = 0; q < NQ; ++q) {
      Mat32 G = Mat32::Zero();
      for (size_t a = 0; a < dofs.size(); ++a)
        G += f.values.row(dofs[a]).transpose() * s.basis_grad(e, q, int(a)).transpose();
      out[e * NQ + q] = G;
    }
  }
  return out;
}

std::vector<Mat2> qp_values(const SymTensorField2& f) {
  check_space(f.space);
  const FESpace& s = *f.space;
  std::vector<Mat2> out(s.num_qp(), Mat2::Zero());
  for (int e = 0; e < s.num_elements(); ++e) {
    auto dofs = s.element_dofs(e);
    for (int q = 0; q < NQ; ++q) {
      Vec3 v = Vec3::Zero();
      for (size_t a = 0; a < dofs.size(); ++a)
        v += s.basis_value(q, int(a)) * f.values.row(dofs[a]).transpose();
      Mat2 B;
      B << v(0), v(1), v(1), v(2);
      out[e * NQ + q] = B;
    }
  }
  return out;
}

std::vector<std::array<Mat2, 2>> qp_gradients(const SymTensorField2& f) {
  check_space(f.space);
  const FESpace& s = *f.space;
  std::vector<std::array<Mat2, 2>> out(s.num_qp());
  for (int e = 0; e < s.num_elements(); ++e) {
    auto dofs = s.element_dofs(e);
    for (int q = 0; q < NQ; ++q) {
      Eigen::Matrix<double, 3, 2> G = Eigen::Matrix<double, 3, 2>::Zero();
      for (size_t a = 0; a < dofs.size(); ++a)
        G += f.values.row(dofs[a]).transpose() * s.basis_grad(e, q, int(a)).transpose();
      for (int k = 0; k < 2; ++k) out[e * NQ + q][k] << G(0, k), G(1, k), G(1, k), G(2, k);
    }
  }
  return out;
}

Hessian3 element_hessian(const VectorField3& f, int e) {
  const FESpace& s = *f.space;
  Hessian3 H{Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};
  auto dofs = s.element_dofs(e);
  for (size_t a = 0; a < dofs.size(); ++a) {
    Mat2 h = s.basis_hessian(e, int(a));
    Vec3 v = f.values.row(dofs[a]).transpose();
    H[0] += h(0, 0) * v;
    H[1] += h(0, 1) * v;
    H[2] += h(1, 1) * v;
  }
  return H;
}

std::vector<Mat32> recovered_nodal_gradients(const VectorField3& f) {
  const FESpace& s = *f.space;
  std::vector<Mat32> out(s.num_dofs(), Mat32::Zero());
  for (int i = 0; i < s.num_dofs(); ++i) {
    double wsum = 0;
    for (auto [e, a] : s.dof_patch(i)) {
      (void)a;
      auto dofs = s.element_dofs(e);
      Vec2 grads[6];
      s.shape_at(e, s.dof_coords()[i], nullptr, grads);
      Mat32 G = Mat32::Zero();
      for (size_t b = 0; b < dofs.size(); ++b)
        G += f.values.row(dofs[b]).transpose() * grads[b].transpose();
      double w = s.element_area(e);
      out[i] += w * G;
      wsum += w;
    }
    out[i] /= wsum;
  }
  return out;
}

std::vector<Hessian3> recovered_nodal_hessians(const VectorField3& f) {
  const FESpace& s = *f.space;
  std::vector<Hessian3> elem(s.num_elements());
  for (int e = 0; e < s.num_elements(); ++e) elem[e] = element_hessian(f, e);
  std::vector<Hessian3> out(s.num_dofs(), Hessian3{Vec3::Zero(), Vec3::Zero(), Vec3::Zero()});
  for (int i = 0; i < s.num_dofs(); ++i) {
    double wsum = 0;
    for (auto [e, a] : s.dof_patch(i)) {
      (void)a;
      double w = s.element_area(e);
      for (int c = 0; c < 3; ++c) out[i][c] += w * elem[e][c];
      wsum += w;
    }
    for (int c = 0; c < 3; ++c) out[i][c] /= wsum;
  }
  return out;
}

std::vector<Hessian3> qp_recovered_hessians(const VectorField3& f) {
  const FESpace& s = *f.space;
  std::vector<Hessian3> nodal = recovered_nodal_hessians(f);
  std::vector<Hessian3> out(s.num_qp(), Hessian3{Vec3::Zero(), Vec3::Zero(), Vec3::Zero()});
  for (int e = 0; e < s.num_elements(); ++e) {
    auto dofs = s.element_dofs(e);
    for (int q = 0; q < NQ; ++q) {
      Hessian3& H = out[e * NQ + q];
      for (size_t a = 0; a < dofs.size(); ++a) {
        double N = s.basis_value(q, int(a));
        for (int c = 0; c < 3; ++c) H[c] += N * nodal[dofs[a]][c];
      }
    }
  }
  return out;
}

namespace {
MatX project_columns(const FESpace& s, const std::function<double(int qp, int col)>& val, int cols) {
  MatX rhs = MatX::Zero(s.num_dofs(), cols);
  for (int e = 0; e < s.num_elements(); ++e) {
    auto dofs = s.element_dofs(e);
    for (int q = 0; q < NQ; ++q) {
      double w = s.qp_weight(e, q);
      for (int c = 0; c < cols; ++c) {
        double v = val(e * NQ + q, c) * w;
        for (size_t a = 0; a < dofs.size(); ++a) rhs(dofs[a], c) += v * s.basis_value(q, int(a));
      }
    }
  }
  MatX out(s.num_dofs(), cols);
  for (int c = 0; c < cols; ++c) out.col(c) = s.solve_mass(rhs.col(c));
  return out;
}
}  // namespace

ScalarField project(SpacePtr s, const std::vector<double>& qp) {
  MatX v = project_columns(*s, [&](int i, int) { return qp[i]; }, 1);
  return {s, v.col(0)};
}

VectorField3 project(SpacePtr s, const std::vector<Vec3>& qp) {
  MatX v = project_columns(*s, [&](int i, int c) { return qp[i](c); }, 3);
  return {s, v};
}

SymTensorField2 project_sym(SpacePtr s, const std::vector<Mat2>& qp) {
  MatX v = project_columns(
      *s,
      [&](int i, int c) {
        const Mat2& B = qp[i];
        return c == 0 ? B(0, 0) : (c == 1 ? 0.5 * (B(0, 1) + B(1, 0)) : B(1, 1));
      },
      3);
  return {s, v};
}

double mean_value(const ScalarField& f) {
  const FESpace& s = *f.space;
  std::vector<double> v = qp_values(f);
  double num = 0, den = 0;
  for (int e = 0; e < s.num_elements(); ++e)
    for (int q = 0; q < NQ; ++q) {
      num += s.qp_weight(e, q) * v[e * NQ + q];
      den += s.qp_weight(e, q);
    }
  return num / den;
}

Vec3 mean_value(const VectorField3& f) {
  const FESpace& s = *f.space;
  std::vector<Vec3> v = qp_values(f);
  Vec3 num = Vec3::Zero();
  double den = 0;
  for (int e = 0; e < s.num_elements(); ++e)
    for (int q = 0; q < NQ; ++q) {
      num += s.qp_weight(e, q) * v[e * NQ + q];
      den += s.qp_weight(e, q);
    }
  return num / den;
}

namespace {
MatX potential_columns(const FESpace& s, const std::function<Vec2(int qp, int col)>& G, int cols) {
  MatX rhs = MatX::Zero(s.num_dofs(), cols);
  for (int e = 0; e < s.num_elements(); ++e) {
    auto dofs = s.element_dofs(e);
    for (int q = 0; q < NQ; ++q) {
      double w = s.qp_weight(e, q);
      for (size_t a = 0; a < dofs.size(); ++a) {
        Vec2 gN = s.basis_grad(e, q, int(a));
        for (int c = 0; c < cols; ++c) rhs(dofs[a], c) += w * G(e * NQ + q, c).dot(gN);
      }
    }
  }
  MatX out(s.num_dofs(), cols);
  for (int c = 0; c < cols; ++c) out.col(c) = s.solve_pinned_laplacian(rhs.col(c));
  return out;
}
}  // namespace

PotentialResult recover_potential(SpacePtr s, const std::vector<Vec2>& G) {
  if (int(G.size()) != s->num_qp()) throw Error("recover_potential: target size mismatch");
  MatX v = potential_columns(*s, [&](int i, int) { return G[i]; }, 1);
  PotentialResult r{ScalarField{s, v.col(0)}, 0.0};
  r.u.values.array() -= mean_value(r.u);
  std::vector<Vec2> gu = qp_gradients(r.u);
  double res = 0;
  for (int e = 0; e < s->num_elements(); ++e)
    for (int q = 0; q < NQ; ++q) res += s->qp_weight(e, q) * (gu[e * NQ + q] - G[e * NQ + q]).squaredNorm();
  r.residual = std::sqrt(res);
  return r;
}

VectorPotentialResult recover_potential(SpacePtr s, const std::vector<Mat32>& G) {
  if (int(G.size()) != s->num_qp()) throw Error("recover_potential: target size mismatch");
  MatX v = potential_columns(
      *s, [&](int i, int c) { return Vec2(G[i](c, 0), G[i](c, 1)); }, 3);
  VectorPotentialResult r{VectorField3{s, v}, 0.0, 0.0};
  Vec3 m = mean_value(r.u);
  for (int i = 0; i < s->num_dofs(); ++i) r.u.values.row(i) -= m.transpose();
  std::vector<Mat32> gu = qp_gradients(r.u);
  double res = 0, nrm = 0;
  for (int e = 0; e < s->num_elements(); ++e)
    for (int q = 0; q < NQ; ++q) {
      res += s->qp_weight(e, q) * (gu[e * NQ + q] - G[e * NQ + q]).squaredNorm();
      nrm += s->qp_weight(e, q) * G[e * NQ + q].squaredNorm();
    }
  r.residual = std::sqrt(res);
  r.target_norm = std::sqrt(nrm);
  return r;
}

}  // namespace shell_lab
