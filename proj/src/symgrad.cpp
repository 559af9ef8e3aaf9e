#include "shell_lab/symgrad.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <random>

namespace shell_lab {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

// 3-point Gauss-Legendre on [0, 1]
constexpr double kGaussX[3] = {0.1127016653792583, 0.5, 0.8872983346207417};
constexpr double kGaussW[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

Vec3 frame_rows(const Mat2& F) { return Vec3(F(0, 0), kSqrt2 * F(0, 1), F(1, 1)); }

// rows of the frame strain for basis gradient dphi and ambient component c
Vec3 strain_rows(const GeometryFields& G, const Vec2& dphi, int c) {
  Mat2 E;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) E(i, j) = 0.5 * (dphi(i) * G.tangent[j](c) + dphi(j) * G.tangent[i](c));
  return frame_rows(to_frame(G, E));
}

struct BoundaryPoint {
  int element;
  GeometryFields geo;
  double weight;  // ds
  std::array<Vec2, 6> grads;
};

std::vector<BoundaryPoint> boundary_quadrature(const Surface& S) {
  const FESpace& s = S.space();
  const Mesh& m = s.mesh();
  std::vector<BoundaryPoint> out;
  for (int e = 0; e < m.num_triangles(); ++e)
    for (int k = 0; k < 3; ++k) {
      int edge = m.triangle_edges[e][k];
      if (!m.boundary_edge[edge]) continue;
      const Vec2& a = m.nodes[m.triangles[e][k]];
      const Vec2& b = m.nodes[m.triangles[e][(k + 1) % 3]];
      Vec2 t = b - a;
      double len = t.norm();
      t /= len;
      for (int q = 0; q < 3; ++q) {
        BoundaryPoint bp;
        bp.element = e;
        Vec2 p = a + kGaussX[q] * (b - a);
        bp.geo = geometry_at(S.chart(), p);
        bp.weight = kGaussW[q] * len * std::sqrt(t.dot(bp.geo.g * t));
        double vals[6];
        s.shape_at(e, p, vals, bp.grads.data());
        out.push_back(bp);
      }
    }
  return out;
}

double w_tan_w12_sq(const Surface& S, const std::vector<Vec3>& w, const std::vector<Mat32>& dw) {
  double s = 0;
  for (int i = 0; i < S.num_qp(); ++i) {
    const GeometryFields& G = S.geo(i);
    const Vec3& n = G.normal;
    double wn = w[i].dot(n);
    Vec3 wt = w[i] - wn * n;
    Mat32 d;
    for (int k = 0; k < 2; ++k) {
      Vec3 dn = G.dnormal(k);
      d.col(k) = dw[i].col(k) - (dw[i].col(k).dot(n) + w[i].dot(dn)) * n - wn * dn;
    }
    Mat2 gram = d.transpose() * d;
    s += S.area_weight(i) * (wt.squaredNorm() + G.g_inv.cwiseProduct(gram).sum());
  }
  return s;
}

}  // namespace

struct SymGradSolver::LeastSquares {
  SparseMatrix A;
  std::vector<int> free;
  std::unique_ptr<SpdFactor> spd;
};

SymGradSolver::SymGradSolver(const Surface& surface, double kernel_tol, SymGradMethod method, double alpha)
    : surface_(&surface), kernel_tol_(kernel_tol), method_(method), alpha_(alpha) {
  if (!(kernel_tol > 0)) throw ConfigError("symgrad.kernel_tol", "kernel_tol must be positive");
  if (!(alpha > 0)) throw ConfigError("symgrad.alpha", "regularization weight must be positive");
  if (surface.space().order() != 2) throw ConfigError("mesh.order", "symgrad needs order-2 elements");
  curl_ = CurlOperator::assemble(surface, CurlMode::surface, kernel_tol);
}

SymGradSolver::~SymGradSolver() = default;

const SymGradSolver::LeastSquares& SymGradSolver::least_squares() const {
  std::call_once(ls_once_, [&] {
    auto ls = std::make_unique<LeastSquares>();
    const Surface& surface = *surface_;
    const FESpace& s = surface.space();
    const int nd = 3 * s.num_dofs();
    const int nloc = 18;
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(size_t(s.num_elements()) * nloc * nloc + 1024);
    Eigen::Matrix<double, 3, 18> D;
    Eigen::Matrix<double, 18, 18> Ke;
    for (int e = 0; e < s.num_elements(); ++e) {
      Ke.setZero();
      for (int q = 0; q < FESpace::qp_per_element; ++q) {
        int qi = e * FESpace::qp_per_element + q;
        const GeometryFields& G = surface.geo(qi);
        for (int a = 0; a < 6; ++a) {
          Vec2 dphi = s.basis_grad(e, q, a);
          for (int c = 0; c < 3; ++c) D.col(3 * a + c) = strain_rows(G, dphi, c);
        }
        Ke.noalias() += surface.area_weight(qi) * D.transpose() * D;
      }
      auto dofs = s.element_dofs(e);
      for (int a = 0; a < nloc; ++a)
        for (int b = 0; b < nloc; ++b)
          trip.emplace_back(3 * dofs[a / 3] + a % 3, 3 * dofs[b / 3] + b % 3, Ke(a, b));
    }
    const bool min_norm = method_ == SymGradMethod::minimal_norm;
    if (min_norm) {
      SparseMatrix W = assemble_bilinear(
          s, [&](int i) { return Mat2(surface.geo(i).sqrt_det_g * surface.geo(i).g_inv); },
          [&](int i) { return surface.geo(i).sqrt_det_g; });
      for (int k = 0; k < W.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(W, k); it; ++it)
          for (int c = 0; c < 3; ++c) trip.emplace_back(3 * it.row() + c, 3 * it.col() + c, alpha_ * it.value());
    }
    for (const BoundaryPoint& bp : boundary_quadrature(surface)) {
      if (min_norm) break;
      Eigen::Matrix<double, 18, 1> row;
      for (int a = 0; a < 6; ++a)
        for (int c = 0; c < 3; ++c)
          row(3 * a + c) =
              (bp.grads[a](0) * bp.geo.tangent[1](c) - bp.grads[a](1) * bp.geo.tangent[0](c)) /
              bp.geo.sqrt_det_g;
      auto dofs = s.element_dofs(bp.element);
      for (int a = 0; a < nloc; ++a)
        for (int b = 0; b < nloc; ++b)
          trip.emplace_back(3 * dofs[a / 3] + a % 3, 3 * dofs[b / 3] + b % 3,
                            bp.weight * row(a) * row(b));
    }
    ls->A.resize(nd, nd);
    ls->A.setFromTriplets(trip.begin(), trip.end());
    SparseMatrix At = ls->A.transpose();
    ls->A = 0.5 * (ls->A + At);

    // pin dof 0 (the disk center) unless the regularization already fixes translations
    for (int i = min_norm ? 0 : 3; i < nd; ++i) ls->free.push_back(i);
    try {
      ls->spd = std::make_unique<SpdFactor>(submatrix(ls->A, ls->free, ls->free));
    } catch (const NumericalError& err) {
      throw NumericalError(std::string("symgrad normal matrix is singular after pinning: ") + err.what());
    }
    ls_ = std::move(ls);
  });
  return *ls_;
}

const SparseMatrix& SymGradSolver::normal_matrix() const { return least_squares().A; }

SymGradSolution SymGradSolver::solve(const SymTensorField2& B) const {
  if (B.space.get() != &surface_->space()) throw Error("solve_sym_grad: B lives on a different space");
  if (method_ != SymGradMethod::reconstruction) return solve_least_squares(B);
  const Surface& S = *surface_;
  SymGradSolution out;
  out.report.method = "reconstruction";
  ScalarField omega;
  try {
    omega = solve_curl(curl_, B, VecX::Zero(curl_.boundary_dofs().size()));
  } catch (const NumericalError& err) {
    if (std::string(err.what()).find("resonant") == std::string::npos) throw;
    return solve_least_squares(B);
  }
  CompatibilityData cd = compatibility_fields(S, B, omega);
  VectorPotentialResult pot = recover_potential(S.space_ptr(), reconstruct_gradient(S, B, cd));
  out.w = pot.u;
  out.report.integrability = pot.target_norm > 0 ? pot.residual / pot.target_norm : 0.0;
  finish(out, qp_values(B));
  return out;
}

SymGradSolution SymGradSolver::solve_qp(const std::vector<Mat2>& B) const {
  if (int(B.size()) != surface_->num_qp())
    throw Error("solve_sym_grad: B must have one value per quadrature point");
  return solve(project_sym(surface_->space_ptr(), B));
}

SymGradSolution SymGradSolver::solve_least_squares(const SymTensorField2& Bf) const {
  const Surface& S = *surface_;
  const FESpace& s = S.space();
  const LeastSquares& ls = least_squares();
  std::vector<Mat2> B = qp_values(Bf);
  const int nd = 3 * s.num_dofs();
  VecX rhs = VecX::Zero(nd);
  for (int e = 0; e < s.num_elements(); ++e) {
    auto dofs = s.element_dofs(e);
    for (int q = 0; q < FESpace::qp_per_element; ++q) {
      int qi = e * FESpace::qp_per_element + q;
      const GeometryFields& G = S.geo(qi);
      Vec3 b = frame_rows(to_frame(G, B[qi])) * S.area_weight(qi);
      for (int a = 0; a < 6; ++a) {
        Vec2 dphi = s.basis_grad(e, q, a);
        for (int c = 0; c < 3; ++c) rhs(3 * dofs[a] + c) += strain_rows(G, dphi, c).dot(b);
      }
    }
  }
  SymGradSolution out;
  out.report.method = method_ == SymGradMethod::minimal_norm ? "minimal_norm" : "least_squares";
  out.w = VectorField3::zero(S.space_ptr());
  VecX x = VecX::Zero(nd);
  VecX bf(ls.free.size());
  for (size_t k = 0; k < ls.free.size(); ++k) bf(k) = rhs(ls.free[k]);
  const double bn = bf.norm();
  if (bn > 0) {
    SparseMatrix Aff = submatrix(ls.A, ls.free, ls.free);
    VecX xf = ls.spd->solve(bf);
    for (int it = 0; it < 4; ++it) {
      VecX r = bf - Aff * xf;
      double rel = r.norm() / bn;
      out.report.solver_history.push_back(rel);
      if (!std::isfinite(rel)) break;
      if (rel < 1e-13) break;
      xf += ls.spd->solve(r);
    }
    double last = out.report.solver_history.back();
    if (!(last < 1e-8))
      throw NumericalError("symgrad linear solve did not converge (relative residual " +
                               std::to_string(last) + ")",
                           out.report.solver_history);
    for (size_t k = 0; k < ls.free.size(); ++k) x(ls.free[k]) = xf(k);
  }
  for (int i = 0; i < s.num_dofs(); ++i) out.w.values.row(i) = x.segment<3>(3 * i).transpose();
  Vec3 mean = mean_value(out.w);
  for (int i = 0; i < s.num_dofs(); ++i) out.w.values.row(i) -= mean.transpose();
  finish(out, B);
  return out;
}

void SymGradSolver::finish(SymGradSolution& out, const std::vector<Mat2>& B) const {
  const Surface& S = *surface_;
  const FESpace& s = S.space();
  out.report.b_norm = tensor_norm(S, B);
  std::vector<Mat32> dw = qp_gradients(out.w);
  std::vector<Mat2> diff(S.num_qp());
  for (int i = 0; i < S.num_qp(); ++i) diff[i] = sym_grad(S.geo(i), dw[i]) - B[i];
  out.report.residual = tensor_norm(S, diff);
  double bc = 0;
  for (const BoundaryPoint& bp : boundary_quadrature(S)) {
    auto dofs = s.element_dofs(bp.element);
    Mat32 d = Mat32::Zero();
    for (int a = 0; a < 6; ++a) d += out.w.values.row(dofs[a]).transpose() * bp.grads[a].transpose();
    double om = curl_at(bp.geo, d);
    bc += bp.weight * om * om;
  }
  out.report.boundary_curl = std::sqrt(bc);
  out.report.korn_constant = out.report.b_norm > 0 ? korn_norm(S, out.w) / out.report.b_norm : 0.0;
}

int SymGradSolver::kernel_dim() const {
  std::call_once(kernel_once_, [&] {
    const SparseMatrix& A = least_squares().A;
    const FESpace& s = surface_->space();
    SparseMatrix Ms = assemble_bilinear(
        s, [](int) { return Mat2::Zero().eval(); }, [&](int i) { return surface_->geo(i).sqrt_det_g; });
    std::vector<Eigen::Triplet<double>> t;
    for (int k = 0; k < Ms.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(Ms, k); it; ++it)
        for (int c = 0; c < 3; ++c) t.emplace_back(3 * it.row() + c, 3 * it.col() + c, it.value());
    SparseMatrix M(A.rows(), A.cols());
    M.setFromTriplets(t.begin(), t.end());
    double scale = largest_eigenvalue_estimate(A, M);
    EigenPairs ep = nearest_eigenpairs(A, M, -1e-6 * scale, 6);
    int dim = 0;
    for (int j = 0; j < ep.values.size(); ++j)
      if (std::abs(ep.values(j)) < kernel_tol_ * scale) ++dim;
    kernel_dim_ = dim;
  });
  return kernel_dim_;
}

SymGradSolution solve_sym_grad(const Surface& surface, const SymTensorField2& B) {
  SymGradSolver solver(surface);
  SymGradSolution sol = solver.solve(B);
  sol.report.kernel_dim = solver.kernel_dim();
  return sol;
}

VecX curl_source(const Surface& S, const SymTensorField2& Bf) {
  const FESpace& s = S.space();
  if (Bf.space->order() != 2) throw ConfigError("mesh.order", "curl_source needs B in the order-2 space");
  std::vector<Mat2> B = qp_values(Bf);
  auto dB = qp_gradients(Bf);
  VecX load = VecX::Zero(s.num_dofs());
  for (int e = 0; e < s.num_elements(); ++e) {
    auto dofs = s.element_dofs(e);
    for (int q = 0; q < FESpace::qp_per_element; ++q) {
      int qi = e * FESpace::qp_per_element + q;
      const GeometryFields& G = S.geo(qi);
      Vec2 c = compatibility_c(G, B[qi], dB[qi]);
      Vec2 flux = G.sqrt_det_g * (G.h_inv * c);
      Mat2 GB = G.g_inv * B[qi];  // (g^-1 B)(i, j) = g^ik B_kj
      double t = 0;
      for (int i = 0; i < 2; ++i) t += GB(i, 0) * G.h(i, 1) - GB(i, 1) * G.h(i, 0);
      double w = 2 * s.qp_weight(e, q);
      for (int a = 0; a < s.dofs_per_element(); ++a)
        load(dofs[a]) += w * (flux.dot(s.basis_grad(e, q, a)) + t * s.basis_value(q, a));
    }
  }
  return load;
}

ScalarField solve_curl(const CurlOperator& op, const SymTensorField2& B, const VecX& trace) {
  return op.solve_dirichlet_load(trace, curl_source(op.surface(), B));
}

double korn_norm(const Surface& S, const VectorField3& w) {
  std::vector<Vec3> v = qp_values(w);
  std::vector<Mat32> dv = qp_gradients(w);
  std::vector<double> wn(S.num_qp());
  for (int i = 0; i < S.num_qp(); ++i) wn[i] = v[i].dot(S.geo(i).normal);
  return std::sqrt(w_tan_w12_sq(S, v, dv)) + l2_norm(S, wn);
}

double curl_at(const GeometryFields& G, const Mat32& dw) {
  return (dw.col(0).dot(G.tangent[1]) - dw.col(1).dot(G.tangent[0])) / G.sqrt_det_g;
}

std::vector<double> curl_at_qp(const Surface& S, const VectorField3& w) {
  std::vector<Mat32> dw = qp_gradients(w);
  std::vector<double> om(S.num_qp());
  for (int i = 0; i < S.num_qp(); ++i) om[i] = curl_at(S.geo(i), dw[i]);
  return om;
}

ScalarField curl_of_field(const Surface& S, const VectorField3& w) {
  return project(S.space_ptr(), curl_at_qp(S, w));
}

Vec2 compatibility_c(const GeometryFields& G, const Mat2& B, const std::array<Mat2, 2>& dB) {
  Vec2 c;
  for (int i = 0; i < 2; ++i) {
    double v = dB[0](1, i) - dB[1](0, i);
    for (int k = 0; k < 2; ++k) v += G.christoffel[k][1][i] * B(0, k) - G.christoffel[k][0][i] * B(1, k);
    c(i) = v / G.sqrt_det_g;
  }
  return c;
}

Vec2 normal_coefficients(const GeometryFields& G, const Vec2& domega, const Vec2& c) {
  Vec2 d = domega - 2.0 * c;
  double s = 0.5 * G.sqrt_det_g;
  return Vec2(-s * G.h_inv.row(1).dot(d), s * G.h_inv.row(0).dot(d));
}

Mat32 gradient_formula(const GeometryFields& G, const Mat2& B, double omega, const Vec2& u) {
  Mat32 T = G.tangents();
  Mat32 out;
  // sum_ij g^ij B_kj d_i r
  Mat32 tb = T * G.g_inv * B.transpose();
  double s = 0.5 * G.sqrt_det_g * omega;
  out.col(0) = tb.col(0) + s * T * G.g_inv.col(1) + u(0) * G.normal;
  out.col(1) = tb.col(1) - s * T * G.g_inv.col(0) + u(1) * G.normal;
  return out;
}

CompatibilityData compatibility_fields(const Surface& S, const SymTensorField2& B, const ScalarField& omega) {
  if (B.space->order() != 2) throw ConfigError("mesh.order", "compatibility_fields needs B in the order-2 space");
  CompatibilityData out;
  out.space = S.space_ptr();
  out.omega = omega;
  std::vector<Mat2> Bq = qp_values(B);
  auto dB = qp_gradients(B);
  out.omega_qp = qp_values(omega);
  std::vector<Vec2> dom = qp_gradients(omega);
  out.c_qp.resize(S.num_qp());
  out.u_qp.resize(S.num_qp());
  std::vector<double> c1(S.num_qp()), c2(S.num_qp()), u1(S.num_qp()), u2(S.num_qp());
  for (int i = 0; i < S.num_qp(); ++i) {
    out.c_qp[i] = compatibility_c(S.geo(i), Bq[i], dB[i]);
    out.u_qp[i] = normal_coefficients(S.geo(i), dom[i], out.c_qp[i]);
    c1[i] = out.c_qp[i](0);
    c2[i] = out.c_qp[i](1);
    u1[i] = out.u_qp[i](0);
    u2[i] = out.u_qp[i](1);
  }
  out.c1 = project(out.space, c1);
  out.c2 = project(out.space, c2);
  out.u1 = project(out.space, u1);
  out.u2 = project(out.space, u2);
  return out;
}

std::vector<Mat32> reconstruct_gradient(const Surface& S, const SymTensorField2& B, const CompatibilityData& compat) {
  std::vector<Mat2> Bq = qp_values(B);
  std::vector<Mat32> out(S.num_qp());
  for (int i = 0; i < S.num_qp(); ++i) out[i] = gradient_formula(S.geo(i), Bq[i], compat.omega_qp[i], compat.u_qp[i]);
  return out;
}

Mat2 project_off_pi(const GeometryFields& G, const Mat2& M) {
  Mat2 P = to_frame(G, G.h);
  return M - (M.cwiseProduct(P).sum() / P.squaredNorm()) * P;
}

double korn_ratio(const Surface& S, const VectorField3& v) {
  std::vector<Vec3> vq = qp_values(v);
  std::vector<Mat32> dv = qp_gradients(v);
  double pn = 0;
  for (int i = 0; i < S.num_qp(); ++i) {
    const GeometryFields& G = S.geo(i);
    Mat2 T = dv[i].transpose() * G.tangents();  // T_ij = d_i v . d_j r
    pn += S.area_weight(i) * project_off_pi(G, to_frame(G, T)).squaredNorm();
  }
  return gradient_norm(S, dv) / (l2_norm(S, vq) + std::sqrt(pn));
}

int z_dimension(const Surface& S, VecX* spectrum) {
  // tangential fields v = a d1r + b d2r with (a, b) in the scalar space, exact chart derivatives
  const FESpace& s = S.space();
  const int n = s.num_dofs();
  std::vector<Eigen::Triplet<double>> tz, tm;
  Eigen::Matrix<double, 4, 12> D;  // frame entries of P((grad v)_tan), row-major 2x2
  Eigen::Matrix<double, 3, 12> V;  // v
  Eigen::Matrix<double, 6, 12> Gr; // d1 v, d2 v
  for (int e = 0; e < s.num_elements(); ++e) {
    Eigen::Matrix<double, 12, 12> Kz = Eigen::Matrix<double, 12, 12>::Zero(), Km = Kz;
    for (int q = 0; q < FESpace::qp_per_element; ++q) {
      int qi = e * FESpace::qp_per_element + q;
      const GeometryFields& G = S.geo(qi);
      for (int a = 0; a < 6; ++a) {
        double phi = s.basis_value(q, a);
        Vec2 dphi = s.basis_grad(e, q, a);
        for (int m = 0; m < 2; ++m) {
          int col = 2 * a + m;
          V.col(col) = phi * G.tangent[m];
          Vec3 d[2];
          for (int i = 0; i < 2; ++i) d[i] = dphi(i) * G.tangent[m] + phi * G.d2r[i][m];
          Gr.col(col) << d[0], d[1];
          Mat2 T;
          for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) T(i, j) = d[i].dot(G.tangent[j]);
          Mat2 P = project_off_pi(G, to_frame(G, T));
          D.col(col) << P(0, 0), P(0, 1), P(1, 0), P(1, 1);
        }
      }
      double w = S.area_weight(qi);
      Kz.noalias() += w * D.transpose() * D;
      // W12 norm: |v|^2 + g^ij d_i v . d_j v
      Eigen::Matrix<double, 12, 12> grad = Eigen::Matrix<double, 12, 12>::Zero();
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          grad += G.g_inv(i, j) * Gr.middleRows<3>(3 * i).transpose() * Gr.middleRows<3>(3 * j);
      Km.noalias() += w * (V.transpose() * V + grad);
    }
    auto dofs = s.element_dofs(e);
    for (int a = 0; a < 12; ++a)
      for (int b = 0; b < 12; ++b) {
        int ga = 2 * dofs[a / 2] + a % 2, gb = 2 * dofs[b / 2] + b % 2;
        tz.emplace_back(ga, gb, Kz(a, b));
        tm.emplace_back(ga, gb, Km(a, b));
      }
  }
  SparseMatrix Z(2 * n, 2 * n), M(2 * n, 2 * n);
  Z.setFromTriplets(tz.begin(), tz.end());
  M.setFromTriplets(tm.begin(), tm.end());
  Z = 0.5 * (Z + SparseMatrix(Z.transpose()));
  M = 0.5 * (M + SparseMatrix(M.transpose()));
  const int probe = 10;
  EigenPairs ep = nearest_eigenpairs(Z, M, -1e-9, probe);
  VecX lam = ep.values.cwiseAbs();
  std::sort(lam.data(), lam.data() + lam.size());
  if (spectrum) *spectrum = lam;
  // largest relative gap among the probed eigenvalues
  int dim = 0;
  double best = 100.0;
  for (int k = 0; k + 1 < lam.size(); ++k) {
    double ratio = lam(k + 1) / std::max(lam(k), 1e-300);
    if (ratio > best) {
      best = ratio;
      dim = k + 1;
    }
  }
  return dim;
}

KornDiagnostic korn_diagnostic(const Surface& S, int samples, std::uint64_t seed) {
  if (samples < 1) throw ConfigError("korn.samples", "sample count must be at least 1");
  KornDiagnostic out;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const SurfaceChart& chart = S.chart();
  for (int k = 0; k < samples; ++k) {
    // random cubic coefficient fields a, b: v = a d1r + b d2r
    std::array<double, 10> ca, cb;
    for (double& x : ca) x = U(rng);
    for (double& x : cb) x = U(rng);
    auto poly = [](const std::array<double, 10>& c, const Vec2& p) {
      double x = p(0), y = p(1);
      return c[0] + c[1] * x + c[2] * y + c[3] * x * x + c[4] * x * y + c[5] * y * y + c[6] * x * x * x +
             c[7] * x * x * y + c[8] * x * y * y + c[9] * y * y * y;
    };
    VectorField3 v = interpolate(S.space_ptr(), [&](const Vec2& p) {
      ChartJet j = chart.jet(p);
      return Vec3(poly(ca, p) * j.d1[0] + poly(cb, p) * j.d1[1]);
    });
    out.ratios.push_back(korn_ratio(S, v));
  }
  out.max_ratio = *std::max_element(out.ratios.begin(), out.ratios.end());
  double lo = *std::min_element(out.ratios.begin(), out.ratios.end());
  const int bins = 10;
  out.histogram.assign(bins, 0);
  for (int b = 0; b <= bins; ++b) out.bin_edges.push_back(lo + (out.max_ratio - lo) * b / bins);
  for (double r : out.ratios) {
    int b = out.max_ratio > lo ? int((r - lo) / (out.max_ratio - lo) * bins) : 0;
    out.histogram[std::min(b, bins - 1)]++;
  }
  out.z_dim = z_dimension(S, &out.z_spectrum);
  return out;
}

}  // namespace shell_lab
