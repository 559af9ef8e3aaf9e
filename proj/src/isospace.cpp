#include "shell_lab/isospace.hpp"

#include "shell_lab/parallel.hpp"
#include "shell_lab/symgrad.hpp"

#include <cmath>
#include <Eigen/Eigenvalues>

namespace shell_lab {

InfIsometry generate_iso(const CurlOperator& op, const VecX& trace, const IsoOptions& opt, std::string label) {
  const Surface& S = op.surface();
  InfIsometry iso;
  iso.label = std::move(label);
  iso.trace = trace;
  iso.omega = op.solve_dirichlet(trace);
  std::vector<double> om = qp_values(iso.omega);
  std::vector<Vec2> dom = qp_gradients(iso.omega);
  std::vector<Mat32> grad(S.num_qp());
  for (int i = 0; i < S.num_qp(); ++i) {
    const GeometryFields& G = S.geo(i);
    grad[i] = gradient_formula(G, Mat2::Zero(), om[i], normal_coefficients(G, dom[i], Vec2::Zero()));
  }
  VectorPotentialResult pot = recover_potential(S.space_ptr(), grad);
  iso.V = pot.u;
  iso.integrability = pot.target_norm > 0 ? pot.residual / pot.target_norm : 0.0;
  if (iso.integrability > opt.integrability_tol)
    throw NumericalError("gradient field not integrable at this resolution (relative residual " +
                         std::to_string(iso.integrability) + ")");
  std::vector<Mat32> dV = qp_gradients(iso.V);
  double gn = gradient_norm(S, dV);
  iso.sym_grad_residual = gn > 0 ? sym_grad_residual(S, iso.V) / gn : 0.0;
  iso.flagged = iso.sym_grad_residual > opt.residual_tol;
  iso.A = skew_field(S, iso.V, &iso.skew_defect);
  return iso;
}

InfIsometry generate_iso(const CurlOperator& op, const std::function<double(double)>& phi, const IsoOptions& opt,
                         std::string label) {
  return generate_iso(op, boundary_trace(op.surface().space(), phi), opt, std::move(label));
}

Mat3 skew_at(const GeometryFields& G, const Mat32& dV, double* defect) {
  Mat3 T, X;
  T << G.tangent[0], G.tangent[1], G.normal;
  Vec2 vn(dV.col(0).dot(G.normal), dV.col(1).dot(G.normal));
  Vec2 coef = -(G.g_inv * vn);
  Vec3 An = coef(0) * G.tangent[0] + coef(1) * G.tangent[1];
  X << dV.col(0), dV.col(1), An;
  Mat3 A = X * T.inverse();
  Mat3 K = 0.5 * (A - A.transpose());
  if (defect) {
    double n = A.norm();
    *defect = n > 0 ? (A - K).norm() / n : 0.0;
  }
  return K;
}

SkewField3 skew_field(const Surface& S, const VectorField3& V, double* max_defect) {
  const FESpace& s = S.space();
  std::vector<Mat32> G = recovered_nodal_gradients(V);
  SkewField3 out{V.space, NodalMatrix::Zero(s.num_dofs(), 3)};
  std::vector<double> defect(s.num_dofs(), 0.0);
  parallel_for(s.num_dofs(), [&](int i) {
    GeometryFields geo = geometry_at(S.chart(), s.dof_coords()[i]);
    out.values.row(i) = SkewField3::pack(skew_at(geo, G[i], &defect[i])).transpose();
  });
  if (max_defect) {
    double m = 0;
    for (double d : defect) m = std::max(m, d);
    *max_defect = m;
  }
  return out;
}

std::vector<Mat3> skew_at_qp(const Surface& S, const VectorField3& V) {
  std::vector<Mat32> dV = qp_gradients(V);
  std::vector<Mat3> out(S.num_qp());
  for (int i = 0; i < S.num_qp(); ++i) out[i] = skew_at(S.geo(i), dV[i]);
  return out;
}

std::vector<std::string> fourier_modes(int K) {
  if (K < 0) throw ConfigError("loads.modes", "mode count must be non-negative");
  std::vector<std::string> m{"1"};
  for (int k = 1; k <= K; ++k) {
    m.push_back("cos" + std::to_string(k));
    m.push_back("sin" + std::to_string(k));
  }
  return m;
}

std::function<double(double)> mode_function(const std::string& mode) {
  if (mode == "1") return [](double) { return 1.0; };
  auto parse = [&](const std::string& prefix) -> int {
    if (mode.rfind(prefix, 0) != 0 || mode.size() == prefix.size()) return -1;
    for (size_t i = prefix.size(); i < mode.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(mode[i]))) return -1;
    return std::stoi(mode.substr(prefix.size()));
  };
  if (int k = parse("cos"); k > 0) return [k](double t) { return std::cos(k * t); };
  if (int k = parse("sin"); k > 0) return [k](double t) { return std::sin(k * t); };
  throw ConfigError("iso.modes", "unknown boundary mode '" + mode + "' (expected 1, cosK or sinK)");
}

IsoBasis iso_basis(const CurlOperator& op, const std::vector<std::string>& modes, const IsoOptions& opt) {
  const Surface& S = op.surface();
  std::vector<std::function<double(double)>> fns;
  for (const auto& m : modes) fns.push_back(mode_function(m));
  IsoBasis out;
  out.fields.resize(modes.size());
  parallel_for(int(modes.size()), [&](int k) { out.fields[k] = generate_iso(op, fns[k], opt, modes[k]); });
  const int n = int(modes.size());
  std::vector<std::vector<Vec3>> vq(n);
  for (int k = 0; k < n; ++k) vq[k] = qp_values(out.fields[k].V);
  out.gram = MatX::Zero(n, n);
  out.residuals = VecX::Zero(n);
  for (int a = 0; a < n; ++a) {
    out.residuals(a) = out.fields[a].sym_grad_residual;
    for (int b = a; b < n; ++b) {
      double s = 0;
      for (int i = 0; i < S.num_qp(); ++i) s += S.area_weight(i) * vq[a][i].dot(vq[b][i]);
      out.gram(a, b) = out.gram(b, a) = s;
    }
  }
  Eigen::SelfAdjointEigenSolver<MatX> es(out.gram);
  double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
  out.gram_condition = lo > 0 ? hi / lo : std::numeric_limits<double>::infinity();
  return out;
}

double metric_change(const Surface& S, const VectorField3& V, double eps) {
  std::vector<Mat32> dV = qp_gradients(V);
  std::vector<Mat2> d(S.num_qp());
  for (int i = 0; i < S.num_qp(); ++i) {
    Mat32 F = S.geo(i).tangents() + eps * dV[i];
    d[i] = F.transpose() * F - S.geo(i).g;
  }
  return tensor_norm(S, d);
}

double projection_residual(const Surface& S, const IsoBasis& basis, const VectorField3& f) {
  VectorField3 c = f;
  Vec3 m = mean_value(c);
  for (int i = 0; i < c.values.rows(); ++i) c.values.row(i) -= m.transpose();
  std::vector<Vec3> fq = qp_values(c);
  const int n = int(basis.fields.size());
  std::vector<std::vector<Vec3>> vq(n);
  VecX rhs(n);
  for (int k = 0; k < n; ++k) {
    vq[k] = qp_values(basis.fields[k].V);
    double s = 0;
    for (int i = 0; i < S.num_qp(); ++i) s += S.area_weight(i) * vq[k][i].dot(fq[i]);
    rhs(k) = s;
  }
  VecX coef = basis.gram.ldlt().solve(rhs);
  std::vector<Vec3> r = fq;
  for (int i = 0; i < S.num_qp(); ++i)
    for (int k = 0; k < n; ++k) r[i] -= coef(k) * vq[k][i];
  double fn = l2_norm(S, fq);
  return fn > 0 ? l2_norm(S, r) / fn : 0.0;
}

}  // namespace shell_lab
