#include "shell_lab/energy.hpp"

#include "shell_lab/isospace.hpp"
#include "shell_lab/parallel.hpp"

#include <cmath>
#include <limits>

namespace shell_lab {

namespace {

// nodes and weights on [-1, 1]
struct GaussRule {
  std::vector<double> x, w;
};

GaussRule gauss_legendre(int n) {
  switch (n) {
    case 1: return {{0.0}, {2.0}};
    case 2: {
      double a = 1 / std::sqrt(3.0);
      return {{-a, a}, {1.0, 1.0}};
    }
    case 3: {
      double a = std::sqrt(0.6);
      return {{-a, 0.0, a}, {5.0 / 9, 8.0 / 9, 5.0 / 9}};
    }
    case 4: {
      double a = std::sqrt(3.0 / 7 - 2.0 / 7 * std::sqrt(1.2)), b = std::sqrt(3.0 / 7 + 2.0 / 7 * std::sqrt(1.2));
      double wa = (18 + std::sqrt(30.0)) / 36, wb = (18 - std::sqrt(30.0)) / 36;
      return {{-b, -a, a, b}, {wb, wa, wa, wb}};
    }
    case 5: {
      double a = std::sqrt(5 - 2 * std::sqrt(10.0 / 7)) / 3, b = std::sqrt(5 + 2 * std::sqrt(10.0 / 7)) / 3;
      double wa = (322 + 13 * std::sqrt(70.0)) / 900, wb = (322 - 13 * std::sqrt(70.0)) / 900;
      return {{-b, -a, 0.0, a, b}, {wb, wa, 128.0 / 225, wa, wb}};
    }
  }
  throw ConfigError("gamma.thickness_points", "thickness quadrature needs 1 to 5 points");
}

Mat3 unpack_skew(const Vec3& a) {
  Mat3 A;
  A << 0, a(0), a(1), -a(0), 0, a(2), -a(1), -a(2), 0;
  return A;
}

}  // namespace

MaterialModel::MaterialModel(double mu, double lambda) : mu_(mu), lambda_(lambda) {
  if (!(mu > 0)) throw ConfigError("material.mu", "mu must be positive");
  if (!(lambda >= 0)) throw ConfigError("material.lambda", "lambda must be non-negative");
}

double MaterialModel::W(const Mat3& F) const {
  Mat3 E = F.transpose() * F - Mat3::Identity();
  double tr = E.trace();
  return mu_ / 4 * E.squaredNorm() + lambda_ / 8 * tr * tr;
}

double MaterialModel::q3(const Mat3& F) const {
  Mat3 S = 0.5 * (F + F.transpose());
  double tr = F.trace();
  return 2 * mu_ * S.squaredNorm() + lambda_ * tr * tr;
}

Q2Result MaterialModel::q2_min(const Mat2& F_tan) const {
  Mat2 S = 0.5 * (F_tan + F_tan.transpose());
  double tr = S.trace();
  Q2Result r;
  r.value = 2 * mu_ * S.squaredNorm() + 2 * mu_ * lambda_ / (2 * mu_ + lambda_) * tr * tr;
  r.c = Vec3(0, 0, -lambda_ * tr / (2 * (lambda_ + 2 * mu_)));
  return r;
}

Mat3 complete(const Mat2& F_tan, const Vec3& c) {
  Mat3 M = Mat3::Zero();
  M.topLeftCorner<2, 2>() = F_tan;
  M.col(2) += c;
  M.row(2) += c.transpose();
  return M;
}

void GammaConfig::validate() const {
  if (!(beta > 2 && beta < 4)) throw ConfigError("gamma.beta", "beta must lie in (2,4)");
  if (hs.empty()) throw ConfigError("gamma.h_list", "needs at least one thickness");
  for (size_t i = 0; i < hs.size(); ++i) {
    if (!(hs[i] > 0)) throw ConfigError("gamma.h_list", "thicknesses must be positive");
    if (i > 0 && !(hs[i] < hs[i - 1])) throw ConfigError("gamma.h_list", "thicknesses must be strictly decreasing");
  }
  if (thickness_points < 1 || thickness_points > 5)
    throw ConfigError("gamma.thickness_points", "thickness quadrature needs 1 to 5 points");
}

double GammaConfig::e(double h) const { return std::pow(h, beta); }
double GammaConfig::eps(double h) const { return std::pow(h, beta / 2 - 1); }

std::vector<Mat2> bending_form_hessian(const Surface& S, const VectorField3& V) {
  std::vector<Mat32> dV = qp_gradients(V);
  std::vector<Hessian3> H = qp_recovered_hessians(V);
  std::vector<Mat2> K(S.num_qp());
  for (int q = 0; q < S.num_qp(); ++q) {
    const GeometryFields& G = S.geo(q);
    Mat2 k;
    for (int i = 0; i < 2; ++i)
      for (int j = i; j < 2; ++j) {
        Vec3 c = H[q][i + j];
        for (int l = 0; l < 2; ++l) c -= G.christoffel[l][i][j] * dV[q].col(l);
        k(i, j) = k(j, i) = -G.normal.dot(c);
      }
    K[q] = to_frame(G, k);
  }
  return K;
}

std::vector<Mat2> bending_form(const Surface& S, const VectorField3& V) {
  // A, n and Pi all come from the interpolated chart, so that b x r_h gives K = 0 to round-off
  const FESpace& s = S.space();
  const SurfaceChart& chart = S.chart();
  VectorField3 R = interpolate(V.space, [&](const Vec2& p) { return chart.jet(p).r; });
  std::vector<Mat32> GV = recovered_nodal_gradients(V), GR = recovered_nodal_gradients(R);
  VectorField3 An = VectorField3::zero(V.space), N = VectorField3::zero(V.space);
  NodalMatrix Ap(s.num_dofs(), 3);
  parallel_for(s.num_dofs(), [&](int i) {
    const Mat32& T = GR[i];
    Vec3 n = (chart.orientation() * T.col(0).cross(T.col(1))).normalized();
    Vec2 vn(GV[i].col(0).dot(n), GV[i].col(1).dot(n));
    Vec2 coef = -((T.transpose() * T).inverse() * vn);
    Mat3 X, F;
    X << GV[i].col(0), GV[i].col(1), T * coef;
    F << T.col(0), T.col(1), n;
    Mat3 A = X * F.inverse();
    A = 0.5 * (A - A.transpose());
    Ap.row(i) = SkewField3::pack(A).transpose();
    An.values.row(i) = (A * n).transpose();
    N.values.row(i) = n.transpose();
  });
  std::vector<Mat32> dAn = qp_gradients(An), dN = qp_gradients(N);
  std::vector<Vec3> Aq = qp_values(VectorField3{V.space, Ap});
  std::vector<Mat2> K(S.num_qp());
  for (int q = 0; q < S.num_qp(); ++q) {
    const GeometryFields& G = S.geo(q);
    Mat3 A = unpack_skew(Aq[q]);
    Mat2 m;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) m(i, j) = G.tangent[i].dot(dAn[q].col(j) - A * dN[q].col(j));
    K[q] = to_frame(G, Mat2(0.5 * (m + m.transpose())));
  }
  return K;
}

double bending_energy(const Surface& S, const MaterialModel& material, const std::vector<Mat2>& K) {
  double sum = 0;
  for (int q = 0; q < S.num_qp(); ++q) sum += S.area_weight(q) * material.q2_min(K[q]).value;
  return sum / 24;
}

double bending_bilinear(const Surface& S, const MaterialModel& material, const std::vector<Mat2>& K1,
                        const std::vector<Mat2>& K2) {
  const double mu = material.mu(), lam = material.lambda();
  const double lr = 2 * mu * lam / (2 * mu + lam);
  double sum = 0;
  for (int q = 0; q < S.num_qp(); ++q) {
    Mat2 a = 0.5 * (K1[q] + K1[q].transpose()), b = 0.5 * (K2[q] + K2[q].transpose());
    sum += S.area_weight(q) * (2 * mu * (a.array() * b.array()).sum() + lr * a.trace() * b.trace());
  }
  return sum / 24;
}

double bending_energy(const Surface& S, const MaterialModel& material, const VectorField3& V) {
  return bending_energy(S, material, bending_form(S, V));
}

ShellDeformation ShellDeformation::rotated(const Mat3& Q, const Vec3& shift) const {
  ShellDeformation out = *this;
  for (size_t i = 0; i < u.size(); ++i) {
    out.u[i] = Q * u[i] + shift;
    out.m[i] = Q * m[i];
    out.d[i] = Q * d[i];
    out.du[i] = Q * du[i];
    out.dm[i] = Q * dm[i];
    out.dd[i] = Q * dd[i];
  }
  return out;
}

ShellDeformation identity_deformation(const Surface& S) {
  ShellDeformation out;
  const int n = S.num_qp();
  out.u.resize(n);
  out.m.resize(n);
  out.d.assign(n, Vec3::Zero());
  out.du.resize(n);
  out.dm.resize(n);
  out.dd.assign(n, Mat32::Zero());
  for (int q = 0; q < n; ++q) {
    const GeometryFields& G = S.geo(q);
    out.u[q] = G.r;
    out.m[q] = G.normal;
    out.du[q] = G.tangents();
    out.dm[q].col(0) = G.dnormal(0);
    out.dm[q].col(1) = G.dnormal(1);
  }
  return out;
}

RecoveryDeformation build_recovery(const SymGradSolver& solver, const MaterialModel& material, const VectorField3& V,
                                   double h, const GammaConfig& cfg, const MatchOptions& opt) {
  cfg.validate();
  return recovery_from_match(solver.surface(), material, V, match_isometry(solver, V, cfg.eps(h), opt), h);
}

RecoveryDeformation recovery_from_match(const Surface& S, const MaterialModel& material, const VectorField3& V,
                                        MatchResult match, double h) {
  RecoveryDeformation rec;
  rec.h = h;
  rec.eps = match.h;
  const double e = rec.eps;
  rec.match = std::move(match);

  std::vector<Vec3> Vq = qp_values(V), wq = qp_values(rec.match.w);
  std::vector<Mat32> dV = qp_gradients(V), dw = qp_gradients(rec.match.w);
  std::vector<Hessian3> HV = qp_recovered_hessians(V), Hw = qp_recovered_hessians(rec.match.w);
  const double o = S.chart().orientation();
  const int n = S.num_qp();
  ShellDeformation& M = rec.map;
  M.eps = e;
  M.u.resize(n);
  M.m.resize(n);
  M.du.resize(n);
  M.dm.resize(n);
  for (int q = 0; q < n; ++q) {
    const GeometryFields& G = S.geo(q);
    M.u[q] = G.r + e * Vq[q] + e * e * wq[q];
    M.du[q] = G.tangents() + e * dV[q] + e * e * dw[q];
    auto d2u = [&](int i, int j) -> Vec3 { return G.d2r[i][j] + e * HV[q][i + j] + e * e * Hw[q][i + j]; };
    Vec3 a = M.du[q].col(0), b = M.du[q].col(1);
    Vec3 N = a.cross(b);
    double len = N.norm();
    M.m[q] = o * N / len;
    Mat3 P = Mat3::Identity() - M.m[q] * M.m[q].transpose();
    for (int j = 0; j < 2; ++j) M.dm[q].col(j) = o * P * (d2u(0, j).cross(b) + a.cross(d2u(1, j))) / len;
  }

  std::vector<Mat2> K = bending_form(S, V);
  rec.zeta.resize(n);
  std::vector<Vec3> dq(n);
  for (int q = 0; q < n; ++q) {
    const GeometryFields& G = S.geo(q);
    Vec3 c = material.q2_min(K[q]).c;
    rec.zeta[q] = c(0) * (G.tangents() * G.frame.col(0)) + c(1) * (G.tangents() * G.frame.col(1)) + c(2) * G.normal;
    dq[q] = 2 * rec.zeta[q];
  }
  rec.d = project(V.space, dq);
  M.d = qp_values(rec.d);
  M.dd = qp_gradients(rec.d);
  return rec;
}

double shell_energy(const Surface& S, const MaterialModel& material, const ShellDeformation& map, double h,
                    int thickness_points) {
  if (!(h > 0)) throw ConfigError("energy.h", "thickness must be positive");
  GaussRule rule = gauss_legendre(thickness_points);
  const FESpace& s = S.space();
  const int nq = FESpace::qp_per_element;
  std::vector<double> part(s.num_elements(), 0.0);
  parallel_for(s.num_elements(), [&](int el) {
    double sum = 0;
    for (int q = el * nq; q < (el + 1) * nq; ++q) {
      const GeometryFields& G = S.geo(q);
      const Mat2 Wk = G.weingarten();
      double acc = 0;
      for (size_t k = 0; k < rule.x.size(); ++k) {
        const double t = rule.x[k] * h / 2;
        Mat3 B, C;
        for (int j = 0; j < 2; ++j) {
          B.col(j) = G.tangent[j] + t * G.dnormal(j);
          C.col(j) = map.du[q].col(j) + t * map.dm[q].col(j) + t * t / 2 * map.eps * map.dd[q].col(j);
        }
        B.col(2) = G.normal;
        C.col(2) = map.m[q] + t * map.eps * map.d[q];
        Mat3 F = C * B.inverse();
        double det = (Mat2::Identity() + t * Wk).determinant();
        acc += rule.w[k] / 2 * material.W(F) * det;
      }
      sum += S.area_weight(q) * acc;
    }
    part[el] = sum;
  });
  double E = 0;
  for (double p : part) E += p;
  return E;
}

ScaledDisplacement scaled_displacement(const Surface& S, const VectorField3& V, const RecoveryDeformation& rec,
                                       const GammaConfig& cfg) {
  (void)cfg;
  ScaledDisplacement out;
  const double e = rec.eps, h = rec.h;
  // thickness average of u^h - x is eps V + eps^2 w + h^2/24 eps d
  out.Vh = VectorField3{V.space, V.values + e * rec.match.w.values + h * h / 24 * rec.d.values};
  out.error = w12_distance_mod_constants(S, out.Vh, V);
  std::vector<Mat32> dVh = qp_gradients(out.Vh);
  std::vector<Mat3> A = skew_at_qp(S, V);
  std::vector<Mat2> diff(S.num_qp()), ref(S.num_qp());
  for (int q = 0; q < S.num_qp(); ++q) {
    const GeometryFields& G = S.geo(q);
    ref[q] = 0.5 * G.tangents().transpose() * A[q] * A[q] * G.tangents();
    diff[q] = sym_grad(G, dVh[q]) / e - ref[q];
  }
  out.s_h = tensor_norm(S, diff);
  out.s_ref = tensor_norm(S, ref);
  return out;
}

std::vector<GammaRow> gamma_sweep(const SymGradSolver& solver, const MaterialModel& material, const VectorField3& V,
                                  const GammaConfig& cfg, const MatchOptions& opt) {
  cfg.validate();
  const Surface& S = solver.surface();
  const double I = bending_energy(S, material, V);
  // below this I(V) counts as zero (rigid V) and the ratio is undefined
  const double g = gradient_norm(S, qp_gradients(V));
  const double I_floor = 1e-10 * material.mu() * g * g;
  std::vector<GammaRow> rows(cfg.hs.size());
  parallel_for(int(cfg.hs.size()), [&](int k) {
    const double h = cfg.hs[k];
    RecoveryDeformation rec = build_recovery(solver, material, V, h, cfg, opt);
    GammaRow& r = rows[k];
    r.h = h;
    r.eps = rec.eps;
    r.scaled_energy = shell_energy(S, material, rec.map, h, cfg.thickness_points) / cfg.e(h);
    r.I_V = I;
    r.ratio = I > I_floor ? r.scaled_energy / I : std::numeric_limits<double>::quiet_NaN();
    r.iterations = rec.match.iterations;
    r.defect = rec.match.defect;
    ScaledDisplacement sd = scaled_displacement(S, V, rec, cfg);
    r.vh_error = sd.error;
    r.s_h = sd.s_h;
  });
  return rows;
}

}  // namespace shell_lab
