#include "shell_lab/loads.hpp"

#include "shell_lab/parallel.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <random>

namespace shell_lab {

VectorField3 mean_free_force(const Surface& S, const VectorField3& f) {
  std::vector<Vec3> fq = qp_values(f);
  Vec3 m = Vec3::Zero();
  for (int q = 0; q < S.num_qp(); ++q) m += S.area_weight(q) * fq[q];
  m /= S.area();
  VectorField3 out = f;
  out.values.rowwise() -= m.transpose();
  return out;
}

VectorField3 force_profile(const Surface& S, const std::string& name) {
  const SurfaceChart& c = S.chart();
  if (name == "axial")
    return mean_free_force(S, interpolate(S.space_ptr(), [&](const Vec2& p) { return Vec3(0, 0, c.jet(p).r(2)); }));
  if (name == "shear")
    return mean_free_force(S, interpolate(S.space_ptr(), [&](const Vec2& p) {
                             Vec3 x = c.jet(p).r;
                             return Vec3(x(2), 0, x(0));
                           }));
  throw ConfigError("loads.force_profile", "unknown force profile '" + name + "' (expected axial, shear or file)");
}

Mat3 force_moment(const Surface& S, const VectorField3& f) {
  std::vector<Vec3> fq = qp_values(f);
  Mat3 X = Mat3::Zero();
  for (int q = 0; q < S.num_qp(); ++q) X += S.area_weight(q) * S.geo(q).r * fq[q].transpose();
  return X;
}

double force_action(const Surface& S, const VectorField3& f, const Mat3& Q) {
  return (Q * force_moment(S, f)).trace();
}

OptimalRotation optimal_rotation(const Mat3& X, int orbit_samples) {
  OptimalRotation out;
  out.moment = X;
  Eigen::JacobiSVD<Mat3> svd(X, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Mat3 U = svd.matrixU(), V = svd.matrixV();
  const double d = (V * U.transpose()).determinant() < 0 ? -1.0 : 1.0;
  Mat3 D = Vec3(1, 1, d).asDiagonal();
  out.Q = V * D * U.transpose();
  Vec3 s = svd.singularValues();
  out.signed_singular_values = Vec3(s(0), s(1), d * s(2));
  out.m = (out.Q * X).trace();
  const double tol = 1e-10;
  const double scale = X.norm();
  if (scale == 0 || s(0) <= tol * scale) {
    out.degenerate = true;
    std::mt19937_64 rng(1);
    std::normal_distribution<double> N;
    out.orbit.push_back(Mat3::Identity());
    while (int(out.orbit.size()) < orbit_samples)
      out.orbit.push_back(Eigen::Quaterniond(N(rng), N(rng), N(rng), N(rng)).normalized().toRotationMatrix());
  } else if (s(1) + d * s(2) <= tol * s(0)) {
    // tr(Q X) = s1 + cos(phi)(s2 + s3) along rotations about the first singular axis
    out.degenerate = true;
    for (int k = 0; k < orbit_samples; ++k)
      out.orbit.push_back(V * D * Eigen::AngleAxisd(2 * M_PI * k / orbit_samples, Vec3::UnitX()).toRotationMatrix() *
                          U.transpose());
  } else {
    out.orbit.push_back(out.Q);
  }
  return out;
}

OptimalRotation optimal_rotation(const Surface& S, const VectorField3& f, int orbit_samples) {
  return optimal_rotation(force_moment(S, f), orbit_samples);
}

double grid_max_action(const Mat3& X, int n) {
  double best = -std::numeric_limits<double>::infinity();
  for (int face = 0; face < 4; ++face)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          double c[3] = {-1 + (2 * i + 1.0) / n, -1 + (2 * j + 1.0) / n, -1 + (2 * k + 1.0) / n};
          double q[4];
          for (int a = 0, b = 0; a < 4; ++a) q[a] = a == face ? 1.0 : c[b++];
          Eigen::Quaterniond qq(q[0], q[1], q[2], q[3]);
          best = std::max(best, (qq.normalized().toRotationMatrix() * X).trace());
        }
  return best;
}

LimitProblem assemble_limit_problem(const Surface& S, const MaterialModel& material, const IsoBasis& basis,
                                    double kernel_tol) {
  if (!(kernel_tol > 0)) throw ConfigError("loads.kernel_tol", "kernel_tol must be positive");
  LimitProblem P;
  const int n = int(basis.fields.size());
  if (n == 0) throw ConfigError("loads.modes", "empty isometry basis");
  std::vector<std::vector<Mat2>> K(n);
  for (int k = 0; k < n; ++k) {
    P.labels.push_back(basis.fields[k].label);
    P.fields.push_back(basis.fields[k].V);
  }
  parallel_for(n, [&](int k) { K[k] = bending_form(S, basis.fields[k].V); });
  P.stiffness = MatX::Zero(n, n);
  std::vector<std::pair<int, int>> pairs;
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) pairs.emplace_back(a, b);
  std::vector<double> vals(pairs.size());
  parallel_for(int(pairs.size()), [&](int i) {
    vals[i] = 2 * bending_bilinear(S, material, K[pairs[i].first], K[pairs[i].second]);
  });
  for (size_t i = 0; i < pairs.size(); ++i)
    P.stiffness(pairs[i].first, pairs[i].second) = P.stiffness(pairs[i].second, pairs[i].first) = vals[i];
  P.gram = basis.gram;

  Eigen::GeneralizedSelfAdjointEigenSolver<MatX> es(P.stiffness, P.gram);
  if (es.info() != Eigen::Success) throw NumericalError("limit problem: generalized eigensolver failed");
  P.spectrum = es.eigenvalues();
  VecX sorted = P.spectrum;
  std::sort(sorted.data(), sorted.data() + n);
  const double median = sorted(n / 2);
  int nk = 0;
  while (nk < n && P.spectrum(nk) <= kernel_tol * median) ++nk;
  P.kernel = es.eigenvectors().leftCols(nk);
  P.range = es.eigenvectors().rightCols(n - nk);
  return P;
}

VecX load_vector(const Surface& S, const LimitProblem& P, const VectorField3& f, const Mat3& Q) {
  std::vector<Vec3> fq = qp_values(f);
  for (Vec3& v : fq) v = Q.transpose() * v;
  VecX l(P.fields.size());
  for (size_t k = 0; k < P.fields.size(); ++k) {
    std::vector<Vec3> vq = qp_values(P.fields[k]);
    double s = 0;
    for (int q = 0; q < S.num_qp(); ++q) s += S.area_weight(q) * fq[q].dot(vq[q]);
    l(k) = s;
  }
  return l;
}

double limit_energy(const LimitProblem& P, const VecX& load, const VecX& c) {
  return 0.5 * c.dot(P.stiffness * c) - load.dot(c);
}

LimitSolution solve_limit(const LimitProblem& P, const VecX& load) {
  LimitSolution out;
  out.load = load;
  out.kernel_dim = int(P.kernel.cols());
  const MatX& Y = P.range;
  MatX Ay = Y.transpose() * P.stiffness * Y;
  VecX a = Ay.ldlt().solve(Y.transpose() * load);
  out.coefficients = Y * a;
  out.J = limit_energy(P, load, out.coefficients);
  // the load component on the rigid kernel cannot be balanced; the normal equations are solved
  // for the load with that component removed
  VecX lk = P.gram * (P.kernel * (P.kernel.transpose() * load));
  double l = load.norm();
  out.el_residual = l > 0 ? (P.stiffness * out.coefficients - (load - lk)).norm() / l : 0.0;
  out.kernel_load = l > 0 ? lk.norm() / l : 0.0;
  out.V = VectorField3::zero(P.fields.front().space);
  for (size_t k = 0; k < P.fields.size(); ++k) out.V.values += out.coefficients(k) * P.fields[k].values;
  return out;
}

LimitSolution minimize_limit_energy(const Surface& S, const LimitProblem& P, const VectorField3& f) {
  OptimalRotation rot = optimal_rotation(S, f);
  LimitSolution best;
  bool first = true;
  for (const Mat3& Q : rot.orbit) {
    LimitSolution s = solve_limit(P, load_vector(S, P, f, Q));
    if (first || s.J < best.J) {
      best = std::move(s);
      best.Q = Q;
      first = false;
    }
  }
  best.m = rot.m;
  best.degenerate = rot.degenerate;
  return best;
}

}  // namespace shell_lab
