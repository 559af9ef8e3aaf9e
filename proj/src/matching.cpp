#include "shell_lab/matching.hpp"

#include "shell_lab/linalg.hpp"
#include "shell_lab/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace shell_lab {

namespace {

std::vector<Mat2> quadratic_rhs(const Surface& S, const std::vector<Mat32>& dV, const VectorField3* w, double h) {
  std::vector<Mat32> dw;
  if (w) dw = qp_gradients(*w);
  std::vector<Mat2> B(S.num_qp());
  for (int i = 0; i < S.num_qp(); ++i) {
    Mat32 F = dV[i];
    if (w) F += h * dw[i];
    B[i] = -0.5 * F.transpose() * F;
  }
  return B;
}

double hessian_norm(const Surface& S, const VectorField3& w) {
  std::vector<Hessian3> H = qp_recovered_hessians(w);
  double s = 0;
  for (int i = 0; i < S.num_qp(); ++i)
    s += S.area_weight(i) * (H[i][0].squaredNorm() + 2 * H[i][1].squaredNorm() + H[i][2].squaredNorm());
  return std::sqrt(s);
}

// Helmholtz filter (M + d^2 K)^{-1} M: first along the boundary circle (periodic P2), then in the
// interior with the filtered boundary values as Dirichlet data. Natural boundary conditions
// would flatten the normal derivative in a layer of width d.
class Smoother {
 public:
  Smoother(const FESpace& s, double factor) {
    if (factor <= 0) return;
    double area = 0;
    for (int e = 0; e < s.num_elements(); ++e) area += s.element_area(e);
    const double d2 = factor * factor * 2 * area / s.num_elements();

    bnd_ = s.boundary_dofs();
    const auto& x = s.dof_coords();
    auto angle = [&](int i) { return std::atan2(x[i](1), x[i](0)); };
    std::sort(bnd_.begin(), bnd_.end(), [&](int a, int b) { return angle(a) < angle(b); });
    const int nb = int(bnd_.size());
    if (nb % 2 != 0) throw NumericalError("boundary smoother expects a P2 boundary");
    // start the periodic sequence at a mesh node
    if (bnd_[0] >= s.mesh().num_nodes()) std::rotate(bnd_.begin(), bnd_.begin() + 1, bnd_.end());
    const double m[3][3] = {{4, 2, -1}, {2, 16, 2}, {-1, 2, 4}};
    const double a[3][3] = {{7, -8, 1}, {-8, 16, -8}, {1, -8, 7}};
    std::vector<Eigen::Triplet<double>> mt, at;
    for (int k = 0; k < nb / 2; ++k) {
      int loc[3] = {2 * k, 2 * k + 1, (2 * k + 2) % nb};
      double L = (x[bnd_[loc[0]]] - x[bnd_[loc[1]]]).norm() + (x[bnd_[loc[1]]] - x[bnd_[loc[2]]]).norm();
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          mt.emplace_back(loc[i], loc[j], L / 30 * m[i][j]);
          at.emplace_back(loc[i], loc[j], L / 30 * m[i][j] + d2 / (3 * L) * a[i][j]);
        }
    }
    Mb_.resize(nb, nb);
    Mb_.setFromTriplets(mt.begin(), mt.end());
    SparseMatrix Ab(nb, nb);
    Ab.setFromTriplets(at.begin(), at.end());
    bspd_ = std::make_unique<SpdFactor>(Ab);

    SparseMatrix A = SparseMatrix(s.mass_matrix() + d2 * s.stiffness_matrix());
    inner_ = s.interior_dofs();
    M_ = s.mass_matrix();
    Aib_ = submatrix(A, inner_, bnd_);
    ispd_ = std::make_unique<SpdFactor>(submatrix(A, inner_, inner_));
  }

  VectorField3 operator()(const VectorField3& w) const {
    if (!ispd_) return w;
    VectorField3 out = w;
    for (int c = 0; c < 3; ++c) {
      VecX wb(bnd_.size());
      for (size_t k = 0; k < bnd_.size(); ++k) wb(k) = w.values(bnd_[k], c);
      VecX sb = bspd_->solve(VecX(Mb_ * wb));
      VecX mw = M_ * w.values.col(c);
      VecX rhs(inner_.size());
      for (size_t k = 0; k < inner_.size(); ++k) rhs(k) = mw(inner_[k]);
      VecX si = ispd_->solve(VecX(rhs - Aib_ * sb));
      for (size_t k = 0; k < bnd_.size(); ++k) out.values(bnd_[k], c) = sb(k);
      for (size_t k = 0; k < inner_.size(); ++k) out.values(inner_[k], c) = si(k);
    }
    return out;
  }

 private:
  std::vector<int> bnd_, inner_;
  SparseMatrix M_, Mb_, Aib_;
  std::unique_ptr<SpdFactor> bspd_, ispd_;
};

}  // namespace

MatchResult match_isometry(const SymGradSolver& solver, const VectorField3& V, double h, const MatchOptions& opt) {
  if (!(h > 0)) throw ConfigError("match.h", "thickness parameter must be positive");
  if (!(opt.tol > 0)) throw ConfigError("match.tol", "tolerance must be positive");
  if (opt.max_iter < 1) throw ConfigError("match.max_iter", "need at least one iteration");
  if (solver.method() != SymGradMethod::minimal_norm)
    throw ConfigError("match.solver", "matching needs a minimal_norm sym grad solver");
  const Surface& S = solver.surface();
  std::vector<Mat32> dV = qp_gradients(V);

  Smoother smooth(S.space(), opt.smoothing);

  MatchResult out;
  out.h = h;
  out.w = solver.solve_qp(quadratic_rhs(S, dV, nullptr, h)).w;
  for (int k = 0; k < opt.max_iter; ++k) {
    VectorField3 ws = smooth(out.w);
    VectorField3 next;
    try {
      next = solver.solve_qp(quadratic_rhs(S, dV, &ws, h)).w;
    } catch (const NumericalError& err) {
      throw NumericalError("matching diverged at iteration " + std::to_string(k + 1) + " (h = " + std::to_string(h) +
                               "): " + err.what(),
                           out.update_norms);
    }
    double step = w12_distance_mod_constants(S, next, out.w);
    if (!std::isfinite(step))
      throw NumericalError("matching diverged at iteration " + std::to_string(k + 1) + " (h = " + std::to_string(h) + ")",
                           out.update_norms);
    out.w = std::move(next);
    out.update_norms.push_back(step);
    out.iterations = k + 1;
    if (step < opt.tol) break;
    if (k + 1 == opt.max_iter)
      throw NumericalError("matching did not converge in " + std::to_string(opt.max_iter) +
                               " iterations (h = " + std::to_string(h) + ", last update " + std::to_string(step) + ")",
                           out.update_norms);
  }
  out.defect = isometry_defect(S, matched_gradients(S, V, out.w, h));
  out.defect_unmatched = isometry_defect(S, matched_gradients(S, V, VectorField3::zero(V.space), h));
  out.w_norm = w12_norm(S, out.w);
  out.w_hessian_norm = hessian_norm(S, out.w);
  return out;
}

std::vector<MatchResult> match_sweep(const SymGradSolver& solver, const VectorField3& V, const std::vector<double>& hs,
                                     const MatchOptions& opt) {
  std::vector<MatchResult> out(hs.size());
  parallel_for(int(hs.size()), [&](int i) { out[i] = match_isometry(solver, V, hs[i], opt); });
  return out;
}

double isometry_defect(const Surface& S, const std::vector<Mat32>& du) {
  double m = 0;
  for (int i = 0; i < S.num_qp(); ++i) {
    const GeometryFields& G = S.geo(i);
    m = std::max(m, to_frame(G, du[i].transpose() * du[i] - G.g).norm());
  }
  return m;
}

double displacement_defect(const Surface& S, const VectorField3& d) {
  std::vector<Mat32> du = qp_gradients(d);
  for (int i = 0; i < S.num_qp(); ++i) du[i] += S.geo(i).tangents();
  return isometry_defect(S, du);
}

std::vector<Mat32> matched_gradients(const Surface& S, const VectorField3& V, const VectorField3& w, double h) {
  std::vector<Mat32> dV = qp_gradients(V), dw = qp_gradients(w);
  std::vector<Mat32> du(S.num_qp());
  for (int i = 0; i < S.num_qp(); ++i) du[i] = S.geo(i).tangents() + h * dV[i] + h * h * dw[i];
  return du;
}

double contraction_rate(const std::vector<double>& u) {
  if (u.size() < 3) throw NumericalError("contraction rate needs at least 3 iterations, got " + std::to_string(u.size()));
  // updates at round-off level carry no rate information
  const double floor = 1e-13 * std::max(1.0, u.front());
  double s = 0;
  int n = 0;
  for (size_t k = 1; k < u.size(); ++k) {
    if (u[k] <= floor || u[k - 1] <= floor) break;
    s += std::log(u[k] / u[k - 1]);
    ++n;
  }
  if (n == 0) throw NumericalError("contraction rate undefined: updates vanish");
  return std::exp(s / n);
}

double contraction_rate(const MatchResult& r) { return contraction_rate(r.update_norms); }

}  // namespace shell_lab
