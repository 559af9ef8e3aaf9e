#include "shell_lab/elliptic.hpp"

#include <cmath>
#include <mutex>

namespace shell_lab {

struct CurlOperator::Cache {
  std::once_flag once;
  std::unique_ptr<LuFactor> interior;
  SparseMatrix K_ib;
  std::string failure;
};

CurlOperator CurlOperator::assemble(const Surface& surface, CurlMode mode, double kernel_tol) {
  if (!(kernel_tol > 0)) throw ConfigError("symgrad.kernel_tol", "kernel_tol must be positive");
  CurlOperator op;
  op.surface_ = &surface;
  op.mode_ = mode;
  op.kernel_tol_ = kernel_tol;
  op.cache_ = std::make_shared<Cache>();
  const FESpace& s = surface.space();
  if (mode == CurlMode::flat_laplacian) {
    op.K_ = assemble_bilinear(
        s, [](int) { return Mat2::Identity().eval(); }, [](int) { return 0.0; });
    op.M_ = s.mass_matrix();
    op.shift0_ = 1.0;
    return op;
  }
  if (!surface.chart().elliptic_expected())
    throw NumericalError("surface not elliptic: curl operator needs h^ij positive definite");
  op.K_ = assemble_bilinear(
      s,
      [&](int i) {
        const GeometryFields& G = surface.geo(i);
        return Mat2(G.sqrt_det_g * G.h_inv);
      },
      [&](int i) {
        const GeometryFields& G = surface.geo(i);
        return -2.0 * G.sqrt_det_g * G.mean_curvature;
      });
  op.M_ = assemble_bilinear(
      s, [](int) { return Mat2::Zero().eval(); },
      [&](int i) { return surface.geo(i).sqrt_det_g; });
  double m = 0;
  for (int i = 0; i < surface.num_qp(); ++i)
    m = std::max(m, surface.geo(i).sqrt_det_g * surface.geo(i).mean_curvature);
  op.shift0_ = 2 * m + 1;
  return op;
}

CurlOperator CurlOperator::shifted(double lambda) const {
  CurlOperator op = *this;
  op.K_ = K_ + lambda * M_;
  op.cache_ = std::make_shared<Cache>();
  return op;
}

ScalarField CurlOperator::solve_dirichlet(const VecX& trace, const ScalarField& rhs) const {
  return solve_dirichlet_load(trace, surface_->space().mass_matrix() * rhs.values);
}

ScalarField CurlOperator::solve_dirichlet_load(const VecX& trace, const VecX& b) const {
  const FESpace& s = surface_->space();
  const auto& B = boundary_dofs();
  const auto& I = interior_dofs();
  if (trace.size() != int(B.size()))
    throw Error("solve_dirichlet: trace must have one value per boundary dof");
  std::call_once(cache_->once, [&] {
    SparseMatrix Kii = submatrix(K_, I, I);
    cache_->K_ib = submatrix(K_, I, B);
    try {
      cache_->interior = std::make_unique<LuFactor>(Kii);
    } catch (const NumericalError&) {
      cache_->failure = "resonant operator: interior block is singular";
      return;
    }
    // smallest |eigenvalue| of the interior pencil by inverse iteration
    SparseMatrix Mii = submatrix(M_, I, I);
    VecX x = VecX::Ones(Kii.rows());
    double lam = 0;
    for (int it = 0; it < 30; ++it) {
      VecX y = cache_->interior->solve(VecX(Mii * x));
      if (!y.allFinite()) {
        lam = 0;
        break;
      }
      x = y / std::sqrt(y.dot(Mii * y));
      lam = x.dot(Kii * x);
    }
    double scale = largest_eigenvalue_estimate(Kii, Mii);
    if (!(std::abs(lam) > kernel_tol_ * scale))
      cache_->failure = "resonant operator: Dirichlet eigenvalue " + std::to_string(lam) +
                        " below kernel_tol * scale; use the least-squares path";
  });
  if (!cache_->failure.empty()) throw NumericalError(cache_->failure);
  if (b.size() != s.num_dofs()) throw Error("solve_dirichlet: load must have one entry per dof");

  VecX bi(I.size());
  for (size_t k = 0; k < I.size(); ++k) bi(k) = b(I[k]);
  bi -= cache_->K_ib * trace;
  VecX wi = cache_->interior->solve(bi);
  ScalarField w = ScalarField::zero(surface_->space_ptr());
  for (size_t k = 0; k < I.size(); ++k) w.values(I[k]) = wi(k);
  for (size_t k = 0; k < B.size(); ++k) w.values(B[k]) = trace(k);
  return w;
}

ScalarField CurlOperator::solve_dirichlet(const VecX& trace) const {
  return solve_dirichlet(trace, ScalarField::zero(surface_->space_ptr()));
}

double CurlOperator::spectral_scale(KernelMode mode) const {
  if (mode == KernelMode::full) return largest_eigenvalue_estimate(K_, M_);
  const auto& I = interior_dofs();
  return largest_eigenvalue_estimate(submatrix(K_, I, I), submatrix(M_, I, I));
}

namespace {
struct Pencil {
  SparseMatrix K, M;
  std::vector<int> dofs;
};
}  // namespace

static Pencil make_pencil(const SparseMatrix& K, const SparseMatrix& M, const FESpace& s, KernelMode mode) {
  Pencil p;
  if (mode == KernelMode::full) {
    p.K = K;
    p.M = M;
    p.dofs.resize(s.num_dofs());
    for (int i = 0; i < s.num_dofs(); ++i) p.dofs[i] = i;
  } else {
    p.dofs = s.interior_dofs();
    p.K = submatrix(K, p.dofs, p.dofs);
    p.M = submatrix(M, p.dofs, p.dofs);
  }
  return p;
}

VecX CurlOperator::smallest_eigenvalues(KernelMode mode, int count) const {
  Pencil p = make_pencil(K_, M_, surface_->space(), mode);
  double scale = largest_eigenvalue_estimate(p.K, p.M);
  EigenPairs ep = nearest_eigenpairs(p.K, p.M, -1e-7 * scale, count);
  return ep.values;
}

std::vector<ScalarField> CurlOperator::kernel_basis(KernelMode mode, int probe) const {
  const FESpace& s = surface_->space();
  Pencil p = make_pencil(K_, M_, s, mode);
  double scale = largest_eigenvalue_estimate(p.K, p.M);
  EigenPairs ep = nearest_eigenpairs(p.K, p.M, -1e-7 * scale, probe);
  std::vector<ScalarField> out;
  for (int j = 0; j < ep.values.size(); ++j) {
    if (!(std::abs(ep.values(j)) < kernel_tol_ * scale)) continue;
    ScalarField f = ScalarField::zero(surface_->space_ptr());
    for (size_t k = 0; k < p.dofs.size(); ++k) f.values(p.dofs[k]) = ep.vectors(k, j);
    out.push_back(std::move(f));
  }
  return out;
}

VecX boundary_trace(const FESpace& space, const std::function<double(double)>& phi) {
  const auto& B = space.boundary_dofs();
  VecX t(B.size());
  for (size_t k = 0; k < B.size(); ++k) {
    const Vec2& p = space.dof_coords()[B[k]];
    t(k) = phi(std::atan2(p(1), p(0)));
  }
  return t;
}

VecX boundary_trace_from_field(const ScalarField& f) {
  const auto& B = f.space->boundary_dofs();
  VecX t(B.size());
  for (size_t k = 0; k < B.size(); ++k) t(k) = f.values(B[k]);
  return t;
}

}  // namespace shell_lab
