#pragma once

#include "shell_lab/linalg.hpp"
#include "shell_lab/surface.hpp"

#include <memory>
#include <vector>

namespace shell_lab {

enum class CurlMode { surface, flat_laplacian };
enum class KernelMode { dirichlet, full };

// Weak form of  -d_i(sqrt|g| h^ij d_j w) - 2 sqrt|g| H w  on the surface's FE space.
// Holds a reference to the surface, which must outlive the operator.
class CurlOperator {
 public:
  static CurlOperator assemble(const Surface& surface, CurlMode mode = CurlMode::surface,
                               double kernel_tol = 1e-8);

  const Surface& surface() const { return *surface_; }
  const SparseMatrix& matrix() const { return K_; }
  // sqrt|g|-weighted mass (dx mass in flat mode), used for shifts and eigenproblems
  const SparseMatrix& weighted_mass() const { return M_; }
  const std::vector<int>& boundary_dofs() const { return surface_->space().boundary_dofs(); }
  const std::vector<int>& interior_dofs() const { return surface_->space().interior_dofs(); }
  CurlMode mode() const { return mode_; }
  double kernel_tol() const { return kernel_tol_; }

  // lambda_0 = 2 max(sqrt|g| H) + 1
  double default_shift() const { return shift0_; }
  CurlOperator shifted(double lambda) const;

  // K w = M_dx rhs on interior dofs, w = trace on boundary dofs (ordered as boundary_dofs()).
  // Throws NumericalError "resonant operator" when the interior block is (numerically) singular.
  ScalarField solve_dirichlet(const VecX& trace, const ScalarField& rhs) const;
  ScalarField solve_dirichlet(const VecX& trace) const;
  // same with an assembled load vector (one entry per dof) in place of M_dx rhs
  ScalarField solve_dirichlet_load(const VecX& trace, const VecX& load) const;

  // L2-orthonormal numerical kernel: eigenvectors with |lambda| < kernel_tol * spectral scale
  std::vector<ScalarField> kernel_basis(KernelMode mode, int probe = 6) const;
  // eigenvalues nearest zero, sorted by magnitude
  VecX smallest_eigenvalues(KernelMode mode, int count) const;
  double spectral_scale(KernelMode mode) const;

 private:
  struct Cache;
  const Surface* surface_ = nullptr;
  CurlMode mode_ = CurlMode::surface;
  double kernel_tol_ = 1e-8;
  double shift0_ = 1;
  SparseMatrix K_, M_;
  std::shared_ptr<Cache> cache_;
};

// boundary trace vector of a function of the polar angle, ordered as space.boundary_dofs()
VecX boundary_trace(const FESpace& space, const std::function<double(double theta)>& phi);
VecX boundary_trace_from_field(const ScalarField& f);

}  // namespace shell_lab
