#pragma once

#include "shell_lab/elliptic.hpp"
#include "shell_lab/linalg.hpp"
#include "shell_lab/surface.hpp"

#include <array>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace shell_lab {

enum class SymGradMethod { reconstruction, least_squares, minimal_norm };

struct SymGradReport {
  std::string method;
  double residual = 0;       // ||sym grad w_tan + (w.n) Pi - B||_{L2(S)}
  double boundary_curl = 0;  // ||omega(w)||_{L2(dS)}
  int kernel_dim = -1;       // -1 if not computed
  double korn_constant = 0;  // (||w_tan||_{W12} + ||w.n||_{L2}) / ||B||_{L2}
  double b_norm = 0;
  double integrability = 0;  // reconstruction: non-gradient part of the formula field, relative
  std::vector<double> solver_history;  // least squares: relative residuals of iterative refinement
};

struct SymGradSolution {
  VectorField3 w;
  SymGradReport report;
};

// Solver for sym grad w_tan + (w.n) Pi = B on an elliptic cap, normalized by omega(w) = 0 on
// the boundary and zero parameter-domain mean.
//
// reconstruction: omega solves L omega = D(B) with zero trace, grad w follows from the explicit
//   gradient formula and w is its least-squares potential.
// least_squares: ambient P2 unknowns (node-major 3 components) minimizing
//   ||sym grad w - B||^2 + ||omega(w)||^2_{L2(boundary)}, one dof pinned. It loses one order
//   in grad(w.n) but needs no Dirichlet solve; used when L is resonant.
// minimal_norm: the same least squares without the boundary term, plus alpha ||w||^2_{W12(S)}.
//   Picks the (near) minimal-norm representative modulo infinitesimal isometries, which keeps
//   the solution operator bounded in W12 for data near the boundary.
class SymGradSolver {
 public:
  explicit SymGradSolver(const Surface& surface, double kernel_tol = 1e-8,
                         SymGradMethod method = SymGradMethod::reconstruction, double alpha = 1e-6);
  ~SymGradSolver();

  SymGradSolution solve(const SymTensorField2& B) const;
  // B given at quadrature points; projected to the order-2 tensor space first
  SymGradSolution solve_qp(const std::vector<Mat2>& B) const;
  SymGradSolution solve_least_squares(const SymTensorField2& B) const;
  SymGradMethod method() const { return method_; }

  // dimension of the numerical kernel of the least-squares normal matrix
  int kernel_dim() const;
  const SparseMatrix& normal_matrix() const;
  const CurlOperator& curl_operator() const { return curl_; }
  const Surface& surface() const { return *surface_; }

 private:
  struct LeastSquares;
  const LeastSquares& least_squares() const;
  void finish(SymGradSolution& out, const std::vector<Mat2>& B) const;
  const Surface* surface_;
  double kernel_tol_;
  SymGradMethod method_;
  double alpha_;
  CurlOperator curl_;
  mutable std::unique_ptr<LeastSquares> ls_;
  mutable std::once_flag ls_once_, kernel_once_;
  mutable int kernel_dim_ = -1;
};

SymGradSolution solve_sym_grad(const Surface& surface, const SymTensorField2& B);

// ||w_tan||_{W12} + ||w.n||_{L2}
double korn_norm(const Surface& surface, const VectorField3& w);

// omega = (d1 w . d2 r - d2 w . d1 r) / sqrt|g|
double curl_at(const GeometryFields& G, const Mat32& dw);
std::vector<double> curl_at_qp(const Surface& surface, const VectorField3& w);
ScalarField curl_of_field(const Surface& surface, const VectorField3& w);

// weak source of the curl equation: the normal component of the integrability condition of
// the gradient formula, tested with phi:
//   2 int (sqrt|g| h^ij c_j d_i phi + phi sum_ij g^ij (B_1j h_i2 - B_2j h_i1)) dx
VecX curl_source(const Surface& surface, const SymTensorField2& B);
// omega solving L omega = D(B) with the given boundary trace
ScalarField solve_curl(const CurlOperator& op, const SymTensorField2& B, const VecX& trace);

// c_i = (d1 B_2i - d2 B_1i + sum_k (G^k_2i B_1k - G^k_1i B_2k)) / sqrt|g|
Vec2 compatibility_c(const GeometryFields& G, const Mat2& B, const std::array<Mat2, 2>& dB);
// normal coefficients u_1, u_2 of the gradient
Vec2 normal_coefficients(const GeometryFields& G, const Vec2& domega, const Vec2& c);
// (d1 w, d2 w) from B, omega and u
Mat32 gradient_formula(const GeometryFields& G, const Mat2& B, double omega, const Vec2& u);

struct CompatibilityData {
  SpacePtr space;
  ScalarField omega, c1, c2, u1, u2;  // c, u projected for output
  std::vector<Vec2> c_qp, u_qp;
  std::vector<double> omega_qp;
};

// B must be an order-2 field
CompatibilityData compatibility_fields(const Surface& surface, const SymTensorField2& B,
                                       const ScalarField& omega);
// gradient at quadrature points
std::vector<Mat32> reconstruct_gradient(const Surface& surface, const SymTensorField2& B,
                                        const CompatibilityData& compat);

struct KornDiagnostic {
  std::vector<double> ratios;
  double max_ratio = 0;
  std::vector<double> bin_edges;  // histogram of ratios
  std::vector<int> histogram;
  int z_dim = 0;       // discrete dimension of the space Z
  VecX z_spectrum;     // smallest eigenvalues used for the gap decision
};

// P(M) = M - (M:Pi / Pi:Pi) Pi in the orthonormal frame
Mat2 project_off_pi(const GeometryFields& G, const Mat2& M_frame);
// ||grad v|| / (||v|| + ||P((grad v)_tan)||) for a tangential field v
double korn_ratio(const Surface& surface, const VectorField3& v);
// dimension of {v tangential : P((grad v)_tan) = 0} via a spectral gap
int z_dimension(const Surface& surface, VecX* spectrum = nullptr);
KornDiagnostic korn_diagnostic(const Surface& surface, int samples, std::uint64_t seed = 1);

}  // namespace shell_lab
