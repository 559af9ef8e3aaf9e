#pragma once

#include "shell_lab/elliptic.hpp"
#include "shell_lab/surface.hpp"

#include <string>
#include <vector>

namespace shell_lab {

struct InfIsometry {
  std::string label;
  VectorField3 V;
  SkewField3 A;
  ScalarField omega;
  VecX trace;
  double sym_grad_residual = 0;  // ||sym grad V||_{L2(S)} / ||grad V||_{L2(S)}
  double integrability = 0;      // relative non-gradient part of the formula field
  double skew_defect = 0;        // max over dofs of |A - A_skew| / |A| before skew projection
  bool flagged = false;          // sym grad residual above tolerance
};

struct IsoOptions {
  double integrability_tol = 0.05;
  double residual_tol = 0.05;
};

// V with grad V given by the B = 0 gradient formula, omega solving L omega = 0 with the given trace
InfIsometry generate_iso(const CurlOperator& op, const VecX& trace, const IsoOptions& opt = {},
                         std::string label = "");
InfIsometry generate_iso(const CurlOperator& op, const std::function<double(double theta)>& phi,
                         const IsoOptions& opt = {}, std::string label = "");

// A d_i r = d_i V, A n = -sum g^ij (d_j V . n) d_i r, projected to its skew part
Mat3 skew_at(const GeometryFields& G, const Mat32& dV, double* defect = nullptr);
// per dof, from recovered nodal gradients
SkewField3 skew_field(const Surface& surface, const VectorField3& V, double* max_defect = nullptr);
std::vector<Mat3> skew_at_qp(const Surface& surface, const VectorField3& V);

// "1", "cos1", "sin1", ..., "cosK", "sinK"
std::vector<std::string> fourier_modes(int K);
std::function<double(double)> mode_function(const std::string& mode);

struct IsoBasis {
  std::vector<InfIsometry> fields;
  MatX gram;  // L2(S) Gram matrix of the V fields
  double gram_condition = 0;
  VecX residuals;  // sym grad residuals per mode
};

IsoBasis iso_basis(const CurlOperator& op, const std::vector<std::string>& modes, const IsoOptions& opt = {});

// ||(d r + eps d V)^T (d r + eps d V) - g||_{L2(S)}
double metric_change(const Surface& surface, const VectorField3& V, double eps);

// relative L2(S) residual of projecting (f - mean f) onto the span of the basis fields
double projection_residual(const Surface& surface, const IsoBasis& basis, const VectorField3& f);

}  // namespace shell_lab
