#pragma once

#include "shell_lab/symgrad.hpp"

#include <vector>

namespace shell_lab {

struct MatchOptions {
  double tol = 1e-8;  // on ||w^{k+1} - w^k||_{W12}
  int max_iter = 25;
  // Helmholtz smoothing length applied to the iterate before it enters the quadratic term, in
  // units of the mesh size; 0 disables it
  double smoothing = 2.0;
};

struct MatchResult {
  double h = 0;
  VectorField3 w;
  int iterations = 0;
  std::vector<double> update_norms;
  double defect = 0;            // delta(id + hV + h^2 w)
  double defect_unmatched = 0;  // delta(id + hV)
  double w_norm = 0;            // ||w||_{W12}
  double w_hessian_norm = 0;    // L2 norm of recovered second derivatives
};

// fixed point of w = -1/2 T((grad V + h grad w)^T (grad V + h grad w)), started from the h = 0
// fixed point. T must be a minimal_norm solver: with the boundary-curl normalization the map
// loses half a derivative at the boundary and the iteration diverges on fine meshes.
// Throws NumericalError with the update history past max_iter.
MatchResult match_isometry(const SymGradSolver& solver, const VectorField3& V, double h,
                           const MatchOptions& opt = {});
// independent runs, one per h
std::vector<MatchResult> match_sweep(const SymGradSolver& solver, const VectorField3& V,
                                     const std::vector<double>& hs, const MatchOptions& opt = {});

// max over quadrature points of |L^T((du)^T du - g) L|_F
double isometry_defect(const Surface& surface, const std::vector<Mat32>& du);
// delta(id + d) with the exact chart gradient for id
double displacement_defect(const Surface& surface, const VectorField3& d);
// gradients of id + hV + h^2 w
std::vector<Mat32> matched_gradients(const Surface& surface, const VectorField3& V, const VectorField3& w, double h);

// geometric mean of successive update ratios; needs at least 3 recorded updates
double contraction_rate(const MatchResult& r);
double contraction_rate(const std::vector<double>& update_norms);

}  // namespace shell_lab
