#pragma once

#include "shell_lab/matching.hpp"
#include "shell_lab/surface.hpp"

#include <vector>

namespace shell_lab {

struct Q2Result {
  double value = 0;
  Vec3 c = Vec3::Zero();  // frame components (e1, e2, n)
};

// W(F) = mu/4 |F^T F - I|^2 + lambda/8 (tr(F^T F - I))^2
class MaterialModel {
 public:
  explicit MaterialModel(double mu = 1.0, double lambda = 1.0);
  double mu() const { return mu_; }
  double lambda() const { return lambda_; }

  double W(const Mat3& F) const;
  // D^2 W(I)(F, F) = 2 mu |sym F|^2 + lambda (tr F)^2
  double q3(const Mat3& F) const;
  // min of q3 over F_tan + c (x) n + n (x) c, frame with n the third axis
  Q2Result q2_min(const Mat2& F_tan) const;

 private:
  double mu_, lambda_;
};

// embeds a 2x2 tangential block and adds c (x) e3 + e3 (x) c
Mat3 complete(const Mat2& F_tan, const Vec3& c);

struct GammaConfig {
  double beta = 3.0;
  std::vector<double> hs{0.2, 0.1, 0.05, 0.025};
  int thickness_points = 3;  // Gauss-Legendre, 1..5

  void validate() const;
  double e(double h) const;    // h^beta
  double eps(double h) const;  // sqrt(e) / h
};

// K_tan = sym(grad(An) - A Pi)_tan in the orthonormal frame at quadrature points. A is the nodal
// skew field of V, An its P2 interpolant.
std::vector<Mat2> bending_form(const Surface& surface, const VectorField3& V);
// the same from second derivatives: for an infinitesimal isometry
//   (grad(An) - A Pi)_ij = -n . (d_ij V - G^k_ij d_k V),
// evaluated with patch-recovered Hessians. Less accurate near the boundary; cross-check only.
std::vector<Mat2> bending_form_hessian(const Surface& surface, const VectorField3& V);

// I(V) = 1/24 int Q2(K_tan) dA
double bending_energy(const Surface& surface, const MaterialModel& material, const VectorField3& V);
double bending_energy(const Surface& surface, const MaterialModel& material, const std::vector<Mat2>& K);
// symmetric bilinear form with B(K, K) = bending_energy(K)
double bending_bilinear(const Surface& surface, const MaterialModel& material, const std::vector<Mat2>& K1,
                        const std::vector<Mat2>& K2);

// u(x + t n) = u(x) + t m(x) + t^2/2 eps d(x), with all fields at quadrature points
struct ShellDeformation {
  double eps = 0;
  std::vector<Vec3> u, m, d;
  std::vector<Mat32> du, dm, dd;

  ShellDeformation rotated(const Mat3& Q, const Vec3& shift = Vec3::Zero()) const;
};

// x + t n
ShellDeformation identity_deformation(const Surface& surface);

struct RecoveryDeformation {
  double h = 0, eps = 0;
  MatchResult match;
  ShellDeformation map;
  VectorField3 d;          // warp field
  std::vector<Vec3> zeta;  // c(K_tan) in ambient coordinates; d = 2 zeta
};

// u_eps = id + eps V + eps^2 w from a matching run at eps, n_eps = normalized d1 u x d2 u,
// d = 2 c(K_tan) (constant in h)
RecoveryDeformation build_recovery(const SymGradSolver& solver, const MaterialModel& material,
                                   const VectorField3& V, double h, const GammaConfig& cfg,
                                   const MatchOptions& opt = {});
// same from an existing matching run; its h is the eps of the recovery
RecoveryDeformation recovery_from_match(const Surface& surface, const MaterialModel& material,
                                        const VectorField3& V, MatchResult match, double h);

// E^h = 1/h int_{S^h} W(grad u), thickness by Gauss-Legendre with the given number of points
double shell_energy(const Surface& surface, const MaterialModel& material, const ShellDeformation& map,
                    double h, int thickness_points = 3);

struct ScaledDisplacement {
  VectorField3 Vh;      // (h / sqrt(e)) times the thickness average of u - x
  double error = 0;     // ||V^h - V||_{W12} mod constants
  double s_h = 0;       // ||(h / sqrt(e)) sym grad V^h - (A^2)_tan / 2||_{L2}
  double s_ref = 0;     // ||(A^2)_tan / 2||_{L2}
};

ScaledDisplacement scaled_displacement(const Surface& surface, const VectorField3& V,
                                       const RecoveryDeformation& rec, const GammaConfig& cfg);

struct GammaRow {
  double h = 0, eps = 0;
  double scaled_energy = 0;  // E^h / e^h
  double I_V = 0;
  double ratio = 0;
  int iterations = 0;
  double defect = 0;
  double vh_error = 0, s_h = 0;
};

std::vector<GammaRow> gamma_sweep(const SymGradSolver& solver, const MaterialModel& material,
                                  const VectorField3& V, const GammaConfig& cfg, const MatchOptions& opt = {});

}  // namespace shell_lab
