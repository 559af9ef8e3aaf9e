#pragma once

#include "shell_lab/types.hpp"

#include <array>
#include <string>
#include <vector>

namespace shell_lab {

enum class ChartKind { flat, graph, sphere_cap, ellipsoid_cap };

// r and its partial derivatives at a parameter point
struct ChartJet {
  Vec3 r;
  std::array<Vec3, 2> d1;
  std::array<std::array<Vec3, 2>, 2> d2;
  std::array<std::array<std::array<Vec3, 2>, 2>, 2> d3;
};

// Analytic parameterization over the closed unit disk.
//   graph:         r = (x, y, k1 x^2/2 + k2 y^2/2 + q (x^2+y^2)^2 / 4)
//   sphere_cap:    r = rho (sin(k s) x/s, sin(k s) y/s, cos(k s)),  s = |p|, k = extent
//   ellipsoid_cap: diag(a, b, c) applied to the unit sphere cap of the same extent
// The extent is the polar angle of the cap boundary on the underlying sphere.
class SurfaceChart {
 public:
  static SurfaceChart flat();
  static SurfaceChart graph(double k1, double k2, double quartic = 0.0);
  static SurfaceChart sphere_cap(double radius, double extent);
  static SurfaceChart ellipsoid_cap(double a, double b, double c, double extent);

  ChartKind kind() const { return kind_; }
  bool elliptic_expected() const { return kind_ != ChartKind::flat; }

  ChartJet jet(const Vec2& p) const;
  // +1 or -1, applied to d1 x d2 so that h is positive definite (fixed at p = 0)
  double orientation() const { return orientation_; }
  std::string describe() const;

 private:
  SurfaceChart() = default;
  void fix_orientation();

  ChartKind kind_ = ChartKind::flat;
  double k1_ = 0, k2_ = 0, quartic_ = 0;
  Vec3 axes_ = Vec3::Ones();
  double extent_ = 1.0;
  double orientation_ = 1.0;
};

struct GeometryFields {
  Vec2 p;
  Vec3 r;
  std::array<Vec3, 2> tangent;             // d_i r
  std::array<std::array<Vec3, 2>, 2> d2r;  // d_ij r
  Mat2 g, g_inv;
  double sqrt_det_g = 0;
  Mat2 h, h_inv;        // h_ij = d_i n . d_j r
  Mat2 frame;           // L with L^T g L = I; orthonormal e_a = sum_i L(i,a) d_i r
  double christoffel[2][2][2];  // [k][i][j]
  double mean_curvature = 0;
  double gauss_curvature = 0;
  Vec3 normal;
  bool elliptic = false;

  Mat32 tangents() const {
    Mat32 t;
    t.col(0) = tangent[0];
    t.col(1) = tangent[1];
    return t;
  }
  // shape operator on tangent vectors: d_i n = sum_k W(k,i) d_k r
  Mat2 weingarten() const { return g_inv * h; }
  Vec3 dnormal(int i) const {
    Mat2 w = weingarten();
    return w(0, i) * tangent[0] + w(1, i) * tangent[1];
  }
};

// throws NumericalError "not an immersion at p" / "surface not elliptic at p"
GeometryFields geometry_at(const SurfaceChart& chart, const Vec2& p);

// first derivatives of the metric quantities, from the analytic jet
struct GeometryDerivatives {
  std::array<Mat2, 2> dg;   // d_k g
  std::array<Mat2, 2> dh;   // d_k h
  std::array<double, 2> dsqrt_det_g;
  std::array<Mat2, 2> dh_inv;
  std::array<double, 2> dmean_curvature;
};
GeometryDerivatives geometry_derivatives_at(const SurfaceChart& chart, const Vec2& p);

struct EllipticityBounds {
  double c_min = 0;
  double c_max = 0;
  double constant = 0;  // max(c_max, 1/c_min)
};

// min/max principal curvature over the samples; throws with the witness point if c_min <= 0
EllipticityBounds check_ellipticity(const SurfaceChart& chart, const std::vector<Vec2>& samples);

// polar sample grid of the closed disk (center, then n_radial rings of n_angular points)
std::vector<Vec2> disk_samples(int n_radial, int n_angular);

// Brioschi formula for the Gauss curvature from g and its first and second derivatives
double brioschi_curvature(const Mat2& g, const std::array<Mat2, 2>& dg,
                          const std::array<std::array<Mat2, 2>, 2>& ddg);

}  // namespace shell_lab
