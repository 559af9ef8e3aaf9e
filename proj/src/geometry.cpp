#include "shell_lab/geometry.hpp"

#include <cmath>
#include <limits>
#include <cstdio>
#include <numbers>

namespace shell_lab {

namespace {

std::string point_str(const Vec2& p) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "(%.6g, %.6g)", p(0), p(1));
  return buf;
}

// jet of a radial function G(u), u = x^2 + y^2, given G and its u-derivatives f[0..3]
struct RadialJet {
  double v;
  double d1[2];
  double d2[2][2];
  double d3[2][2][2];
};

RadialJet radial_jet(const Vec2& p, const double f[4]) {
  RadialJet J;
  J.v = f[0];
  auto dl = [](int a, int b) { return a == b ? 1.0 : 0.0; };
  for (int i = 0; i < 2; ++i) {
    J.d1[i] = 2 * p(i) * f[1];
    for (int j = 0; j < 2; ++j) {
      J.d2[i][j] = 4 * p(i) * p(j) * f[2] + 2 * dl(i, j) * f[1];
      for (int l = 0; l < 2; ++l)
        J.d3[i][j][l] = 8 * p(i) * p(j) * p(l) * f[3] +
                        4 * (dl(i, j) * p(l) + dl(i, l) * p(j) + dl(j, l) * p(i)) * f[2];
    }
  }
  return J;
}

// jet of G(u) * x_m
RadialJet times_coordinate(const RadialJet& G, const Vec2& p, int m) {
  RadialJet P;
  auto dl = [](int a, int b) { return a == b ? 1.0 : 0.0; };
  P.v = G.v * p(m);
  for (int i = 0; i < 2; ++i) {
    P.d1[i] = G.d1[i] * p(m) + G.v * dl(i, m);
    for (int j = 0; j < 2; ++j) {
      P.d2[i][j] = G.d2[i][j] * p(m) + G.d1[i] * dl(j, m) + G.d1[j] * dl(i, m);
      for (int l = 0; l < 2; ++l)
        P.d3[i][j][l] = G.d3[i][j][l] * p(m) + G.d2[i][j] * dl(l, m) +
                        G.d2[i][l] * dl(j, m) + G.d2[j][l] * dl(i, m);
    }
  }
  return P;
}

void set_component(ChartJet& J, int c, const RadialJet& R) {
  J.r(c) = R.v;
  for (int i = 0; i < 2; ++i) {
    J.d1[i](c) = R.d1[i];
    for (int j = 0; j < 2; ++j) {
      J.d2[i][j](c) = R.d2[i][j];
      for (int l = 0; l < 2; ++l) J.d3[i][j][l](c) = R.d3[i][j][l];
    }
  }
}

// sin(k sqrt(u))/sqrt(u) and cos(k sqrt(u)) with u-derivatives up to third order, by power series
void sphere_series(double u, double k, double S[4], double C[4]) {
  for (int m = 0; m < 4; ++m) S[m] = C[m] = 0;
  const double k2 = k * k;
  // coefficients a_n of u^n
  double as = k;    // (-1)^n k^{2n+1}/(2n+1)!
  double ac = 1.0;  // (-1)^n k^{2n}/(2n)!
  for (int n = 0; n < 40; ++n) {
    for (int m = 0; m < 4 && m <= n; ++m) {
      double fall = 1.0;
      for (int t = 0; t < m; ++t) fall *= (n - t);
      double pw = std::pow(u, n - m);
      S[m] += as * fall * pw;
      C[m] += ac * fall * pw;
    }
    as *= -k2 / ((2.0 * n + 2) * (2.0 * n + 3));
    ac *= -k2 / ((2.0 * n + 1) * (2.0 * n + 2));
  }
}

// eigenvalues of g^{-1} h via the symmetric form L^T h L, L^T g L = I
std::pair<double, double> principal_curvatures(const Mat2& g, const Mat2& h) {
  double r00 = std::sqrt(g(0, 0));
  double r01 = g(0, 1) / r00;
  double r11 = std::sqrt(g(1, 1) - r01 * r01);
  Mat2 R;
  R << r00, r01, 0, r11;
  Mat2 L = R.inverse();
  Mat2 S = L.transpose() * h * L;
  double mid = 0.5 * (S(0, 0) + S(1, 1));
  double rad = std::hypot(0.5 * (S(0, 0) - S(1, 1)), 0.5 * (S(0, 1) + S(1, 0)));
  return {mid - rad, mid + rad};
}

}  // namespace

SurfaceChart SurfaceChart::flat() {
  SurfaceChart c;
  c.kind_ = ChartKind::flat;
  return c;
}

SurfaceChart SurfaceChart::graph(double k1, double k2, double quartic) {
  if (!std::isfinite(k1) || !std::isfinite(k2) || !std::isfinite(quartic))
    throw ConfigError("chart.k1", "graph coefficients must be finite");
  SurfaceChart c;
  c.kind_ = ChartKind::graph;
  c.k1_ = k1;
  c.k2_ = k2;
  c.quartic_ = quartic;
  c.fix_orientation();
  return c;
}

SurfaceChart SurfaceChart::sphere_cap(double radius, double extent) {
  if (!(radius > 0)) throw ConfigError("chart.radius", "radius must be positive");
  if (!(extent > 0) || !(extent < std::numbers::pi))
    throw ConfigError("chart.extent", "extent must lie in (0, pi)");
  SurfaceChart c;
  c.kind_ = ChartKind::sphere_cap;
  c.axes_ = Vec3::Constant(radius);
  c.extent_ = extent;
  c.fix_orientation();
  return c;
}

SurfaceChart SurfaceChart::ellipsoid_cap(double a, double b, double cc, double extent) {
  if (!(a > 0) || !(b > 0) || !(cc > 0))
    throw ConfigError("chart.axes", "semi-axes must be positive");
  if (!(extent > 0) || !(extent < std::numbers::pi))
    throw ConfigError("chart.extent", "extent must lie in (0, pi)");
  SurfaceChart c;
  c.kind_ = ChartKind::ellipsoid_cap;
  c.axes_ = Vec3(a, b, cc);
  c.extent_ = extent;
  c.fix_orientation();
  return c;
}

void SurfaceChart::fix_orientation() {
  orientation_ = 1.0;
  ChartJet J = jet(Vec2::Zero());
  Vec3 n = J.d1[0].cross(J.d1[1]).normalized();
  double tr = -(n.dot(J.d2[0][0]) + n.dot(J.d2[1][1]));
  if (tr < 0) orientation_ = -1.0;
}

ChartJet SurfaceChart::jet(const Vec2& p) const {
  ChartJet J;
  J.r.setZero();
  for (int i = 0; i < 2; ++i) {
    J.d1[i].setZero();
    for (int j = 0; j < 2; ++j) {
      J.d2[i][j].setZero();
      for (int l = 0; l < 2; ++l) J.d3[i][j][l].setZero();
    }
  }
  switch (kind_) {
    case ChartKind::flat:
      J.r << p(0), p(1), 0;
      J.d1[0] << 1, 0, 0;
      J.d1[1] << 0, 1, 0;
      break;
    case ChartKind::graph: {
      double u = p.squaredNorm();
      double f[4] = {0.25 * quartic_ * u * u, 0.5 * quartic_ * u, 0.5 * quartic_, 0};
      RadialJet G = radial_jet(p, f);
      G.v += 0.5 * (k1_ * p(0) * p(0) + k2_ * p(1) * p(1));
      G.d1[0] += k1_ * p(0);
      G.d1[1] += k2_ * p(1);
      G.d2[0][0] += k1_;
      G.d2[1][1] += k2_;
      set_component(J, 2, G);
      J.r(0) = p(0);
      J.r(1) = p(1);
      J.d1[0](0) = 1;
      J.d1[1](1) = 1;
      break;
    }
    case ChartKind::sphere_cap:
    case ChartKind::ellipsoid_cap: {
      double S[4], C[4];
      sphere_series(p.squaredNorm(), extent_, S, C);
      RadialJet Sj = radial_jet(p, S);
      RadialJet Cj = radial_jet(p, C);
      set_component(J, 0, times_coordinate(Sj, p, 0));
      set_component(J, 1, times_coordinate(Sj, p, 1));
      set_component(J, 2, Cj);
      for (int c = 0; c < 3; ++c) {
        double s = axes_(c);
        J.r(c) *= s;
        for (int i = 0; i < 2; ++i) {
          J.d1[i](c) *= s;
          for (int j = 0; j < 2; ++j) {
            J.d2[i][j](c) *= s;
            for (int l = 0; l < 2; ++l) J.d3[i][j][l](c) *= s;
          }
        }
      }
      break;
    }
  }
  return J;
}

std::string SurfaceChart::describe() const {
  char buf[160];
  switch (kind_) {
    case ChartKind::flat:
      return "flat";
    case ChartKind::graph:
      std::snprintf(buf, sizeof buf, "graph(k1=%.17g, k2=%.17g, quartic=%.17g)", k1_, k2_, quartic_);
      return buf;
    case ChartKind::sphere_cap:
      std::snprintf(buf, sizeof buf, "sphere_cap(radius=%.17g, extent=%.17g)", axes_(0), extent_);
      return buf;
    case ChartKind::ellipsoid_cap:
      std::snprintf(buf, sizeof buf, "ellipsoid_cap(a=%.17g, b=%.17g, c=%.17g, extent=%.17g)",
                    axes_(0), axes_(1), axes_(2), extent_);
      return buf;
  }
  return "unknown";
}

GeometryFields geometry_at(const SurfaceChart& chart, const Vec2& p) {
  ChartJet J = chart.jet(p);
  GeometryFields G;
  G.p = p;
  G.r = J.r;
  G.tangent = J.d1;
  G.d2r = J.d2;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) G.g(i, j) = J.d1[i].dot(J.d1[j]);
  double det = G.g.determinant();
  if (!(det > 1e-12 * G.g(0, 0) * G.g(1, 1)))
    throw NumericalError("not an immersion at p = " + point_str(p));
  G.sqrt_det_g = std::sqrt(det);
  G.g_inv = G.g.inverse();

  Vec3 c = J.d1[0].cross(J.d1[1]);
  G.normal = chart.orientation() * c / c.norm();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) G.h(i, j) = -G.normal.dot(J.d2[i][j]);
  G.h(0, 1) = G.h(1, 0) = 0.5 * (G.h(0, 1) + G.h(1, 0));

  double r00 = std::sqrt(G.g(0, 0));
  double r01 = G.g(0, 1) / r00;
  double r11 = std::sqrt(G.g(1, 1) - r01 * r01);
  Mat2 R;
  R << r00, r01, 0, r11;
  G.frame = R.inverse();

  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        double s = 0;
        for (int l = 0; l < 2; ++l) s += G.g_inv(k, l) * J.d2[i][j].dot(J.d1[l]);
        G.christoffel[k][i][j] = s;
      }
  for (int k = 0; k < 2; ++k) {
    double a = 0.5 * (G.christoffel[k][0][1] + G.christoffel[k][1][0]);
    G.christoffel[k][0][1] = G.christoffel[k][1][0] = a;
  }

  Mat2 W = G.g_inv * G.h;
  G.mean_curvature = 0.5 * W.trace();
  G.gauss_curvature = G.h.determinant() / det;
  G.elliptic = principal_curvatures(G.g, G.h).first > 0;
  if (chart.elliptic_expected()) {
    if (!G.elliptic) throw NumericalError("surface not elliptic at p = " + point_str(p));
    G.h_inv = G.h.inverse();
  } else {
    G.h_inv.setZero();
  }
  return G;
}

GeometryDerivatives geometry_derivatives_at(const SurfaceChart& chart, const Vec2& p) {
  ChartJet J = chart.jet(p);
  GeometryFields G = geometry_at(chart, p);
  GeometryDerivatives D;
  for (int k = 0; k < 2; ++k) {
    Vec3 dn = G.dnormal(k);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        D.dg[k](i, j) = J.d2[i][k].dot(J.d1[j]) + J.d1[i].dot(J.d2[j][k]);
        D.dh[k](i, j) = -dn.dot(J.d2[i][j]) - G.normal.dot(J.d3[i][j][k]);
      }
    D.dsqrt_det_g[k] = 0.5 * G.sqrt_det_g * (G.g_inv * D.dg[k]).trace();
    D.dh_inv[k] = -G.h_inv * D.dh[k] * G.h_inv;
    Mat2 dginv = -G.g_inv * D.dg[k] * G.g_inv;
    D.dmean_curvature[k] = 0.5 * (dginv * G.h + G.g_inv * D.dh[k]).trace();
  }
  return D;
}

EllipticityBounds check_ellipticity(const SurfaceChart& chart, const std::vector<Vec2>& samples) {
  if (samples.empty()) throw ConfigError("samples", "sample set must be nonempty");
  EllipticityBounds b;
  b.c_min = std::numeric_limits<double>::infinity();
  b.c_max = -std::numeric_limits<double>::infinity();
  Vec2 witness = samples.front();
  for (const Vec2& p : samples) {
    if (p.norm() > 1 + 1e-12) throw ConfigError("samples", "sample outside the unit disk");
    ChartJet J = chart.jet(p);
    Mat2 g, h;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) g(i, j) = J.d1[i].dot(J.d1[j]);
    if (!(g.determinant() > 1e-12 * g(0, 0) * g(1, 1)))
      throw NumericalError("not an immersion at p = " + point_str(p));
    Vec3 n = chart.orientation() * J.d1[0].cross(J.d1[1]).normalized();
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) h(i, j) = -n.dot(J.d2[i][j]);
    h(0, 1) = h(1, 0) = 0.5 * (h(0, 1) + h(1, 0));
    auto [kmin, kmax] = principal_curvatures(g, h);
    if (kmin < b.c_min) {
      b.c_min = kmin;
      witness = p;
    }
    b.c_max = std::max(b.c_max, kmax);
  }
  if (!(b.c_min > 0))
    throw NumericalError("ellipticity fails: min principal curvature " + std::to_string(b.c_min) +
                         " at p = " + point_str(witness));
  b.constant = std::max(b.c_max, 1.0 / b.c_min);
  return b;
}

std::vector<Vec2> disk_samples(int n_radial, int n_angular) {
  std::vector<Vec2> s{Vec2::Zero()};
  for (int i = 1; i <= n_radial; ++i) {
    double rho = double(i) / n_radial;
    for (int j = 0; j < n_angular; ++j) {
      double t = 2 * std::numbers::pi * j / n_angular;
      s.emplace_back(rho * std::cos(t), rho * std::sin(t));
    }
  }
  return s;
}

double brioschi_curvature(const Mat2& g, const std::array<Mat2, 2>& dg,
                          const std::array<std::array<Mat2, 2>, 2>& ddg) {
  double E = g(0, 0), F = g(0, 1), G = g(1, 1);
  double Eu = dg[0](0, 0), Ev = dg[1](0, 0);
  double Fu = dg[0](0, 1), Fv = dg[1](0, 1);
  double Gu = dg[0](1, 1), Gv = dg[1](1, 1);
  double Evv = ddg[1][1](0, 0), Fuv = ddg[0][1](0, 1), Guu = ddg[0][0](1, 1);
  Mat3 A, B;
  A << -0.5 * Evv + Fuv - 0.5 * Guu, 0.5 * Eu, Fu - 0.5 * Ev,
       Fv - 0.5 * Gu, E, F,
       0.5 * Gv, F, G;
  B << 0, 0.5 * Ev, 0.5 * Gu,
       0.5 * Ev, E, F,
       0.5 * Gu, F, G;
  double d = E * G - F * F;
  return (A.determinant() - B.determinant()) / (d * d);
}

}  // namespace shell_lab
