#include "shell_lab/manufactured.hpp"

#include <cmath>

namespace shell_lab {

namespace {

const char* const kNames[3] = {"poly_trig", "exp_mix", "rational"};

// F and its Jacobian (columns d/dx, d/dy)
void profile(int index, const Vec2& p, Vec3& F, Mat32& dF) {
  const double x = p(0), y = p(1);
  switch (index) {
    case 0:
      F = Vec3(std::sin(x) + y, x * y, std::cos(y) + x * x);
      dF << std::cos(x), 1, y, x, 2 * x, -std::sin(y);
      break;
    case 1: {
      double ex = std::exp(0.5 * x);
      F = Vec3(ex * y, std::cos(x + 2 * y), x - y * y + 0.3);
      dF << 0.5 * ex * y, ex, -std::sin(x + 2 * y), -2 * std::sin(x + 2 * y), 1, -2 * y;
      break;
    }
    default: {
      double d = 2 + x * x + y;
      F = Vec3(1 / d, x * y * y, std::sin(2 * y) - x);
      dF << -2 * x / (d * d), -1 / (d * d), y * y, 2 * x * y, -1, 2 * std::cos(2 * y);
      break;
    }
  }
}

}  // namespace

Vec3 ManufacturedCase::w(const Vec2& p) const {
  Vec3 F;
  Mat32 dF;
  profile(index, p, F, dF);
  return std::pow(1 - p.squaredNorm(), 2) * F;
}

Mat32 ManufacturedCase::dw(const Vec2& p) const {
  Vec3 F;
  Mat32 dF;
  profile(index, p, F, dF);
  double s = 1 - p.squaredNorm();
  Mat32 d = s * s * dF;
  for (int i = 0; i < 2; ++i) d.col(i) += -4 * p(i) * s * F;
  return d;
}

ManufacturedCase manufactured_case(int index) {
  if (index < 0 || index > 2) throw ConfigError("symgrad.case", "manufactured case index must be 0, 1 or 2");
  ManufacturedCase c;
  c.index = index;
  c.name = kNames[index];
  return c;
}

ManufacturedCase manufactured_case(const std::string& name) {
  for (int i = 0; i < 3; ++i)
    if (name == kNames[i]) return manufactured_case(i);
  throw ConfigError("symgrad.case", "unknown manufactured case '" + name + "' (poly_trig, exp_mix, rational)");
}

VectorField3 manufactured_field(const Surface& S, const ManufacturedCase& c) {
  return interpolate(S.space_ptr(), [&](const Vec2& p) { return c.w(p); });
}

SymTensorField2 manufactured_B(const Surface& S, const ManufacturedCase& c) {
  return interpolate_sym(S.space_ptr(), [&](const Vec2& p) {
    ChartJet j = S.chart().jet(p);
    Mat32 t;
    t << j.d1[0], j.d1[1];
    Mat2 G = t.transpose() * c.dw(p);
    return Mat2(0.5 * (G + G.transpose()));
  });
}

}  // namespace shell_lab
