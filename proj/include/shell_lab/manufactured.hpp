#pragma once

#include "shell_lab/surface.hpp"

#include <string>

namespace shell_lab {

// w* = (1 - |p|^2)^2 F(p) on the parameter disk; grad w* vanishes on the boundary circle, so
// omega(w*) = 0 there and w* is the normalized solution for B = sym grad w*.
struct ManufacturedCase {
  std::string name;
  Vec3 w(const Vec2& p) const;
  Mat32 dw(const Vec2& p) const;
  int index = 0;
};

// "poly_trig", "exp_mix", "rational"; index 0..2 in that order
ManufacturedCase manufactured_case(int index);
ManufacturedCase manufactured_case(const std::string& name);

VectorField3 manufactured_field(const Surface& surface, const ManufacturedCase& c);
SymTensorField2 manufactured_B(const Surface& surface, const ManufacturedCase& c);

}  // namespace shell_lab
