#pragma once

#include "shell_lab/mesh.hpp"

#include <array>
#include <functional>
#include <vector>

namespace shell_lab {

using NodalMatrix = Eigen::Matrix<double, Eigen::Dynamic, 3>;

struct ScalarField {
  SpacePtr space;
  VecX values;
  static ScalarField zero(SpacePtr s);
};

struct VectorField3 {
  SpacePtr space;
  NodalMatrix values;  // row per dof
  static VectorField3 zero(SpacePtr s);
};

// tangential components (B11, B12, B22) per dof
struct SymTensorField2 {
  SpacePtr space;
  NodalMatrix values;
  static SymTensorField2 zero(SpacePtr s);
  Mat2 at(int dof) const;
};

// off-diagonal entries (A12, A13, A23) per dof
struct SkewField3 {
  SpacePtr space;
  NodalMatrix values;
  Mat3 at(int dof) const;
  static Vec3 pack(const Mat3& A) { return Vec3(A(0, 1), A(0, 2), A(1, 2)); }
};

// second derivatives of a vector field: (d11, d12, d22)
using Hessian3 = std::array<Vec3, 3>;

ScalarField interpolate(SpacePtr s, const std::function<double(const Vec2&)>& f);
VectorField3 interpolate(SpacePtr s, const std::function<Vec3(const Vec2&)>& f);
SymTensorField2 interpolate_sym(SpacePtr s, const std::function<Mat2(const Vec2&)>& f);

// exact FE evaluation at quadrature points (index e * 6 + q)
std::vector<double> qp_values(const ScalarField& f);
std::vector<Vec2> qp_gradients(const ScalarField& f);
std::vector<Vec3> qp_values(const VectorField3& f);
std::vector<Mat32> qp_gradients(const VectorField3& f);
std::vector<Mat2> qp_values(const SymTensorField2& f);
// d_k B at quadrature points: [k] -> matrix
std::vector<std::array<Mat2, 2>> qp_gradients(const SymTensorField2& f);

// elementwise-constant second derivatives of a P2 field
Hessian3 element_hessian(const VectorField3& f, int e);

// patch-averaged (area-weighted) nodal gradient and Hessian, interpolated back to quadrature points
std::vector<Mat32> recovered_nodal_gradients(const VectorField3& f);
std::vector<Hessian3> recovered_nodal_hessians(const VectorField3& f);
std::vector<Hessian3> qp_recovered_hessians(const VectorField3& f);

// L2(dx) projections of quadrature-point data onto the space
ScalarField project(SpacePtr s, const std::vector<double>& qp);
VectorField3 project(SpacePtr s, const std::vector<Vec3>& qp);
SymTensorField2 project_sym(SpacePtr s, const std::vector<Mat2>& qp);

struct PotentialResult {
  ScalarField u;
  double residual = 0;  // ||grad u - G||_{L2(dx)}
};
struct VectorPotentialResult {
  VectorField3 u;
  double residual = 0;  // combined over components
  double target_norm = 0;
};

// least squares min ||grad u - G||^2, zero-mean
PotentialResult recover_potential(SpacePtr s, const std::vector<Vec2>& G);
VectorPotentialResult recover_potential(SpacePtr s, const std::vector<Mat32>& G);

// parameter-domain mean of a field
double mean_value(const ScalarField& f);
Vec3 mean_value(const VectorField3& f);

}  // namespace shell_lab
