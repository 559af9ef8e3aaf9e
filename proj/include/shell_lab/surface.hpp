#pragma once

#include "shell_lab/fields.hpp"
#include "shell_lab/geometry.hpp"

#include <memory>
#include <vector>

namespace shell_lab {

// chart + FE space + exact geometry at every quadrature point
class Surface {
 public:
  Surface(SurfaceChart chart, SpacePtr space);
  Surface(SurfaceChart chart, int rings, int order = 2);

  const SurfaceChart& chart() const { return chart_; }
  const FESpace& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }
  int num_qp() const { return space_->num_qp(); }
  const GeometryFields& geo(int qp) const { return geo_[qp]; }
  // dA weight of a quadrature point
  double area_weight(int qp) const { return weight_[qp]; }
  double area() const { return area_; }

 private:
  SurfaceChart chart_;
  SpacePtr space_;
  std::vector<GeometryFields> geo_;
  std::vector<double> weight_;
  double area_ = 0;
};

// E_ij = (d_i r . d_j w + d_j r . d_i w) / 2
Mat2 sym_grad(const GeometryFields& G, const Mat32& dw);
// tangential tensor in the orthonormal frame: L^T B L
inline Mat2 to_frame(const GeometryFields& G, const Mat2& B) {
  return G.frame.transpose() * B * G.frame;
}

// norms over S with dA
double l2_norm(const Surface& S, const std::vector<double>& qp);
double l2_norm(const Surface& S, const std::vector<Vec3>& qp);
// (int g^ij d_i u . d_j u dA)^(1/2)
double gradient_norm(const Surface& S, const std::vector<Mat32>& qp);
// (int |B|_g^2 dA)^(1/2) for coordinate tensors
double tensor_norm(const Surface& S, const std::vector<Mat2>& qp);
double w12_norm(const Surface& S, const VectorField3& u);
// W^{1,2}(S) distance after removing parameter-domain means of both fields
double w12_distance_mod_constants(const Surface& S, const VectorField3& a, const VectorField3& b);

// ||E(u)||_{L2(S)}
double sym_grad_residual(const Surface& S, const VectorField3& u);

}  // namespace shell_lab
