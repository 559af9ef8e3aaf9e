#include "shell_lab/surface.hpp"

#include "shell_lab/parallel.hpp"

#include <cmath>

namespace shell_lab {

Surface::Surface(SurfaceChart chart, SpacePtr space) : chart_(std::move(chart)), space_(std::move(space)) {
  const int n = space_->num_qp();
  const int nq = FESpace::qp_per_element;
  geo_.resize(n);
  weight_.resize(n);
  parallel_for(space_->num_elements(), [&](int e) {
    for (int q = 0; q < nq; ++q) {
      geo_[e * nq + q] = geometry_at(chart_, space_->qp_point(e, q));
      weight_[e * nq + q] = space_->qp_weight(e, q) * geo_[e * nq + q].sqrt_det_g;
    }
  });
  for (double w : weight_) area_ += w;
}

Surface::Surface(SurfaceChart chart, int rings, int order)
    : Surface(std::move(chart),
              FESpace::create(std::make_shared<const Mesh>(triangulate_disk(rings)), order)) {}

Mat2 sym_grad(const GeometryFields& G, const Mat32& dw) {
  Mat2 E;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      E(i, j) = 0.5 * (G.tangent[i].dot(dw.col(j)) + G.tangent[j].dot(dw.col(i)));
  return E;
}

double l2_norm(const Surface& S, const std::vector<double>& qp) {
  double s = 0;
  for (int i = 0; i < S.num_qp(); ++i) s += S.area_weight(i) * qp[i] * qp[i];
  return std::sqrt(s);
}

double l2_norm(const Surface& S, const std::vector<Vec3>& qp) {
  double s = 0;
  for (int i = 0; i < S.num_qp(); ++i) s += S.area_weight(i) * qp[i].squaredNorm();
  return std::sqrt(s);
}

double gradient_norm(const Surface& S, const std::vector<Mat32>& qp) {
  double s = 0;
  for (int i = 0; i < S.num_qp(); ++i) {
    const Mat2& gi = S.geo(i).g_inv;
    Mat2 gram = qp[i].transpose() * qp[i];
    s += S.area_weight(i) * (gi.cwiseProduct(gram)).sum();
  }
  return std::sqrt(std::max(0.0, s));
}

double tensor_norm(const Surface& S, const std::vector<Mat2>& qp) {
  double s = 0;
  for (int i = 0; i < S.num_qp(); ++i) s += S.area_weight(i) * to_frame(S.geo(i), qp[i]).squaredNorm();
  return std::sqrt(s);
}

double w12_norm(const Surface& S, const VectorField3& u) {
  double a = l2_norm(S, qp_values(u)), b = gradient_norm(S, qp_gradients(u));
  return std::sqrt(a * a + b * b);
}

double w12_distance_mod_constants(const Surface& S, const VectorField3& a, const VectorField3& b) {
  VectorField3 d{a.space, a.values - b.values};
  Vec3 m = mean_value(d);
  for (int i = 0; i < d.values.rows(); ++i) d.values.row(i) -= m.transpose();
  return w12_norm(S, d);
}

double sym_grad_residual(const Surface& S, const VectorField3& u) {
  std::vector<Mat32> du = qp_gradients(u);
  std::vector<Mat2> E(S.num_qp());
  for (int i = 0; i < S.num_qp(); ++i) E[i] = sym_grad(S.geo(i), du[i]);
  return tensor_norm(S, E);
}

}  // namespace shell_lab
