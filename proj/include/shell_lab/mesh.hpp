#pragma once

#include "shell_lab/types.hpp"

#include <array>
#include <functional>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

namespace shell_lab {

struct Mesh {
  int rings = 0;
  std::vector<Vec2> nodes;
  std::vector<char> boundary;  // per node
  std::vector<std::array<int, 3>> triangles;  // counterclockwise
  std::vector<std::array<int, 2>> edges;      // sorted node pairs
  std::vector<std::array<int, 3>> triangle_edges;  // local edges (0,1), (1,2), (2,0)
  std::vector<char> boundary_edge;

  int num_nodes() const { return int(nodes.size()); }
  int num_triangles() const { return int(triangles.size()); }
  int num_edges() const { return int(edges.size()); }
  double triangle_area(int t) const;
};

// concentric-ring triangulation: ring k has 6k nodes at radius k/rings
Mesh triangulate_disk(int rings);

// "nodes N elements M", then "id x y b" lines, then "id n1 n2 n3" lines
void write_mesh(std::ostream& os, const Mesh& mesh);

// 6-point degree-4 rule on the reference triangle (barycentric weights summing to 1)
struct TriangleQuadrature {
  static constexpr int size = 6;
  std::array<Vec2, size> points;  // reference coordinates (xi, eta)
  std::array<double, size> weights;
  static const TriangleQuadrature& degree4();
};

class FESpace;
using SpacePtr = std::shared_ptr<const FESpace>;

// Lagrange P1/P2 space on a mesh; P2 dofs are nodes followed by edge midpoints.
class FESpace : public std::enable_shared_from_this<FESpace> {
 public:
  static SpacePtr create(std::shared_ptr<const Mesh> mesh, int order);

  int order() const { return order_; }
  int num_dofs() const { return int(dof_coords_.size()); }
  int num_elements() const { return mesh_->num_triangles(); }
  int dofs_per_element() const { return order_ == 1 ? 3 : 6; }
  const Mesh& mesh() const { return *mesh_; }
  std::shared_ptr<const Mesh> mesh_ptr() const { return mesh_; }

  const std::vector<Vec2>& dof_coords() const { return dof_coords_; }
  const std::vector<char>& boundary_flags() const { return boundary_; }
  const std::vector<int>& boundary_dofs() const { return boundary_dofs_; }
  const std::vector<int>& interior_dofs() const { return interior_dofs_; }
  std::span<const int> element_dofs(int e) const {
    return {elem_dofs_.data() + size_t(e) * dofs_per_element(), size_t(dofs_per_element())};
  }

  // quadrature (element-major indexing q_index = e * 6 + q)
  static constexpr int qp_per_element = TriangleQuadrature::size;
  int num_qp() const { return num_elements() * qp_per_element; }
  Vec2 qp_point(int e, int q) const;
  double qp_weight(int e, int q) const;  // parameter-domain weight (area * rule weight)
  double element_area(int e) const { return area_[e]; }
  double basis_value(int q, int a) const { return qp_values_[q * 6 + a]; }
  Vec2 basis_grad(int e, int q, int a) const { return jinv_t_[e] * qp_ref_grads_[q * 6 + a]; }
  // constant physical Hessian of local basis a (zero for P1)
  Mat2 basis_hessian(int e, int a) const;

  // local shape values and physical gradients at an arbitrary point inside element e
  void shape_at(int e, const Vec2& p, double* values, Vec2* grads) const;
  // reference coordinates of local dof a
  Vec2 local_dof_ref(int a) const;
  // element containing dof as (element, local index) pairs
  const std::vector<std::pair<int, int>>& dof_patch(int dof) const { return patches_[dof]; }

  // cached factorizations (thread-safe lazy init)
  const SparseMatrix& mass_matrix() const;  // parameter-domain L2 mass
  VecX solve_mass(const VecX& rhs) const;
  const SparseMatrix& stiffness_matrix() const;  // parameter-domain Laplacian
  // Laplacian solve with dof 0 pinned to zero
  VecX solve_pinned_laplacian(const VecX& rhs) const;

  ~FESpace();

 private:
  FESpace() = default;
  void build(std::shared_ptr<const Mesh> mesh, int order);

  std::shared_ptr<const Mesh> mesh_;
  int order_ = 2;
  std::vector<Vec2> dof_coords_;
  std::vector<char> boundary_;
  std::vector<int> boundary_dofs_, interior_dofs_;
  std::vector<int> elem_dofs_;
  std::vector<Vec2> x0_;
  std::vector<Mat2> jac_, jinv_t_;
  std::vector<double> area_;
  std::vector<double> qp_values_;
  std::vector<Vec2> qp_ref_grads_;
  std::vector<std::vector<std::pair<int, int>>> patches_;

  struct Cache;
  mutable std::unique_ptr<Cache> cache_;
  mutable std::once_flag mass_once_, lap_once_;
};

// reference P1/P2 shape functions
void reference_shape(int order, const Vec2& xi, double* values, Vec2* grads);
Mat2 reference_hessian(int order, int a);

// assemble sum over quadrature of (a grad u).grad v + c u v; coefficients indexed by global qp
SparseMatrix assemble_bilinear(const FESpace& space, const std::function<Mat2(int qp)>& coeff_a,
                               const std::function<double(int qp)>& coeff_c);
// same, with coefficients as functions of the parameter point
SparseMatrix assemble_bilinear_at(const FESpace& space,
                                  const std::function<Mat2(const Vec2&)>& coeff_a,
                                  const std::function<double(const Vec2&)>& coeff_c);

}  // namespace shell_lab
