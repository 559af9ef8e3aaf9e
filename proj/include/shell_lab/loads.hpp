#pragma once

#include "shell_lab/energy.hpp"
#include "shell_lab/isospace.hpp"

#include <string>
#include <vector>

namespace shell_lab {

// f minus its area-weighted mean, so that int_S f dA = 0
VectorField3 mean_free_force(const Surface& surface, const VectorField3& f);
// "axial": (0, 0, z); "shear": (z, 0, x); both made mean-free
VectorField3 force_profile(const Surface& surface, const std::string& name);

// X = int x f^T dA, so that int f . Q x dA = tr(Q X)
Mat3 force_moment(const Surface& surface, const VectorField3& f);
double force_action(const Surface& surface, const VectorField3& f, const Mat3& Q);

struct OptimalRotation {
  Mat3 Q = Mat3::Identity();
  double m = 0;            // max over SO(3) of int f . Q x
  Mat3 moment = Mat3::Zero();
  Vec3 signed_singular_values = Vec3::Zero();
  // maximizer not unique: X = 0 (all of SO(3)) or s2 + s3 = 0 (a circle of maximizers)
  bool degenerate = false;
  std::vector<Mat3> orbit;  // samples of the maximizer set when degenerate, else {Q}
};

// SVD X = U S V^T, Q = V diag(1, 1, det(V U^T)) U^T
OptimalRotation optimal_rotation(const Surface& surface, const VectorField3& f, int orbit_samples = 32);
OptimalRotation optimal_rotation(const Mat3& moment, int orbit_samples = 32);
// max of tr(Q X) over a quaternion grid: 4 cube faces of n^3 cell centers each
double grid_max_action(const Mat3& moment, int n = 63);

struct LimitProblem {
  std::vector<std::string> labels;
  std::vector<VectorField3> fields;
  MatX stiffness;  // 2 x bilinear form of I on the basis
  MatX gram;       // L2(S) Gram matrix
  MatX range;      // columns: generalized eigenvectors (stiffness, gram) off the rigid kernel
  MatX kernel;     // columns: the rigid kernel
  VecX spectrum;   // generalized eigenvalues, ascending
};

// kernel: generalized eigenvalues below kernel_tol times their median
LimitProblem assemble_limit_problem(const Surface& surface, const MaterialModel& material, const IsoBasis& basis,
                                    double kernel_tol = 1e-3);
// l_k = int f . Q V_k dA
VecX load_vector(const Surface& surface, const LimitProblem& P, const VectorField3& f, const Mat3& Q);
// 1/2 c^T I c - l^T c
double limit_energy(const LimitProblem& P, const VecX& load, const VecX& c);

struct LimitSolution {
  Mat3 Q = Mat3::Identity();
  double m = 0;
  bool degenerate = false;
  VecX load;
  VecX coefficients;  // no component along the kernel
  VectorField3 V;
  double J = 0;
  double el_residual = 0;   // |I c - (l - l_ker)| / |l|
  double kernel_load = 0;   // |l_ker| / |l|, l_ker = G Y_ker Y_ker^T l
  int kernel_dim = 0;
};

// minimizer of J for a fixed rotation
LimitSolution solve_limit(const LimitProblem& P, const VecX& load);
// Q* from optimal_rotation (best over the orbit when degenerate), then the minimizer
LimitSolution minimize_limit_energy(const Surface& surface, const LimitProblem& P, const VectorField3& f);

}  // namespace shell_lab
