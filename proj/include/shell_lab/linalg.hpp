#pragma once

#include "shell_lab/types.hpp"

#include <memory>
#include <mutex>
#include <vector>

namespace shell_lab {

// Sparse Cholesky of an SPD matrix (CHOLMOD simplicial, AMD ordering). Solves are serialized.
class SpdFactor {
 public:
  explicit SpdFactor(const SparseMatrix& A);
  ~SpdFactor();
  SpdFactor(const SpdFactor&) = delete;
  SpdFactor& operator=(const SpdFactor&) = delete;

  VecX solve(const VecX& b) const;
  MatX solve(const MatX& B) const;
  int size() const { return n_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  mutable std::mutex mutex_;
  int n_ = 0;
};

// Sparse LU for symmetric indefinite or general systems.
class LuFactor {
 public:
  explicit LuFactor(const SparseMatrix& A);
  ~LuFactor();
  LuFactor(const LuFactor&) = delete;
  LuFactor& operator=(const LuFactor&) = delete;

  VecX solve(const VecX& b) const;
  MatX solve(const MatX& B) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  mutable std::mutex mutex_;
};

struct EigenPairs {
  VecX values;   // ascending by distance to the shift
  MatX vectors;  // M-orthonormal columns
  int iterations = 0;
  bool converged = false;
};

// Eigenpairs of A x = lambda M x nearest to `shift` by shift-invert subspace iteration.
// A symmetric, M SPD. Deterministic start block.
EigenPairs nearest_eigenpairs(const SparseMatrix& A, const SparseMatrix& M, double shift, int count,
                              int max_iter = 300, double tol = 1e-10);

// largest eigenvalue magnitude of A x = lambda M x (power iteration)
double largest_eigenvalue_estimate(const SparseMatrix& A, const SparseMatrix& M, int iterations = 60);

SparseMatrix submatrix(const SparseMatrix& A, const std::vector<int>& rows,
                       const std::vector<int>& cols);

// scatter index map: position of each global index in `subset`, -1 if absent
std::vector<int> index_map(int n, const std::vector<int>& subset);

}  // namespace shell_lab
