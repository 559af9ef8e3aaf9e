#include "shell_lab/linalg.hpp"

#include <Eigen/CholmodSupport>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace shell_lab {

struct SpdFactor::Impl {
  Eigen::CholmodSimplicialLLT<SparseMatrix, Eigen::Lower> llt;
};

SpdFactor::SpdFactor(const SparseMatrix& A) : impl_(std::make_unique<Impl>()), n_(int(A.rows())) {
  impl_->llt.compute(A);
  if (impl_->llt.info() != Eigen::Success)
    throw NumericalError("sparse Cholesky factorization failed (matrix not positive definite)");
}

SpdFactor::~SpdFactor() = default;

VecX SpdFactor::solve(const VecX& b) const {
  std::lock_guard lock(mutex_);
  VecX x = impl_->llt.solve(b);
  if (impl_->llt.info() != Eigen::Success) throw NumericalError("sparse Cholesky solve failed");
  return x;
}

MatX SpdFactor::solve(const MatX& B) const {
  std::lock_guard lock(mutex_);
  MatX X = impl_->llt.solve(B);
  if (impl_->llt.info() != Eigen::Success) throw NumericalError("sparse Cholesky solve failed");
  return X;
}

struct LuFactor::Impl {
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
};

LuFactor::LuFactor(const SparseMatrix& A) : impl_(std::make_unique<Impl>()) {
  SparseMatrix C = A;
  C.makeCompressed();
  impl_->lu.analyzePattern(C);
  impl_->lu.factorize(C);
  if (impl_->lu.info() != Eigen::Success)
    throw NumericalError("sparse LU factorization failed: " + impl_->lu.lastErrorMessage());
}

LuFactor::~LuFactor() = default;

VecX LuFactor::solve(const VecX& b) const {
  std::lock_guard lock(mutex_);
  return impl_->lu.solve(b);
}

MatX LuFactor::solve(const MatX& B) const {
  std::lock_guard lock(mutex_);
  return impl_->lu.solve(B);
}

EigenPairs nearest_eigenpairs(const SparseMatrix& A, const SparseMatrix& M, double shift, int count,
                              int max_iter, double tol) {
  const int n = int(A.rows());
  count = std::min(count, n);
  const int block = std::min(n, count + std::max(4, count / 2));
  SparseMatrix S = A - shift * M;
  LuFactor lu(S);

  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  MatX X(n, block);
  for (int j = 0; j < block; ++j)
    for (int i = 0; i < n; ++i) X(i, j) = unif(rng);

  EigenPairs out;
  VecX theta;
  MatX Q;
  for (int it = 1; it <= max_iter; ++it) {
    MatX Y = lu.solve(MatX(M * X));
    // M-orthonormalize (two Gram-Schmidt passes), then Rayleigh-Ritz
    for (int pass = 0; pass < 2; ++pass)
      for (int j = 0; j < block; ++j) {
        VecX mj;
        for (int k = 0; k < j; ++k) {
          mj = M * Y.col(k);
          Y.col(j) -= mj.dot(Y.col(j)) * Y.col(k);
        }
        double nrm = std::sqrt(std::max(0.0, Y.col(j).dot(M * Y.col(j))));
        if (!(nrm > 0) || !std::isfinite(nrm)) {
          for (int i = 0; i < n; ++i) Y(i, j) = unif(rng);
          nrm = std::sqrt(Y.col(j).dot(M * Y.col(j)));
        }
        Y.col(j) /= nrm;
      }
    MatX Ga = Y.transpose() * (A * Y);
    Ga = 0.5 * (Ga + Ga.transpose());
    Eigen::SelfAdjointEigenSolver<MatX> es(Ga);
    if (es.info() != Eigen::Success) throw NumericalError("Rayleigh-Ritz step failed");
    VecX vals = es.eigenvalues();
    MatX vecs = es.eigenvectors();
    std::vector<int> order(block);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return std::abs(vals(a) - shift) < std::abs(vals(b) - shift);
    });
    theta.resize(block);
    Q.resize(block, block);
    for (int j = 0; j < block; ++j) {
      theta(j) = vals(order[j]);
      Q.col(j) = vecs.col(order[j]);
    }
    X = Y * Q;
    // residuals of the wanted pairs
    double worst = 0;
    for (int j = 0; j < count; ++j) {
      VecX ax = A * X.col(j);
      VecX mx = M * X.col(j);
      double scale = std::max(ax.norm(), std::abs(theta(j)) * mx.norm());
      scale = std::max(scale, 1e-300);
      worst = std::max(worst, (ax - theta(j) * mx).norm() / scale);
    }
    out.iterations = it;
    if (worst < tol) {
      out.converged = true;
      break;
    }
  }
  out.values = theta.head(count);
  out.vectors = X.leftCols(count);
  return out;
}

double largest_eigenvalue_estimate(const SparseMatrix& A, const SparseMatrix& M, int iterations) {
  // power iteration on M^-1 A; P2 lumped masses vanish at vertices, so use the consistent mass
  const int n = int(A.rows());
  if (n == 0) return 0.0;
  SpdFactor Mf(M);
  VecX x(n);
  for (int i = 0; i < n; ++i) x(i) = 1.0 + 0.37 * std::sin(1.3 * i);
  double lam = 0;
  for (int it = 0; it < iterations; ++it) {
    VecX y = Mf.solve(VecX(A * x));
    double ny = std::sqrt(std::abs(y.dot(M * y)));
    if (!(ny > 0)) return 0.0;
    lam = ny / std::sqrt(x.dot(M * x));
    x = y / ny;
  }
  return lam;
}

SparseMatrix submatrix(const SparseMatrix& A, const std::vector<int>& rows,
                       const std::vector<int>& cols) {
  std::vector<int> rmap = index_map(int(A.rows()), rows);
  std::vector<int> cmap = index_map(int(A.cols()), cols);
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(A.nonZeros());
  for (int k = 0; k < A.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(A, k); it; ++it) {
      int r = rmap[it.row()], c = cmap[it.col()];
      if (r >= 0 && c >= 0) t.emplace_back(r, c, it.value());
    }
  SparseMatrix S(int(rows.size()), int(cols.size()));
  S.setFromTriplets(t.begin(), t.end());
  return S;
}

std::vector<int> index_map(int n, const std::vector<int>& subset) {
  std::vector<int> m(n, -1);
  for (size_t i = 0; i < subset.size(); ++i) m[subset[i]] = int(i);
  return m;
}

}  // namespace shell_lab
