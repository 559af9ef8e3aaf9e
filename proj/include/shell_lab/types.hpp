#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <stdexcept>
#include <string>
#include <vector>

namespace shell_lab {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using Mat32 = Eigen::Matrix<double, 3, 2>;  // columns d_1 u, d_2 u
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// bad configuration or parameters; CLI exit code 2
class ConfigError : public Error {
 public:
  ConfigError(const std::string& key, const std::string& msg)
      : Error(key + ": " + msg), key_(key) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

// solver or geometry failure; CLI exit code 1
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& msg, std::vector<double> history = {})
      : Error(msg), history_(std::move(history)) {}
  const std::vector<double>& history() const { return history_; }

 private:
  std::vector<double> history_;
};

inline Mat3 skew(const Vec3& a) {
  Mat3 m;
  m << 0, -a(2), a(1), a(2), 0, -a(0), -a(1), a(0), 0;
  return m;
}

}  // namespace shell_lab
