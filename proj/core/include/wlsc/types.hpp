#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace wlsc {

// Spatial points are always stored in R^2; one-dimensional data uses the
// first coordinate and keeps the second at zero.
using Point = Eigen::Vector2d;

// M x N matrices with M, N <= 2.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 2, 2>;
using Vector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 2, 1>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Frobenius norm, the matrix norm used throughout (|xi|).
inline double norm(const Matrix& m) { return m.norm(); }

inline Matrix zero_matrix(int rows, int cols) { return Matrix::Zero(rows, cols); }

/// Outer product a (x) b, an M x N matrix.
inline Matrix outer(const Vector& a, const Vector& b) { return a * b.transpose(); }

/// Frobenius inner product A : B.
inline double contract(const Matrix& a, const Matrix& b) { return (a.array() * b.array()).sum(); }

}  // namespace wlsc
