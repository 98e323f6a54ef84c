#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

#include <Eigen/Dense>

namespace flosurf {

/// Pfaffian of a skew-symmetric matrix by Parlett-Reid tridiagonalisation
/// with partial pivoting, O(n^3). The argument is taken by value and used as
/// workspace. Odd dimension gives zero.
template <typename Derived>
typename Derived::Scalar pfaffian(const Eigen::MatrixBase<Derived>& input) {
  using Scalar = typename Derived::Scalar;
  using std::abs;
  if (input.rows() != input.cols()) throw std::invalid_argument("pfaffian of a non-square matrix");
  const Eigen::Index n = input.rows();
  if (n % 2 == 1) return Scalar(0);
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> a = input;
  Scalar result(1);
  for (Eigen::Index k = 0; k + 1 < n; k += 2) {
    Eigen::Index offset;
    a.col(k).tail(n - k - 1).cwiseAbs().maxCoeff(&offset);
    const Eigen::Index kp = k + 1 + offset;
    if (kp != k + 1) {
      a.row(k + 1).swap(a.row(kp));
      a.col(k + 1).swap(a.col(kp));
      result = -result;
    }
    if (a(k + 1, k) == Scalar(0)) return Scalar(0);
    result *= a(k, k + 1);
    if (k + 2 < n) {
      const Eigen::Index m = n - k - 2;
      const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> tau = a.row(k).tail(m).transpose() / a(k, k + 1);
      const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> v = a.col(k + 1).tail(m);
      a.bottomRightCorner(m, m) += tau * v.transpose() - v * tau.transpose();
    }
  }
  return result;
}

}  // namespace flosurf
