// SPDX-License-Identifier: Apache-2.0
#ifndef MULAN_TOEPLITZ_HPP
#define MULAN_TOEPLITZ_HPP

#include "mulan/types.hpp"

namespace mulan {

// Valid-region discrete convolution between u (length L) and v (length D >= L):
//   (u * v)(n) = sum_{j=0}^{L-1} u(j) v(L-1+n-j),  n = 0..D-L,
// expressed as two Toeplitz operators so that
//   toeplitz_zero(u, D) * v == toeplitz_full(v, L) * u.

/// (D-L+1) x L matrix with entry(i,j) = v(L-1+i-j) (0-based); multiplying a
/// length-L vector u gives the valid convolution u * v.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> toeplitz_full(
    const Eigen::MatrixBase<Derived>& v, int window) {
  const int d = static_cast<int>(v.size());
  if (window < 1 || window > d) throw config_error("toeplitz_full: window out of range");
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> m(d - window + 1,
                                                                            window);
  for (int i = 0; i <= d - window; ++i)
    for (int j = 0; j < window; ++j) m(i, j) = v(window - 1 + i - j);
  return m;
}

/// (D-L+1) x D banded matrix carrying u reversed along each row, the adjoint
/// pairing of toeplitz_full: toeplitz_zero(u, D) * v = toeplitz_full(v, L) * u.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> toeplitz_zero(
    const Eigen::MatrixBase<Derived>& u, int width) {
  using Matrix = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const int l = static_cast<int>(u.size());
  if (l < 1 || l > width) throw config_error("toeplitz_zero: filter longer than width");
  Matrix m = Matrix::Zero(width - l + 1, width);
  for (int i = 0; i <= width - l; ++i)
    for (int j = 0; j < l; ++j) m(i, i + j) = u(l - 1 - j);
  return m;
}

}  // namespace mulan

#endif  // MULAN_TOEPLITZ_HPP
