// SPDX-License-Identifier: Apache-2.0
#ifndef MULAN_VANDERMONDE_HPP
#define MULAN_VANDERMONDE_HPP

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <string>

#include "mulan/types.hpp"

namespace mulan {

/// Least-squares echo weights given progression roots: solve V(r) alpha ~ h
/// with V(i,k) = roots(k)^i, undo the first-frequency phase offset
/// Diag(exp(-2*pi*i*f1*tau_k)) and return the moduli. The phases are
/// discarded because nonnegative weights are sought; since the diagonal
/// correction has unit modulus it cannot change the result, but it is applied
/// as written so the complex intermediate matches the model.
inline RealVector vandermonde_weights(const ComplexVector& roots, const Spectrum& h,
                                      double f1) {
  const Eigen::Index k = roots.size();
  const Eigen::Index f = h.size();
  if (f < k) throw config_error("vandermonde_weights: fewer samples than roots");
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = i + 1; j < k; ++j)
      if (std::abs(roots(i) - roots(j)) <= 1e-9)
        throw numeric_error("vandermonde_weights: repeated roots " + std::to_string(i) +
                            " and " + std::to_string(j));

  ComplexMatrix v(f, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    Complex p(1.0, 0.0);
    for (Eigen::Index i = 0; i < f; ++i) {
      v(i, j) = p;
      p *= roots(j);
    }
  }
  ComplexVector alpha = v.completeOrthogonalDecomposition().solve(h.values);
  const double two_pi = 2.0 * std::numbers::pi;
  for (Eigen::Index j = 0; j < k; ++j) {
    const double tau = -std::arg(roots(j)) / (two_pi * h.grid.step);
    alpha(j) *= std::polar(1.0, two_pi * f1 * tau);  // D^{-1}, |D| = 1
  }
  return alpha.cwiseAbs();
}

}  // namespace mulan

#endif  // MULAN_VANDERMONDE_HPP
