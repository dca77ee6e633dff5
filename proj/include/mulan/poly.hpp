// SPDX-License-Identifier: Apache-2.0
#ifndef MULAN_POLY_HPP
#define MULAN_POLY_HPP

#include <Eigen/Dense>

#include <cmath>

#include "mulan/types.hpp"

namespace mulan {

/// Horner evaluation of P(y) = sum_k coeffs(k) y^k.
inline Complex polynomial_eval(const ComplexVector& coeffs, Complex y) {
  Complex acc(0.0, 0.0);
  for (Eigen::Index k = coeffs.size() - 1; k >= 0; --k) acc = acc * y + coeffs(k);
  return acc;
}

/// Roots of P(y) = sum_k coeffs(k) y^k via the companion matrix of the
/// monic-normalized polynomial. Trailing coefficients below 1e-12 * ||coeffs||
/// are trimmed first; the effective degree must stay >= 1.
inline ComplexVector polynomial_roots(const ComplexVector& coeffs) {
  const double scale = coeffs.norm();
  if (!(scale > 0.0)) throw numeric_error("polynomial_roots: zero polynomial");
  Eigen::Index degree = coeffs.size() - 1;
  while (degree > 0 && std::abs(coeffs(degree)) <= 1e-12 * scale) --degree;
  if (degree == 0) throw numeric_error("polynomial_roots: degree zero after trimming");

  ComplexMatrix companion = ComplexMatrix::Zero(degree, degree);
  for (Eigen::Index i = 0; i + 1 < degree; ++i) companion(i + 1, i) = Complex(1.0, 0.0);
  for (Eigen::Index i = 0; i < degree; ++i)
    companion(i, degree - 1) = -coeffs(i) / coeffs(degree);

  Eigen::ComplexEigenSolver<ComplexMatrix> es(companion, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) throw numeric_error("polynomial_roots: eigensolver failed");
  return es.eigenvalues();
}

/// Ascending coefficients of the monic polynomial prod_k (y - roots(k)).
/// Inverse of polynomial_roots up to ordering and overall scale.
inline ComplexVector polynomial_from_roots(const ComplexVector& roots) {
  ComplexVector coeffs = ComplexVector::Zero(roots.size() + 1);
  coeffs(0) = Complex(1.0, 0.0);
  for (Eigen::Index k = 0; k < roots.size(); ++k) {
    // multiply by (y - r): shift up and subtract r * current
    for (Eigen::Index j = k + 1; j >= 1; --j) coeffs(j) = coeffs(j - 1) - roots(k) * coeffs(j);
    coeffs(0) = -roots(k) * coeffs(0);
  }
  return coeffs;
}

}  // namespace mulan

#endif  // MULAN_POLY_HPP
