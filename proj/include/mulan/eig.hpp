// SPDX-License-Identifier: Apache-2.0
#ifndef MULAN_EIG_HPP
#define MULAN_EIG_HPP

#include <complex>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <Eigen/Dense>

#include <utility>
#include <vector>

#include "mulan/types.hpp"

namespace mulan {
namespace detail {

// Size above which the Gram eigenproblem goes through LAPACK *evr (compute a
// single eigenpair) instead of Eigen's full decomposition.
inline constexpr int kLapackEigThreshold = 96;

inline void smallest_gram_eigenpair(RealMatrix g, double& lambda, RealVector& vec) {
  const int n = static_cast<int>(g.rows());
  if (n > kLapackEigThreshold) {
    RealVector w(n);
    RealVector z(n);
    std::vector<lapack_int> isuppz(2);
    lapack_int found = 0;
    const lapack_int info = LAPACKE_dsyevr(
        LAPACK_COL_MAJOR, 'V', 'I', 'L', n, g.data(), n, 0.0, 0.0, 1, 1,
        2.0 * LAPACKE_dlamch('S'), &found, w.data(), z.data(), n, isuppz.data());
    if (info == 0 && found >= 1) {
      lambda = w(0);
      vec = z;
      return;
    }
  }
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(g);
  if (es.info() != Eigen::Success)
    throw numeric_error("smallest_gram_eigenpair: eigendecomposition failed");
  lambda = es.eigenvalues()(0);
  vec = es.eigenvectors().col(0);
}

inline void smallest_gram_eigenpair(ComplexMatrix g, double& lambda, ComplexVector& vec) {
  const int n = static_cast<int>(g.rows());
  if (n > kLapackEigThreshold) {
    RealVector w(n);
    ComplexVector z(n);
    std::vector<lapack_int> isuppz(2);
    lapack_int found = 0;
    const lapack_int info = LAPACKE_zheevr(
        LAPACK_COL_MAJOR, 'V', 'I', 'L', n, g.data(), n, 0.0, 0.0, 1, 1,
        2.0 * LAPACKE_dlamch('S'), &found, w.data(), z.data(), n, isuppz.data());
    if (info == 0 && found >= 1) {
      lambda = w(0);
      vec = z;
      return;
    }
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(g);
  if (es.info() != Eigen::Success)
    throw numeric_error("smallest_gram_eigenpair: eigendecomposition failed");
  lambda = es.eigenvalues()(0);
  vec = es.eigenvectors().col(0);
}

}  // namespace detail

/// Unit vector v minimizing ||A v||_2 together with the attained minimum
/// (the smallest singular value of A). Solved through the Hermitian
/// eigendecomposition of A^H A; the global phase/sign of v is unspecified.
template <typename Derived>
std::pair<Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1>, double>
min_right_singular_vector(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  if (a.rows() < 1 || a.cols() < 1)
    throw config_error("min_right_singular_vector: empty matrix");
  if (!a.allFinite()) throw config_error("min_right_singular_vector: non-finite entries");
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> gram = a.adjoint() * a;
  double lambda = 0.0;
  Vector vec;
  detail::smallest_gram_eigenpair(std::move(gram), lambda, vec);
  vec.normalize();
  const double sigma = (a * vec).norm();
  return {std::move(vec), sigma};
}

namespace detail {

/// y = A x for Hermitian banded A in lower band storage.
inline ComplexVector banded_hermitian_matvec(int n, int kd, const ComplexMatrix& band,
                                             const ComplexVector& x) {
  ComplexVector y = ComplexVector::Zero(n);
  for (int j = 0; j < n; ++j) {
    y(j) += band(0, j) * x(j);
    for (int d = 1; d <= kd && j + d < n; ++d) {
      y(j + d) += band(d, j) * x(j);
      y(j) += std::conj(band(d, j)) * x(j + d);
    }
  }
  return y;
}

/// Rayleigh quotient x^H A x for a unit vector x.
inline double banded_rayleigh(int n, int kd, const ComplexMatrix& band,
                              const ComplexVector& x) {
  return x.dot(banded_hermitian_matvec(n, kd, band, x)).real();
}

/// A few steps of inverse iteration on the (nearly singular) banded matrix.
/// The eigensolver's vector is gap-limited; solving A w = v pushes w into the
/// bottom eigenvector far more accurately, which matters when the smallest
/// eigenvalue sits many orders below the matrix norm. Keeps whichever iterate
/// attains the smallest Rayleigh quotient.
inline void refine_min_eigenpair_banded(int n, int kd, const ComplexMatrix& band,
                                        double& lambda, ComplexVector& v) {
  const int ldab = 2 * kd + kd + 1;  // general band storage with fill-in rows
  ComplexMatrix ab = ComplexMatrix::Zero(ldab, n);
  for (int j = 0; j < n; ++j) {
    for (int d = 0; d <= kd && j + d < n; ++d) {
      ab(2 * kd + d, j) = band(d, j);                      // A(j+d, j)
      if (d > 0) ab(2 * kd - d, j + d) = std::conj(band(d, j));  // A(j, j+d)
    }
  }
  std::vector<lapack_int> ipiv(static_cast<std::size_t>(n));
  const lapack_int info = LAPACKE_zgbtrf(LAPACK_COL_MAJOR, n, n, kd, kd, ab.data(), ldab,
                                         ipiv.data());
  if (info != 0) return;  // exactly singular: the current vector is already in the null space
  for (int step = 0; step < 3; ++step) {
    ComplexVector w = v;
    if (LAPACKE_zgbtrs(LAPACK_COL_MAJOR, 'N', n, kd, kd, 1, ab.data(), ldab, ipiv.data(),
                       w.data(), n) != 0)
      return;
    const double norm = w.norm();
    if (!(norm > 0.0) || !w.allFinite()) return;
    w /= norm;
    const double rq = banded_rayleigh(n, kd, band, w);
    if (rq >= lambda) return;  // stalled at the attainable floor
    lambda = rq;
    v = std::move(w);
  }
}

}  // namespace detail

/// Smallest eigenpair of a Hermitian banded matrix given in LAPACK lower band
/// storage: band(d, j) = A(j+d, j) for d = 0..kd (column-major (kd+1) x n).
/// The banded eigensolver result is polished by inverse iteration; falls back
/// to a dense decomposition if the banded solver fails.
inline std::pair<double, ComplexVector> min_eigenpair_banded(int n, int kd,
                                                             const ComplexMatrix& band) {
  if (band.rows() != kd + 1 || band.cols() != n)
    throw config_error("min_eigenpair_banded: bad band shape");
  {
    ComplexMatrix ab = band;  // overwritten by LAPACK
    ComplexMatrix q(n, n);
    RealVector w(n);
    ComplexVector z(n);
    std::vector<lapack_int> ifail(n);
    lapack_int found = 0;
    const lapack_int info = LAPACKE_zhbevx(
        LAPACK_COL_MAJOR, 'V', 'I', 'L', n, kd, ab.data(), kd + 1, q.data(), n,
        0.0, 0.0, 1, 1, 2.0 * LAPACKE_dlamch('S'), &found, w.data(), z.data(), n,
        ifail.data());
    if (info == 0 && found >= 1) {
      ComplexVector v = z;
      v.normalize();
      double lambda = detail::banded_rayleigh(n, kd, band, v);
      detail::refine_min_eigenpair_banded(n, kd, band, lambda, v);
      return {lambda, std::move(v)};
    }
  }
  ComplexMatrix dense = ComplexMatrix::Zero(n, n);
  for (int j = 0; j < n; ++j)
    for (int d = 0; d <= kd && j + d < n; ++d) {
      dense(j + d, j) = band(d, j);
      dense(j, j + d) = std::conj(band(d, j));
    }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(dense);
  if (es.info() != Eigen::Success)
    throw numeric_error("min_eigenpair_banded: eigendecomposition failed");
  ComplexVector v = es.eigenvectors().col(0);
  v.normalize();
  double lambda = detail::banded_rayleigh(n, kd, band, v);
  detail::refine_min_eigenpair_banded(n, kd, band, lambda, v);
  return {lambda, std::move(v)};
}

}  // namespace mulan

#endif  // MULAN_EIG_HPP
