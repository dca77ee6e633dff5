// SPDX-License-Identifier: Apache-2.0
#ifndef MULAN_ANNIHILATION_HPP
#define MULAN_ANNIHILATION_HPP

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "mulan/eig.hpp"
#include "mulan/poly.hpp"
#include "mulan/types.hpp"
#include "mulan/vandermonde.hpp"

namespace mulan {

/// Annihilating filter of length K+1 for a weighted sum of K geometric
/// progressions. Coefficients are stored in ascending power order so that the
/// roots of P(y) = sum_k coeffs(k) y^k are exactly the progression ratios
/// exp(-2*pi*i*step*tau_k); the residual it drives to zero is
/// r(n) = sum_k coeffs(k) h(n+k), the valid convolution of the reversed
/// coefficient vector with h. Solver output is unit-norm with unspecified
/// global phase.
struct AnnihilatingFilter {
  ComplexVector coeffs;

  AnnihilatingFilter() = default;
  explicit AnnihilatingFilter(ComplexVector c) : coeffs(std::move(c)) {
    if (coeffs.size() < 2) throw config_error("AnnihilatingFilter: need length >= 2");
    if (!coeffs.allFinite()) throw config_error("AnnihilatingFilter: non-finite coefficient");
  }

  int order() const { return static_cast<int>(coeffs.size()) - 1; }
};

namespace detail {

/// Squared norm of the annihilation residual r(n) = sum_k a(k) h(n+k),
/// n = 0..F-K-1 (equals ||Toep(h) rev(a)||^2).
inline double annihilation_residual_sq(const ComplexVector& h, const ComplexVector& a) {
  const Eigen::Index f = h.size();
  const Eigen::Index k = a.size() - 1;
  double acc = 0.0;
  for (Eigen::Index n = 0; n + k < f; ++n) {
    Complex r(0.0, 0.0);
    for (Eigen::Index j = 0; j <= k; ++j) r += a(j) * h(n + j);
    acc += std::norm(r);
  }
  return acc;
}

/// Gram matrix of the annihilation residual in coefficient order:
/// G(i,j) = sum_n conj(h(n+i)) h(n+j) over the F-K valid rows.
inline ComplexMatrix annihilation_gram(const ComplexVector& h, int k) {
  const Eigen::Index f = h.size();
  ComplexMatrix g = ComplexMatrix::Zero(k + 1, k + 1);
  for (int i = 0; i <= k; ++i)
    for (int j = i; j <= k; ++j) {
      Complex acc(0.0, 0.0);
      for (Eigen::Index n = 0; n + k < f; ++n) acc += std::conj(h(n + i)) * h(n + j);
      g(i, j) = acc;
      g(j, i) = std::conj(acc);
    }
  return g;
}

}  // namespace detail

/// Elementwise reciprocal z(f) = 1/s(f). The spectrum must stay away from
/// zero on the grid; the offending frequency is reported otherwise.
inline Spectrum invert_spectrum(const Spectrum& s, double eps_rel = 1e-10) {
  const double floor = eps_rel * s.values.cwiseAbs().maxCoeff();
  ComplexVector z(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (std::abs(s.values(i)) <= floor)
      throw numeric_error("invert_spectrum: spectrum vanishes at " +
                          std::to_string(s.grid.frequency(static_cast<int>(i))) + " Hz");
    z(i) = 1.0 / s.values(i);
  }
  return Spectrum(std::move(z), s.grid);
}

/// Unit-norm filter of length K+1 minimizing the annihilation residual of h,
/// found as the smallest eigenvector of the residual Gram matrix.
inline AnnihilatingFilter annihilate_nonblind(const Spectrum& h, int k) {
  if (k < 1) throw config_error("annihilate_nonblind: need K >= 1");
  if (h.size() < 2 * k + 1)
    throw config_error("annihilate_nonblind: need F >= 2K+1 frequency samples");
  double lambda = 0.0;
  ComplexVector coeffs;
  detail::smallest_gram_eigenpair(detail::annihilation_gram(h.values, k), lambda, coeffs);
  coeffs.normalize();
  return AnnihilatingFilter(std::move(coeffs));
}

/// Delay read-out tau = -arg(root)/(2*pi*delta_f), wrapped into [0, 1/delta_f)
/// by adding one period to negatives. Only valid without aliasing when the
/// true delays occupy the first half period.
inline std::vector<double> roots_to_delays(const ComplexVector& roots, double delta_f) {
  if (!(delta_f > 0.0)) throw config_error("roots_to_delays: step must be positive");
  std::vector<double> delays(static_cast<std::size_t>(roots.size()));
  const double period = 1.0 / delta_f;
  for (Eigen::Index i = 0; i < roots.size(); ++i) {
    if (roots(i) == Complex(0.0, 0.0)) throw numeric_error("roots_to_delays: zero root");
    double tau = -std::arg(roots(i)) / (2.0 * std::numbers::pi * delta_f);
    if (tau < 0.0) tau += period;
    delays[static_cast<std::size_t>(i)] = tau;
  }
  return delays;
}

/// Non-blind recovery: h = x .* (1/s), annihilate, root, convert roots to
/// delays and solve the Vandermonde system for weights. Echoes come back
/// sorted by delay with weights co-permuted.
inline EchoSet recover_echoes_nonblind(const Spectrum& x, const Spectrum& s, int k) {
  if (!(x.grid == s.grid)) throw config_error("recover_echoes_nonblind: grid mismatch");
  const Spectrum z = invert_spectrum(s);
  Spectrum h(x.values.cwiseProduct(z.values), x.grid);
  const AnnihilatingFilter filter = annihilate_nonblind(h, k);
  const ComplexVector roots = polynomial_roots(filter.coeffs);
  if (roots.size() != k)
    throw numeric_error("recover_echoes_nonblind: degenerate filter (degree dropped)");
  std::vector<double> delays = roots_to_delays(roots, h.grid.step);
  const RealVector weights = vandermonde_weights(roots, h, h.grid.f_start);
  return EchoSet(std::move(delays),
                 std::vector<double>(weights.data(), weights.data() + weights.size()));
}

}  // namespace mulan

#endif  // MULAN_ANNIHILATION_HPP
