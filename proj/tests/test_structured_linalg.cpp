// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "mulan/dft.hpp"
#include "mulan/eig.hpp"
#include "mulan/poly.hpp"
#include "mulan/toeplitz.hpp"
#include "mulan/vandermonde.hpp"

using namespace mulan;

namespace {

std::mt19937_64 rng_for(unsigned seed) { return std::mt19937_64(seed); }

ComplexVector random_complex_vector(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  ComplexVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = Complex(gauss(rng), gauss(rng));
  return v;
}

Complex random_unit(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  return std::polar(1.0, angle(rng));
}

// Greedy min-distance multiset match; adequate for well-separated roots.
double multiset_distance(ComplexVector a, ComplexVector b) {
  REQUIRE(a.size() == b.size());
  std::vector<bool> used(static_cast<std::size_t>(b.size()), false);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    Eigen::Index pick = -1;
    for (Eigen::Index j = 0; j < b.size(); ++j) {
      if (used[static_cast<std::size_t>(j)]) continue;
      const double d = std::abs(a(i) - b(j));
      if (d < best) {
        best = d;
        pick = j;
      }
    }
    used[static_cast<std::size_t>(pick)] = true;
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace

TEST_CASE("toeplitz_full matches the hand-expanded convolution matrix") {
  ComplexVector v(4);
  v << 1.0, 2.0, 3.0, 4.0;
  const ComplexMatrix m = toeplitz_full(v, 2);
  REQUIRE(m.rows() == 3);
  REQUIRE(m.cols() == 2);
  ComplexMatrix want(3, 2);
  want << 2.0, 1.0, 3.0, 2.0, 4.0, 3.0;
  CHECK((m - want).norm() == 0.0);

  ComplexVector pick(2);
  pick << 1.0, 0.0;
  const ComplexVector tail = m * pick;
  CHECK(tail(0) == Complex(2.0));
  CHECK(tail(1) == Complex(3.0));
  CHECK(tail(2) == Complex(4.0));
}

TEST_CASE("first difference annihilates a constant sequence") {
  ComplexVector u(2);
  u << 1.0, -1.0;
  const ComplexMatrix m = toeplitz_full(ComplexVector::Ones(4), 2);
  CHECK((m * u).norm() == 0.0);
}

TEST_CASE("toeplitz window bounds are enforced") {
  CHECK_THROWS_AS(toeplitz_full(ComplexVector::Ones(3), 0), config_error);
  CHECK_THROWS_AS(toeplitz_full(ComplexVector::Ones(3), 4), config_error);
  CHECK_THROWS_AS(toeplitz_zero(ComplexVector::Ones(5), 4), config_error);
}

TEST_CASE("toeplitz_zero rows carry the reversed filter") {
  ComplexVector u(2);
  u << 1.0, -1.0;
  const ComplexMatrix m = toeplitz_zero(u, 4);
  ComplexMatrix want(3, 4);
  want << -1.0, 1.0, 0.0, 0.0, 0.0, -1.0, 1.0, 0.0, 0.0, 0.0, -1.0, 1.0;
  CHECK((m - want).norm() == 0.0);

  CHECK(toeplitz_zero(ComplexVector::Ones(1), 3).isIdentity(0.0));
}

TEST_CASE("toeplitz adjoint-pair identity holds on random data") {
  auto rng = rng_for(21);
  for (int trial = 0; trial < 8; ++trial) {
    const ComplexVector u = random_complex_vector(3, rng);
    const ComplexVector v = random_complex_vector(8, rng);
    const ComplexVector lhs = toeplitz_zero(u, 8) * v;
    const ComplexVector rhs = toeplitz_full(v, 3) * u;
    CHECK((lhs - rhs).norm() <= 1e-14 * rhs.norm());
  }
}

TEST_CASE("single-ratio annihilation identity is exact") {
  auto rng = rng_for(22);
  for (int trial = 0; trial < 8; ++trial) {
    const Complex w = random_unit(rng);
    const int f = 9;
    ComplexVector prog(f);
    Complex p(1.0, 0.0);
    for (int i = 0; i < f; ++i) {
      prog(i) = p;
      p *= w;
    }
    ComplexVector u(2);
    u << 1.0, -w;
    CHECK((toeplitz_full(prog, 2) * u).norm() <= 1e-13);
  }
}

TEST_CASE("chained factors annihilate weighted sums of geometric progressions") {
  auto rng = rng_for(23);
  const int k = 3, f = 12;
  std::uniform_real_distribution<double> weight(0.2, 1.0);
  for (int trial = 0; trial < 8; ++trial) {
    std::vector<Complex> ratios;
    for (int i = 0; i < k; ++i) ratios.push_back(random_unit(rng));
    // chained full convolution of the [1, -r] factors, Toeplitz-multiplier order
    ComplexVector filt(1);
    filt << 1.0;
    for (const Complex& r : ratios) {
      ComplexVector next = ComplexVector::Zero(filt.size() + 1);
      for (Eigen::Index i = 0; i < filt.size(); ++i) {
        next(i) += filt(i);
        next(i + 1) += -r * filt(i);
      }
      filt = next;
    }
    ComplexVector h = ComplexVector::Zero(f);
    for (const Complex& r : ratios) {
      Complex p(weight(rng), 0.0);
      for (int i = 0; i < f; ++i) {
        h(i) += p;
        p *= r;
      }
    }
    CHECK((toeplitz_full(h, k + 1) * filt).norm() <= 1e-10 * h.norm());
  }
}

TEST_CASE("min_right_singular_vector on diagonal matrices") {
  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = 3.0;
  auto [v, sigma] = min_right_singular_vector(d);
  CHECK(sigma == Catch::Approx(2.0).margin(1e-12));
  CHECK(std::abs(v(0)) == Catch::Approx(1.0).margin(1e-12));

  ComplexMatrix s = ComplexMatrix::Zero(2, 2);
  s(0, 0) = 1.0;
  auto [v2, sigma2] = min_right_singular_vector(s);
  CHECK(sigma2 == Catch::Approx(0.0).margin(1e-14));
  CHECK(std::abs(v2(1)) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("min_right_singular_vector matches a full SVD oracle") {
  auto rng = rng_for(31);
  for (int trial = 0; trial < 6; ++trial) {
    ComplexMatrix a(10, 4);
    for (Eigen::Index i = 0; i < a.size(); ++i)
      a.data()[i] = Complex(std::normal_distribution<double>()(rng),
                            std::normal_distribution<double>()(rng));
    auto [v, sigma] = min_right_singular_vector(a);
    CHECK(std::abs((a * v).norm() - sigma) <= 1e-12 * a.norm());

    Eigen::JacobiSVD<ComplexMatrix> svd(a, Eigen::ComputeThinV);
    const double sigma_ref = svd.singularValues().tail(1)(0);
    const ComplexVector v_ref = svd.matrixV().col(3);
    CHECK(sigma == Catch::Approx(sigma_ref).margin(1e-10 * a.norm()));
    CHECK(std::abs(v_ref.dot(v)) == Catch::Approx(1.0).margin(1e-8));
  }
}

TEST_CASE("no unit vector beats the minimum singular vector") {
  auto rng = rng_for(32);
  ComplexMatrix a(9, 5);
  for (Eigen::Index i = 0; i < a.size(); ++i)
    a.data()[i] = Complex(std::normal_distribution<double>()(rng),
                          std::normal_distribution<double>()(rng));
  auto [v, sigma] = min_right_singular_vector(a);
  const double bound = 1e-9 * a.norm();
  for (int trial = 0; trial < 1000; ++trial) {
    ComplexVector u = random_complex_vector(5, rng);
    u.normalize();
    CHECK((a * u).norm() + bound >= sigma);
  }
}

TEST_CASE("min_right_singular_vector input validation") {
  ComplexMatrix bad(2, 2);
  bad.setZero();
  bad(0, 0) = Complex(std::numeric_limits<double>::infinity(), 0.0);
  CHECK_THROWS_AS(min_right_singular_vector(bad), config_error);
}

TEST_CASE("banded minimum eigenpair agrees with a dense decomposition") {
  auto rng = rng_for(33);
  const int n = 24, kd = 3;
  ComplexMatrix dense = ComplexMatrix::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    dense(j, j) = 4.0 + std::normal_distribution<double>()(rng);
    for (int d = 1; d <= kd && j + d < n; ++d) {
      const Complex e(std::normal_distribution<double>()(rng),
                      std::normal_distribution<double>()(rng));
      dense(j + d, j) = e;
      dense(j, j + d) = std::conj(e);
    }
  }
  ComplexMatrix band(kd + 1, n);
  band.setZero();
  for (int j = 0; j < n; ++j)
    for (int d = 0; d <= kd && j + d < n; ++d) band(d, j) = dense(j + d, j);

  auto [lambda, v] = min_eigenpair_banded(n, kd, band);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(dense);
  CHECK(lambda == Catch::Approx(es.eigenvalues()(0)).margin(1e-11 * dense.norm()));
  CHECK(std::abs(es.eigenvectors().col(0).dot(v)) == Catch::Approx(1.0).margin(1e-8));
}

TEST_CASE("polynomial_roots on small closed forms") {
  ComplexVector a(2);
  a << 1.0, -1.0;
  const ComplexVector r = polynomial_roots(a);
  REQUIRE(r.size() == 1);
  CHECK(std::abs(r(0) - Complex(1.0)) < 1e-14);

  ComplexVector b(3);
  b << 2.0, -3.0, 1.0;
  ComplexVector want(2);
  want << Complex(1.0), Complex(2.0);
  CHECK(multiset_distance(polynomial_roots(b), want) < 1e-12);
}

TEST_CASE("construct-then-root round trip on unit-modulus roots") {
  auto rng = rng_for(41);
  for (int trial = 0; trial < 10; ++trial) {
    ComplexVector roots(5);
    for (Eigen::Index i = 0; i < roots.size(); ++i) roots(i) = random_unit(rng);
    const ComplexVector coeffs = polynomial_from_roots(roots);
    CHECK(multiset_distance(polynomial_roots(coeffs), roots) < 1e-10);
  }
}

TEST_CASE("roots satisfy the residual bound") {
  auto rng = rng_for(42);
  for (int trial = 0; trial < 10; ++trial) {
    const ComplexVector a = random_complex_vector(8, rng);
    const ComplexVector roots = polynomial_roots(a);
    const double norm_a = a.norm();
    for (Eigen::Index i = 0; i < roots.size(); ++i) {
      const double headroom =
          std::pow(std::max(1.0, std::abs(roots(i))), static_cast<double>(a.size() - 1));
      CHECK(std::abs(polynomial_eval(a, roots(i))) <= 1e-8 * norm_a * headroom);
    }
  }
}

TEST_CASE("polynomial_roots trims trailing noise and rejects degenerates") {
  ComplexVector padded(4);
  padded << 1.0, -1.0, 0.0, 1e-20;
  const ComplexVector r = polynomial_roots(padded);
  REQUIRE(r.size() == 1);
  CHECK(std::abs(r(0) - Complex(1.0)) < 1e-12);

  CHECK_THROWS_AS(polynomial_roots(ComplexVector::Zero(4)), numeric_error);
  ComplexVector constant(3);
  constant << 5.0, 0.0, 0.0;
  CHECK_THROWS_AS(polynomial_roots(constant), numeric_error);
}

TEST_CASE("vandermonde_weights recovers a single unit dirac") {
  const FrequencyGrid grid = make_frequency_grid(200.0, 2000.0, 11);
  ComplexVector roots(1);
  roots << Complex(1.0);
  const Spectrum h(ComplexVector::Ones(11), grid);
  const RealVector c = vandermonde_weights(roots, h, grid.f_start);
  REQUIRE(c.size() == 1);
  CHECK(c(0) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("vandermonde_weights inverts a synthesized two-echo channel") {
  const FrequencyGrid grid = make_frequency_grid(200.0, 2000.0, 11);
  const double tau_a = 0.8e-3, tau_b = 2.3e-3;
  ComplexVector h(grid.count);
  for (int i = 0; i < grid.count; ++i) {
    const double f = grid.frequency(i);
    h(i) = 0.7 * std::polar(1.0, -2.0 * std::numbers::pi * f * tau_a) +
           0.3 * std::polar(1.0, -2.0 * std::numbers::pi * f * tau_b);
  }
  ComplexVector roots(2);
  roots << std::polar(1.0, -2.0 * std::numbers::pi * grid.step * tau_a),
      std::polar(1.0, -2.0 * std::numbers::pi * grid.step * tau_b);
  const RealVector c = vandermonde_weights(roots, Spectrum(h, grid), grid.f_start);
  CHECK(c(0) == Catch::Approx(0.7).margin(1e-10));
  CHECK(c(1) == Catch::Approx(0.3).margin(1e-10));
}

TEST_CASE("vandermonde_weights rejects repeated roots and short spectra") {
  const FrequencyGrid grid = make_frequency_grid(200.0, 2000.0, 5);
  ComplexVector dup(2);
  dup << Complex(1.0), Complex(1.0);
  CHECK_THROWS_AS(vandermonde_weights(dup, Spectrum(ComplexVector::Ones(5), grid), 200.0),
                  numeric_error);
  const FrequencyGrid tiny = make_frequency_grid(200.0, 2000.0, 2);
  ComplexVector three(3);
  three << Complex(1.0), Complex(-1.0), Complex(0.0, 1.0);
  CHECK_THROWS_AS(vandermonde_weights(three, Spectrum(ComplexVector::Ones(2), tiny), 200.0),
                  config_error);
}
