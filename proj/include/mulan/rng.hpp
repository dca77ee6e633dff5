// SPDX-License-Identifier: Apache-2.0
#ifndef MULAN_RNG_HPP
#define MULAN_RNG_HPP

#include <cstdint>
#include <random>

#include "mulan/types.hpp"

namespace mulan {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Stream-split a base seed: independent deterministic sub-seed per index.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  return splitmix64(base ^ splitmix64(index + 1));
}

/// Circularly-symmetric standard complex Gaussian vector: real and imaginary
/// parts i.i.d. N(0, 1/2) so that E|z_i|^2 = 1.
inline ComplexVector random_complex_gaussian(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
  ComplexVector z(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    z(i) = Complex(re, im);
  }
  return z;
}

}  // namespace mulan

#endif  // MULAN_RNG_HPP
