// SPDX-License-Identifier: Apache-2.0
// Shared forward-synthesis utilities for the test suites. They evaluate the
// frequency-domain echo model directly and independently of the library's
// recovery path.
#ifndef MULAN_TEST_HELPERS_HPP
#define MULAN_TEST_HELPERS_HPP

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "mulan/types.hpp"

namespace mulan_test {

using mulan::Complex;
using mulan::ComplexVector;
using mulan::EchoSet;
using mulan::FrequencyGrid;
using mulan::Spectrum;

/// h(f_i) = sum_k c_k exp(-2*pi*i*f_i*tau_k), evaluated term by term.
inline Spectrum synth_filter_spectrum(const EchoSet& echoes, const FrequencyGrid& grid) {
  ComplexVector h = ComplexVector::Zero(grid.count);
  for (int i = 0; i < grid.count; ++i) {
    const double f = grid.frequency(i);
    for (std::size_t k = 0; k < echoes.size(); ++k)
      h(i) += echoes.weights[k] *
              std::polar(1.0, -2.0 * std::numbers::pi * f * echoes.delays[k]);
  }
  return Spectrum(std::move(h), grid);
}

/// Random source spectrum with moduli in [0.5, 2]; never vanishes on the grid.
inline Spectrum random_source_spectrum(const FrequencyGrid& grid, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> mag(0.5, 2.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  ComplexVector s(grid.count);
  for (int i = 0; i < grid.count; ++i) s(i) = std::polar(mag(rng), phase(rng));
  return Spectrum(std::move(s), grid);
}

/// Measurement spectra x_m = h_m .* s for echo sets synthesized exactly.
inline std::vector<Spectrum> synth_measurements(const std::vector<EchoSet>& echoes,
                                                const Spectrum& source) {
  std::vector<Spectrum> x;
  x.reserve(echoes.size());
  for (const EchoSet& e : echoes) {
    const Spectrum h = synth_filter_spectrum(e, source.grid);
    x.emplace_back(h.values.cwiseProduct(source.values), source.grid);
  }
  return x;
}

/// K delays uniform in [lo, hi] with pairwise separation >= min_sep, paired
/// with weights uniform in [w_lo, w_hi].
inline EchoSet random_echoes(int k, double lo, double hi, double min_sep, double w_lo,
                             double w_hi, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> delay(lo, hi);
  std::uniform_real_distribution<double> weight(w_lo, w_hi);
  std::vector<double> delays;
  while (static_cast<int>(delays.size()) < k) {
    const double d = delay(rng);
    bool ok = true;
    for (double other : delays)
      if (std::abs(other - d) < min_sep) ok = false;
    if (ok) delays.push_back(d);
  }
  std::vector<double> weights(static_cast<std::size_t>(k));
  for (double& w : weights) w = weight(rng);
  return EchoSet(std::move(delays), std::move(weights));
}

}  // namespace mulan_test

#endif  // MULAN_TEST_HELPERS_HPP
