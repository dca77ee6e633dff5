// SPDX-License-Identifier: Apache-2.0
#ifndef MULAN_DFT_HPP
#define MULAN_DFT_HPP

#include <cmath>
#include <numbers>

#include "mulan/types.hpp"

namespace mulan {

/// Grid of `count` equally spaced frequencies covering [f_min, f_max].
inline FrequencyGrid make_frequency_grid(double f_min, double f_max, int count) {
  if (!(f_min > 0.0)) throw config_error("make_frequency_grid: f_min must be positive");
  if (!(f_max > f_min)) throw config_error("make_frequency_grid: need f_max > f_min");
  if (count < 2) throw config_error("make_frequency_grid: need count >= 2");
  return FrequencyGrid(f_min, (f_max - f_min) / (count - 1), count);
}

/// Discrete Fourier sum X(f) = sum_n x(n) exp(-2*pi*i*f*n/Fs) evaluated by
/// direct summation at each grid frequency. The grid is generally off the
/// canonical N-point bin grid, so no FFT applies; F*N complex multiply-adds
/// are cheap at the sizes used here.
inline Spectrum generalized_dft(const RealSignal& signal, const FrequencyGrid& grid) {
  if (grid.max_frequency() > signal.sample_rate / 2.0)
    throw config_error("generalized_dft: grid exceeds Nyquist frequency");
  const Eigen::Index n_samples = signal.size();
  ComplexVector values(grid.count);
  for (int i = 0; i < grid.count; ++i) {
    const double cycles_per_sample = grid.frequency(i) / signal.sample_rate;
    Complex acc(0.0, 0.0);
    for (Eigen::Index n = 0; n < n_samples; ++n) {
      const double turns = std::fmod(cycles_per_sample * static_cast<double>(n), 1.0);
      acc += signal.samples[n] * std::polar(1.0, -2.0 * std::numbers::pi * turns);
    }
    values[i] = acc;
  }
  return Spectrum(std::move(values), grid);
}

}  // namespace mulan

#endif  // MULAN_DFT_HPP
