// SPDX-License-Identifier: Apache-2.0
#ifndef MULAN_TYPES_HPP
#define MULAN_TYPES_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace mulan {

using Complex = std::complex<double>;
using RealVector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;

/// Raised on invalid arguments, malformed configuration or broken file input.
class config_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical routine cannot produce a meaningful result
/// (diverged solver, singular system, spectral floor violation, ...).
class numeric_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Finite real discrete-time signal together with its sample rate in Hz.
struct RealSignal {
  RealVector samples;
  double sample_rate = 0.0;

  RealSignal() = default;
  RealSignal(RealVector s, double fs) : samples(std::move(s)), sample_rate(fs) {
    if (samples.size() < 1) throw config_error("RealSignal: need at least one sample");
    if (!(sample_rate > 0.0)) throw config_error("RealSignal: sample rate must be positive");
    if (!samples.allFinite()) throw config_error("RealSignal: non-finite sample");
  }

  Eigen::Index size() const { return samples.size(); }
};

/// Arithmetic progression of analysis frequencies: f_i = f_start + i*step, i = 0..count-1.
struct FrequencyGrid {
  double f_start = 0.0;
  double step = 0.0;
  int count = 0;

  FrequencyGrid() = default;
  FrequencyGrid(double start, double delta, int n) : f_start(start), step(delta), count(n) {
    if (!(f_start > 0.0)) throw config_error("FrequencyGrid: f_start must be positive");
    if (!(step > 0.0)) throw config_error("FrequencyGrid: step must be positive");
    if (count < 1) throw config_error("FrequencyGrid: count must be >= 1");
  }

  double frequency(int i) const { return f_start + step * i; }
  double max_frequency() const { return frequency(count - 1); }

  bool operator==(const FrequencyGrid& o) const {
    return f_start == o.f_start && step == o.step && count == o.count;
  }
};

/// Complex values attached to a frequency grid.
struct Spectrum {
  ComplexVector values;
  FrequencyGrid grid;

  Spectrum() = default;
  Spectrum(ComplexVector v, FrequencyGrid g) : values(std::move(v)), grid(g) {
    if (values.size() != grid.count)
      throw config_error("Spectrum: value count does not match grid");
    if (!values.allFinite()) throw config_error("Spectrum: non-finite value");
  }

  Eigen::Index size() const { return values.size(); }
};

/// One channel's echoes: delays in seconds (sorted ascending) with nonnegative
/// weights co-indexed to the delays. Blind-recovery conventions can make
/// relative delays negative after normalization, so no range is enforced here;
/// absolute delays are assumed to live in the first half period 1/(2*step) of
/// the analysis grid.
struct EchoSet {
  std::vector<double> delays;
  std::vector<double> weights;

  EchoSet() = default;
  EchoSet(std::vector<double> d, std::vector<double> w)
      : delays(std::move(d)), weights(std::move(w)) {
    if (delays.size() != weights.size())
      throw config_error("EchoSet: delay/weight count mismatch");
    sort_by_delay();
  }

  std::size_t size() const { return delays.size(); }

  void sort_by_delay() {
    const std::size_t k = delays.size();
    std::vector<std::size_t> order(k);
    for (std::size_t i = 0; i < k; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return delays[a] < delays[b]; });
    std::vector<double> d(k), w(k);
    for (std::size_t i = 0; i < k; ++i) {
      d[i] = delays[order[i]];
      w[i] = weights[order[i]];
    }
    delays = std::move(d);
    weights = std::move(w);
  }
};

}  // namespace mulan

#endif  // MULAN_TYPES_HPP
