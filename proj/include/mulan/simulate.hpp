// SPDX-License-Identifier: Apache-2.0
#ifndef MULAN_SIMULATE_HPP
#define MULAN_SIMULATE_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "mulan/dft.hpp"
#include "mulan/fft.hpp"
#include "mulan/rng.hpp"
#include "mulan/types.hpp"

namespace mulan {

/// Rectangular room with one source and M microphones. A single absorption
/// coefficient applies to all six surfaces.
struct ShoeboxSpec {
  std::array<double, 3> room_dims{};
  std::array<double, 3> source_pos{};
  std::vector<std::array<double, 3>> mic_pos;
  double absorption = 0.2;
  double sound_speed = 343.0;

  void validate() const {
    for (double d : room_dims)
      if (!(d > 0.0)) throw config_error("ShoeboxSpec: room dimensions must be positive");
    if (!(absorption >= 0.0 && absorption <= 1.0))
      throw config_error("ShoeboxSpec: absorption must lie in [0, 1]");
    if (!(sound_speed > 0.0)) throw config_error("ShoeboxSpec: sound speed must be positive");
    auto inside = [&](const std::array<double, 3>& p) {
      for (int i = 0; i < 3; ++i)
        if (!(p[i] > 0.0 && p[i] < room_dims[i])) return false;
      return true;
    };
    if (!inside(source_pos)) throw config_error("ShoeboxSpec: source outside the room");
    if (mic_pos.empty()) throw config_error("ShoeboxSpec: need at least one microphone");
    for (const auto& m : mic_pos)
      if (!inside(m)) throw config_error("ShoeboxSpec: microphone outside the room");
  }
};

enum class GridType { on_grid, off_grid };

/// Ground truth plus synthesized measurements for one experiment.
struct EchoScenario {
  std::vector<EchoSet> echoes;            // continuous-time truth, per channel
  RealSignal source;                      // reference source recording, length N
  std::vector<RealSignal> measurements;   // M signals of length N
  GridType grid_type = GridType::off_grid;
  int filter_length = 0;                  // on-grid: discrete filter length L
  std::vector<RealVector> sparse_filters; // on-grid: true taps
  double weight_rescale = 1.0;            // factor applied to keep weights <= 1
};

/// Direct path plus one image source per wall: 7 echoes per microphone.
/// Image weights are rho^b / distance with rho = sqrt(1 - absorption) and
/// b the reflection count (0 or 1 here).
inline std::vector<EchoSet> shoebox_first_order(const ShoeboxSpec& spec) {
  spec.validate();
  const double rho = std::sqrt(1.0 - spec.absorption);
  std::vector<EchoSet> out;
  out.reserve(spec.mic_pos.size());
  for (const auto& mic : spec.mic_pos) {
    std::vector<std::array<double, 3>> images;
    images.push_back(spec.source_pos);  // direct
    for (int axis = 0; axis < 3; ++axis) {
      std::array<double, 3> low = spec.source_pos;
      low[axis] = -spec.source_pos[axis];
      images.push_back(low);
      std::array<double, 3> high = spec.source_pos;
      high[axis] = 2.0 * spec.room_dims[axis] - spec.source_pos[axis];
      images.push_back(high);
    }
    std::vector<double> delays, weights;
    for (std::size_t i = 0; i < images.size(); ++i) {
      double d2 = 0.0;
      for (int c = 0; c < 3; ++c) d2 += (images[i][c] - mic[c]) * (images[i][c] - mic[c]);
      const double dist = std::sqrt(d2);
      if (!(dist > 1e-9)) throw config_error("shoebox_first_order: source on a microphone");
      delays.push_back(dist / spec.sound_speed);
      weights.push_back((i == 0 ? 1.0 : rho) / dist);
    }
    out.emplace_back(std::move(delays), std::move(weights));
  }
  return out;
}

/// Band-limited burst standing in for a speech source: random tones confined
/// to [f_lo, f_hi] under a Kaiser window. Regenerates (deterministically) until
/// the spectral magnitude over the band keeps min >= 1e-3 * max, so any
/// analysis grid inside the band sees a usable floor.
inline RealSignal synth_bandlimited_source(int n, double fs, double f_lo, double f_hi,
                                           std::uint64_t seed) {
  if (n < 16) throw config_error("synth_bandlimited_source: signal too short");
  if (!(f_lo > 0.0 && f_hi > f_lo && f_hi < fs / 2.0))
    throw config_error("synth_bandlimited_source: invalid band");
  constexpr double kBeta = 20.0;  // Kaiser shape: ~-190 dB leakage floor
  const double i0_beta = std::cyl_bessel_i(0.0, kBeta);
  // Tone density at roughly twice the band's Fourier-mode count, so the
  // window smear (~1/T wide) leaves no spectral gaps between tones.
  const int tones =
      std::max(128, static_cast<int>(std::ceil(2.0 * (f_hi - f_lo) * n / fs)));

  for (int attempt = 0; attempt < 64; ++attempt) {
    std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(attempt)));
    std::uniform_real_distribution<double> tone(f_lo, f_hi);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    std::normal_distribution<double> amp(0.0, 1.0);
    std::vector<double> nu(tones), ph(tones), al(tones);
    for (int q = 0; q < tones; ++q) {
      nu[q] = tone(rng);
      ph[q] = phase(rng);
      al[q] = amp(rng);
    }
    RealVector x(n);
    const double half = (n - 1) / 2.0;
    for (int i = 0; i < n; ++i) {
      const double u = (i - half) / half;  // [-1, 1]
      const double window = std::cyl_bessel_i(0.0, kBeta * std::sqrt(1.0 - u * u)) / i0_beta;
      double acc = 0.0;
      const double t = i / fs;
      for (int q = 0; q < tones; ++q)
        acc += al[q] * std::cos(2.0 * std::numbers::pi * nu[q] * t + ph[q]);
      x(i) = window * acc;
    }
    x /= x.cwiseAbs().maxCoeff();
    const RealSignal candidate(x, fs);

    // probe the whole band densely; 2 Hz resolves the window's ~7 Hz smear
    const int probes = std::max(64, static_cast<int>((f_hi - f_lo) / 2.0));
    const Spectrum probe =
        generalized_dft(candidate, make_frequency_grid(f_lo, f_hi, probes));
    const RealVector mag = probe.values.cwiseAbs();
    if (mag.minCoeff() >= 1e-3 * mag.maxCoeff()) return candidate;
  }
  throw numeric_error("synth_bandlimited_source: spectral floor not reached");
}

/// Sum of fractionally delayed copies of the source, rendered through a phase
/// ramp on a zero-padded transform so circular wrap-around stays below 1e-9.
/// The delayed copies (plus padding margin) must fit in the n_out window.
inline std::vector<RealSignal> render_offgrid(const RealSignal& source,
                                              const std::vector<EchoSet>& echoes,
                                              int n_out) {
  if (echoes.empty()) throw config_error("render_offgrid: no channels");
  const double fs = source.sample_rate;
  double max_delay = 0.0;
  for (const EchoSet& e : echoes)
    for (double d : e.delays) {
      if (d < 0.0) throw config_error("render_offgrid: negative delay");
      max_delay = std::max(max_delay, d);
    }
  const int delay_span = static_cast<int>(std::ceil(max_delay * fs));
  if (static_cast<int>(source.size()) + delay_span > n_out)
    throw config_error("render_offgrid: delays exceed the padded window");
  const int padded = detail::next_fast_size(n_out + delay_span + 1024);

  RealVector buf = RealVector::Zero(padded);
  buf.head(source.size()) = source.samples;
  const ComplexVector bins = detail::rfft(buf);

  std::vector<RealSignal> out;
  out.reserve(echoes.size());
  for (const EchoSet& e : echoes) {
    ComplexVector shifted(bins.size());
    for (Eigen::Index b = 0; b < bins.size(); ++b) {
      const double f = fs * static_cast<double>(b) / padded;
      Complex h(0.0, 0.0);
      for (std::size_t k = 0; k < e.size(); ++k)
        h += e.weights[k] * std::polar(1.0, -2.0 * std::numbers::pi * f * e.delays[k]);
      shifted(b) = bins(b) * h;
    }
    shifted(bins.size() - 1) = Complex(shifted(bins.size() - 1).real(), 0.0);
    const RealVector full = detail::irfft(shifted, padded);
    out.emplace_back(RealVector(full.head(n_out)), fs);
  }
  return out;
}

/// Valid-region discrete convolution x_m = h_m * s (source length D, filter
/// length L, output length D-L+1). Zero taps are skipped, so sparse filters
/// render in O(N*K).
inline std::vector<RealSignal> render_ongrid(const RealSignal& source,
                                             const std::vector<RealVector>& sparse_filters) {
  if (sparse_filters.empty()) throw config_error("render_ongrid: no filters");
  const Eigen::Index d = source.size();
  const Eigen::Index l = sparse_filters.front().size();
  if (l < 1 || l > d) throw config_error("render_ongrid: filter length exceeds source");
  std::vector<RealSignal> out;
  out.reserve(sparse_filters.size());
  for (const RealVector& h : sparse_filters) {
    if (h.size() != l) throw config_error("render_ongrid: filter lengths differ");
    RealVector x = RealVector::Zero(d - l + 1);
    for (Eigen::Index j = 0; j < l; ++j) {
      if (h(j) == 0.0) continue;
      for (Eigen::Index n = 0; n < x.size(); ++n) x(n) += h(j) * source.samples(l - 1 + n - j);
    }
    out.emplace_back(std::move(x), source.sample_rate);
  }
  return out;
}

/// Sinc-smoothed, sampled version of a continuous echo stream:
/// h(n) = sum_k c_k sinc(n - fs*tau_k) for n = 0..L-1. Off-grid delays make
/// this non-sparse; its peaks do not sit on the true echoes.
inline RealVector sample_smoothed_filter(const EchoSet& echoes, double fs, int l) {
  if (l < 1) throw config_error("sample_smoothed_filter: need L >= 1");
  auto sinc = [](double t) {
    if (t == 0.0) return 1.0;
    const double a = std::numbers::pi * t;
    return std::sin(a) / a;
  };
  RealVector h = RealVector::Zero(l);
  for (int n = 0; n < l; ++n)
    for (std::size_t k = 0; k < echoes.size(); ++k)
      h(n) += echoes.weights[k] * sinc(n - fs * echoes.delays[k]);
  return h;
}

// ---------------------------------------------------------------------------
// Scenario builders
// ---------------------------------------------------------------------------

struct RoomSimParams {
  std::array<double, 3> dims_lo{4.0, 6.0, 8.0};
  std::array<double, 3> dims_hi{5.0, 7.0, 9.0};
  double absorption = 0.2;
  double sound_speed = 343.0;
  int mics = 2;
  double wall_margin = 0.5;       // keep positions away from surfaces
  double min_source_mic = 0.5;    // and the source off the microphones
  double min_mic_mic = 0.3;
  double min_delay_sep = 1.0 / 16000.0;  // reject near-coincident echoes
};

struct SourceParams {
  double f_lo = 150.0;
  double f_hi = 2100.0;
};

namespace detail {

inline std::array<double, 3> random_point(const std::array<double, 3>& dims, double margin,
                                          std::mt19937_64& rng) {
  std::array<double, 3> p{};
  for (int i = 0; i < 3; ++i) {
    std::uniform_real_distribution<double> coord(margin, dims[i] - margin);
    p[i] = coord(rng);
  }
  return p;
}

inline double distance(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  double d2 = 0.0;
  for (int i = 0; i < 3; ++i) d2 += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(d2);
}

inline bool delays_separated(const std::vector<EchoSet>& echoes, double min_sep) {
  for (const EchoSet& e : echoes)
    for (std::size_t i = 1; i < e.size(); ++i)
      if (e.delays[i] - e.delays[i - 1] < min_sep) return false;
  return true;
}

/// Divide all weights by the maximum if any exceeds 1; returns the factor.
inline double rescale_weights(std::vector<EchoSet>& echoes) {
  double max_w = 0.0;
  for (const EchoSet& e : echoes)
    for (double w : e.weights) max_w = std::max(max_w, w);
  if (max_w <= 1.0) return 1.0;
  for (EchoSet& e : echoes)
    for (double& w : e.weights) w /= max_w;
  return 1.0 / max_w;
}

inline ShoeboxSpec random_room(const RoomSimParams& params, std::mt19937_64& rng) {
  ShoeboxSpec spec;
  for (int i = 0; i < 3; ++i) {
    std::uniform_real_distribution<double> dim(params.dims_lo[i], params.dims_hi[i]);
    spec.room_dims[i] = dim(rng);
  }
  spec.absorption = params.absorption;
  spec.sound_speed = params.sound_speed;
  for (int attempt = 0; attempt < 256; ++attempt) {
    spec.source_pos = random_point(spec.room_dims, params.wall_margin, rng);
    spec.mic_pos.clear();
    bool ok = true;
    for (int m = 0; m < params.mics && ok; ++m) {
      const auto p = random_point(spec.room_dims, params.wall_margin, rng);
      if (distance(p, spec.source_pos) < params.min_source_mic) ok = false;
      for (const auto& q : spec.mic_pos)
        if (distance(p, q) < params.min_mic_mic) ok = false;
      if (ok) spec.mic_pos.push_back(p);
    }
    if (ok) return spec;
  }
  throw numeric_error("random_room: could not place source and microphones");
}

}  // namespace detail

namespace detail {

/// Shared tail of the off-grid builders: pick the burst (synthesized, or the
/// caller-provided override cut to fit), render, pad the source reference.
inline EchoScenario assemble_offgrid(int n, double fs, std::vector<EchoSet> echoes,
                                     const SourceParams& source_params, std::uint64_t seed,
                                     const RealSignal* source_override) {
  double max_delay = 0.0;
  for (const EchoSet& e : echoes) max_delay = std::max(max_delay, e.delays.back());
  const int n_src = n - static_cast<int>(std::ceil(max_delay * fs)) - 64;
  if (n_src < 512) throw numeric_error("assemble_offgrid: window too short for the delays");

  EchoScenario scenario;
  scenario.grid_type = GridType::off_grid;
  scenario.weight_rescale = rescale_weights(echoes);
  RealSignal burst;
  if (source_override != nullptr) {
    if (source_override->sample_rate != fs)
      throw config_error("assemble_offgrid: source sample rate mismatch");
    const Eigen::Index len = std::min<Eigen::Index>(source_override->size(), n_src);
    burst = RealSignal(source_override->samples.head(len), fs);
  } else {
    burst = synth_bandlimited_source(n_src, fs, source_params.f_lo, source_params.f_hi,
                                     derive_seed(seed, 0xB0));
  }
  scenario.measurements = render_offgrid(burst, echoes, n);
  RealVector padded = RealVector::Zero(n);
  padded.head(burst.size()) = burst.samples;
  scenario.source = RealSignal(std::move(padded), fs);
  scenario.echoes = std::move(echoes);
  return scenario;
}

}  // namespace detail

/// Off-grid room scenario: first-order image-source echoes rendered through
/// exact fractional delays of a band-limited burst (or a caller-provided
/// source signal, e.g. from a WAV file).
inline EchoScenario make_shoebox_scenario(int n, double fs, const RoomSimParams& params,
                                          const SourceParams& source_params,
                                          std::uint64_t seed,
                                          const RealSignal* source_override = nullptr) {
  std::mt19937_64 rng(derive_seed(seed, 0xA001));
  for (int attempt = 0; attempt < 256; ++attempt) {
    const ShoeboxSpec spec = detail::random_room(params, rng);
    std::vector<EchoSet> echoes = shoebox_first_order(spec);
    if (!detail::delays_separated(echoes, params.min_delay_sep)) continue;
    double max_delay = 0.0;
    for (const EchoSet& e : echoes) max_delay = std::max(max_delay, e.delays.back());
    if (n - static_cast<int>(std::ceil(max_delay * fs)) - 64 < 512) continue;
    return detail::assemble_offgrid(n, fs, std::move(echoes), source_params,
                                    derive_seed(seed, 0xE000 + attempt), source_override);
  }
  throw numeric_error("make_shoebox_scenario: no valid geometry found");
}

/// On-grid scenario: room echo layout quantized to the sampling grid and
/// rendered by exact sparse convolution. The source burst is placed after
/// L-1 samples of silence so every delayed copy stays inside the window and
/// the frequency-domain model holds for the stored source reference.
inline EchoScenario make_ongrid_scenario(int n, double fs, const RoomSimParams& params,
                                         const SourceParams& source_params,
                                         std::uint64_t seed) {
  std::mt19937_64 rng(derive_seed(seed, 0xA002));
  for (int attempt = 0; attempt < 256; ++attempt) {
    const ShoeboxSpec spec = detail::random_room(params, rng);
    std::vector<EchoSet> continuous = shoebox_first_order(spec);

    std::vector<std::vector<int>> taps(continuous.size());
    bool ok = true;
    int max_tap = 0;
    int min_tap = std::numeric_limits<int>::max();
    for (std::size_t m = 0; m < continuous.size() && ok; ++m) {
      for (double d : continuous[m].delays) {
        const int t = static_cast<int>(std::lround(d * fs));
        taps[m].push_back(t);
        max_tap = std::max(max_tap, t);
        min_tap = std::min(min_tap, t);
      }
      std::sort(taps[m].begin(), taps[m].end());
      for (std::size_t i = 1; i < taps[m].size(); ++i)
        if (taps[m][i] - taps[m][i - 1] < 2) ok = false;  // keep peaks resolvable
    }
    if (!ok) continue;
    // Shift-canonical tap layout: the blind problem only determines the pair
    // up to a common delay, and common leading zeros would leave the
    // cross-relation system rank-deficient even at the true length.
    const int l = max_tap - min_tap + 1;
    const int n_core = n - l - 64;
    if (n_core < 512) continue;

    std::vector<EchoSet> echoes;
    std::vector<RealVector> filters;
    for (std::size_t m = 0; m < continuous.size(); ++m) {
      std::vector<double> delays, weights;
      RealVector h = RealVector::Zero(l);
      // weights follow the continuous layout, delays snap to the grid
      for (std::size_t i = 0; i < continuous[m].size(); ++i) {
        const int t =
            static_cast<int>(std::lround(continuous[m].delays[i] * fs)) - min_tap;
        delays.push_back(t / fs);
        weights.push_back(continuous[m].weights[i]);
        h(t) = continuous[m].weights[i];
      }
      echoes.emplace_back(std::move(delays), std::move(weights));
      filters.push_back(std::move(h));
    }
    const double rescale = detail::rescale_weights(echoes);
    if (rescale != 1.0)
      for (RealVector& h : filters) h *= rescale;

    const RealSignal core = synth_bandlimited_source(
        n_core, fs, source_params.f_lo, source_params.f_hi, derive_seed(seed, 0xC000 + attempt));
    RealVector full = RealVector::Zero(n + l - 1);
    full.segment(l - 1, n_core) = core.samples;
    const RealSignal padded_source(full, fs);

    EchoScenario scenario;
    scenario.grid_type = GridType::on_grid;
    scenario.filter_length = l;
    scenario.weight_rescale = rescale;
    scenario.measurements = render_ongrid(padded_source, filters);
    scenario.sparse_filters = std::move(filters);
    scenario.source = RealSignal(RealVector(full.segment(l - 1, n)), fs);
    scenario.echoes = std::move(echoes);
    return scenario;
  }
  throw numeric_error("make_ongrid_scenario: no valid tap layout found");
}

struct SyntheticParams {
  double delay_lo = 1e-3;
  double delay_hi = 40e-3;
  double min_delay_sep = 0.5e-3;
  double weight_lo = 0.2;
  double weight_hi = 1.0;
};

/// Off-grid scenario with arbitrary K and M: independent random echo sets per
/// channel, rendered like the room case. Used by the parameter sweeps.
inline EchoScenario make_synthetic_scenario(int n, double fs, int k, int m,
                                            const SyntheticParams& params,
                                            const SourceParams& source_params,
                                            std::uint64_t seed,
                                            const RealSignal* source_override = nullptr) {
  if (k < 1 || m < 1) throw config_error("make_synthetic_scenario: need K >= 1, M >= 1");
  if (n - static_cast<int>(std::ceil(params.delay_hi * fs)) - 64 < 512)
    throw config_error("make_synthetic_scenario: window too short");
  std::mt19937_64 rng(derive_seed(seed, 0xA003));
  std::uniform_real_distribution<double> delay(params.delay_lo, params.delay_hi);
  std::uniform_real_distribution<double> weight(params.weight_lo, params.weight_hi);

  std::vector<EchoSet> echoes;
  for (int ch = 0; ch < m; ++ch) {
    std::vector<double> delays;
    int guard = 0;
    while (static_cast<int>(delays.size()) < k) {
      if (++guard > 10000)
        throw numeric_error("make_synthetic_scenario: cannot separate delays");
      const double d = delay(rng);
      bool ok = true;
      for (double other : delays)
        if (std::abs(other - d) < params.min_delay_sep) ok = false;
      if (ok) delays.push_back(d);
    }
    std::vector<double> weights(static_cast<std::size_t>(k));
    for (double& w : weights) w = weight(rng);
    echoes.emplace_back(std::move(delays), std::move(weights));
  }
  return detail::assemble_offgrid(n, fs, std::move(echoes), source_params,
                                  derive_seed(seed, 0xD0), source_override);
}

/// Spectra of all measurement channels on one analysis grid.
inline std::vector<Spectrum> measurement_spectra(const EchoScenario& scenario,
                                                 const FrequencyGrid& grid) {
  std::vector<Spectrum> x;
  x.reserve(scenario.measurements.size());
  for (const RealSignal& s : scenario.measurements) x.push_back(generalized_dft(s, grid));
  return x;
}

}  // namespace mulan

#endif  // MULAN_SIMULATE_HPP
