// SPDX-License-Identifier: Apache-2.0
#ifndef MULAN_SOLVER_HPP
#define MULAN_SOLVER_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <utility>
#include <vector>

#include "mulan/annihilation.hpp"
#include "mulan/eig.hpp"
#include "mulan/poly.hpp"
#include "mulan/rng.hpp"
#include "mulan/types.hpp"
#include "mulan/vandermonde.hpp"

namespace mulan {

struct MulanConfig {
  int n_restarts = 20;
  int max_iter = 1000;
  double conv_thresh = 1e-3;  // relative cost decrease below which a run stops
  std::uint64_t rng_seed = 0;
  // Rescale all filter roots to unit modulus after each filter update. Off by
  // default; with it on the cost is no longer guaranteed non-increasing.
  bool renormalize_root_modulus = false;

  void validate() const {
    if (n_restarts < 1) throw config_error("MulanConfig: n_restarts must be >= 1");
    if (max_iter < 1) throw config_error("MulanConfig: max_iter must be >= 1");
    if (!(conv_thresh > 0.0 && conv_thresh < 1.0))
      throw config_error("MulanConfig: conv_thresh must lie in (0, 1)");
  }
};

struct SolveResult {
  std::vector<EchoSet> echoes;  // per channel, normalized (tau_00 = 0, c_00 = 1)
  Spectrum z_estimate;
  double final_cost = 0.0;
  int iterations = 0;
  int best_restart = 0;
  // Half-step cost sequence of every restart (filter update, then z update,
  // per iteration); diverged restarts keep their partial trace.
  std::vector<std::vector<double>> cost_traces;
};

namespace detail {

inline void check_common_grid(const std::vector<Spectrum>& x) {
  if (x.empty()) throw config_error("need at least one channel");
  for (const Spectrum& s : x)
    if (!(s.grid == x.front().grid)) throw config_error("channel grids differ");
}

}  // namespace detail

/// Rescale all channels by one common factor so that sum_m ||x_m||^2 = M.
/// The solution is unaffected (z and the filters are unit-norm, weights are
/// fixed by the c_00 = 1 convention); it keeps cost magnitudes comparable
/// across scenarios. Returns the multiplier applied.
inline double normalize_channel_scale(std::vector<Spectrum>& x) {
  detail::check_common_grid(x);
  double energy = 0.0;
  for (const Spectrum& s : x) energy += s.values.squaredNorm();
  if (!(energy > 0.0)) throw numeric_error("normalize_channel_scale: zero-energy channels");
  const double g = std::sqrt(static_cast<double>(x.size()) / energy);
  for (Spectrum& s : x) s.values *= g;
  return g;
}

/// Blind annihilation cost C(z, a) = sum_m ||Toep(x_m .* z) rev(a_m)||^2.
inline double mulan_cost(const Spectrum& z, const std::vector<AnnihilatingFilter>& filters,
                         const std::vector<Spectrum>& x) {
  detail::check_common_grid(x);
  if (filters.size() != x.size()) throw config_error("mulan_cost: filter/channel mismatch");
  const Eigen::Index f = z.size();
  if (f != x.front().size()) throw config_error("mulan_cost: z length mismatch");
  double acc = 0.0;
  for (std::size_t m = 0; m < x.size(); ++m) {
    if (filters[m].coeffs.size() != filters[0].coeffs.size() || filters[m].coeffs.size() > f)
      throw config_error("mulan_cost: bad filter length");
    acc += detail::annihilation_residual_sq(x[m].values.cwiseProduct(z.values),
                                            filters[m].coeffs);
  }
  return acc;
}

/// Exact per-channel filter refresh: each a_m is the unit-norm minimizer of
/// the annihilation residual of x_m .* z.
inline std::vector<AnnihilatingFilter> update_filters(const Spectrum& z,
                                                      const std::vector<Spectrum>& x, int k) {
  detail::check_common_grid(x);
  if (x.front().size() < 2 * k + 1) throw config_error("update_filters: need F >= 2K+1");
  std::vector<AnnihilatingFilter> filters;
  filters.reserve(x.size());
  for (const Spectrum& xm : x) {
    const ComplexVector h = xm.values.cwiseProduct(z.values);
    double lambda = 0.0;
    ComplexVector coeffs;
    detail::smallest_gram_eigenpair(detail::annihilation_gram(h, k), lambda, coeffs);
    coeffs.normalize();
    filters.emplace_back(std::move(coeffs));
  }
  return filters;
}

/// Exact z refresh: unit-norm minimizer of ||Q z||^2 where Q stacks the M
/// banded blocks Toep_0(rev(a_m)) Diag(x_m) of shape (F-K) x F. Q^H Q is
/// Hermitian banded with bandwidth K, solved for its smallest eigenpair.
inline Spectrum update_z(const std::vector<AnnihilatingFilter>& filters,
                         const std::vector<Spectrum>& x) {
  detail::check_common_grid(x);
  if (filters.size() != x.size()) throw config_error("update_z: filter/channel mismatch");
  const int f = static_cast<int>(x.front().size());
  const int k = filters.front().order();
  for (const AnnihilatingFilter& a : filters)
    if (a.order() != k) throw config_error("update_z: filter lengths differ");
  if (f < k + 1) throw config_error("update_z: filter longer than spectrum");

  // Upper band entries A(p, p+d) of Q^H Q; stored conjugated in LAPACK lower
  // band layout band(d, j) = A(j+d, j).
  ComplexMatrix band = ComplexMatrix::Zero(k + 1, f);
  const int last_row = f - k - 1;  // residual row index bound
  for (std::size_t m = 0; m < x.size(); ++m) {
    const ComplexVector& a = filters[m].coeffs;
    const ComplexVector& xv = x[m].values;
    for (int d = 0; d <= k; ++d) {
      for (int p = 0; p + d < f; ++p) {
        const int lo = std::max(0, p - last_row);
        const int hi = std::min(k - d, p);
        if (lo > hi) continue;
        Complex s(0.0, 0.0);
        for (int i = lo; i <= hi; ++i) s += std::conj(a(i)) * a(i + d);
        band(d, p) += std::conj(std::conj(xv(p)) * xv(p + d) * s);
      }
    }
  }
  auto [lambda, zvec] = min_eigenpair_banded(f, k, band);
  (void)lambda;
  return Spectrum(std::move(zvec), x.front().grid);
}

/// Undo the common circular delay shift left by the root-scaling ambiguity:
/// rotate all delays (modulo one period) so they start right after the
/// largest circular gap. When the true delays occupy less than half a period
/// this recovers their relative layout exactly.
inline std::vector<EchoSet> canonicalize_delay_wrap(std::vector<EchoSet> echoes,
                                                    double period) {
  std::vector<double> all;
  for (const EchoSet& e : echoes) all.insert(all.end(), e.delays.begin(), e.delays.end());
  if (all.empty()) return echoes;
  std::sort(all.begin(), all.end());
  double best_gap = all.front() + period - all.back();
  double start = all.front();
  for (std::size_t i = 1; i < all.size(); ++i) {
    const double gap = all[i] - all[i - 1];
    if (gap > best_gap) {
      best_gap = gap;
      start = all[i];
    }
  }
  for (EchoSet& e : echoes) {
    for (double& d : e.delays) {
      d -= start;
      if (d < 0.0) d += period;
    }
    e.sort_by_delay();
  }
  return echoes;
}

/// Fix the global shift/scale ambiguity: the first (smallest-delay) echo of
/// channel 1 is moved to tau = 0 with weight 1; every other delay and weight
/// follows.
inline std::vector<EchoSet> normalize_solution(std::vector<EchoSet> echoes) {
  if (echoes.empty() || echoes.front().size() == 0)
    throw config_error("normalize_solution: first channel is empty");
  const double ref_delay = echoes.front().delays.front();
  const double ref_weight = echoes.front().weights.front();
  if (!(ref_weight > 0.0)) throw numeric_error("normalize_solution: zero reference weight");
  for (EchoSet& e : echoes) {
    for (double& d : e.delays) d -= ref_delay;
    for (double& w : e.weights) w /= ref_weight;
    e.sort_by_delay();
  }
  return echoes;
}

namespace detail {

inline AnnihilatingFilter project_roots_to_circle(const AnnihilatingFilter& filter) {
  ComplexVector roots;
  try {
    roots = polynomial_roots(filter.coeffs);
  } catch (const numeric_error&) {
    return filter;  // degenerate: leave untouched
  }
  if (roots.size() != filter.order()) return filter;
  for (Eigen::Index i = 0; i < roots.size(); ++i) {
    const double mag = std::abs(roots(i));
    if (mag > 0.0) roots(i) /= mag;
  }
  ComplexVector coeffs = polynomial_from_roots(roots);
  coeffs.normalize();
  return AnnihilatingFilter(std::move(coeffs));
}

struct RestartOutcome {
  ComplexVector z;
  std::vector<AnnihilatingFilter> filters;
  double cost = std::numeric_limits<double>::infinity();
  int iterations = 0;
  std::vector<double> trace;
  bool diverged = false;
};

}  // namespace detail

/// Alternating minimization over (z, a_1..a_M) from several random starts;
/// the run with the lowest final cost wins (ties go to the lowest restart
/// index) and its filters are converted to normalized echo sets.
inline SolveResult mulan_solve(const std::vector<Spectrum>& x, int k,
                               const MulanConfig& config) {
  config.validate();
  detail::check_common_grid(x);
  if (k < 1) throw config_error("mulan_solve: need K >= 1");
  const Eigen::Index f = x.front().size();
  if (f < 2 * k + 1) throw config_error("mulan_solve: need F >= 2K+1");

  const std::size_t channels = x.size();
  std::vector<detail::RestartOutcome> outcomes(static_cast<std::size_t>(config.n_restarts));

  for (int r = 0; r < config.n_restarts; ++r) {
    detail::RestartOutcome& out = outcomes[static_cast<std::size_t>(r)];
    std::mt19937_64 rng(derive_seed(config.rng_seed, static_cast<std::uint64_t>(r)));
    ComplexVector zv = random_complex_gaussian(f, rng);
    zv.normalize();
    Spectrum z(std::move(zv), x.front().grid);

    double prev_cost = std::numeric_limits<double>::infinity();
    double cost = prev_cost;
    std::vector<AnnihilatingFilter> filters;
    for (int iter = 1; iter <= config.max_iter; ++iter) {
      filters = update_filters(z, x, k);
      if (config.renormalize_root_modulus)
        for (AnnihilatingFilter& a : filters) a = detail::project_roots_to_circle(a);
      out.trace.push_back(mulan_cost(z, filters, x));
      z = update_z(filters, x);
      cost = mulan_cost(z, filters, x);
      out.trace.push_back(cost);
      out.iterations = iter;
      if (!std::isfinite(cost)) {
        out.diverged = true;
        break;
      }
      if (std::isfinite(prev_cost) &&
          prev_cost - cost < config.conv_thresh * std::max(prev_cost, 1e-300))
        break;
      prev_cost = cost;
    }
    out.cost = cost;
    out.z = z.values;
    out.filters = std::move(filters);
    if (!std::isfinite(cost)) out.diverged = true;
  }

  int best = -1;
  for (int r = 0; r < config.n_restarts; ++r) {
    const auto& out = outcomes[static_cast<std::size_t>(r)];
    if (out.diverged) continue;
    if (best < 0 || out.cost < outcomes[static_cast<std::size_t>(best)].cost) best = r;
  }
  if (best < 0) throw numeric_error("mulan_solve: all restarts diverged to non-finite cost");
  detail::RestartOutcome& win = outcomes[static_cast<std::size_t>(best)];

  Spectrum z_best(std::move(win.z), x.front().grid);
  std::vector<EchoSet> echoes;
  echoes.reserve(channels);
  for (std::size_t m = 0; m < channels; ++m) {
    const ComplexVector roots = polynomial_roots(win.filters[m].coeffs);
    if (roots.size() != k)
      throw numeric_error("mulan_solve: filter degree collapsed during extraction");
    const Spectrum h(x[m].values.cwiseProduct(z_best.values), x.front().grid);
    std::vector<double> delays = roots_to_delays(roots, h.grid.step);
    const RealVector weights = vandermonde_weights(roots, h, h.grid.f_start);
    echoes.emplace_back(std::move(delays),
                        std::vector<double>(weights.data(), weights.data() + weights.size()));
  }
  echoes = canonicalize_delay_wrap(std::move(echoes), 1.0 / x.front().grid.step);
  echoes = normalize_solution(std::move(echoes));

  SolveResult result;
  result.echoes = std::move(echoes);
  result.z_estimate = std::move(z_best);
  result.final_cost = win.cost;
  result.iterations = win.iterations;
  result.best_restart = best;
  result.cost_traces.reserve(outcomes.size());
  for (auto& out : outcomes) result.cost_traces.push_back(std::move(out.trace));
  return result;
}

}  // namespace mulan

#endif  // MULAN_SOLVER_HPP
