// SPDX-License-Identifier: Apache-2.0
#ifndef MULAN_EVALUATE_HPP
#define MULAN_EVALUATE_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "mulan/dft.hpp"
#include "mulan/simulate.hpp"
#include "mulan/solver.hpp"
#include "mulan/types.hpp"

namespace mulan {

struct EvalThresholds {
  double location_samples = 1.0;  // success iff location RMSE < this / fs
  double weight = 1e-2;           // success iff weight RMSE < this
};

struct ChannelDetail {
  double location_rmse = 0.0;
  double weight_rmse = 0.0;
};

struct EvalReport {
  double location_rmse = 0.0;  // seconds, over all M*K matched pairs
  double weight_rmse = 0.0;
  bool location_success = false;
  bool weight_success = false;
  std::vector<ChannelDetail> per_channel_detail;
};

namespace detail {

/// Exact minimum-cost one-to-one assignment on squared delay error by
/// permutation search; costs are negligible for the K <= 9 used here.
inline std::vector<std::size_t> best_assignment(const std::vector<double>& est,
                                                const std::vector<double>& truth) {
  const std::size_t k = est.size();
  if (k > 9) throw config_error("best_assignment: K too large for exact matching");
  std::vector<std::size_t> perm(k), best(k);
  std::iota(perm.begin(), perm.end(), 0);
  best = perm;
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    double cost = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double d = est[perm[i]] - truth[i];
      cost += d * d;
    }
    if (cost < best_cost) {
      best_cost = cost;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace detail

/// Normalize both sides (first echo of channel 1 at tau = 0 with weight 1),
/// assign estimated echoes to truth per channel by minimum squared delay
/// error, and report location / weight RMSEs over all M*K pairs. Success
/// thresholds are strict inequalities.
inline EvalReport match_and_rmse(const std::vector<EchoSet>& estimated,
                                 const std::vector<EchoSet>& truth, double fs,
                                 const EvalThresholds& thresholds = {}) {
  if (estimated.size() != truth.size())
    throw config_error("match_and_rmse: channel count mismatch");
  if (estimated.empty()) throw config_error("match_and_rmse: no channels");
  for (std::size_t m = 0; m < truth.size(); ++m) {
    if (estimated[m].size() != truth[m].size() || truth[m].size() == 0)
      throw config_error("match_and_rmse: echo count mismatch on channel " +
                         std::to_string(m + 1));
  }
  const std::vector<EchoSet> est = normalize_solution(estimated);
  const std::vector<EchoSet> ref = normalize_solution(truth);

  EvalReport report;
  double loc_sse = 0.0, w_sse = 0.0;
  std::size_t pairs = 0;
  for (std::size_t m = 0; m < ref.size(); ++m) {
    const auto assign = detail::best_assignment(est[m].delays, ref[m].delays);
    double loc_ch = 0.0, w_ch = 0.0;
    for (std::size_t i = 0; i < assign.size(); ++i) {
      const double dd = est[m].delays[assign[i]] - ref[m].delays[i];
      const double dw = est[m].weights[assign[i]] - ref[m].weights[i];
      loc_ch += dd * dd;
      w_ch += dw * dw;
    }
    loc_sse += loc_ch;
    w_sse += w_ch;
    pairs += assign.size();
    report.per_channel_detail.push_back(
        {std::sqrt(loc_ch / assign.size()), std::sqrt(w_ch / assign.size())});
  }
  report.location_rmse = std::sqrt(loc_sse / pairs);
  report.weight_rmse = std::sqrt(w_sse / pairs);
  report.location_success = report.location_rmse < thresholds.location_samples / fs;
  report.weight_success = report.weight_rmse < thresholds.weight;
  return report;
}

struct SuccessSummary {
  double location_rate = 0.0;
  // mean weight RMSE restricted to location-successful reports; absent when
  // nothing succeeded
  std::optional<double> weight_rmse_over_successes;
};

inline SuccessSummary success_rate(const std::vector<EvalReport>& reports) {
  if (reports.empty()) throw config_error("success_rate: no reports");
  SuccessSummary out;
  int successes = 0;
  double acc = 0.0;
  for (const EvalReport& r : reports) {
    if (r.location_success) {
      ++successes;
      acc += r.weight_rmse;
    }
  }
  out.location_rate = static_cast<double>(successes) / reports.size();
  if (successes > 0) out.weight_rmse_over_successes = acc / successes;
  return out;
}

/// Exhaustive K=1 reference: channel delays relative to channel 1 found by
/// maximizing the cross-channel correlation |sum_i conj(x1_i) x_mi e^{2pi i f_i d}|
/// over a refining delay grid. Used purely to cross-check the blind solver on
/// the smallest instances.
inline std::vector<EchoSet> brute_force_oracle_k1(const std::vector<Spectrum>& x,
                                                  double grid_resolution, int k = 1) {
  if (k != 1) throw config_error("brute_force_oracle_k1: defined for K = 1 only");
  detail::check_common_grid(x);
  if (!(grid_resolution > 0.0))
    throw config_error("brute_force_oracle_k1: resolution must be positive");
  const FrequencyGrid& grid = x.front().grid;
  const double span = grid.step * (grid.count - 1);
  const double half_period = 0.5 / grid.step;

  std::vector<EchoSet> out;
  out.emplace_back(std::vector<double>{0.0}, std::vector<double>{1.0});
  const double x1_energy = x.front().values.squaredNorm();
  for (std::size_t m = 1; m < x.size(); ++m) {
    ComplexVector cross(grid.count);
    for (int i = 0; i < grid.count; ++i)
      cross(i) = std::conj(x.front().values(i)) * x[m].values(i);

    auto corr_mag = [&](double d) {
      Complex acc(0.0, 0.0);
      for (int i = 0; i < grid.count; ++i)
        acc += cross(i) * std::polar(1.0, 2.0 * std::numbers::pi * grid.frequency(i) * d);
      return std::abs(acc);
    };

    double center = 0.0;
    double radius = half_period;
    double step = 1.0 / (8.0 * span);
    double best_d = 0.0;
    while (true) {
      double best_val = -1.0;
      const int half_steps = static_cast<int>(std::ceil(radius / step));
      for (int j = -half_steps; j <= half_steps; ++j) {
        const double d = center + j * step;
        const double v = corr_mag(d);
        if (v > best_val) {
          best_val = v;
          best_d = d;
        }
      }
      if (step <= grid_resolution) break;
      center = best_d;
      radius = 2.0 * step;
      step = std::max(step / 8.0, grid_resolution);
    }

    Complex acc(0.0, 0.0);
    for (int i = 0; i < grid.count; ++i)
      acc += cross(i) * std::polar(1.0, 2.0 * std::numbers::pi * grid.frequency(i) * best_d);
    out.emplace_back(std::vector<double>{best_d},
                     std::vector<double>{std::abs(acc) / x1_energy});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Parameter sweeps
// ---------------------------------------------------------------------------

struct SweepSpec {
  std::vector<int> k_values{2, 3, 4, 5, 6, 7};
  std::vector<int> m_values{2, 3, 4, 5, 6, 7};
  std::vector<int> f_values{201, 401};
  int trials_per_cell = 100;
  EvalThresholds thresholds;
  std::uint64_t rng_seed = 0;
  double f_min = 200.0;
  double f_max = 2000.0;
  int n = 4000;
  double fs = 16000.0;

  void validate() const {
    if (k_values.empty() || m_values.empty() || f_values.empty())
      throw config_error("SweepSpec: empty parameter list");
    if (trials_per_cell < 1) throw config_error("SweepSpec: need at least one trial");
  }
};

struct TrialRecord {
  std::uint64_t seed = 0;
  int k = 0, m = 0, f = 0;
  bool solved = false;       // solver ran to completion
  std::string error;         // failure description when solved == false
  double location_rmse = std::numeric_limits<double>::quiet_NaN();
  double weight_rmse = std::numeric_limits<double>::quiet_NaN();
  bool location_success = false;
  bool weight_success = false;
  double cost = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;
};

struct CellResult {
  int k = 0, m = 0, f = 0;
  std::vector<TrialRecord> trials;
  double location_rate = 0.0;
  // fraction of trials passing both thresholds (weights at wrong locations
  // do not count as retrieved)
  double weight_rate = 0.0;
};

struct SweepResult {
  std::vector<CellResult> cells;
};

/// One blind trial on a fresh synthetic off-grid scenario; never throws.
/// Failures come back as unsuccessful records carrying the error text.
inline TrialRecord run_sweep_trial(int k, int m, int f, std::uint64_t seed,
                                   const SweepSpec& spec, const MulanConfig& solver_config,
                                   const SyntheticParams& scenario_params,
                                   const SourceParams& source_params) {
  TrialRecord rec;
  rec.seed = seed;
  rec.k = k;
  rec.m = m;
  rec.f = f;
  try {
    const EchoScenario scenario =
        make_synthetic_scenario(spec.n, spec.fs, k, m, scenario_params, source_params, seed);
    const FrequencyGrid grid = make_frequency_grid(spec.f_min, spec.f_max, f);
    std::vector<Spectrum> x = measurement_spectra(scenario, grid);
    normalize_channel_scale(x);
    MulanConfig cfg = solver_config;
    cfg.rng_seed = derive_seed(seed, 0x5EED);
    const SolveResult result = mulan_solve(x, k, cfg);
    const EvalReport report =
        match_and_rmse(result.echoes, scenario.echoes, spec.fs, spec.thresholds);
    rec.solved = true;
    rec.location_rmse = report.location_rmse;
    rec.weight_rmse = report.weight_rmse;
    rec.location_success = report.location_success;
    rec.weight_success = report.weight_success;
    rec.cost = result.final_cost;
    rec.iterations = result.iterations;
  } catch (const std::exception& e) {
    rec.error = e.what();
  }
  return rec;
}

/// Full (K, M, F) grid of recovery rates on synthetic off-grid scenarios.
/// Trials are independent with per-trial derived seeds, so the result does
/// not depend on the number of worker threads.
inline SweepResult run_sweep(const SweepSpec& spec, const MulanConfig& solver_config,
                             const SyntheticParams& scenario_params = {},
                             const SourceParams& source_params = {}, int jobs = 1) {
  spec.validate();
  struct Slot {
    int k, m, f, trial;
    std::uint64_t seed;
  };
  std::vector<Slot> slots;
  for (int k : spec.k_values)
    for (int m : spec.m_values)
      for (int f : spec.f_values)
        for (int t = 0; t < spec.trials_per_cell; ++t) {
          const std::uint64_t cell_key =
              derive_seed(spec.rng_seed, (static_cast<std::uint64_t>(k) << 40) ^
                                             (static_cast<std::uint64_t>(m) << 20) ^
                                             static_cast<std::uint64_t>(f));
          slots.push_back({k, m, f, t, derive_seed(cell_key, static_cast<std::uint64_t>(t))});
        }

  std::vector<TrialRecord> records(slots.size());
  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(slots.size())));
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= slots.size()) return;
      const Slot& s = slots[i];
      records[i] =
          run_sweep_trial(s.k, s.m, s.f, s.seed, spec, solver_config, scenario_params,
                          source_params);
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (std::thread& th : pool) th.join();
  }

  SweepResult result;
  std::size_t i = 0;
  for (int k : spec.k_values)
    for (int m : spec.m_values)
      for (int f : spec.f_values) {
        CellResult cell;
        cell.k = k;
        cell.m = m;
        cell.f = f;
        int loc = 0, wt = 0;
        for (int t = 0; t < spec.trials_per_cell; ++t, ++i) {
          cell.trials.push_back(records[i]);
          if (records[i].location_success) ++loc;
          if (records[i].location_success && records[i].weight_success) ++wt;
        }
        cell.location_rate = static_cast<double>(loc) / spec.trials_per_cell;
        cell.weight_rate = static_cast<double>(wt) / spec.trials_per_cell;
        result.cells.push_back(std::move(cell));
      }
  return result;
}

}  // namespace mulan

#endif  // MULAN_EVALUATE_HPP
