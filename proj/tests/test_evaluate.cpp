// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "mulan/evaluate.hpp"
#include "test_helpers.hpp"

using namespace mulan;
using namespace mulan_test;

namespace {

std::vector<EchoSet> sample_truth(int m, int k, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::vector<EchoSet> out;
  for (int c = 0; c < m; ++c)
    out.push_back(random_echoes(k, 1e-3, 40e-3, 1e-3, 0.2, 1.0, rng));
  return out;
}

}  // namespace

TEST_CASE("perfect estimates give zero RMSE and success") {
  const std::vector<EchoSet> truth = sample_truth(2, 7, 1);
  const EvalReport r = match_and_rmse(truth, truth, 16000.0);
  CHECK(r.location_rmse == 0.0);
  CHECK(r.weight_rmse == 0.0);
  CHECK(r.location_success);
  CHECK(r.weight_success);
  REQUIRE(r.per_channel_detail.size() == 2);
}

TEST_CASE("the report ignores echo ordering") {
  const std::vector<EchoSet> truth = sample_truth(2, 5, 2);
  std::vector<EchoSet> shuffled = truth;
  for (EchoSet& e : shuffled) {
    std::reverse(e.delays.begin(), e.delays.end());
    std::reverse(e.weights.begin(), e.weights.end());
    e.sort_by_delay();
  }
  const EvalReport r = match_and_rmse(shuffled, truth, 16000.0);
  CHECK(r.location_rmse == 0.0);
  CHECK(r.weight_rmse == 0.0);
}

TEST_CASE("a single 2-sample miss lands at the expected RMSE") {
  const double fs = 16000.0;
  std::vector<EchoSet> truth = sample_truth(2, 7, 3);
  std::vector<EchoSet> est = truth;
  est[1].delays[6] += 2.0 / fs;  // one of 14 echoes off by two samples
  const EvalReport r = match_and_rmse(est, truth, fs);
  CHECK(r.location_rmse == Catch::Approx(2.0 / (fs * std::sqrt(14.0))).epsilon(1e-9));
  CHECK(r.location_success);  // 0.53 samples, below the 1-sample gate
}

TEST_CASE("an RMSE exactly at one sample counts as failure") {
  const double fs = 16384.0;  // dyadic so the threshold comparison is exact
  std::vector<EchoSet> truth;
  truth.emplace_back(std::vector<double>{0.0, 0.25, 0.5, 0.75},
                     std::vector<double>{1.0, 0.5, 0.5, 0.5});
  std::vector<EchoSet> est = truth;
  est[0].delays[3] += 2.0 / fs;  // RMSE = sqrt((2/fs)^2 / 4) = 1/fs exactly
  const EvalReport r = match_and_rmse(est, truth, fs);
  CHECK(r.location_rmse == 1.0 / fs);
  CHECK_FALSE(r.location_success);
}

TEST_CASE("reported RMSE is never beaten by another matching") {
  std::mt19937_64 rng(4);
  const std::vector<EchoSet> truth = sample_truth(1, 5, 5);
  std::vector<EchoSet> est = truth;
  std::normal_distribution<double> jitter(0.0, 2e-4);
  for (double& d : est[0].delays) d += jitter(rng);
  est[0].sort_by_delay();
  const EvalReport r = match_and_rmse(est, truth, 16000.0);

  const std::vector<EchoSet> ne = normalize_solution(est);
  const std::vector<EchoSet> nt = normalize_solution(truth);
  std::vector<std::size_t> perm{0, 1, 2, 3, 4};
  do {
    double sse = 0.0;
    for (std::size_t i = 0; i < perm.size(); ++i) {
      const double d = ne[0].delays[perm[i]] - nt[0].delays[i];
      sse += d * d;
    }
    CHECK(r.location_rmse <= std::sqrt(sse / 5.0) + 1e-15);
  } while (std::next_permutation(perm.begin(), perm.end()));
}

TEST_CASE("report is invariant to global shift and scale of either side") {
  const std::vector<EchoSet> truth = sample_truth(2, 4, 6);
  std::vector<EchoSet> est = truth;
  est[0].delays[2] += 3e-4;
  est[0].sort_by_delay();
  const EvalReport base = match_and_rmse(est, truth, 16000.0);

  std::vector<EchoSet> moved = est;
  for (EchoSet& e : moved) {
    for (double& d : e.delays) d += 5e-3;
    for (double& w : e.weights) w *= 3.0;
  }
  const EvalReport shifted = match_and_rmse(moved, truth, 16000.0);
  CHECK(shifted.location_rmse == Catch::Approx(base.location_rmse).margin(1e-15));
  CHECK(shifted.weight_rmse == Catch::Approx(base.weight_rmse).margin(1e-12));
}

TEST_CASE("cardinality mismatches are rejected") {
  const std::vector<EchoSet> truth = sample_truth(2, 3, 7);
  std::vector<EchoSet> wrong_k = truth;
  wrong_k[1].delays.pop_back();
  wrong_k[1].weights.pop_back();
  CHECK_THROWS_AS(match_and_rmse(wrong_k, truth, 16000.0), config_error);
  std::vector<EchoSet> wrong_m = truth;
  wrong_m.pop_back();
  CHECK_THROWS_AS(match_and_rmse(wrong_m, truth, 16000.0), config_error);
}

TEST_CASE("success_rate aggregates location successes") {
  std::vector<EvalReport> reports(100);
  for (int i = 0; i < 100; ++i) {
    reports[i].location_success = i < 70;
    reports[i].weight_rmse = 0.0;
  }
  const SuccessSummary s = success_rate(reports);
  CHECK(s.location_rate == Catch::Approx(0.70));
  REQUIRE(s.weight_rmse_over_successes.has_value());
  CHECK(*s.weight_rmse_over_successes == 0.0);

  std::vector<EvalReport> none(5);
  const SuccessSummary empty = success_rate(none);
  CHECK(empty.location_rate == 0.0);
  CHECK_FALSE(empty.weight_rmse_over_successes.has_value());

  CHECK_THROWS_AS(success_rate(std::vector<EvalReport>{}), config_error);
}

TEST_CASE("k1 oracle finds a single off-grid echo per channel") {
  std::mt19937_64 rng(8);
  const FrequencyGrid grid = make_frequency_grid(200.0, 2000.0, 201);
  std::vector<EchoSet> truth;
  truth.emplace_back(std::vector<double>{3.1e-3}, std::vector<double>{1.0});
  truth.emplace_back(std::vector<double>{5.47e-3}, std::vector<double>{0.62});
  const Spectrum s = random_source_spectrum(grid, rng);
  const std::vector<Spectrum> x = synth_measurements(truth, s);
  const std::vector<EchoSet> got = brute_force_oracle_k1(x, 1e-8);
  REQUIRE(got.size() == 2);
  CHECK(got[0].delays[0] == 0.0);
  const double want = truth[1].delays[0] - truth[0].delays[0];
  CHECK(got[1].delays[0] == Catch::Approx(want).margin(1e-7));
  CHECK(got[1].weights[0] == Catch::Approx(0.62).margin(1e-4));
}

TEST_CASE("k1 oracle on identical channels returns zero delay") {
  std::mt19937_64 rng(9);
  const FrequencyGrid grid = make_frequency_grid(200.0, 2000.0, 101);
  const Spectrum s = random_source_spectrum(grid, rng);
  const std::vector<Spectrum> x = {s, s};
  const std::vector<EchoSet> got = brute_force_oracle_k1(x, 1e-7);
  CHECK(std::abs(got[1].delays[0]) <= 1e-7);
  CHECK(got[1].weights[0] == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("k1 oracle rejects other model orders") {
  const FrequencyGrid grid = make_frequency_grid(200.0, 2000.0, 11);
  const std::vector<Spectrum> x = {Spectrum(ComplexVector::Ones(11), grid)};
  CHECK_THROWS_AS(brute_force_oracle_k1(x, 1e-6, 2), config_error);
}

TEST_CASE("mulan agrees with the k1 oracle on a smoke trial") {
  SyntheticParams params;
  SourceParams source;
  const EchoScenario sc = make_synthetic_scenario(4000, 16000.0, 1, 2, params, source, 77);
  const FrequencyGrid grid = make_frequency_grid(200.0, 2000.0, 201);
  std::vector<Spectrum> x = measurement_spectra(sc, grid);
  normalize_channel_scale(x);
  MulanConfig cfg;
  cfg.n_restarts = 8;
  cfg.rng_seed = 5;
  const SolveResult r = mulan_solve(x, 1, cfg);
  const std::vector<EchoSet> oracle = brute_force_oracle_k1(x, 1e-8);
  CHECK(std::abs(r.echoes[1].delays[0] - oracle[1].delays[0]) <= 1e-6);
}

TEST_CASE("single-cell sweep runs deterministically") {
  SweepSpec spec;
  spec.k_values = {1};
  spec.m_values = {2};
  spec.f_values = {201};
  spec.trials_per_cell = 2;
  spec.rng_seed = 11;
  MulanConfig solver;
  solver.n_restarts = 6;
  const SweepResult a = run_sweep(spec, solver);
  const SweepResult b = run_sweep(spec, solver, {}, {}, 2);
  REQUIRE(a.cells.size() == 1);
  CHECK(a.cells[0].location_rate == 1.0);  // K = 1 is the solvable base case
  CHECK(a.cells[0].location_rate == b.cells[0].location_rate);
  for (int t = 0; t < 2; ++t) {
    CHECK(a.cells[0].trials[t].location_rmse == b.cells[0].trials[t].location_rmse);
    CHECK(a.cells[0].trials[t].cost == b.cells[0].trials[t].cost);
  }
}

TEST_CASE("sweep records failures instead of throwing") {
  SweepSpec spec;
  spec.k_values = {1};
  spec.m_values = {2};
  spec.f_values = {201};
  spec.trials_per_cell = 1;
  spec.n = 100;  // far too short for the delay span: scenario generation fails
  MulanConfig solver;
  const SweepResult r = run_sweep(spec, solver);
  REQUIRE(r.cells[0].trials.size() == 1);
  CHECK_FALSE(r.cells[0].trials[0].solved);
  CHECK_FALSE(r.cells[0].trials[0].location_success);
  CHECK(!r.cells[0].trials[0].error.empty());
  CHECK(r.cells[0].location_rate == 0.0);
}
