// SPDX-License-Identifier: Apache-2.0
// Command-line front end: simulate scenarios, run the blind solver or the
// discrete-time baselines, score results against ground truth, and run
// (K, M, F) recovery-rate sweeps.
//
// Exit codes: 0 success, 1 usage/config error, 2 numerical failure.

#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mulan/mulan.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

mulan::EchoScenario build_scenario(const mulan::RunConfig& cfg) {
  mulan::RoomSimParams room = cfg.room;
  room.mics = cfg.channels;
  const mulan::SourceParams source{cfg.band_lo, cfg.band_hi};

  mulan::RealSignal wav;
  const mulan::RealSignal* override_ptr = nullptr;
  if (!cfg.source_wav.empty()) {
    wav = mulan::read_wav_mono(cfg.source_wav, cfg.fs);
    override_ptr = &wav;
  }

  if (cfg.scenario_type == "shoebox")
    return mulan::make_shoebox_scenario(cfg.n, cfg.fs, room, source, cfg.seed, override_ptr);
  if (cfg.scenario_type == "on-grid") {
    if (override_ptr != nullptr)
      throw mulan::config_error("source_wav is only supported for off-grid scenarios");
    return mulan::make_ongrid_scenario(cfg.n, cfg.fs, room, source, cfg.seed);
  }
  return mulan::make_synthetic_scenario(cfg.n, cfg.fs, cfg.k_true, cfg.channels,
                                        cfg.synthetic, source, cfg.seed, override_ptr);
}

int cmd_simulate(const mulan::RunConfig& cfg, const fs::path& out) {
  fs::create_directories(out);
  const mulan::EchoScenario scenario = build_scenario(cfg);
  mulan::write_measurements(out / "measurements.bin", scenario.measurements,
                            cfg.config_hash);
  json truth;
  truth["config_hash"] = mulan::hash_hex(cfg.config_hash);
  truth["seed"] = cfg.seed;
  truth["Fs"] = cfg.fs;
  truth["N"] = cfg.n;
  truth["M"] = scenario.echoes.size();
  truth["K"] = scenario.echoes.front().size();
  truth["grid_type"] = scenario.grid_type == mulan::GridType::on_grid ? "on-grid" : "off-grid";
  truth["filter_length"] = scenario.filter_length;
  truth["weight_rescale"] = scenario.weight_rescale;
  truth["channels"] = mulan::echoes_to_json(scenario.echoes);
  mulan::write_json(out / "truth.json", truth);
  std::cout << "simulate: wrote " << (out / "measurements.bin").string() << " and truth.json ("
            << scenario.echoes.size() << " channels, K=" << scenario.echoes.front().size()
            << ", " << truth["grid_type"].get<std::string>() << ")\n";
  return 0;
}

int cmd_solve(const mulan::RunConfig& cfg, const fs::path& out) {
  const mulan::MeasurementFile meas = mulan::read_measurements(out / "measurements.bin");
  const auto t0 = std::chrono::steady_clock::now();
  json result;
  result["config_hash"] = mulan::hash_hex(cfg.config_hash);
  result["method"] = cfg.method;

  if (cfg.method == "mulan") {
    const mulan::FrequencyGrid grid = cfg.analysis_grid();
    std::vector<mulan::Spectrum> x;
    x.reserve(meas.channels.size());
    for (const mulan::RealSignal& c : meas.channels)
      x.push_back(mulan::generalized_dft(c, grid));
    mulan::normalize_channel_scale(x);
    const mulan::SolveResult r = mulan::mulan_solve(x, cfg.k_true, cfg.mulan);
    result["K"] = cfg.k_true;
    result["F"] = cfg.f_count;
    result["f_min"] = cfg.f_min;
    result["f_max"] = cfg.f_max;
    result["echoes"] = mulan::echoes_to_json(r.echoes);
    result["final_cost"] = r.final_cost;
    result["iterations"] = r.iterations;
    result["best_restart"] = r.best_restart;
  } else {
    if (meas.channels.size() != 2)
      throw mulan::config_error("the cr/lasso baselines are two-channel (M = 2) methods");
    if (cfg.filter_length < 1)
      throw mulan::config_error("solver section must set L for the " + cfg.method +
                                " baseline");
    mulan::DiscreteFilterPair pair;
    if (cfg.method == "cr") {
      pair = mulan::cr_solve(meas.channels[0], meas.channels[1], cfg.filter_length);
      result["iterations"] = 1;
    } else {
      pair = mulan::lasso_solve(meas.channels[0], meas.channels[1], cfg.filter_length,
                                cfg.lambda, cfg.lasso_iters);
      result["lambda"] = cfg.lambda;
      result["iterations"] = pair.objective_trace.empty()
                                 ? 0
                                 : static_cast<int>(pair.objective_trace.size()) - 1;
    }
    const double fs = meas.channels[0].sample_rate;
    std::vector<mulan::EchoSet> echoes = {mulan::peak_pick(pair.h1, cfg.k_true, fs),
                                          mulan::peak_pick(pair.h2, cfg.k_true, fs)};
    echoes = mulan::normalize_solution(std::move(echoes));
    result["K"] = cfg.k_true;
    result["L"] = cfg.filter_length;
    result["echoes"] = mulan::echoes_to_json(echoes);
    result["final_cost"] = pair.residual;
    result["normalization"] = pair.normalization;
  }
  result["wall_time_s"] = seconds_since(t0);
  mulan::write_json(out / "result.json", result);
  std::cout << "solve: method=" << cfg.method << " cost=" << result["final_cost"]
            << " wall=" << result["wall_time_s"] << "s -> "
            << (out / "result.json").string() << "\n";
  return 0;
}

int cmd_eval(const fs::path& truth_path, const fs::path& result_path, const fs::path& out) {
  const json truth = mulan::read_json(truth_path);
  const json result = mulan::read_json(result_path);
  const std::vector<mulan::EchoSet> truth_echoes =
      mulan::echoes_from_json(truth.at("channels"));
  const std::vector<mulan::EchoSet> est_echoes = mulan::echoes_from_json(result.at("echoes"));
  const double fs = truth.at("Fs").get<double>();
  const mulan::EvalThresholds thresholds;
  const mulan::EvalReport report =
      mulan::match_and_rmse(est_echoes, truth_echoes, fs, thresholds);

  fs::create_directories(out);
  json rep;
  rep["config_hash"] = truth.value("config_hash", "");
  rep["result_hash"] = result.value("config_hash", "");
  rep["location_rmse_s"] = report.location_rmse;
  rep["weight_rmse"] = report.weight_rmse;
  rep["location_success"] = report.location_success;
  rep["weight_success"] = report.weight_success;
  rep["thresholds"] = {{"location_samples", thresholds.location_samples},
                       {"weight", thresholds.weight}};
  json per_channel = json::array();
  for (const mulan::ChannelDetail& d : report.per_channel_detail)
    per_channel.push_back(
        {{"location_rmse_s", d.location_rmse}, {"weight_rmse", d.weight_rmse}});
  rep["per_channel"] = per_channel;
  mulan::write_json(out / "eval.json", rep);

  mulan::append_eval_csv_row(out / "eval.csv", truth.value("seed", std::uint64_t{0}),
                             static_cast<int>(truth_echoes.front().size()),
                             static_cast<int>(truth_echoes.size()),
                             result.value("F", 0), result.value("method", "unknown"), report,
                             result.value("final_cost", 0.0), result.value("iterations", 0));
  std::cout << "eval: location_rmse=" << report.location_rmse
            << "s weight_rmse=" << report.weight_rmse
            << " location_success=" << (report.location_success ? "yes" : "no") << "\n";
  return 0;
}

int cmd_bench(const mulan::RunConfig& cfg, const fs::path& out, int jobs) {
  fs::create_directories(out);
  mulan::SweepSpec spec = cfg.sweep;
  spec.validate();

  // resume: cells already complete in an existing trials CSV are not rerun
  std::map<std::tuple<int, int, int>, std::vector<mulan::TrialRecord>> done;
  const fs::path trials_path = out / "sweep_trials.csv";
  if (fs::exists(trials_path)) {
    std::ifstream in(trials_path);
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
      std::stringstream ss(line);
      std::string field;
      std::vector<std::string> fields;
      while (std::getline(ss, field, ',')) fields.push_back(field);
      if (fields.size() < 12) continue;
      mulan::TrialRecord r;
      const int k = std::stoi(fields[0]);
      const int m = std::stoi(fields[1]);
      const int f = std::stoi(fields[2]);
      r.k = k;
      r.m = m;
      r.f = f;
      r.seed = std::stoull(fields[4]);
      r.solved = fields[5] == "1";
      r.location_rmse = std::stod(fields[6]);
      r.weight_rmse = std::stod(fields[7]);
      r.location_success = fields[8] == "1";
      r.weight_success = fields[9] == "1";
      r.cost = std::stod(fields[10]);
      r.iterations = std::stoi(fields[11]);
      if (fields.size() > 12) r.error = fields[12];
      done[{k, m, f}].push_back(r);
    }
  }

  mulan::SweepResult merged;
  const mulan::MulanConfig solver = cfg.mulan;
  for (int k : spec.k_values)
    for (int m : spec.m_values)
      for (int f : spec.f_values) {
        const auto it = done.find({k, m, f});
        if (it != done.end() &&
            static_cast<int>(it->second.size()) >= spec.trials_per_cell) {
          mulan::CellResult cell;
          cell.k = k;
          cell.m = m;
          cell.f = f;
          cell.trials.assign(it->second.begin(),
                             it->second.begin() + spec.trials_per_cell);
          int loc = 0, wt = 0;
          for (const auto& r : cell.trials) {
            if (r.location_success) ++loc;
            if (r.location_success && r.weight_success) ++wt;
          }
          cell.location_rate = static_cast<double>(loc) / spec.trials_per_cell;
          cell.weight_rate = static_cast<double>(wt) / spec.trials_per_cell;
          merged.cells.push_back(std::move(cell));
          std::cout << "bench: cell K=" << k << " M=" << m << " F=" << f
                    << " restored from existing CSV\n";
          continue;
        }
        mulan::SweepSpec one = spec;
        one.k_values = {k};
        one.m_values = {m};
        one.f_values = {f};
        const mulan::SweepResult r =
            mulan::run_sweep(one, solver, cfg.synthetic, {cfg.band_lo, cfg.band_hi}, jobs);
        merged.cells.push_back(r.cells.front());
        std::cout << "bench: cell K=" << k << " M=" << m << " F=" << f
                  << " location_rate=" << r.cells.front().location_rate
                  << " weight_rate=" << r.cells.front().weight_rate << "\n";
      }

  mulan::write_sweep_trials_csv(trials_path, merged);
  mulan::write_sweep_rates_csv(out / "sweep_location_rates.csv", merged, false);
  mulan::write_sweep_rates_csv(out / "sweep_weight_rates.csv", merged, true);
  json summary;
  summary["config_hash"] = mulan::hash_hex(cfg.config_hash);
  summary["trials_per_cell"] = spec.trials_per_cell;
  json cells = json::array();
  for (const mulan::CellResult& cell : merged.cells)
    cells.push_back({{"K", cell.k},
                     {"M", cell.m},
                     {"F", cell.f},
                     {"location_rate", cell.location_rate},
                     {"weight_rate", cell.weight_rate}});
  summary["cells"] = cells;
  mulan::write_json(out / "sweep_summary.json", summary);
  std::cout << "bench: wrote sweep CSVs and summary to " << out.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mulan: blind off-grid echo retrieval from multichannel measurements"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::string method_override;
  std::int64_t seed_override = -1;
  int jobs = 1;
  std::string truth_path, result_path;

  auto add_common = [&](CLI::App* cmd, bool needs_config) {
    auto* opt = cmd->add_option("--config", config_path, "configuration file");
    if (needs_config) opt->required();
    cmd->add_option("--seed", seed_override, "override every configured seed");
    cmd->add_option("--out", out_dir, "output/working directory");
    cmd->add_option("--jobs", jobs, "worker threads for independent trials");
  };

  CLI::App* sim = app.add_subcommand("simulate", "generate a scenario and write it to disk");
  add_common(sim, true);
  CLI::App* solve = app.add_subcommand("solve", "run a solver on a simulated scenario");
  add_common(solve, true);
  solve->add_option("--method", method_override, "mulan | cr | lasso (overrides config)");
  CLI::App* eval = app.add_subcommand("eval", "score a result against ground truth");
  eval->add_option("truth", truth_path, "truth.json from simulate")->required();
  eval->add_option("result", result_path, "result.json from solve")->required();
  add_common(eval, false);
  CLI::App* bench = app.add_subcommand("bench", "run the (K, M, F) recovery-rate sweep");
  add_common(bench, true);

  try {
    app.parse(argc, argv);
    if (sim->parsed() || solve->parsed() || bench->parsed()) {
      mulan::RunConfig cfg = mulan::load_config(config_path, seed_override);
      if (!method_override.empty()) cfg.method = method_override;
      if (out_dir == ".") out_dir = cfg.out_dir;
      cfg.validate();
      if (sim->parsed()) return cmd_simulate(cfg, out_dir);
      if (solve->parsed()) return cmd_solve(cfg, out_dir);
      return cmd_bench(cfg, out_dir, jobs);
    }
    return cmd_eval(truth_path, result_path, out_dir);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  } catch (const mulan::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const mulan::numeric_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
