// SPDX-License-Identifier: Apache-2.0
#ifndef MULAN_CONFIG_HPP
#define MULAN_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mulan/evaluate.hpp"
#include "mulan/io.hpp"
#include "mulan/simulate.hpp"
#include "mulan/solver.hpp"
#include "mulan/types.hpp"

namespace mulan {

/// Full experiment description parsed from the sectioned key = value config
/// format. Unknown sections or keys are hard errors so sweep definitions
/// cannot silently drift. Defaults reproduce the reference protocol
/// (Fs = 16 kHz, N = 4000, F = 401 over 200..2000 Hz, 20 restarts,
/// max_iter = 1000, conv_thresh = 0.1%, lambda = 1e-3).
struct RunConfig {
  // [scenario]
  std::string scenario_type = "shoebox";  // shoebox | on-grid | synthetic
  std::uint64_t seed = 0;
  int n = 4000;
  double fs = 16000.0;
  int channels = 2;
  int k_true = 7;  // synthetic scenarios only; rooms always give 7
  double band_lo = 150.0;
  double band_hi = 2100.0;
  RoomSimParams room;
  SyntheticParams synthetic;
  std::string source_wav;  // optional: WAV burst instead of the synthesizer

  // [analysis]
  double f_min = 200.0;
  double f_max = 2000.0;
  int f_count = 401;

  // [solver]
  std::string method = "mulan";  // mulan | cr | lasso
  MulanConfig mulan;
  int filter_length = 0;  // L, required by cr/lasso
  double lambda = 1e-3;
  int lasso_iters = 5000;

  // [sweep]
  SweepSpec sweep;

  // [output]
  std::string out_dir = ".";

  std::uint64_t config_hash = 0;  // of the raw config text + seed override

  FrequencyGrid analysis_grid() const { return make_frequency_grid(f_min, f_max, f_count); }

  void validate() const {
    if (scenario_type != "shoebox" && scenario_type != "on-grid" &&
        scenario_type != "synthetic")
      throw config_error("config: scenario type must be shoebox, on-grid or synthetic");
    if (method != "mulan" && method != "cr" && method != "lasso")
      throw config_error("config: method must be mulan, cr or lasso");
    if (n < 16) throw config_error("config: N too small");
    if (!(fs > 0.0)) throw config_error("config: Fs must be positive");
    if (channels < 1) throw config_error("config: M must be >= 1");
    if (k_true < 1) throw config_error("config: K must be >= 1");
    mulan.validate();
  }
};

namespace detail {

struct ConfigValue {
  std::string text;
  int line = 0;
};

using ConfigSection = std::map<std::string, ConfigValue>;

inline std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

inline double parse_double(const ConfigValue& v, const std::string& key) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v.text, &used);
    if (used != v.text.size()) throw std::invalid_argument("");
    return d;
  } catch (const std::exception&) {
    throw config_error("config line " + std::to_string(v.line) + ": key '" + key +
                       "' expects a number, got '" + v.text + "'");
  }
}

inline std::int64_t parse_int(const ConfigValue& v, const std::string& key) {
  try {
    std::size_t used = 0;
    const long long i = std::stoll(v.text, &used);
    if (used != v.text.size()) throw std::invalid_argument("");
    return i;
  } catch (const std::exception&) {
    throw config_error("config line " + std::to_string(v.line) + ": key '" + key +
                       "' expects an integer, got '" + v.text + "'");
  }
}

inline bool parse_bool(const ConfigValue& v, const std::string& key) {
  if (v.text == "true" || v.text == "1") return true;
  if (v.text == "false" || v.text == "0") return false;
  throw config_error("config line " + std::to_string(v.line) + ": key '" + key +
                     "' expects true/false, got '" + v.text + "'");
}

inline std::vector<int> parse_int_list(const ConfigValue& v, const std::string& key) {
  std::vector<int> out;
  std::stringstream ss(v.text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(static_cast<int>(parse_int({item, v.line}, key)));
  }
  if (out.empty())
    throw config_error("config line " + std::to_string(v.line) + ": key '" + key +
                       "' expects a comma-separated integer list");
  return out;
}

inline std::array<double, 3> parse_triple(const ConfigValue& v, const std::string& key) {
  std::array<double, 3> out{};
  std::stringstream ss(v.text);
  std::string item;
  int i = 0;
  while (std::getline(ss, item, ',') && i < 3)
    out[static_cast<std::size_t>(i++)] = parse_double({trim(item), v.line}, key);
  if (i != 3)
    throw config_error("config line " + std::to_string(v.line) + ": key '" + key +
                       "' expects three comma-separated numbers");
  return out;
}

}  // namespace detail

/// Parse the sectioned config text. `seed_override`, when nonnegative,
/// replaces every section's seed (the --seed flag).
inline RunConfig parse_config(const std::string& text, std::int64_t seed_override = -1) {
  std::map<std::string, detail::ConfigSection> sections;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = detail::trim(line);
    if (t.empty() || t.front() == '#') continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw config_error("config line " + std::to_string(lineno) + ": malformed section");
      section = t.substr(1, t.size() - 2);
      static const std::set<std::string> known = {"scenario", "analysis", "solver", "sweep",
                                                  "output"};
      if (!known.count(section))
        throw config_error("config line " + std::to_string(lineno) + ": unknown section [" +
                           section + "]");
      sections[section];
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw config_error("config line " + std::to_string(lineno) + ": expected key = value");
    if (section.empty())
      throw config_error("config line " + std::to_string(lineno) + ": key outside a section");
    const std::string key = detail::trim(t.substr(0, eq));
    const std::string value = detail::trim(t.substr(eq + 1));
    if (key.empty() || value.empty())
      throw config_error("config line " + std::to_string(lineno) + ": empty key or value");
    if (sections[section].count(key))
      throw config_error("config line " + std::to_string(lineno) + ": duplicate key '" + key +
                         "'");
    sections[section][key] = {value, lineno};
  }

  RunConfig cfg;
  auto take = [&](const std::string& sec, const std::string& key) -> const detail::ConfigValue* {
    auto s = sections.find(sec);
    if (s == sections.end()) return nullptr;
    auto k = s->second.find(key);
    if (k == s->second.end()) return nullptr;
    return &k->second;
  };
  std::map<std::string, std::set<std::string>> consumed;
  auto get = [&](const std::string& sec, const std::string& key) {
    consumed[sec].insert(key);
    return take(sec, key);
  };

  if (const auto* v = get("scenario", "type")) {
    cfg.scenario_type = v->text;
    if (cfg.scenario_type == "off-grid") cfg.scenario_type = "shoebox";
  }
  if (const auto* v = get("scenario", "seed"))
    cfg.seed = static_cast<std::uint64_t>(detail::parse_int(*v, "seed"));
  if (const auto* v = get("scenario", "N")) cfg.n = static_cast<int>(detail::parse_int(*v, "N"));
  if (const auto* v = get("scenario", "Fs")) cfg.fs = detail::parse_double(*v, "Fs");
  if (const auto* v = get("scenario", "M"))
    cfg.channels = static_cast<int>(detail::parse_int(*v, "M"));
  if (const auto* v = get("scenario", "K"))
    cfg.k_true = static_cast<int>(detail::parse_int(*v, "K"));
  if (const auto* v = get("scenario", "band_lo")) cfg.band_lo = detail::parse_double(*v, "band_lo");
  if (const auto* v = get("scenario", "band_hi")) cfg.band_hi = detail::parse_double(*v, "band_hi");
  if (const auto* v = get("scenario", "dims_lo")) cfg.room.dims_lo = detail::parse_triple(*v, "dims_lo");
  if (const auto* v = get("scenario", "dims_hi")) cfg.room.dims_hi = detail::parse_triple(*v, "dims_hi");
  if (const auto* v = get("scenario", "absorption"))
    cfg.room.absorption = detail::parse_double(*v, "absorption");
  if (const auto* v = get("scenario", "sound_speed"))
    cfg.room.sound_speed = detail::parse_double(*v, "sound_speed");
  if (const auto* v = get("scenario", "wall_margin"))
    cfg.room.wall_margin = detail::parse_double(*v, "wall_margin");
  if (const auto* v = get("scenario", "delay_lo"))
    cfg.synthetic.delay_lo = detail::parse_double(*v, "delay_lo");
  if (const auto* v = get("scenario", "delay_hi"))
    cfg.synthetic.delay_hi = detail::parse_double(*v, "delay_hi");
  if (const auto* v = get("scenario", "min_delay_sep"))
    cfg.synthetic.min_delay_sep = detail::parse_double(*v, "min_delay_sep");
  if (const auto* v = get("scenario", "weight_lo"))
    cfg.synthetic.weight_lo = detail::parse_double(*v, "weight_lo");
  if (const auto* v = get("scenario", "weight_hi"))
    cfg.synthetic.weight_hi = detail::parse_double(*v, "weight_hi");
  if (const auto* v = get("scenario", "source_wav")) cfg.source_wav = v->text;

  if (const auto* v = get("analysis", "f_min")) cfg.f_min = detail::parse_double(*v, "f_min");
  if (const auto* v = get("analysis", "f_max")) cfg.f_max = detail::parse_double(*v, "f_max");
  if (const auto* v = get("analysis", "F"))
    cfg.f_count = static_cast<int>(detail::parse_int(*v, "F"));

  if (const auto* v = get("solver", "method")) cfg.method = v->text;
  if (const auto* v = get("solver", "K"))
    cfg.k_true = static_cast<int>(detail::parse_int(*v, "K"));
  if (const auto* v = get("solver", "n_restarts"))
    cfg.mulan.n_restarts = static_cast<int>(detail::parse_int(*v, "n_restarts"));
  if (const auto* v = get("solver", "max_iter"))
    cfg.mulan.max_iter = static_cast<int>(detail::parse_int(*v, "max_iter"));
  if (const auto* v = get("solver", "conv_thresh"))
    cfg.mulan.conv_thresh = detail::parse_double(*v, "conv_thresh");
  if (const auto* v = get("solver", "renormalize_root_modulus"))
    cfg.mulan.renormalize_root_modulus = detail::parse_bool(*v, "renormalize_root_modulus");
  if (const auto* v = get("solver", "seed"))
    cfg.mulan.rng_seed = static_cast<std::uint64_t>(detail::parse_int(*v, "seed"));
  if (const auto* v = get("solver", "L"))
    cfg.filter_length = static_cast<int>(detail::parse_int(*v, "L"));
  if (const auto* v = get("solver", "lambda")) cfg.lambda = detail::parse_double(*v, "lambda");
  if (const auto* v = get("solver", "lasso_iters"))
    cfg.lasso_iters = static_cast<int>(detail::parse_int(*v, "lasso_iters"));

  if (const auto* v = get("sweep", "K_values")) cfg.sweep.k_values = detail::parse_int_list(*v, "K_values");
  if (const auto* v = get("sweep", "M_values")) cfg.sweep.m_values = detail::parse_int_list(*v, "M_values");
  if (const auto* v = get("sweep", "F_values")) cfg.sweep.f_values = detail::parse_int_list(*v, "F_values");
  if (const auto* v = get("sweep", "trials_per_cell"))
    cfg.sweep.trials_per_cell = static_cast<int>(detail::parse_int(*v, "trials_per_cell"));
  if (const auto* v = get("sweep", "loc_thresh_samples"))
    cfg.sweep.thresholds.location_samples = detail::parse_double(*v, "loc_thresh_samples");
  if (const auto* v = get("sweep", "weight_thresh"))
    cfg.sweep.thresholds.weight = detail::parse_double(*v, "weight_thresh");
  if (const auto* v = get("sweep", "seed"))
    cfg.sweep.rng_seed = static_cast<std::uint64_t>(detail::parse_int(*v, "seed"));

  if (const auto* v = get("output", "dir")) cfg.out_dir = v->text;

  // any key the schema did not consume is a typo
  for (const auto& [sec, entries] : sections)
    for (const auto& [key, value] : entries)
      if (!consumed[sec].count(key))
        throw config_error("config line " + std::to_string(value.line) + ": unknown key '" +
                           key + "' in section [" + sec + "]");

  if (seed_override >= 0) {
    cfg.seed = static_cast<std::uint64_t>(seed_override);
    cfg.mulan.rng_seed = derive_seed(cfg.seed, 0x10CA1);
    cfg.sweep.rng_seed = cfg.seed;
  }
  cfg.sweep.f_min = cfg.f_min;
  cfg.sweep.f_max = cfg.f_max;
  cfg.sweep.n = cfg.n;
  cfg.sweep.fs = cfg.fs;

  cfg.config_hash = fnv1a64(text);
  if (seed_override >= 0)
    cfg.config_hash ^= splitmix64(static_cast<std::uint64_t>(seed_override));
  cfg.validate();
  return cfg;
}

inline RunConfig load_config(const std::filesystem::path& path,
                             std::int64_t seed_override = -1) {
  std::ifstream in(path);
  if (!in) throw config_error("load_config: cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), seed_override);
}

}  // namespace mulan

#endif  // MULAN_CONFIG_HPP
