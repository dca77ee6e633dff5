// SPDX-License-Identifier: Apache-2.0
#ifndef MULAN_IO_HPP
#define MULAN_IO_HPP

#include <json.hpp>

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mulan/evaluate.hpp"
#include "mulan/types.hpp"

namespace mulan {

inline std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string hash_hex(std::uint64_t h) {
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

// ---------------------------------------------------------------------------
// Measurement container: "MULNMES1" magic, config hash, M, N, Fs, then M*N
// float64 samples channel-major. Written little-endian (host order on every
// platform this project targets).
// ---------------------------------------------------------------------------

inline constexpr char kMeasurementsMagic[8] = {'M', 'U', 'L', 'N', 'M', 'E', 'S', '1'};

struct MeasurementFile {
  std::vector<RealSignal> channels;
  std::uint64_t config_hash = 0;
};

inline void write_measurements(const std::filesystem::path& path,
                               const std::vector<RealSignal>& channels,
                               std::uint64_t config_hash) {
  if (channels.empty()) throw config_error("write_measurements: no channels");
  const Eigen::Index n = channels.front().size();
  for (const RealSignal& c : channels)
    if (c.size() != n || c.sample_rate != channels.front().sample_rate)
      throw config_error("write_measurements: inconsistent channels");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw config_error("write_measurements: cannot open " + path.string());
  out.write(kMeasurementsMagic, sizeof(kMeasurementsMagic));
  const std::uint32_t m = static_cast<std::uint32_t>(channels.size());
  const std::uint64_t len = static_cast<std::uint64_t>(n);
  const double fs = channels.front().sample_rate;
  out.write(reinterpret_cast<const char*>(&config_hash), sizeof(config_hash));
  out.write(reinterpret_cast<const char*>(&m), sizeof(m));
  out.write(reinterpret_cast<const char*>(&len), sizeof(len));
  out.write(reinterpret_cast<const char*>(&fs), sizeof(fs));
  for (const RealSignal& c : channels)
    out.write(reinterpret_cast<const char*>(c.samples.data()),
              static_cast<std::streamsize>(sizeof(double) * n));
  if (!out) throw config_error("write_measurements: write failed for " + path.string());
}

inline MeasurementFile read_measurements(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw config_error("read_measurements: cannot open " + path.string());
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMeasurementsMagic, sizeof(magic)) != 0)
    throw config_error("read_measurements: bad magic in " + path.string());
  std::uint64_t config_hash = 0, len = 0;
  std::uint32_t m = 0;
  double fs = 0.0;
  in.read(reinterpret_cast<char*>(&config_hash), sizeof(config_hash));
  in.read(reinterpret_cast<char*>(&m), sizeof(m));
  in.read(reinterpret_cast<char*>(&len), sizeof(len));
  in.read(reinterpret_cast<char*>(&fs), sizeof(fs));
  if (!in || m == 0 || len == 0 || !(fs > 0.0))
    throw config_error("read_measurements: corrupt header in " + path.string());
  MeasurementFile file;
  file.config_hash = config_hash;
  for (std::uint32_t c = 0; c < m; ++c) {
    RealVector samples(static_cast<Eigen::Index>(len));
    in.read(reinterpret_cast<char*>(samples.data()),
            static_cast<std::streamsize>(sizeof(double) * len));
    if (!in) throw config_error("read_measurements: truncated data in " + path.string());
    file.channels.emplace_back(std::move(samples), fs);
  }
  return file;
}

// ---------------------------------------------------------------------------
// JSON helpers
// ---------------------------------------------------------------------------

inline nlohmann::json echoes_to_json(const std::vector<EchoSet>& echoes) {
  nlohmann::json channels = nlohmann::json::array();
  for (const EchoSet& e : echoes) {
    nlohmann::json ch = nlohmann::json::array();
    for (std::size_t k = 0; k < e.size(); ++k)
      ch.push_back({{"delay_s", e.delays[k]}, {"weight", e.weights[k]}});
    channels.push_back(std::move(ch));
  }
  return channels;
}

inline std::vector<EchoSet> echoes_from_json(const nlohmann::json& channels) {
  std::vector<EchoSet> out;
  for (const auto& ch : channels) {
    std::vector<double> delays, weights;
    for (const auto& echo : ch) {
      delays.push_back(echo.at("delay_s").get<double>());
      weights.push_back(echo.at("weight").get<double>());
    }
    out.emplace_back(std::move(delays), std::move(weights));
  }
  return out;
}

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw config_error("write_json: cannot open " + path.string());
  out << j.dump(2) << "\n";
}

inline nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw config_error("read_json: cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw config_error("read_json: " + path.string() + ": " + e.what());
  }
  return j;
}

// ---------------------------------------------------------------------------
// WAV ingestion: mono PCM16 or IEEE float32, sample rate must match exactly.
// ---------------------------------------------------------------------------

inline RealSignal read_wav_mono(const std::filesystem::path& path, double expected_fs) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw config_error("read_wav_mono: cannot open " + path.string());
  auto read_u32 = [&]() {
    std::uint32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), 4);
    return v;
  };
  auto read_u16 = [&]() {
    std::uint16_t v = 0;
    in.read(reinterpret_cast<char*>(&v), 2);
    return v;
  };
  char tag[4];
  in.read(tag, 4);
  if (!in || std::memcmp(tag, "RIFF", 4) != 0)
    throw config_error("read_wav_mono: not a RIFF file");
  read_u32();  // total size
  in.read(tag, 4);
  if (!in || std::memcmp(tag, "WAVE", 4) != 0)
    throw config_error("read_wav_mono: not a WAVE file");

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  std::vector<char> data;
  while (in.read(tag, 4)) {
    const std::uint32_t size = read_u32();
    if (std::memcmp(tag, "fmt ", 4) == 0) {
      format = read_u16();
      channels = read_u16();
      rate = read_u32();
      read_u32();  // byte rate
      read_u16();  // block align
      bits = read_u16();
      in.seekg(size > 16 ? size - 16 : 0, std::ios::cur);
    } else if (std::memcmp(tag, "data", 4) == 0) {
      data.resize(size);
      in.read(data.data(), size);
      break;
    } else {
      in.seekg(size + (size & 1), std::ios::cur);
    }
  }
  if (data.empty()) throw config_error("read_wav_mono: no data chunk");
  if (channels != 1) throw config_error("read_wav_mono: only mono files are supported");
  if (rate != static_cast<std::uint32_t>(expected_fs))
    throw config_error("read_wav_mono: sample rate " + std::to_string(rate) +
                       " does not match configured " + std::to_string(expected_fs) +
                       " (no resampling)");
  RealVector samples;
  if (format == 1 && bits == 16) {
    const std::size_t n = data.size() / 2;
    samples.resize(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      std::int16_t v;
      std::memcpy(&v, data.data() + 2 * i, 2);
      samples(static_cast<Eigen::Index>(i)) = v / 32768.0;
    }
  } else if (format == 3 && bits == 32) {
    const std::size_t n = data.size() / 4;
    samples.resize(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      float v;
      std::memcpy(&v, data.data() + 4 * i, 4);
      samples(static_cast<Eigen::Index>(i)) = v;
    }
  } else {
    throw config_error("read_wav_mono: unsupported encoding (PCM16 or float32 only)");
  }
  return RealSignal(std::move(samples), expected_fs);
}

// ---------------------------------------------------------------------------
// CSV emission
// ---------------------------------------------------------------------------

inline const char* kEvalCsvHeader =
    "seed,K,M,F,solver,location_rmse,weight_rmse,location_success,weight_success,cost,"
    "iterations\n";

inline void append_eval_csv_row(const std::filesystem::path& path, std::uint64_t seed, int k,
                                int m, int f, const std::string& solver,
                                const EvalReport& report, double cost, int iterations) {
  const bool fresh = !std::filesystem::exists(path);
  std::ofstream out(path, std::ios::app);
  if (!out) throw config_error("append_eval_csv_row: cannot open " + path.string());
  if (fresh) out << kEvalCsvHeader;
  out << seed << ',' << k << ',' << m << ',' << f << ',' << solver << ','
      << report.location_rmse << ',' << report.weight_rmse << ','
      << (report.location_success ? 1 : 0) << ',' << (report.weight_success ? 1 : 0) << ','
      << cost << ',' << iterations << "\n";
}

inline void write_sweep_trials_csv(const std::filesystem::path& path,
                                   const SweepResult& result) {
  std::ofstream out(path);
  if (!out) throw config_error("write_sweep_trials_csv: cannot open " + path.string());
  out << "K,M,F,trial,seed,solved,location_rmse,weight_rmse,location_success,"
         "weight_success,cost,iterations,error\n";
  for (const CellResult& cell : result.cells)
    for (std::size_t t = 0; t < cell.trials.size(); ++t) {
      const TrialRecord& r = cell.trials[t];
      std::string err = r.error;
      for (char& c : err)
        if (c == ',' || c == '\n') c = ';';
      out << cell.k << ',' << cell.m << ',' << cell.f << ',' << t << ',' << r.seed << ','
          << (r.solved ? 1 : 0) << ',' << r.location_rmse << ',' << r.weight_rmse << ','
          << (r.location_success ? 1 : 0) << ',' << (r.weight_success ? 1 : 0) << ','
          << r.cost << ',' << r.iterations << ',' << err << "\n";
    }
}

inline void write_sweep_rates_csv(const std::filesystem::path& path,
                                  const SweepResult& result, bool weights) {
  std::ofstream out(path);
  if (!out) throw config_error("write_sweep_rates_csv: cannot open " + path.string());
  out << "K,M,F," << (weights ? "weight_rate" : "location_rate") << "\n";
  for (const CellResult& cell : result.cells)
    out << cell.k << ',' << cell.m << ',' << cell.f << ','
        << (weights ? cell.weight_rate : cell.location_rate) << "\n";
}

}  // namespace mulan

#endif  // MULAN_IO_HPP
