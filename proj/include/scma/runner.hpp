#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "scma/config.hpp"
#include "scma/netsim.hpp"

namespace scma {

struct RunRequest {
  std::optional<std::string> scenario;
  std::optional<std::filesystem::path> config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> drops;
  std::optional<int> ttis;
  std::filesystem::path output = ".";
  std::vector<std::string> overrides;
  Execution exec = Execution::Parallel;
};

/// A named experiment: the shared base config and the modes run on it.
struct Experiment {
  ScenarioConfig base;
  std::vector<AccessMode> modes;
};

/// Names accepted by --scenario.
std::vector<std::string> preset_names();

/// Resolves defaults, config file, preset, seed/drops/ttis flags and
/// overrides, in that order.
Experiment resolve(const RunRequest& request);

struct ModeResult {
  AccessMode mode;
  RunMetrics metrics;
};

/// Runs every mode of the experiment on the same seeds.
std::vector<ModeResult> run_experiment(const Experiment& exp, Execution exec, bool keep_schedule);

// CSV writers. summary: mode,throughput_mbps,coverage_kbps,pairing_fraction,
// throughput_gain_pct,coverage_gain_pct (gains relative to the first row).
// schedule: mode,drop,tti,cell,user1,user2,alpha,served_rate_u1,
// served_rate_u2,gamma_u1,gamma_u2 (rates in Mbps, gammas in dB).
void write_summary_csv(std::ostream& os, const std::vector<ModeResult>& results);
void write_schedule_csv(std::ostream& os, const std::vector<ModeResult>& results);

/// Runs the request and writes summary.csv, schedule_log.csv and
/// effective_config.txt into the output directory.
std::vector<ModeResult> run_scenario(const RunRequest& request);

struct SweepSpec {
  std::string parameter;  // beta, utilization or users_per_cell
  std::vector<double> values;
};

/// Parses `param=v1,v2,...`.
SweepSpec parse_sweep(const std::string& text);

struct SweepPoint {
  double value;
  AccessMode mode;
  double throughput_mbps;
  double coverage_kbps;
};

/// One run per value and mode on paired seeds; writes sweep.csv
/// (value,mode,throughput_mbps,coverage_kbps) and effective_config.txt.
std::vector<SweepPoint> sweep(const RunRequest& request, const SweepSpec& spec);

}  // namespace scma
