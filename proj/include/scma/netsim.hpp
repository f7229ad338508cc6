#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "scma/common.hpp"
#include "scma/pairing.hpp"

namespace scma {

enum class AccessMode { Ofdma, Scma, MuScma };
enum class SchedulerKind { Wideband, Subband };

std::string_view to_string(AccessMode m);
std::string_view to_string(SchedulerKind s);
std::optional<AccessMode> parse_access_mode(std::string_view s);
std::optional<SchedulerKind> parse_scheduler(std::string_view s);

/// Full parameterization of one simulation run. Defaults follow the
/// 19-site / 570-user / 10 MHz LTE evaluation setup.
struct ScenarioConfig {
  // deployment
  int sites = 19;
  int sectors_per_site = 3;
  double inter_site_distance_m = 500.0;
  int users_total = 570;
  double min_distance_m = 35.0;
  double penetration_loss_db = 20.0;
  double shadowing_std_db = 8.0;
  double tx_power_dbm = 46.0;
  double antenna_gain_dbi = 14.0;
  double noise_figure_db = 9.0;
  int rx_antennas = 2;
  // radio
  int bandwidth_rb = 50;
  int subband_width_rb = 5;
  double carrier_hz = 2.0e9;
  double user_speed_kmh = 3.0;
  // scheduling and link adaptation
  AccessMode mode = AccessMode::Ofdma;
  SchedulerKind scheduler = SchedulerKind::Wideband;
  double beta = 1.0;
  double resource_utilization = 1.0;
  double rate_backoff = 0.75;
  double pf_window_tti = 100.0;
  double alpha_min = 0.05;
  double alpha_max = 0.95;
  double olla_step_db = 0.5;
  double bler_target = 0.1;
  // simulation
  int ttis = 200;
  int drops = 1;
  std::uint64_t seed = 1;

  /// Throws InvalidArgument naming the offending field.
  void validate() const;
  int subbands() const { return bandwidth_rb / subband_width_rb; }
  int cells() const { return sites * sectors_per_site; }

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// Layers of the canonical K = 4, N = 2 graph; per-subband SCMA layer
/// activity is counted against this.
inline constexpr int kScmaLayers = 6;
inline constexpr int kScmaTones = 4;
/// Bits carried per RB per TTI at 1 bit/s/Hz (180 kHz x 1 ms).
inline constexpr double kBitsPerRbPerSe = 180.0;
inline constexpr double kTtiSeconds = 1e-3;

struct TransmitPoint {
  int site = 0;
  double x = 0.0;
  double y = 0.0;
  double boresight_deg = 0.0;
};

struct UserTerminal {
  double x = 0.0;
  double y = 0.0;
  int serving = 0;
};

/// Per-TP transmit activity for one TTI. power_fraction(tp, rb) is 0/1 for
/// OFDMA RBs and active_layers/6 for SCMA subbands.
struct ActivityMasks {
  Eigen::MatrixXd power_fraction;
  Eigen::MatrixXi active_layers;  // tps x subbands (SCMA modes only)
};

struct NetworkState {
  ScenarioConfig config;
  int drop = 0;
  std::vector<TransmitPoint> tps;
  std::vector<UserTerminal> users;
  std::vector<std::vector<int>> cell_users;
  Eigen::MatrixXd gain;  // users x tps, linear large-scale gain
  double rb_power_w = 0.0;
  double noise_w = 0.0;
  double fading_rho = 1.0;

  // time-varying state
  std::vector<cplx> fading;  // users x subbands x antennas
  ActivityMasks activity;
  Eigen::MatrixXd sinr;       // users x rb, full-power post-MRC SINR this TTI
  Eigen::MatrixXd prev_sinr;  // last reported (one TTI old)
  std::vector<double> avg_rate;
  std::vector<double> olla_db;
  int last_channel_tti = -1;

  int user_count() const { return static_cast<int>(users.size()); }
  int tp_count() const { return static_cast<int>(tps.size()); }
  const cplx* user_fading(int user, int subband) const;
};

/// L = 128.1 + 37.6 log10(D[km]) with D clamped below to `min_distance_m`.
double path_loss_db(double distance_m, double min_distance_m = 35.0);

/// Horizontal sector pattern -min(12 (theta/70)^2, 25) + max_gain.
double sector_antenna_gain_db(double angle_deg, double max_gain_dbi);

/// Site positions on hexagonal rings (1, 7, 19 or 37 sites).
std::vector<std::pair<double, double>> hex_site_positions(int sites, double isd);

/// Shift vectors of the wraparound cluster images (empty for one site).
std::vector<std::pair<double, double>> wraparound_shifts(int sites, double isd);

/// Lag-one Jakes correlation J0(2 pi f_d T).
double fading_correlation(double speed_kmh, double carrier_hz, double tti_seconds = kTtiSeconds);

NetworkState deploy(const ScenarioConfig& config, int drop = 0);

/// Draws per-TP activity for `tti` from the drop's counter-based streams.
ActivityMasks apply_utilization(const NetworkState& state, double utilization, int tti);

/// Advances fading to `tti` and recomputes per-RB SINR with interference
/// from the current activity masks.
void channel_step(NetworkState& state, int tti, Execution exec = Execution::Parallel);

struct ScheduleRecord {
  int drop = 0;
  int tti = 0;
  int cell = 0;
  int user1 = -1;
  int user2 = -1;
  std::optional<double> alpha;
  double served_rate_u1_mbps = 0.0;
  double served_rate_u2_mbps = 0.0;
  double gamma_u1_db = 0.0;
  std::optional<double> gamma_u2_db;
};

struct TtiOutcome {
  std::vector<ScheduleRecord> records;
  std::vector<double> served_bits;  // per user
  std::size_t decisions = 0;
  std::size_t paired = 0;
};

/// The rate model used by a mode (OFDMA closed forms, or SCMA link
/// adaptation over the unspread and canonical sparse configurations).
const RateModel& rate_model(AccessMode mode);

/// Per-tone power split (strong, weak) of a decision at transmit power
/// fraction `fraction`; sums to P * fraction.
std::pair<double, double> tone_power_allocation(const PairingDecision& d, double fraction, double total_power);

/// Schedules every TP for one TTI, applies link-adaptation success checks
/// against the actual SINR and updates PF averages and OLLA offsets.
TtiOutcome schedule_tti(NetworkState& state, int tti, Execution exec = Execution::Parallel);

struct UserServed {
  int drop = 0;
  int user = 0;
  int cell = 0;
  double bits = 0.0;
};

struct RunLog {
  std::vector<ScheduleRecord> schedule;
  std::vector<UserServed> users;
  int cells = 0;
  int drops = 0;
  double seconds_per_drop = 0.0;
  std::size_t decisions = 0;
  std::size_t paired = 0;
};

struct RunMetrics {
  double cell_throughput_mbps = 0.0;
  double coverage_kbps = 0.0;
  double pairing_fraction = 0.0;
  std::vector<double> user_rates_kbps;
  std::vector<ScheduleRecord> schedule;
};

/// Linear interpolation between order statistics at position p (n - 1).
double percentile(std::vector<double> values, double p);

RunMetrics compute_metrics(const RunLog& log);

struct RunOptions {
  bool keep_schedule = false;
  Execution exec = Execution::Parallel;
};

RunMetrics run(const ScenarioConfig& config, const RunOptions& options = {});

/// Per-RB interference power seen by `user` under the given masks (W).
std::vector<double> rb_interference(const NetworkState& state, const ActivityMasks& masks, int user);

}  // namespace scma
