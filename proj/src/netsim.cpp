#include "scma/netsim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "scma/codebook.hpp"
#include "scma/rng.hpp"

namespace scma {

namespace {

enum StreamPurpose : std::uint64_t { kDropUsers = 1, kShadowing = 2, kFading = 3, kActivity = 4 };

constexpr double kAvgRateFloor = 1e-3;
constexpr double kRateTol = 1e-12;

double mi_average(std::span<const double> sinr) {
  double acc = 0.0;
  for (double s : sinr) acc += std::log2(1.0 + s);
  return std::exp2(acc / static_cast<double>(sinr.size())) - 1.0;
}

double wrap_degrees(double a) {
  a = std::fmod(a + 180.0, 360.0);
  if (a < 0.0) a += 360.0;
  return a - 180.0;
}

}  // namespace

std::string_view to_string(AccessMode m) {
  switch (m) {
    case AccessMode::Ofdma: return "OFDMA";
    case AccessMode::Scma: return "SCMA";
    case AccessMode::MuScma: return "MU-SCMA";
  }
  return "?";
}

std::string_view to_string(SchedulerKind s) { return s == SchedulerKind::Wideband ? "wideband" : "subband"; }

std::optional<AccessMode> parse_access_mode(std::string_view s) {
  if (s == "OFDMA") return AccessMode::Ofdma;
  if (s == "SCMA") return AccessMode::Scma;
  if (s == "MU-SCMA") return AccessMode::MuScma;
  return std::nullopt;
}

std::optional<SchedulerKind> parse_scheduler(std::string_view s) {
  if (s == "wideband") return SchedulerKind::Wideband;
  if (s == "subband") return SchedulerKind::Subband;
  return std::nullopt;
}

void ScenarioConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw InvalidArgument("scenario config: " + field + " " + why);
  };
  if (sites != 1 && sites != 7 && sites != 19 && sites != 37) fail("sites", "must be 1, 7, 19 or 37 (hexagonal rings)");
  if (sectors_per_site != 1 && sectors_per_site != 3) fail("sectors_per_site", "must be 1 or 3");
  if (!(inter_site_distance_m > 0.0)) fail("inter_site_distance_m", "must be > 0");
  if (users_total < 1) fail("users_total", "must be >= 1");
  if (!(min_distance_m > 0.0)) fail("min_distance_m", "must be > 0");
  if (penetration_loss_db < 0.0) fail("penetration_loss_db", "must be >= 0");
  if (shadowing_std_db < 0.0) fail("shadowing_std_db", "must be >= 0");
  if (noise_figure_db < 0.0) fail("noise_figure_db", "must be >= 0");
  if (rx_antennas < 1) fail("rx_antennas", "must be >= 1");
  if (bandwidth_rb < 1) fail("bandwidth_rb", "must be >= 1");
  if (subband_width_rb < 1 || bandwidth_rb % subband_width_rb != 0)
    fail("subband_width_rb", "must divide bandwidth_rb");
  if (!(carrier_hz > 0.0)) fail("carrier_hz", "must be > 0");
  if (user_speed_kmh < 0.0) fail("user_speed_kmh", "must be >= 0");
  if (beta < 0.0) fail("beta", "must be >= 0");
  if (!(resource_utilization > 0.0 && resource_utilization <= 1.0))
    fail("resource_utilization", "must lie in (0, 1]");
  if (!(rate_backoff > 0.0 && rate_backoff <= 1.0)) fail("rate_backoff", "must lie in (0, 1]");
  if (!(pf_window_tti >= 1.0)) fail("pf_window_tti", "must be >= 1");
  if (!(alpha_min > 0.0 && alpha_min < alpha_max && alpha_max < 1.0))
    fail("alpha_min/alpha_max", "must satisfy 0 < alpha_min < alpha_max < 1");
  if (olla_step_db < 0.0) fail("olla_step_db", "must be >= 0");
  if (!(bler_target > 0.0 && bler_target < 1.0)) fail("bler_target", "must lie in (0, 1)");
  if (ttis < 0) fail("ttis", "must be >= 0");
  if (drops < 1) fail("drops", "must be >= 1");
}

const cplx* NetworkState::user_fading(int user, int subband) const {
  const int R = config.rx_antennas;
  return fading.data() + (static_cast<std::size_t>(user) * config.subbands() + subband) * R;
}

double path_loss_db(double distance_m, double min_distance_m) {
  const double d_km = std::max(distance_m, min_distance_m) / 1000.0;
  return 128.1 + 37.6 * std::log10(d_km);
}

double sector_antenna_gain_db(double angle_deg, double max_gain_dbi) {
  const double a = wrap_degrees(angle_deg);
  return -std::min(12.0 * (a / 70.0) * (a / 70.0), 25.0) + max_gain_dbi;
}

std::vector<std::pair<double, double>> hex_site_positions(int sites, double isd) {
  int rings = 0;
  while (3 * rings * rings + 3 * rings + 1 < sites) ++rings;
  require(3 * rings * rings + 3 * rings + 1 == sites, "hex_site_positions: site count is not a full hexagon");
  std::vector<std::pair<double, double>> pos;
  // ring by ring, axial coordinates (q, r)
  pos.emplace_back(0.0, 0.0);
  for (int ring = 1; ring <= rings; ++ring) {
    for (int q = -ring; q <= ring; ++q) {
      for (int r = -ring; r <= ring; ++r) {
        const int s = -q - r;
        if (std::max({std::abs(q), std::abs(r), std::abs(s)}) != ring) continue;
        pos.emplace_back(isd * (q + 0.5 * r), isd * (std::sqrt(3.0) / 2.0) * r);
      }
    }
  }
  return pos;
}

std::vector<std::pair<double, double>> wraparound_shifts(int sites, double isd) {
  if (sites <= 1) return {};
  int rings = 0;
  while (3 * rings * rings + 3 * rings + 1 < sites) ++rings;
  // cluster translation (rings + 1) a1 + rings a2 and its rotations by 60 deg
  const double vx = isd * ((rings + 1) + 0.5 * rings);
  const double vy = isd * (std::sqrt(3.0) / 2.0) * rings;
  std::vector<std::pair<double, double>> out;
  for (int k = 0; k < 6; ++k) {
    const double t = k * std::numbers::pi / 3.0;
    out.emplace_back(vx * std::cos(t) - vy * std::sin(t), vx * std::sin(t) + vy * std::cos(t));
  }
  return out;
}

double fading_correlation(double speed_kmh, double carrier_hz, double tti_seconds) {
  const double doppler = speed_kmh / 3.6 * carrier_hz / 299792458.0;
  return std::cyl_bessel_j(0.0, 2.0 * std::numbers::pi * doppler * tti_seconds);
}

NetworkState deploy(const ScenarioConfig& config, int drop) {
  config.validate();
  NetworkState st;
  st.config = config;
  st.drop = drop;
  const double isd = config.inter_site_distance_m;
  const auto sites = hex_site_positions(config.sites, isd);
  const auto shifts = wraparound_shifts(config.sites, isd);

  for (int s = 0; s < config.sites; ++s) {
    for (int sec = 0; sec < config.sectors_per_site; ++sec) {
      const double bore = config.sectors_per_site == 1 ? 0.0 : 30.0 + 120.0 * sec;
      st.tps.push_back({s, sites[s].first, sites[s].second, bore});
    }
  }

  // Uniform over the network area: a uniformly chosen site, then a uniform
  // point in that site's hexagon (inradius isd / 2).
  Rng drop_rng(config.seed, {static_cast<std::uint64_t>(drop), kDropUsers});
  const double inr = isd / 2.0;
  const double circ = isd / std::sqrt(3.0);
  auto inside = [&](double x, double y) {
    for (int k = 0; k < 3; ++k) {
      const double t = k * std::numbers::pi / 3.0;
      if (std::abs(x * std::cos(t) + y * std::sin(t)) > inr) return false;
    }
    return true;
  };
  st.users.resize(config.users_total);
  for (auto& u : st.users) {
    const auto site = static_cast<int>(drop_rng.below(config.sites));
    double x = 0.0;
    double y = 0.0;
    do {
      x = drop_rng.uniform(-inr, inr);
      y = drop_rng.uniform(-circ, circ);
    } while (!inside(x, y));
    u.x = sites[site].first + x;
    u.y = sites[site].second + y;
  }

  const int U = config.users_total;
  const int C = config.cells();
  st.gain.resize(U, C);
  for (int u = 0; u < U; ++u) {
    Rng shadow_rng(config.seed, {static_cast<std::uint64_t>(drop), kShadowing, static_cast<std::uint64_t>(u)});
    for (int s = 0; s < config.sites; ++s) {
      double best_d2 = std::numeric_limits<double>::infinity();
      double dx = 0.0;
      double dy = 0.0;
      for (int i = -1; i < static_cast<int>(shifts.size()); ++i) {
        const double sx = sites[s].first + (i < 0 ? 0.0 : shifts[i].first);
        const double sy = sites[s].second + (i < 0 ? 0.0 : shifts[i].second);
        const double ex = st.users[u].x - sx;
        const double ey = st.users[u].y - sy;
        if (ex * ex + ey * ey < best_d2) {
          best_d2 = ex * ex + ey * ey;
          dx = ex;
          dy = ey;
        }
      }
      const double shadow = config.shadowing_std_db * shadow_rng.normal();
      const double pl = path_loss_db(std::sqrt(best_d2), config.min_distance_m);
      const double angle = std::atan2(dy, dx) * 180.0 / std::numbers::pi;
      for (int sec = 0; sec < config.sectors_per_site; ++sec) {
        const int c = s * config.sectors_per_site + sec;
        const double ant = config.sectors_per_site == 1
                               ? config.antenna_gain_dbi
                               : sector_antenna_gain_db(angle - st.tps[c].boresight_deg, config.antenna_gain_dbi);
        st.gain(u, c) = db_to_linear(-pl - config.penetration_loss_db - shadow + ant);
      }
    }
    Eigen::Index serving = 0;
    st.gain.row(u).maxCoeff(&serving);
    st.users[u].serving = static_cast<int>(serving);
  }
  st.cell_users.assign(C, {});
  for (int u = 0; u < U; ++u) st.cell_users[st.users[u].serving].push_back(u);

  st.rb_power_w = db_to_linear(config.tx_power_dbm - 30.0) / config.bandwidth_rb;
  st.noise_w = db_to_linear(-174.0 + linear_to_db(180e3) + config.noise_figure_db - 30.0);
  st.fading_rho = fading_correlation(config.user_speed_kmh, config.carrier_hz);
  st.fading.assign(static_cast<std::size_t>(U) * config.subbands() * config.rx_antennas, cplx{});
  st.activity.power_fraction = Eigen::MatrixXd::Ones(C, config.bandwidth_rb);
  st.activity.active_layers = Eigen::MatrixXi::Constant(C, config.subbands(), kScmaLayers);
  st.sinr = Eigen::MatrixXd::Zero(U, config.bandwidth_rb);
  st.prev_sinr = st.sinr;
  st.avg_rate.assign(U, kAvgRateFloor);
  st.olla_db.assign(U, 0.0);
  return st;
}

ActivityMasks apply_utilization(const NetworkState& state, double utilization, int tti) {
  require(utilization > 0.0 && utilization <= 1.0, "apply_utilization: utilization must lie in (0, 1]");
  const auto& cfg = state.config;
  const int C = state.tp_count();
  const int B = cfg.bandwidth_rb;
  const int W = cfg.subband_width_rb;
  ActivityMasks m;
  m.power_fraction = Eigen::MatrixXd::Ones(C, B);
  m.active_layers = Eigen::MatrixXi::Constant(C, cfg.subbands(), kScmaLayers);
  if (utilization >= 1.0) return m;
  for (int c = 0; c < C; ++c) {
    Rng rng(cfg.seed, {static_cast<std::uint64_t>(state.drop), kActivity, static_cast<std::uint64_t>(c),
                       static_cast<std::uint64_t>(tti)});
    if (cfg.mode == AccessMode::Ofdma) {
      for (int rb = 0; rb < B; ++rb) m.power_fraction(c, rb) = rng.bernoulli(utilization) ? 1.0 : 0.0;
      m.active_layers.row(c).setZero();
    } else {
      for (int sb = 0; sb < cfg.subbands(); ++sb) {
        int n = 0;
        for (int l = 0; l < kScmaLayers; ++l) n += rng.bernoulli(utilization) ? 1 : 0;
        m.active_layers(c, sb) = n;
        for (int rb = sb * W; rb < (sb + 1) * W; ++rb)
          m.power_fraction(c, rb) = static_cast<double>(n) / kScmaLayers;
      }
    }
  }
  return m;
}

std::vector<double> rb_interference(const NetworkState& state, const ActivityMasks& masks, int user) {
  const int serving = state.users[user].serving;
  std::vector<double> out(state.config.bandwidth_rb, 0.0);
  for (int c = 0; c < state.tp_count(); ++c) {
    if (c == serving) continue;
    const double p = state.rb_power_w * state.gain(user, c);
    for (int rb = 0; rb < state.config.bandwidth_rb; ++rb) out[rb] += p * masks.power_fraction(c, rb);
  }
  return out;
}

void channel_step(NetworkState& state, int tti, Execution exec) {
  const auto& cfg = state.config;
  const int U = state.user_count();
  const int S = cfg.subbands();
  const int R = cfg.rx_antennas;
  const int W = cfg.subband_width_rb;
  const bool first = state.last_channel_tti < 0;
  const bool advance = first || tti != state.last_channel_tti;
  const double rho = state.fading_rho;
  const double innov = std::sqrt(std::max(0.0, 1.0 - rho * rho));
  const bool full_load = state.activity.power_fraction.minCoeff() >= 1.0;

  [[maybe_unused]] const bool parallel = exec == Execution::Parallel;
#pragma omp parallel for schedule(static) if (parallel)
  for (int u = 0; u < U; ++u) {
    if (advance) {
      Rng rng(cfg.seed, {static_cast<std::uint64_t>(state.drop), kFading, static_cast<std::uint64_t>(u),
                         static_cast<std::uint64_t>(tti)});
      cplx* h = state.fading.data() + static_cast<std::size_t>(u) * S * R;
      for (int i = 0; i < S * R; ++i) {
        const cplx w = rng.complex_normal<cplx>();
        h[i] = first ? w : rho * h[i] + innov * w;
      }
    }
    const int serving = state.users[u].serving;
    const double signal = state.rb_power_w * state.gain(u, serving);
    double full_interference = 0.0;
    if (full_load) {
      for (int c = 0; c < state.tp_count(); ++c)
        if (c != serving) full_interference += state.rb_power_w * state.gain(u, c);
    }
    for (int sb = 0; sb < S; ++sb) {
      const cplx* h = state.user_fading(u, sb);
      double h2 = 0.0;
      for (int r = 0; r < R; ++r) h2 += std::norm(h[r]);
      for (int rb = sb * W; rb < (sb + 1) * W; ++rb) {
        double interference = full_interference;
        if (!full_load) {
          interference = 0.0;
          for (int c = 0; c < state.tp_count(); ++c)
            if (c != serving) interference += state.rb_power_w * state.gain(u, c) * state.activity.power_fraction(c, rb);
        }
        state.sinr(u, rb) = signal * h2 / (state.noise_w + interference);
      }
    }
  }
  if (first) state.prev_sinr = state.sinr;
  state.last_channel_tti = tti;
}

const RateModel& rate_model(AccessMode mode) {
  static const RateModel ofdma = RateModel::ofdma();
  static const RateModel scma = [] {
    const auto graph = build_factor_graph(kScmaTones, 2);
    const auto sig = build_lds_signatures(graph, 0);
    std::vector<EigenProfile> single{EigenProfile::trivial()};
    std::vector<LayerSplit> splits{LayerSplit{}};
    std::vector<int> all(kScmaLayers);
    for (int j = 0; j < kScmaLayers; ++j) all[j] = j;
    for (int j = 1; j <= kScmaLayers; ++j)
      single.push_back(eigen_profile(sig.select_layers(std::span<const int>(all).first(j))));
    for (int j1 = 1; j1 < kScmaLayers; ++j1) {
      const auto strong = eigen_profile(sig.select_layers(std::span<const int>(all).first(j1)));
      const auto weak = eigen_profile(sig.select_layers(std::span<const int>(all).subspan(j1)));
      splits.push_back({strong, weak});
    }
    return RateModel::scma(std::move(single), std::move(splits));
  }();
  return mode == AccessMode::Ofdma ? ofdma : scma;
}

std::pair<double, double> tone_power_allocation(const PairingDecision& d, double fraction, double total_power) {
  const double p = fraction * total_power;
  if (!d.paired()) return {p, 0.0};
  return {*d.alpha * p, (1.0 - *d.alpha) * p};
}

namespace {

// Per-tone capacity of the configuration a decision committed to, evaluated
// at the given SNRs: (strong user own, weak user at strong, weak user own).
struct ActualRates {
  double strong = 0.0;
  double weak_at_strong = 0.0;
  double weak = 0.0;
};

ActualRates actual_rates(const RateModel& model, const PairingDecision& d, double g1, double g2) {
  ActualRates a;
  if (!d.paired()) {
    if (model.form == RateModel::Form::Ofdma) {
      a.strong = std::log2(1.0 + g1);
    } else {
      const auto& prof = model.single[d.config];
      a.strong = sparse_capacity(prof, g1) / prof.tones;
    }
    return a;
  }
  const auto& split = model.splits[d.config];
  const SpectrumShare share{*d.alpha, 1.0};
  const double k = split.strong.tones;
  a.strong = adjusted_rates_scma(share, g1, g1, split.strong, split.weak).first / k;
  a.weak_at_strong = adjusted_rates_scma(share, g1, g1, split.strong, split.weak).second / k;
  a.weak = adjusted_rates_scma(share, g2, g2, split.strong, split.weak).second / k;
  return a;
}

}  // namespace

TtiOutcome schedule_tti(NetworkState& state, int tti, Execution exec) {
  const auto& cfg = state.config;
  const int C = state.tp_count();
  const int U = state.user_count();
  const RateModel& model = rate_model(cfg.mode);
  const SchedulerWeights weights{cfg.beta};
  PairingConfig pcfg;
  pcfg.range = {cfg.alpha_min, cfg.alpha_max};
  const double up_db = cfg.olla_step_db * cfg.bler_target / (1.0 - cfg.bler_target);

  std::vector<std::pair<int, int>> units;
  if (cfg.scheduler == SchedulerKind::Wideband) {
    units.emplace_back(0, cfg.bandwidth_rb);
  } else {
    for (int sb = 0; sb < cfg.subbands(); ++sb)
      units.emplace_back(sb * cfg.subband_width_rb, (sb + 1) * cfg.subband_width_rb);
  }

  TtiOutcome out;
  out.served_bits.assign(U, 0.0);
  std::vector<std::vector<ScheduleRecord>> per_tp(C);
  std::vector<std::size_t> decisions(C, 0);
  std::vector<std::size_t> paired(C, 0);

  [[maybe_unused]] const bool parallel = exec == Execution::Parallel;
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (int c = 0; c < C; ++c) {
    const auto& members = state.cell_users[c];
    if (members.empty()) continue;
    std::vector<UserLinkState> pool(members.size());
    std::vector<double> actual(members.size());
    std::vector<double> sched_buf;
    std::vector<double> act_buf;
    for (const auto& [lo, hi] : units) {
      std::vector<int> rbs;
      for (int rb = lo; rb < hi; ++rb)
        if (state.activity.power_fraction(c, rb) > 0.0) rbs.push_back(rb);
      if (rbs.empty()) continue;

      for (std::size_t i = 0; i < members.size(); ++i) {
        const int u = members[i];
        sched_buf.clear();
        act_buf.clear();
        for (int rb : rbs) {
          const double f = state.activity.power_fraction(c, rb);
          sched_buf.push_back(f * state.prev_sinr(u, rb));
          act_buf.push_back(f * state.sinr(u, rb));
        }
        pool[i].id = u;
        pool[i].gamma = mi_average(sched_buf) * db_to_linear(state.olla_db[u]);
        pool[i].avg_rate = state.avg_rate[u];
        actual[i] = mi_average(act_buf);
      }
      auto index_of = [&](int u) {
        return static_cast<std::size_t>(std::find(members.begin(), members.end(), u) - members.begin());
      };

      PairingDecision d;
      if (cfg.mode == AccessMode::MuScma) {
        d = greedy_pair(pool, weights, model, pcfg);
      } else {
        d.user1 = pf_select(pool, weights, model);
        d.rate1 = model.single_rate(pool[index_of(d.user1)].gamma, &d.config);
      }

      const std::size_t i1 = index_of(d.user1);
      const double g1_act = actual[i1];
      const double g2_act = d.paired() ? actual[index_of(d.user2)] : 0.0;
      const auto cap = actual_rates(model, d, g1_act, g2_act);
      const bool ok1 = d.rate1 <= cap.strong + kRateTol && (!d.paired() || d.rate2 <= cap.weak_at_strong + kRateTol);
      const bool ok2 = d.paired() && d.rate2 <= cap.weak + kRateTol;

      const double scale = cfg.rate_backoff * kBitsPerRbPerSe * static_cast<double>(rbs.size());
      const double bits1 = ok1 ? scale * d.rate1 : 0.0;
      const double bits2 = ok2 ? scale * d.rate2 : 0.0;
      out.served_bits[d.user1] += bits1;
      state.olla_db[d.user1] += ok1 ? up_db : -cfg.olla_step_db;
      if (d.paired()) {
        out.served_bits[d.user2] += bits2;
        state.olla_db[d.user2] += ok2 ? up_db : -cfg.olla_step_db;
      }

      ScheduleRecord rec;
      rec.drop = state.drop;
      rec.tti = tti;
      rec.cell = c;
      rec.user1 = d.user1;
      rec.served_rate_u1_mbps = bits1 / kTtiSeconds / 1e6;
      rec.gamma_u1_db = linear_to_db(pool[i1].gamma);
      if (d.paired()) {
        rec.user2 = d.user2;
        rec.alpha = d.alpha;
        rec.served_rate_u2_mbps = bits2 / kTtiSeconds / 1e6;
        rec.gamma_u2_db = linear_to_db(pool[index_of(d.user2)].gamma);
        ++paired[c];
      }
      ++decisions[c];
      per_tp[c].push_back(rec);
    }
  }

  for (int c = 0; c < C; ++c) {
    out.decisions += decisions[c];
    out.paired += paired[c];
    out.records.insert(out.records.end(), per_tp[c].begin(), per_tp[c].end());
  }
  const double forget = 1.0 / cfg.pf_window_tti;
  for (int u = 0; u < U; ++u) {
    const double served_mbps = out.served_bits[u] / kTtiSeconds / 1e6;
    state.avg_rate[u] = std::max(kAvgRateFloor, (1.0 - forget) * state.avg_rate[u] + forget * served_mbps);
  }
  state.prev_sinr = state.sinr;
  return out;
}

double percentile(std::vector<double> values, double p) {
  require(!values.empty(), "percentile: empty sample");
  require(p >= 0.0 && p <= 1.0, "percentile: p must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double pos = p * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

RunMetrics compute_metrics(const RunLog& log) {
  RunMetrics m;
  if (log.seconds_per_drop <= 0.0 || log.users.empty()) return m;
  double total_bits = 0.0;
  m.user_rates_kbps.reserve(log.users.size());
  for (const auto& u : log.users) {
    total_bits += u.bits;
    m.user_rates_kbps.push_back(u.bits / log.seconds_per_drop / 1e3);
  }
  m.cell_throughput_mbps = total_bits / (log.seconds_per_drop * log.cells * log.drops) / 1e6;
  m.coverage_kbps = percentile(m.user_rates_kbps, 0.05);
  m.pairing_fraction = log.decisions ? static_cast<double>(log.paired) / static_cast<double>(log.decisions) : 0.0;
  m.schedule = log.schedule;
  return m;
}

RunMetrics run(const ScenarioConfig& config, const RunOptions& options) {
  config.validate();
  RunLog log;
  log.cells = config.cells();
  log.drops = config.drops;
  log.seconds_per_drop = config.ttis * kTtiSeconds;
  for (int drop = 0; drop < config.drops; ++drop) {
    NetworkState state = deploy(config, drop);
    std::vector<double> bits(state.user_count(), 0.0);
    for (int tti = 0; tti < config.ttis; ++tti) {
      state.activity = apply_utilization(state, config.resource_utilization, tti);
      channel_step(state, tti, options.exec);
      auto outcome = schedule_tti(state, tti, options.exec);
      for (int u = 0; u < state.user_count(); ++u) bits[u] += outcome.served_bits[u];
      log.decisions += outcome.decisions;
      log.paired += outcome.paired;
      if (options.keep_schedule)
        log.schedule.insert(log.schedule.end(), outcome.records.begin(), outcome.records.end());
    }
    for (int u = 0; u < state.user_count(); ++u) log.users.push_back({drop, u, state.users[u].serving, bits[u]});
  }
  return compute_metrics(log);
}

}  // namespace scma
