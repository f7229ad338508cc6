#include "scma/pairing.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace scma {

double SchedulerWeights::weight(double avg_rate) const {
  require(avg_rate > 0.0, "scheduler weights: average rate must be > 0");
  return beta == 0.0 ? 1.0 : std::pow(avg_rate, -beta);
}

RateModel RateModel::scma(std::vector<EigenProfile> single, std::vector<LayerSplit> splits) {
  require(!single.empty(), "rate model: need at least one single-user configuration");
  require(!splits.empty(), "rate model: need at least one layer split");
  for (const auto& s : splits)
    require(s.strong.tones == s.weak.tones, "rate model: split profiles must share the tone dimension");
  RateModel m;
  m.form = Form::Scma;
  m.single = std::move(single);
  m.splits = std::move(splits);
  return m;
}

double RateModel::single_rate(double gamma, int* config) const {
  if (form == Form::Ofdma) {
    if (config) *config = 0;
    return std::log2(1.0 + gamma);
  }
  // A later configuration must win by more than rounding noise, so that exact
  // ties (Jensen-equality cases) keep the earlier, simpler configuration.
  double best = -1.0;
  int best_idx = 0;
  for (std::size_t i = 0; i < single.size(); ++i) {
    const double r = sparse_capacity(single[i], gamma) / single[i].tones;
    if (r > best * (1.0 + 1e-12) + 1e-15) {
      best = r;
      best_idx = static_cast<int>(i);
    }
  }
  if (config) *config = best_idx;
  return best;
}

int pf_select(std::span<const UserLinkState> users, const SchedulerWeights& weights, const RateModel& model) {
  require(!users.empty(), "pf_select: empty user pool");
  int best = -1;
  double best_metric = -1.0;
  for (const auto& u : users) {
    const double metric = weights.weight(u.avg_rate) * model.single_rate(u.gamma);
    if (metric > best_metric || (metric == best_metric && u.id < best)) {
      best_metric = metric;
      best = u.id;
    }
  }
  return best;
}

std::optional<double> optimal_alpha_ofdma(double gamma1, double gamma2, double avg_rate1, double avg_rate2) {
  require(gamma1 > 0.0 && gamma2 > 0.0, "optimal_alpha_ofdma: SNRs must be positive");
  require(avg_rate1 > 0.0 && avg_rate2 > 0.0, "optimal_alpha_ofdma: average rates must be positive");
  if (avg_rate1 == avg_rate2) return std::nullopt;
  const double a = (avg_rate1 * gamma2 - avg_rate2 * gamma1) / ((avg_rate2 - avg_rate1) * gamma1 * gamma2);
  if (!(a > 0.0 && a < 1.0)) return std::nullopt;
  return a;
}

double wsr_point_A_ofdma(double alpha, double gamma1, double gamma2, double w1, double w2) {
  return w1 * std::log2(1.0 + alpha * gamma1) + w2 * std::log2(1.0 + (1.0 - alpha) * gamma2 / (1.0 + alpha * gamma2));
}

double wsr_point_A(double alpha, double gamma1, double gamma2, double w1, double w2, const EigenProfile& prof1,
                   const EigenProfile& prof2) {
  const auto [r1, r2] = adjusted_rates_scma({alpha, 1.0}, gamma1, gamma2, prof1, prof2);
  return w1 * r1 + w2 * r2;
}

double wsr_point_B(double alpha, double gamma1, double gamma2, double avg_rate1, double avg_rate2) {
  // gamma1 is deliberately unused: this form uses gamma2 in both terms.
  (void)gamma1;
  return std::log2(1.0 + alpha * gamma2 / (1.0 + (1.0 - alpha) * gamma2)) / avg_rate1 +
         std::log2(1.0 + (1.0 - alpha) * gamma2) / avg_rate2;
}

double wsr_point_A_slope(double alpha, double gamma1, double gamma2, double w1, double w2, const EigenProfile& prof1,
                         const EigenProfile& prof2) {
  const double j1 = prof1.layers;
  const double j2 = prof2.layers;
  double s = 0.0;
  for (double l : prof1.eigenvalues) s += w1 * gamma1 * l / (j1 + gamma1 * l * alpha);
  for (double l : prof2.eigenvalues)
    s -= w2 * gamma2 * l * (1.0 + gamma2) / ((1.0 + gamma2 * alpha) * (j2 + gamma2 * l + (j2 - l) * gamma2 * alpha));
  return s;
}

std::optional<double> optimal_alpha_scma(double gamma1, double gamma2, double w1, double w2,
                                         const EigenProfile& prof1, const EigenProfile& prof2) {
  require(gamma1 > 0.0 && gamma2 > 0.0, "optimal_alpha_scma: SNRs must be positive");
  require(w1 >= 0.0 && w2 >= 0.0, "optimal_alpha_scma: weights must be non-negative");
  constexpr int kIntervals = 64;
  constexpr double kTol = 1e-10;
  auto slope = [&](double a) { return wsr_point_A_slope(a, gamma1, gamma2, w1, w2, prof1, prof2); };

  std::optional<double> best;
  double best_wsr = -1.0;
  auto consider = [&](double a) {
    if (!(a > 0.0 && a < 1.0)) return;
    const double wsr = wsr_point_A(a, gamma1, gamma2, w1, w2, prof1, prof2);
    if (wsr > best_wsr) {
      best_wsr = wsr;
      best = a;
    }
  };

  double lo = 0.0;
  double f_lo = slope(lo);
  for (int i = 1; i <= kIntervals; ++i) {
    const double hi = static_cast<double>(i) / kIntervals;
    const double f_hi = slope(hi);
    // A maximum of the WSR is a +/- crossing of its slope.
    if (f_lo > 0.0 && f_hi <= 0.0) {
      double a = lo;
      double b = hi;
      if (f_hi == 0.0) {
        a = b = hi;
      }
      while (b - a > kTol) {
        const double mid = 0.5 * (a + b);
        if (slope(mid) > 0.0)
          a = mid;
        else
          b = mid;
      }
      consider(0.5 * (a + b));
    }
    lo = hi;
    f_lo = f_hi;
  }
  // An interior root that loses to an endpoint is only a local maximum; the
  // endpoints serve a single user, so there is no useful split.
  if (best && (wsr_point_A(0.0, gamma1, gamma2, w1, w2, prof1, prof2) > best_wsr ||
               wsr_point_A(1.0, gamma1, gamma2, w1, w2, prof1, prof2) > best_wsr))
    return std::nullopt;
  return best;
}

std::optional<PairingDecision> evaluate_pair(const UserLinkState& a, const UserLinkState& b,
                                             const SchedulerWeights& weights, const RateModel& model,
                                             const PairingConfig& config) {
  if (a.gamma == b.gamma || a.gamma <= 0.0 || b.gamma <= 0.0) return std::nullopt;
  const UserLinkState& strong = a.gamma > b.gamma ? a : b;
  const UserLinkState& weak = a.gamma > b.gamma ? b : a;
  const double ws = weights.weight(strong.avg_rate);
  const double ww = weights.weight(weak.avg_rate);

  std::optional<PairingDecision> best;
  for (std::size_t s = 0; s < model.splits.size(); ++s) {
    std::optional<double> alpha;
    if (model.form == RateModel::Form::Ofdma) {
      if (ws != ww) alpha = optimal_alpha_ofdma(strong.gamma, weak.gamma, 1.0 / ws, 1.0 / ww);
    } else {
      alpha = optimal_alpha_scma(strong.gamma, weak.gamma, ws, ww, model.splits[s].strong, model.splits[s].weak);
    }
    if (!alpha) continue;
    const double al = std::clamp(*alpha, config.range.lo, config.range.hi);

    PairingDecision d;
    d.mode = PairingDecision::Mode::Paired;
    d.user1 = strong.id;
    d.user2 = weak.id;
    d.alpha = al;
    d.config = static_cast<int>(s);
    if (model.form == RateModel::Form::Ofdma) {
      const auto sinr = effective_sinrs({al, 1.0}, strong.gamma, weak.gamma);
      d.rate1 = std::log2(1.0 + sinr.strong);
      d.rate2 = std::log2(1.0 + sinr.weak);
    } else {
      const auto& split = model.splits[s];
      const auto [r1, r2] = adjusted_rates_scma({al, 1.0}, strong.gamma, weak.gamma, split.strong, split.weak);
      d.rate1 = r1 / split.strong.tones;
      d.rate2 = r2 / split.weak.tones;
    }
    d.wsr = ws * d.rate1 + ww * d.rate2;
    if (!best || d.wsr > best->wsr) best = d;
  }
  return best;
}

namespace {

PairingDecision single_decision(const UserLinkState& u, const SchedulerWeights& weights, const RateModel& model) {
  PairingDecision d;
  d.user1 = u.id;
  d.rate1 = model.single_rate(u.gamma, &d.config);
  d.wsr = weights.weight(u.avg_rate) * d.rate1;
  return d;
}

bool lower_pair(const PairingDecision& a, const PairingDecision& b) {
  const int a_lo = std::min(a.user1, a.user2), a_hi = std::max(a.user1, a.user2);
  const int b_lo = std::min(b.user1, b.user2), b_hi = std::max(b.user1, b.user2);
  return a_lo != b_lo ? a_lo < b_lo : a_hi < b_hi;
}

}  // namespace

PairingDecision greedy_pair(std::span<const UserLinkState> users, const SchedulerWeights& weights,
                            const RateModel& model, const PairingConfig& config) {
  require(!users.empty(), "greedy_pair: empty user pool");
  const int first = pf_select(users, weights, model);
  const UserLinkState* u1 = nullptr;
  for (const auto& u : users)
    if (u.id == first) u1 = &u;
  const PairingDecision single = single_decision(*u1, weights, model);

  std::optional<PairingDecision> best;
  for (const auto& u : users) {
    if (u.id == first) continue;
    auto cand = evaluate_pair(*u1, u, weights, model, config);
    if (!cand) continue;
    if (!best || cand->wsr > best->wsr || (cand->wsr == best->wsr && lower_pair(*cand, *best))) best = cand;
  }
  if (best && best->wsr > single.wsr) return *best;
  return single;
}

PairingDecision exhaustive_pair(std::span<const UserLinkState> users, const SchedulerWeights& weights,
                                const RateModel& model, const PairingConfig& config) {
  require(!users.empty(), "exhaustive_pair: empty user pool");
  require(users.size() <= config.exhaustive_cap,
          "exhaustive_pair: pool of " + std::to_string(users.size()) + " users exceeds cap of " +
              std::to_string(config.exhaustive_cap));
  std::optional<PairingDecision> best;
  for (const auto& u : users) {
    auto d = single_decision(u, weights, model);
    if (!best || d.wsr > best->wsr || (d.wsr == best->wsr && d.user1 < best->user1)) best = d;
  }
  std::optional<PairingDecision> best_pair;
  for (std::size_t i = 0; i < users.size(); ++i) {
    for (std::size_t j = i + 1; j < users.size(); ++j) {
      auto cand = evaluate_pair(users[i], users[j], weights, model, config);
      if (!cand) continue;
      if (!best_pair || cand->wsr > best_pair->wsr || (cand->wsr == best_pair->wsr && lower_pair(*cand, *best_pair)))
        best_pair = cand;
    }
  }
  if (best_pair && best_pair->wsr > best->wsr) return *best_pair;
  return *best;
}

}  // namespace scma
