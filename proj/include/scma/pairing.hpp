#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "scma/linkrate.hpp"

namespace scma {

/// PF weights w_u = 1 / R_u^beta. beta = 1 is classic proportional fair,
/// beta = 0 is max-rate.
struct SchedulerWeights {
  double beta = 1.0;
  double weight(double avg_rate) const;
};

/// Admissible power split for paired operation, a sub-range of (0, 1).
struct AlphaRange {
  double lo = 0.05;
  double hi = 0.95;
};

/// Signature configurations assigned to the strong and weak user of a pair.
struct LayerSplit {
  EigenProfile strong = EigenProfile::trivial();
  EigenProfile weak = EigenProfile::trivial();
};

/// How instantaneous SNR maps to rate. OFDMA uses log2(1 + gamma); SCMA uses
/// the log-det capacity of the best candidate signature configuration. All
/// rates are normalized per tone so that configurations of different
/// dimension are comparable.
struct RateModel {
  enum class Form { Ofdma, Scma };
  Form form = Form::Ofdma;
  std::vector<EigenProfile> single{EigenProfile::trivial()};
  std::vector<LayerSplit> splits{LayerSplit{}};

  static RateModel ofdma() { return {}; }
  static RateModel scma(std::vector<EigenProfile> single, std::vector<LayerSplit> splits);

  /// Best single-user rate per tone and the index of the configuration used.
  double single_rate(double gamma, int* config = nullptr) const;
};

struct PairingConfig {
  AlphaRange range;
  std::size_t exhaustive_cap = 64;
};

struct PairingDecision {
  enum class Mode { Single, Paired };
  Mode mode = Mode::Single;
  int user1 = -1;  // single user, or the stronger user of the pair
  int user2 = -1;
  std::optional<double> alpha;
  double rate1 = 0.0;  // per tone
  double rate2 = 0.0;
  double wsr = 0.0;
  int config = 0;  // single-user profile or split index

  bool paired() const { return mode == Mode::Paired; }
};

/// PF single-user selection; ties go to the lowest user id.
int pf_select(std::span<const UserLinkState> users, const SchedulerWeights& weights,
              const RateModel& model = RateModel::ofdma());

/// Closed-form stationary point of the point-A weighted sum-rate with
/// weights 1/R. Empty unless the result lies strictly inside (0, 1).
std::optional<double> optimal_alpha_ofdma(double gamma1, double gamma2, double avg_rate1, double avg_rate2);

double wsr_point_A_ofdma(double alpha, double gamma1, double gamma2, double w1, double w2);

/// Point-A weighted sum-rate in eigenvalue form (per block).
double wsr_point_A(double alpha, double gamma1, double gamma2, double w1, double w2, const EigenProfile& prof1,
                   const EigenProfile& prof2);

/// Weighted sum-rate at corner point B. Both terms use gamma2; gamma1 is
/// accepted for a uniform signature and ignored.
double wsr_point_B(double alpha, double gamma1, double gamma2, double avg_rate1, double avg_rate2);

/// Derivative of wsr_point_A with respect to alpha (times ln 2).
double wsr_point_A_slope(double alpha, double gamma1, double gamma2, double w1, double w2, const EigenProfile& prof1,
                         const EigenProfile& prof2);

/// Interior maximizer of the point-A weighted sum-rate found from the
/// stationarity condition: 64-interval bracketing scan of (0, 1), bisection
/// to 1e-10 on every +/- sign change, best WSR among the roots. Empty when
/// there is no root or when alpha = 0 or alpha = 1 does better.
std::optional<double> optimal_alpha_scma(double gamma1, double gamma2, double w1, double w2,
                                         const EigenProfile& prof1, const EigenProfile& prof2);

PairingDecision greedy_pair(std::span<const UserLinkState> users, const SchedulerWeights& weights,
                            const RateModel& model = RateModel::ofdma(), const PairingConfig& config = {});

/// Optimum over all singles and all pairs; reference for greedy_pair.
PairingDecision exhaustive_pair(std::span<const UserLinkState> users, const SchedulerWeights& weights,
                                const RateModel& model = RateModel::ofdma(), const PairingConfig& config = {});

/// Rates and WSR for a fixed pair under the model (strong user first). Empty
/// when no admissible power split exists.
std::optional<PairingDecision> evaluate_pair(const UserLinkState& a, const UserLinkState& b,
                                             const SchedulerWeights& weights, const RateModel& model,
                                             const PairingConfig& config);

}  // namespace scma
