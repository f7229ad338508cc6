#pragma once

#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "scma/codebook.hpp"
#include "scma/common.hpp"

namespace scma {

/// Scheduler-side view of one user: instantaneous SIMO SNR (linear), the
/// long-term average rate and, optionally, the raw channel.
struct UserLinkState {
  int id = 0;
  double gamma = 0.0;
  double avg_rate = 1.0;
  double noise_power = 1.0;
  Eigen::VectorXcd channel;
};

/// Checks the UserLinkState invariants; when `tx_power` > 0 and a channel is
/// present, gamma must equal |h|^2 P / N within 1e-9 (relative).
void validate(const UserLinkState& user, double tx_power = 0.0);

/// Power split between the strong user (alpha * P) and the weak user.
struct SpectrumShare {
  double alpha = 0.5;
  double total_power = 1.0;

  /// Paired operation requires 0 < alpha < 1 and P > 0. The rate formulas
  /// below also accept the closed interval to evaluate the limits.
  bool valid() const { return alpha > 0.0 && alpha < 1.0 && total_power > 0.0; }
};

/// Eigenvalues of S^H S in descending order, with the signature geometry
/// (K tones, J layers) they came from.
struct EigenProfile {
  int tones = 1;
  int layers = 1;
  std::vector<double> eigenvalues{1.0};

  /// The single-tone, single-layer profile (S = [1]); SCMA formulas reduce
  /// to their OFDMA forms with it.
  static EigenProfile trivial() { return {}; }
};

EigenProfile eigen_profile(const SignatureMatrix& sig);

/// sum_i log2(1 + rho * lambda_i), i.e. log2 det(I + rho S^H S).
double log_det_rate(const EigenProfile& profile, double rho);

/// log2 det(I + gamma / J * S^H S) for a single user on all layers of S.
double sparse_capacity(const SignatureMatrix& sig, int layers, double gamma);
double sparse_capacity(const EigenProfile& profile, double gamma);

struct EffectiveSinrs {
  double strong = 0.0;           // user 1 after SIC
  double weak = 0.0;             // user 2 at its own receiver
  double weak_at_strong = 0.0;   // user 2 at user 1, user 1 as interference
};

/// Requires gamma1 >= gamma2 >= 0; throws InvalidArgument otherwise (swap the
/// users so that user 1 is the stronger one).
EffectiveSinrs effective_sinrs(const SpectrumShare& share, double gamma1, double gamma2);

/// Ratio of user 2's effective SINR at user 1 to that at user 2.
double detection_margin(const SpectrumShare& share, double gamma1, double gamma2);

enum class RegionConstraint { None, SumRate, WeakAtStrong, Strong, WeakOwn };

std::string_view to_string(RegionConstraint c);

struct RegionVerdict {
  bool feasible = true;
  RegionConstraint violated = RegionConstraint::None;
};

/// Two-user OFDMA region: sum-rate bound at user 1, single-user detection of
/// user 2 at user 1, user 1 after SIC, and user 2 at its own receiver. The
/// first violated constraint is reported.
RegionVerdict rate_region_check(double rate1, double rate2, const SpectrumShare& share, double gamma1,
                                double gamma2);

/// SCMA analog of the region check built from eigenvalue sums (per block).
RegionVerdict scma_region_check(double rate1, double rate2, const SpectrumShare& share, double gamma1,
                                double gamma2, const EigenProfile& prof1, const EigenProfile& prof2);

/// Adjusted per-block rates of the strong and weak user on their signature
/// sets (point A operation).
std::pair<double, double> adjusted_rates_scma(const SpectrumShare& share, double gamma1, double gamma2,
                                              const EigenProfile& prof1, const EigenProfile& prof2);

/// Diagonal level replacing the colored interference covariance at user 2:
/// N2 + alpha P |h2|^2.
double whitened_interference(double alpha, double total_power, const Eigen::VectorXcd& h2, double noise2);

}  // namespace scma
