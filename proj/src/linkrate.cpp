#include "scma/linkrate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include <Eigen/Eigenvalues>

namespace scma {

namespace {

constexpr double kRegionTol = 1e-12;

void check_order(double gamma1, double gamma2, const char* who) {
  require(gamma2 >= 0.0, std::string(who) + ": SNR must be non-negative");
  require(gamma1 >= gamma2, std::string(who) +
                                ": user ordering violated (gamma1 < gamma2); swap the users so user 1 is the stronger");
}

void check_alpha(double alpha, const char* who) {
  require(alpha >= 0.0 && alpha <= 1.0, std::string(who) + ": alpha must lie in [0, 1]");
}

}  // namespace

void validate(const UserLinkState& user, double tx_power) {
  require(user.gamma >= 0.0, "user link state: gamma must be >= 0");
  require(user.avg_rate > 0.0, "user link state: average rate must be > 0");
  require(user.noise_power > 0.0, "user link state: noise power must be > 0");
  if (tx_power > 0.0 && user.channel.size() > 0) {
    const double expect = user.channel.squaredNorm() * tx_power / user.noise_power;
    require(std::abs(expect - user.gamma) <= 1e-9 * std::max(1.0, expect),
            "user link state: gamma inconsistent with |h|^2 P / N");
  }
}

EigenProfile eigen_profile(const SignatureMatrix& sig) {
  const Eigen::MatrixXcd gram = sig.S.adjoint() * sig.S;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(gram, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw ComputeError("eigen_profile: eigen-decomposition failed");
  EigenProfile p;
  p.tones = sig.tones();
  p.layers = sig.layers();
  p.eigenvalues.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + solver.eigenvalues().size());
  for (auto& l : p.eigenvalues) l = std::max(l, 0.0);
  std::sort(p.eigenvalues.begin(), p.eigenvalues.end(), std::greater<>());
  return p;
}

double log_det_rate(const EigenProfile& profile, double rho) {
  double r = 0.0;
  for (double l : profile.eigenvalues) r += std::log2(1.0 + rho * l);
  return r;
}

double sparse_capacity(const EigenProfile& profile, double gamma) {
  require(gamma >= 0.0, "sparse_capacity: gamma must be >= 0");
  return log_det_rate(profile, gamma / profile.layers);
}

double sparse_capacity(const SignatureMatrix& sig, int layers, double gamma) {
  require(layers >= 1, "sparse_capacity: layer count must be >= 1");
  auto p = eigen_profile(sig);
  p.layers = layers;
  return sparse_capacity(p, gamma);
}

EffectiveSinrs effective_sinrs(const SpectrumShare& share, double gamma1, double gamma2) {
  check_order(gamma1, gamma2, "effective_sinrs");
  check_alpha(share.alpha, "effective_sinrs");
  const double a = share.alpha;
  return {a * gamma1, (1.0 - a) * gamma2 / (1.0 + a * gamma2), (1.0 - a) * gamma1 / (1.0 + a * gamma1)};
}

double detection_margin(const SpectrumShare& share, double gamma1, double gamma2) {
  check_order(gamma1, gamma2, "detection_margin");
  check_alpha(share.alpha, "detection_margin");
  require(gamma2 > 0.0, "detection_margin: undefined for gamma2 = 0");
  const double a = share.alpha;
  return (gamma1 / gamma2) * (1.0 + a * gamma2) / (1.0 + a * gamma1);
}

std::string_view to_string(RegionConstraint c) {
  switch (c) {
    case RegionConstraint::None: return "none";
    case RegionConstraint::SumRate: return "sum-rate at user 1";
    case RegionConstraint::WeakAtStrong: return "user 2 detection at user 1";
    case RegionConstraint::Strong: return "user 1 after SIC";
    case RegionConstraint::WeakOwn: return "user 2 at user 2";
  }
  return "unknown";
}

RegionVerdict rate_region_check(double rate1, double rate2, const SpectrumShare& share, double gamma1,
                                double gamma2) {
  require(rate1 >= 0.0 && rate2 >= 0.0, "rate_region_check: rates must be >= 0");
  const auto s = effective_sinrs(share, gamma1, gamma2);
  if (rate1 + rate2 > std::log2(1.0 + gamma1) + kRegionTol) return {false, RegionConstraint::SumRate};
  if (rate2 > std::log2(1.0 + s.weak_at_strong) + kRegionTol) return {false, RegionConstraint::WeakAtStrong};
  if (rate1 > std::log2(1.0 + s.strong) + kRegionTol) return {false, RegionConstraint::Strong};
  if (rate2 > std::log2(1.0 + s.weak) + kRegionTol) return {false, RegionConstraint::WeakOwn};
  return {};
}

RegionVerdict scma_region_check(double rate1, double rate2, const SpectrumShare& share, double gamma1,
                                double gamma2, const EigenProfile& prof1, const EigenProfile& prof2) {
  require(rate1 >= 0.0 && rate2 >= 0.0, "scma_region_check: rates must be >= 0");
  const auto s = effective_sinrs(share, gamma1, gamma2);
  const double j2 = prof2.layers;
  if (rate2 > log_det_rate(prof2, s.weak_at_strong / j2) + kRegionTol) return {false, RegionConstraint::WeakAtStrong};
  if (rate1 > log_det_rate(prof1, s.strong / prof1.layers) + kRegionTol) return {false, RegionConstraint::Strong};
  if (rate2 > log_det_rate(prof2, s.weak / j2) + kRegionTol) return {false, RegionConstraint::WeakOwn};
  return {};
}

std::pair<double, double> adjusted_rates_scma(const SpectrumShare& share, double gamma1, double gamma2,
                                              const EigenProfile& prof1, const EigenProfile& prof2) {
  check_alpha(share.alpha, "adjusted_rates_scma");
  require(gamma1 >= 0.0 && gamma2 >= 0.0, "adjusted_rates_scma: SNR must be non-negative");
  const double a = share.alpha;
  const double r1 = log_det_rate(prof1, a * gamma1 / prof1.layers);
  const double r2 = log_det_rate(prof2, (1.0 - a) * gamma2 / (prof2.layers * (1.0 + a * gamma2)));
  return {r1, r2};
}

double whitened_interference(double alpha, double total_power, const Eigen::VectorXcd& h2, double noise2) {
  check_alpha(alpha, "whitened_interference");
  return noise2 + alpha * total_power * h2.squaredNorm();
}

}  // namespace scma
