#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "scma/codebook.hpp"
#include "scma/common.hpp"

namespace scma {

/// One received SCMA block: R antennas x K tones.
struct ReceivedBlock {
  Eigen::MatrixXcd y;
  Eigen::MatrixXcd h;
  double noise_var = 1.0;

  int antennas() const { return static_cast<int>(y.rows()); }
  int tones() const { return static_cast<int>(y.cols()); }
};

/// Per-layer probability vectors over the M codewords of that layer.
struct LayerPosteriors {
  std::vector<std::vector<double>> prob;

  int layers() const { return static_cast<int>(prob.size()); }
  int argmax(int layer) const;
  std::vector<int> hard_decisions() const;
};

struct MpaOptions {
  int iterations = 6;
  /// Weight kept from the previous function-to-variable message, in [0, 1).
  double damping = 0.0;
  /// Record posterior entropies after every iteration.
  bool record_trace = false;
};

struct MpaTraceRow {
  int iteration = 0;
  int layer = 0;
  double entropy_bits = 0.0;
};

struct MpaResult {
  LayerPosteriors posteriors;
  std::vector<MpaTraceRow> trace;
};

/// Sum-product detection on the factor graph in the log domain. Codebooks
/// must already carry the per-layer transmit amplitude. `noise` optionally
/// gives a per (antenna, tone) noise variance that replaces rx.noise_var.
MpaResult mpa_detect(const ReceivedBlock& rx, std::span<const Codebook> codebooks, const FactorGraph& graph,
                     const MpaOptions& options = {}, const Eigen::MatrixXd* noise = nullptr);

inline constexpr std::size_t kDefaultEnumerationCap = std::size_t{1} << 20;

/// Exact marginals by enumerating all M^J joint hypotheses.
LayerPosteriors map_oracle(const ReceivedBlock& rx, std::span<const Codebook> codebooks, const FactorGraph& graph,
                           std::size_t enumeration_cap = kDefaultEnumerationCap,
                           const Eigen::MatrixXd* noise = nullptr);

/// Batch kernels over independent blocks. Results are identical for both
/// execution modes.
std::vector<LayerPosteriors> mpa_detect_batch(std::span<const ReceivedBlock> blocks,
                                              std::span<const Codebook> codebooks, const FactorGraph& graph,
                                              const MpaOptions& options, Execution exec);
std::vector<LayerPosteriors> map_oracle_batch(std::span<const ReceivedBlock> blocks,
                                              std::span<const Codebook> codebooks, const FactorGraph& graph,
                                              Execution exec);

/// Two users multiplexed on one factor graph. user1 is the stronger user and
/// receives the power fraction alpha.
struct PairedLink {
  double alpha = 0.5;
  double total_power = 1.0;
  FactorGraph graph;
  std::vector<Codebook> codebooks;  // unit-energy codebooks for every graph layer
  std::vector<int> user1_layers;
  std::vector<int> user2_layers;

  /// Codebooks of the given user's layers scaled by sqrt(p_u / J_u).
  std::vector<Codebook> scaled_codebooks(int user) const;
  FactorGraph user_graph(int user) const;
};

/// Superimposed transmit signal for the given per-layer codeword indices
/// (index vectors follow user1_layers / user2_layers order).
std::vector<cplx> paired_transmit(const PairedLink& link, std::span<const int> user1_symbols,
                                  std::span<const int> user2_symbols);

struct SicDecisions {
  std::vector<int> user1;
  std::vector<int> user2;
};

/// Strong-user receiver: detect user 2 treating user 1 as Gaussian noise,
/// cancel the hard-decided user-2 signal, then detect user 1.
SicDecisions sic_receive_strong(const ReceivedBlock& rx, const PairedLink& link, const MpaOptions& options = {});

/// Weak-user receiver: detect user 2 with user 1 treated as white noise of
/// power alpha * P * |h|^2 on every observation.
std::vector<int> single_user_receive_weak(const ReceivedBlock& rx, const PairedLink& link,
                                          const MpaOptions& options = {});

/// CSV `trial,iteration,layer,entropy`.
void write_mpa_trace_csv(std::ostream& out, std::span<const std::vector<MpaTraceRow>> trials);

}  // namespace scma
