#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "scma/common.hpp"

namespace scma {

/// Binary K x J mapping between tones (rows) and layers (columns).
class FactorGraph {
 public:
  /// mapping[k][j] != 0 iff layer j occupies tone k. Every layer must occupy
  /// at least one tone.
  static FactorGraph from_mapping(const std::vector<std::vector<int>>& mapping);

  int tones() const { return tones_; }
  int layers() const { return layers_; }
  bool at(int tone, int layer) const { return mapping_[tone * layers_ + layer] != 0; }

  const std::vector<int>& layers_on_tone(int tone) const { return by_tone_[tone]; }
  const std::vector<int>& tones_of_layer(int layer) const { return by_layer_[layer]; }

  int row_weight(int tone) const { return static_cast<int>(by_tone_[tone].size()); }
  int column_weight(int layer) const { return static_cast<int>(by_layer_[layer].size()); }

  /// True when all columns have equal weight and all rows have equal weight.
  bool is_regular() const;
  bool has_duplicate_columns() const;

  /// Restriction to a subset of layers (columns), in the given order.
  FactorGraph select_layers(std::span<const int> layers) const;

  friend bool operator==(const FactorGraph&, const FactorGraph&) = default;

 private:
  FactorGraph(int tones, int layers, std::vector<std::uint8_t> mapping);

  int tones_ = 0;
  int layers_ = 0;
  std::vector<std::uint8_t> mapping_;
  std::vector<std::vector<int>> by_tone_;
  std::vector<std::vector<int>> by_layer_;
};

/// K x J low-density spreading matrix; column j is the signature of layer j.
struct SignatureMatrix {
  Eigen::MatrixXcd S;

  int tones() const { return static_cast<int>(S.rows()); }
  int layers() const { return static_cast<int>(S.cols()); }
  SignatureMatrix select_layers(std::span<const int> layers) const;
};

/// M sparse K-dimensional codewords of one layer. All codewords share the
/// same support (the layer's factor-graph column) and the average codeword
/// energy is K.
struct Codebook {
  int tones = 0;
  int layer = 0;
  std::vector<int> support;
  std::vector<std::vector<cplx>> codewords;

  int size() const { return static_cast<int>(codewords.size()); }
  int bits_per_codeword() const;
  double mean_energy() const;
  /// Smallest pairwise Euclidean distance between codewords.
  double min_distance() const;
  /// Returns a copy with every codeword multiplied by `amplitude`.
  Codebook scaled(double amplitude) const;
};

/// Layers granted to one user. Allocations of co-scheduled users must be
/// disjoint and fit inside the factor graph.
struct LayerAllocation {
  int user = 0;
  std::vector<int> layers;
  int layer_count() const { return static_cast<int>(layers.size()); }
};

/// All N-subsets of K tones in lexicographic order, one layer per subset.
FactorGraph build_factor_graph(int tones, int nonzeros);

/// LDS signatures on the graph's support. Non-zero entries are K-th roots of
/// unity selected by (tone, layer, seed) and scaled so that |s_j|^2 = K.
SignatureMatrix build_lds_signatures(const FactorGraph& graph, std::uint64_t phase_seed);

/// SCMA codebook for one layer, M in {4, 8, 16}.
///
/// The mother constellation of dimension N = |support| is built from a
/// rotated M-QAM by coordinate interleaving: dimension n takes its real part
/// from point sigma^n(m) and its imaginary part from point sigma^(n+1)(m),
/// where sigma is a fixed permutation of the M indices. The layer operator
/// then rotates non-zero position n by exp(i 2 pi j (n + 1) / J) and the
/// whole codebook is scaled to average energy K.
Codebook build_scma_codebook(const FactorGraph& graph, int layer, int codebook_size);

/// Codebooks for every layer of the graph.
std::vector<Codebook> build_scma_codebooks(const FactorGraph& graph, int codebook_size);

/// Maps log2(M) bits (MSB first, values 0/1) to codeword index.
int bits_to_index(std::span<const std::uint8_t> bits, int codebook_size);
std::vector<std::uint8_t> index_to_bits(int index, int codebook_size);

const std::vector<cplx>& encode(std::span<const std::uint8_t> bits, const Codebook& cb);

void validate_allocations(std::span<const LayerAllocation> allocations, const FactorGraph& graph);

/// CSV with header `layer,codeword,tone,real,imag`, one row per tone of
/// every codeword (zeros included).
void write_codebooks_csv(std::ostream& out, std::span<const Codebook> codebooks);

}  // namespace scma
