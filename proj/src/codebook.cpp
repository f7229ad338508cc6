#include "scma/codebook.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <set>
#include <string>

#include "scma/rng.hpp"

namespace scma {

FactorGraph::FactorGraph(int tones, int layers, std::vector<std::uint8_t> mapping)
    : tones_(tones), layers_(layers), mapping_(std::move(mapping)), by_tone_(tones), by_layer_(layers) {
  for (int k = 0; k < tones_; ++k) {
    for (int j = 0; j < layers_; ++j) {
      if (at(k, j)) {
        by_tone_[k].push_back(j);
        by_layer_[j].push_back(k);
      }
    }
  }
}

FactorGraph FactorGraph::from_mapping(const std::vector<std::vector<int>>& mapping) {
  require(!mapping.empty() && !mapping.front().empty(), "factor graph: empty mapping");
  const int tones = static_cast<int>(mapping.size());
  const int layers = static_cast<int>(mapping.front().size());
  std::vector<std::uint8_t> flat(static_cast<std::size_t>(tones) * layers);
  for (int k = 0; k < tones; ++k) {
    require(static_cast<int>(mapping[k].size()) == layers, "factor graph: ragged mapping rows");
    for (int j = 0; j < layers; ++j) {
      require(mapping[k][j] == 0 || mapping[k][j] == 1, "factor graph: mapping must be binary");
      flat[k * layers + j] = static_cast<std::uint8_t>(mapping[k][j]);
    }
  }
  FactorGraph g(tones, layers, std::move(flat));
  for (int j = 0; j < layers; ++j) {
    require(g.column_weight(j) > 0, "factor graph: layer " + std::to_string(j) + " occupies no tone");
  }
  return g;
}

bool FactorGraph::is_regular() const {
  for (int j = 1; j < layers_; ++j)
    if (column_weight(j) != column_weight(0)) return false;
  for (int k = 1; k < tones_; ++k)
    if (row_weight(k) != row_weight(0)) return false;
  return true;
}

bool FactorGraph::has_duplicate_columns() const {
  std::set<std::vector<int>> seen(by_layer_.begin(), by_layer_.end());
  return static_cast<int>(seen.size()) != layers_;
}

FactorGraph FactorGraph::select_layers(std::span<const int> layers) const {
  require(!layers.empty(), "factor graph: empty layer selection");
  std::vector<std::vector<int>> m(tones_, std::vector<int>(layers.size(), 0));
  for (std::size_t c = 0; c < layers.size(); ++c) {
    require(layers[c] >= 0 && layers[c] < layers_, "factor graph: layer index out of range");
    for (int k = 0; k < tones_; ++k) m[k][c] = at(k, layers[c]) ? 1 : 0;
  }
  return from_mapping(m);
}

SignatureMatrix SignatureMatrix::select_layers(std::span<const int> layers) const {
  SignatureMatrix out;
  out.S.resize(S.rows(), static_cast<Eigen::Index>(layers.size()));
  for (std::size_t c = 0; c < layers.size(); ++c) {
    require(layers[c] >= 0 && layers[c] < S.cols(), "signature: layer index out of range");
    out.S.col(static_cast<Eigen::Index>(c)) = S.col(layers[c]);
  }
  return out;
}

FactorGraph build_factor_graph(int tones, int nonzeros) {
  require(tones >= 1, "build_factor_graph: K must be >= 1");
  require(nonzeros >= 1 && nonzeros <= tones,
          "build_factor_graph: invalid dimension, need 1 <= N <= K (got K=" + std::to_string(tones) +
              ", N=" + std::to_string(nonzeros) + ")");
  // Lexicographic N-subsets: iterate selection masks via std::prev_permutation
  // on a sorted indicator vector.
  std::vector<int> select(tones, 0);
  std::fill(select.begin(), select.begin() + nonzeros, 1);
  std::vector<std::vector<int>> columns;
  do {
    std::vector<int> col;
    for (int k = 0; k < tones; ++k)
      if (select[k]) col.push_back(k);
    columns.push_back(std::move(col));
  } while (std::prev_permutation(select.begin(), select.end()));

  std::vector<std::vector<int>> m(tones, std::vector<int>(columns.size(), 0));
  for (std::size_t j = 0; j < columns.size(); ++j)
    for (int k : columns[j]) m[k][j] = 1;
  return FactorGraph::from_mapping(m);
}

SignatureMatrix build_lds_signatures(const FactorGraph& graph, std::uint64_t phase_seed) {
  const int K = graph.tones();
  SignatureMatrix sig;
  sig.S = Eigen::MatrixXcd::Zero(K, graph.layers());
  for (int j = 0; j < graph.layers(); ++j) {
    const double amp = std::sqrt(static_cast<double>(K) / graph.column_weight(j));
    for (int k : graph.tones_of_layer(j)) {
      const auto root = stream_key(phase_seed, {static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(j)}) %
                        static_cast<std::uint64_t>(K);
      const double phase = 2.0 * std::numbers::pi * static_cast<double>(root) / K;
      sig.S(k, j) = std::polar(amp, phase);
    }
  }
  return sig;
}

namespace {

// Unit-energy square/rectangular QAM, natural binary index order.
std::vector<cplx> base_qam(int m) {
  int cols = 0;
  int rows = 0;
  switch (m) {
    case 4: cols = 2; rows = 2; break;
    case 8: cols = 4; rows = 2; break;
    case 16: cols = 4; rows = 4; break;
    default:
      throw InvalidArgument("build_scma_codebook: unsupported codebook size " + std::to_string(m) +
                            " (supported: 4, 8, 16)");
  }
  std::vector<cplx> pts;
  pts.reserve(m);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      pts.emplace_back(2.0 * c - (cols - 1), 2.0 * r - (rows - 1));
  double energy = 0.0;
  for (auto p : pts) energy += std::norm(p);
  const double scale = std::sqrt(m / energy);
  for (auto& p : pts) p *= scale;
  return pts;
}

// Rotation that makes every real (and imaginary) coordinate distinct.
double qam_rotation(int m) {
  switch (m) {
    case 4: return std::atan(0.5);
    case 8: return std::atan(0.25);
    default: return 0.5 * std::atan(2.0);
  }
}

// Interleaving permutation on [0, M): i -> (2i + 1) mod (M + 1), a bijection
// for even M. Among the small permutations tried it gave the fewest
// minimum-distance pairs in the superimposed 6-layer constellation.
int sigma(int index, int power, int m) {
  for (int p = 0; p < power; ++p) index = (2 * index + 1) % (m + 1);
  return index;
}

}  // namespace

Codebook build_scma_codebook(const FactorGraph& graph, int layer, int codebook_size) {
  require(layer >= 0 && layer < graph.layers(), "build_scma_codebook: layer out of range");
  auto qam = base_qam(codebook_size);
  const cplx rot = std::polar(1.0, qam_rotation(codebook_size));
  for (auto& p : qam) p *= rot;

  Codebook cb;
  cb.tones = graph.tones();
  cb.layer = layer;
  cb.support = graph.tones_of_layer(layer);
  const int N = static_cast<int>(cb.support.size());
  const int J = graph.layers();
  const double amp = std::sqrt(static_cast<double>(cb.tones) / N);

  cb.codewords.assign(codebook_size, std::vector<cplx>(cb.tones, cplx{}));
  for (int m = 0; m < codebook_size; ++m) {
    for (int n = 0; n < N; ++n) {
      const cplx re_src = qam[sigma(m, n, codebook_size)];
      const cplx im_src = qam[sigma(m, (n + 1) % N, codebook_size)];
      const cplx mother(re_src.real(), im_src.imag());
      const cplx op = std::polar(1.0, 2.0 * std::numbers::pi * layer * (n + 1) / J);
      cb.codewords[m][cb.support[n]] = amp * op * mother;
    }
  }
  return cb;
}

std::vector<Codebook> build_scma_codebooks(const FactorGraph& graph, int codebook_size) {
  std::vector<Codebook> out;
  out.reserve(graph.layers());
  for (int j = 0; j < graph.layers(); ++j) out.push_back(build_scma_codebook(graph, j, codebook_size));
  return out;
}

int Codebook::bits_per_codeword() const { return std::countr_zero(static_cast<unsigned>(size())); }

double Codebook::mean_energy() const {
  double e = 0.0;
  for (const auto& cw : codewords)
    for (auto v : cw) e += std::norm(v);
  return e / size();
}

double Codebook::min_distance() const {
  double best = std::numeric_limits<double>::infinity();
  for (int a = 0; a < size(); ++a) {
    for (int b = a + 1; b < size(); ++b) {
      double d = 0.0;
      for (int k = 0; k < tones; ++k) d += std::norm(codewords[a][k] - codewords[b][k]);
      best = std::min(best, std::sqrt(d));
    }
  }
  return best;
}

Codebook Codebook::scaled(double amplitude) const {
  Codebook out = *this;
  for (auto& cw : out.codewords)
    for (auto& v : cw) v *= amplitude;
  return out;
}

int bits_to_index(std::span<const std::uint8_t> bits, int codebook_size) {
  require(codebook_size > 1 && std::has_single_bit(static_cast<unsigned>(codebook_size)),
          "bits_to_index: codebook size must be a power of two");
  const int width = std::countr_zero(static_cast<unsigned>(codebook_size));
  require(static_cast<int>(bits.size()) == width,
          "encode: expected " + std::to_string(width) + " bits, got " + std::to_string(bits.size()));
  int idx = 0;
  for (auto b : bits) {
    require(b <= 1, "encode: bits must be 0 or 1");
    idx = (idx << 1) | b;
  }
  return idx;
}

std::vector<std::uint8_t> index_to_bits(int index, int codebook_size) {
  require(index >= 0 && index < codebook_size, "index_to_bits: index out of range");
  const int width = std::countr_zero(static_cast<unsigned>(codebook_size));
  std::vector<std::uint8_t> bits(width);
  for (int b = 0; b < width; ++b) bits[width - 1 - b] = static_cast<std::uint8_t>((index >> b) & 1);
  return bits;
}

const std::vector<cplx>& encode(std::span<const std::uint8_t> bits, const Codebook& cb) {
  return cb.codewords[bits_to_index(bits, cb.size())];
}

void validate_allocations(std::span<const LayerAllocation> allocations, const FactorGraph& graph) {
  std::vector<int> owner(graph.layers(), -1);
  for (const auto& a : allocations) {
    require(a.layer_count() > 0, "layer allocation: user " + std::to_string(a.user) + " has no layers");
    for (int j : a.layers) {
      require(j >= 0 && j < graph.layers(), "layer allocation: layer index out of range");
      require(owner[j] < 0, "layer allocation: layer " + std::to_string(j) + " assigned twice");
      owner[j] = a.user;
    }
  }
}

void write_codebooks_csv(std::ostream& out, std::span<const Codebook> codebooks) {
  out << "layer,codeword,tone,real,imag\n";
  out << std::setprecision(17);
  for (const auto& cb : codebooks)
    for (int m = 0; m < cb.size(); ++m)
      for (int k = 0; k < cb.tones; ++k)
        out << cb.layer << ',' << m << ',' << k << ',' << cb.codewords[m][k].real() << ','
            << cb.codewords[m][k].imag() << '\n';
}

}  // namespace scma
