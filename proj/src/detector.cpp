#include "scma/detector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

namespace scma {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Jacobian logarithm, log(exp(a) + exp(b)).
inline double max_star(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(-std::abs(a - b)));
}

double log_sum_exp(const std::vector<double>& v) {
  double acc = kNegInf;
  for (double x : v) acc = max_star(acc, x);
  return acc;
}

void normalize_log(std::vector<double>& v) {
  const double z = log_sum_exp(v);
  for (auto& x : v) x -= z;
}

std::vector<double> softmax(const std::vector<double>& logp) {
  const double hi = *std::max_element(logp.begin(), logp.end());
  std::vector<double> p(logp.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = std::exp(logp[i] - hi);
    sum += p[i];
  }
  for (auto& x : p) x /= sum;
  return p;
}

double entropy_bits(const std::vector<double>& p) {
  double h = 0.0;
  for (double x : p)
    if (x > 0.0) h -= x * std::log2(x);
  return h;
}

void check_inputs(const ReceivedBlock& rx, std::span<const Codebook> codebooks, const FactorGraph& graph,
                  const Eigen::MatrixXd* noise) {
  require(rx.y.rows() == rx.h.rows() && rx.y.cols() == rx.h.cols(),
          "detector: observation and channel dimensions differ");
  require(rx.y.rows() >= 1, "detector: need at least one receive antenna");
  require(rx.tones() == graph.tones(), "detector: block has " + std::to_string(rx.tones()) +
                                           " tones, factor graph has " + std::to_string(graph.tones()));
  require(static_cast<int>(codebooks.size()) == graph.layers(), "detector: one codebook per graph layer required");
  for (int j = 0; j < graph.layers(); ++j) {
    const auto& cb = codebooks[j];
    require(cb.tones == graph.tones(), "detector: codebook dimension differs from tone count");
    require(cb.size() >= 1, "detector: empty codebook");
    require(cb.support == graph.tones_of_layer(j), "detector: codebook support does not match graph column");
  }
  if (noise) {
    require(noise->rows() == rx.y.rows() && noise->cols() == rx.y.cols(), "detector: noise matrix dimension mismatch");
    require((noise->array() > 0.0).all(), "detector: noise variance must be positive");
  } else {
    require(rx.noise_var > 0.0, "detector: noise variance must be positive");
  }
}

// Per-tone Gaussian log-likelihood tables over all codeword combinations of
// the layers on that tone (mixed radix, first layer on the tone varies fastest).
struct ToneTables {
  std::vector<std::vector<int>> radix;   // codebook sizes per tone slot
  std::vector<std::vector<double>> ll;   // log-likelihood per combination
  std::vector<std::vector<int>> digits;  // combination x slot codeword indices
};

ToneTables tone_tables(const ReceivedBlock& rx, std::span<const Codebook> codebooks, const FactorGraph& graph,
                       const Eigen::MatrixXd* noise) {
  ToneTables t;
  const int K = graph.tones();
  const int R = rx.antennas();
  t.radix.resize(K);
  t.ll.resize(K);
  t.digits.resize(K);
  std::vector<int> digits;
  for (int k = 0; k < K; ++k) {
    const auto& layers = graph.layers_on_tone(k);
    std::size_t combos = 1;
    for (int j : layers) {
      t.radix[k].push_back(codebooks[j].size());
      combos *= static_cast<std::size_t>(codebooks[j].size());
    }
    t.ll[k].resize(combos);
    digits.assign(layers.size(), 0);
    for (std::size_t c = 0; c < combos; ++c) {
      cplx sum{};
      for (std::size_t i = 0; i < layers.size(); ++i) sum += codebooks[layers[i]].codewords[digits[i]][k];
      double ll = 0.0;
      for (int r = 0; r < R; ++r) {
        const double var = noise ? (*noise)(r, k) : rx.noise_var;
        ll -= std::norm(rx.y(r, k) - rx.h(r, k) * sum) / var;
      }
      t.ll[k][c] = ll;
      t.digits[k].insert(t.digits[k].end(), digits.begin(), digits.end());
      for (std::size_t i = 0; i < digits.size(); ++i) {
        if (++digits[i] < t.radix[k][i]) break;
        digits[i] = 0;
      }
    }
  }
  return t;
}

}  // namespace

int LayerPosteriors::argmax(int layer) const {
  const auto& p = prob[layer];
  return static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
}

std::vector<int> LayerPosteriors::hard_decisions() const {
  std::vector<int> out(prob.size());
  for (int j = 0; j < layers(); ++j) out[j] = argmax(j);
  return out;
}

MpaResult mpa_detect(const ReceivedBlock& rx, std::span<const Codebook> codebooks, const FactorGraph& graph,
                     const MpaOptions& options, const Eigen::MatrixXd* noise) {
  require(options.iterations >= 1, "mpa_detect: iterations must be >= 1");
  require(options.damping >= 0.0 && options.damping < 1.0, "mpa_detect: damping must lie in [0, 1)");
  check_inputs(rx, codebooks, graph, noise);

  const int K = graph.tones();
  const int J = graph.layers();
  const ToneTables tables = tone_tables(rx, codebooks, graph, noise);

  // slot_of[j][t]: position of layer j inside layers_on_tone(tones_of_layer(j)[t]).
  std::vector<std::vector<int>> slot_of(J);
  for (int j = 0; j < J; ++j) {
    for (int k : graph.tones_of_layer(j)) {
      const auto& on = graph.layers_on_tone(k);
      slot_of[j].push_back(static_cast<int>(std::find(on.begin(), on.end(), j) - on.begin()));
    }
  }

  // to_layer[k][i]: tone k -> its i-th layer; to_tone[k][i]: that layer -> tone k.
  std::vector<std::vector<std::vector<double>>> to_layer(K), to_tone(K);
  for (int k = 0; k < K; ++k) {
    for (int r : tables.radix[k]) {
      to_layer[k].emplace_back(r, -std::log(static_cast<double>(r)));
      to_tone[k].emplace_back(r, -std::log(static_cast<double>(r)));
    }
  }

  MpaResult result;
  std::vector<double> totals;
  std::vector<double> weights;
  std::vector<double> acc_hi;
  std::vector<double> acc_sum;
  std::vector<double> msg;
  std::vector<double> belief;

  auto layer_belief = [&](int j) {
    belief.assign(codebooks[j].size(), 0.0);
    const auto& tones = graph.tones_of_layer(j);
    for (std::size_t t = 0; t < tones.size(); ++t) {
      const auto& msg = to_layer[tones[t]][slot_of[j][t]];
      for (std::size_t m = 0; m < belief.size(); ++m) belief[m] += msg[m];
    }
    return belief;
  };

  for (int it = 0; it < options.iterations; ++it) {
    // Function-node update. For slot i and codeword m the outgoing message is
    // log sum over combinations with digit m of exp(total) minus the incoming
    // message on that slot; each sum is shifted by its own maximum.
    for (int k = 0; k < K; ++k) {
      const auto& radix = tables.radix[k];
      const std::size_t slots = radix.size();
      const auto& ll = tables.ll[k];
      const auto& dig = tables.digits[k];
      totals.resize(ll.size());
      for (std::size_t c = 0; c < ll.size(); ++c) {
        double t = ll[c];
        for (std::size_t i = 0; i < slots; ++i) t += to_tone[k][i][dig[c * slots + i]];
        totals[c] = t;
      }
      const double top = *std::max_element(totals.begin(), totals.end());
      weights.resize(ll.size());
      for (std::size_t c = 0; c < ll.size(); ++c) weights[c] = std::exp(totals[c] - top);
      for (std::size_t i = 0; i < slots; ++i) {
        auto& hi = acc_hi;
        auto& sum = acc_sum;
        hi.assign(radix[i], top);
        sum.assign(radix[i], 0.0);
        for (std::size_t c = 0; c < ll.size(); ++c) sum[dig[c * slots + i]] += weights[c];
        for (int m = 0; m < radix[i]; ++m) {
          if (sum[m] > 1e-280) continue;
          // far below the leading term: redo this sum with its own shift
          hi[m] = kNegInf;
          for (std::size_t c = 0; c < ll.size(); ++c)
            if (dig[c * slots + i] == m) hi[m] = std::max(hi[m], totals[c]);
          sum[m] = 0.0;
          for (std::size_t c = 0; c < ll.size(); ++c)
            if (dig[c * slots + i] == m) sum[m] += std::exp(totals[c] - hi[m]);
        }
        auto& out = msg;
        out.resize(radix[i]);
        for (int m = 0; m < radix[i]; ++m) out[m] = hi[m] + std::log(sum[m]) - to_tone[k][i][m];
        normalize_log(out);
        if (options.damping > 0.0 && it > 0) {
          for (int m = 0; m < radix[i]; ++m)
            out[m] = (1.0 - options.damping) * out[m] + options.damping * to_layer[k][i][m];
          normalize_log(out);
        }
        to_layer[k][i] = out;
      }
    }
    // Variable-node update (extrinsic sums).
    for (int j = 0; j < J; ++j) {
      const auto& total = layer_belief(j);
      const auto& tones = graph.tones_of_layer(j);
      for (std::size_t t = 0; t < tones.size(); ++t) {
        auto& out = to_tone[tones[t]][slot_of[j][t]];
        const auto& in = to_layer[tones[t]][slot_of[j][t]];
        for (std::size_t m = 0; m < out.size(); ++m) out[m] = total[m] - in[m];
        normalize_log(out);
      }
    }
    if (options.record_trace) {
      for (int j = 0; j < J; ++j)
        result.trace.push_back({it + 1, j, entropy_bits(softmax(layer_belief(j)))});
    }
  }

  result.posteriors.prob.resize(J);
  for (int j = 0; j < J; ++j) result.posteriors.prob[j] = softmax(layer_belief(j));
  return result;
}

LayerPosteriors map_oracle(const ReceivedBlock& rx, std::span<const Codebook> codebooks, const FactorGraph& graph,
                           std::size_t enumeration_cap, const Eigen::MatrixXd* noise) {
  check_inputs(rx, codebooks, graph, noise);
  const int K = graph.tones();
  const int J = graph.layers();

  std::size_t hypotheses = 1;
  for (int j = 0; j < J; ++j) {
    hypotheses *= static_cast<std::size_t>(codebooks[j].size());
    if (hypotheses > enumeration_cap)
      throw ComputeError("map_oracle: joint hypothesis count exceeds enumeration cap of " +
                         std::to_string(enumeration_cap));
  }

  const ToneTables tables = tone_tables(rx, codebooks, graph, noise);
  // stride of layer j within tone k's combination index
  std::vector<std::vector<std::size_t>> stride(K);
  for (int k = 0; k < K; ++k) {
    std::size_t s = 1;
    for (std::size_t i = 0; i < tables.radix[k].size(); ++i) {
      stride[k].push_back(s);
      s *= static_cast<std::size_t>(tables.radix[k][i]);
    }
  }

  std::vector<double> joint(hypotheses);
  std::vector<int> digits(J, 0);
  double hi = kNegInf;
  for (std::size_t h = 0; h < hypotheses; ++h) {
    double ll = 0.0;
    for (int k = 0; k < K; ++k) {
      const auto& on = graph.layers_on_tone(k);
      std::size_t c = 0;
      for (std::size_t i = 0; i < on.size(); ++i) c += stride[k][i] * static_cast<std::size_t>(digits[on[i]]);
      ll += tables.ll[k][c];
    }
    joint[h] = ll;
    hi = std::max(hi, ll);
    for (int j = 0; j < J; ++j) {
      if (++digits[j] < codebooks[j].size()) break;
      digits[j] = 0;
    }
  }

  LayerPosteriors post;
  post.prob.resize(J);
  for (int j = 0; j < J; ++j) post.prob[j].assign(codebooks[j].size(), 0.0);
  std::fill(digits.begin(), digits.end(), 0);
  for (std::size_t h = 0; h < hypotheses; ++h) {
    const double w = std::exp(joint[h] - hi);
    for (int j = 0; j < J; ++j) post.prob[j][digits[j]] += w;
    for (int j = 0; j < J; ++j) {
      if (++digits[j] < codebooks[j].size()) break;
      digits[j] = 0;
    }
  }
  for (auto& p : post.prob) {
    double s = 0.0;
    for (double x : p) s += x;
    for (auto& x : p) x /= s;
  }
  return post;
}

std::vector<LayerPosteriors> mpa_detect_batch(std::span<const ReceivedBlock> blocks,
                                              std::span<const Codebook> codebooks, const FactorGraph& graph,
                                              const MpaOptions& options, Execution exec) {
  std::vector<LayerPosteriors> out(blocks.size());
  const auto n = static_cast<std::ptrdiff_t>(blocks.size());
  [[maybe_unused]] const bool parallel = exec == Execution::Parallel;
#pragma omp parallel for schedule(dynamic, 16) if (parallel)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = mpa_detect(blocks[i], codebooks, graph, options).posteriors;
  return out;
}

std::vector<LayerPosteriors> map_oracle_batch(std::span<const ReceivedBlock> blocks,
                                              std::span<const Codebook> codebooks, const FactorGraph& graph,
                                              Execution exec) {
  std::vector<LayerPosteriors> out(blocks.size());
  const auto n = static_cast<std::ptrdiff_t>(blocks.size());
  [[maybe_unused]] const bool parallel = exec == Execution::Parallel;
#pragma omp parallel for schedule(dynamic, 16) if (parallel)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = map_oracle(blocks[i], codebooks, graph);
  return out;
}

std::vector<Codebook> PairedLink::scaled_codebooks(int user) const {
  const auto& layers = user == 1 ? user1_layers : user2_layers;
  const double power = user == 1 ? alpha * total_power : (1.0 - alpha) * total_power;
  std::vector<Codebook> out;
  if (layers.empty()) return out;
  const double amp = std::sqrt(power / static_cast<double>(layers.size()));
  for (std::size_t c = 0; c < layers.size(); ++c) {
    Codebook cb = codebooks.at(layers[c]).scaled(amp);
    cb.layer = static_cast<int>(c);
    out.push_back(std::move(cb));
  }
  return out;
}

FactorGraph PairedLink::user_graph(int user) const {
  return graph.select_layers(user == 1 ? user1_layers : user2_layers);
}

std::vector<cplx> paired_transmit(const PairedLink& link, std::span<const int> user1_symbols,
                                  std::span<const int> user2_symbols) {
  require(user1_symbols.size() == link.user1_layers.size() && user2_symbols.size() == link.user2_layers.size(),
          "paired_transmit: symbol count differs from layer count");
  std::vector<cplx> x(link.graph.tones(), cplx{});
  auto add = [&](int user, std::span<const int> symbols) {
    const auto cbs = link.scaled_codebooks(user);
    for (std::size_t c = 0; c < cbs.size(); ++c) {
      const auto& cw = cbs[c].codewords.at(symbols[c]);
      for (std::size_t k = 0; k < x.size(); ++k) x[k] += cw[k];
    }
  };
  add(1, user1_symbols);
  add(2, user2_symbols);
  return x;
}

namespace {

// Observation noise with user 1 folded in as white interference of power
// alpha * P * |h|^2 per element.
Eigen::MatrixXd whitened_noise(const ReceivedBlock& rx, const PairedLink& link) {
  const double interference = link.user1_layers.empty() ? 0.0 : link.alpha * link.total_power;
  return (rx.noise_var + interference * rx.h.cwiseAbs2().array()).matrix();
}

std::vector<int> detect_user(const ReceivedBlock& rx, const PairedLink& link, int user, const MpaOptions& options,
                             const Eigen::MatrixXd* noise) {
  const auto& layers = user == 1 ? link.user1_layers : link.user2_layers;
  if (layers.empty()) return {};
  const auto cbs = link.scaled_codebooks(user);
  const auto g = link.user_graph(user);
  return mpa_detect(rx, cbs, g, options, noise).posteriors.hard_decisions();
}

}  // namespace

SicDecisions sic_receive_strong(const ReceivedBlock& rx, const PairedLink& link, const MpaOptions& options) {
  require(link.alpha >= 0.0 && link.alpha <= 1.0, "sic_receive_strong: alpha must lie in [0, 1]");
  SicDecisions out;
  const Eigen::MatrixXd noise = whitened_noise(rx, link);
  out.user2 = detect_user(rx, link, 2, options, &noise);

  ReceivedBlock residual = rx;
  if (!out.user2.empty()) {
    const auto cbs2 = link.scaled_codebooks(2);
    for (int k = 0; k < rx.tones(); ++k) {
      cplx s{};
      for (std::size_t c = 0; c < cbs2.size(); ++c) s += cbs2[c].codewords[out.user2[c]][k];
      for (int r = 0; r < rx.antennas(); ++r) residual.y(r, k) -= rx.h(r, k) * s;
    }
  }
  out.user1 = detect_user(residual, link, 1, options, nullptr);
  return out;
}

std::vector<int> single_user_receive_weak(const ReceivedBlock& rx, const PairedLink& link,
                                          const MpaOptions& options) {
  require(link.alpha >= 0.0 && link.alpha <= 1.0, "single_user_receive_weak: alpha must lie in [0, 1]");
  const Eigen::MatrixXd noise = whitened_noise(rx, link);
  return detect_user(rx, link, 2, options, &noise);
}

void write_mpa_trace_csv(std::ostream& out, std::span<const std::vector<MpaTraceRow>> trials) {
  out << "trial,iteration,layer,entropy\n";
  for (std::size_t t = 0; t < trials.size(); ++t)
    for (const auto& row : trials[t])
      out << t << ',' << row.iteration << ',' << row.layer << ',' << row.entropy_bits << '\n';
}

}  // namespace scma
