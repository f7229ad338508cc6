#pragma once
// Independent reference computations used by the tests. Nothing here calls
// into the library's numerical code paths.

#include <cmath>
#include <complex>
#include <functional>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "scma/codebook.hpp"
#include "scma/rng.hpp"

namespace oracle {

using cplx = std::complex<double>;

// Determinant by Gaussian elimination with partial pivoting.
inline cplx determinant(const Eigen::MatrixXcd& m) {
  const int n = static_cast<int>(m.rows());
  std::vector<std::vector<cplx>> a(n, std::vector<cplx>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a[i][j] = m(i, j);
  cplx det = 1.0;
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    if (std::abs(a[piv][c]) == 0.0) return 0.0;
    if (piv != c) {
      std::swap(a[piv], a[c]);
      det = -det;
    }
    det *= a[c][c];
    for (int r = c + 1; r < n; ++r) {
      const cplx f = a[r][c] / a[c][c];
      for (int k = c; k < n; ++k) a[r][k] -= f * a[c][k];
    }
  }
  return det;
}

// log2 det(I + rho S^H S) straight from the definition.
inline double log_det_direct(const Eigen::MatrixXcd& S, double rho) {
  const Eigen::Index J = S.cols();
  const Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(J, J) + rho * (S.adjoint() * S);
  return std::log2(std::abs(determinant(m)));
}

struct GridMax {
  double arg = 0.0;
  double value = 0.0;
};

// Exhaustive scan of [lo, hi] at the given step (endpoints included).
inline GridMax grid_argmax(const std::function<double(double)>& f, double lo, double hi, double step) {
  GridMax best{lo, f(lo)};
  const auto n = static_cast<long>(std::floor((hi - lo) / step + 0.5));
  for (long i = 1; i <= n; ++i) {
    const double x = std::min(hi, lo + static_cast<double>(i) * step);
    const double v = f(x);
    if (v > best.value) best = {x, v};
  }
  return best;
}

// Weighted sum-rate of a superposition pair on orthogonal tones.
inline double wsr_ofdma(double a, double g1, double g2, double w1, double w2) {
  return w1 * std::log2(1.0 + a * g1) + w2 * std::log2(1.0 + (1.0 - a) * g2 / (1.0 + a * g2));
}

// Same quantity with eigenvalue spectra of the two signature sets.
inline double wsr_eigen(double a, double g1, double g2, double w1, double w2, const std::vector<double>& l1, int j1,
                        const std::vector<double>& l2, int j2) {
  double s = 0.0;
  for (double l : l1) s += w1 * std::log2(1.0 + a * g1 * l / j1);
  for (double l : l2) s += w2 * std::log2(1.0 + (1.0 - a) * g2 * l / (j2 * (1.0 + a * g2)));
  return s;
}

// Random cycle-free factor graph: every layer joins tones from distinct
// components of the current forest, so no cycle can close.
inline scma::FactorGraph random_tree_graph(scma::Rng& rng, int tones, int layers) {
  std::vector<int> parent(tones);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  std::vector<std::vector<int>> map(tones, std::vector<int>(layers, 0));
  for (int j = 0; j < layers; ++j) {
    const int want = 1 + static_cast<int>(rng.below(3));
    std::vector<int> chosen;
    for (int attempt = 0; attempt < 20 && static_cast<int>(chosen.size()) < want; ++attempt) {
      const int t = static_cast<int>(rng.below(tones));
      bool ok = true;
      for (int c : chosen)
        if (find(c) == find(t)) ok = false;
      if (ok) chosen.push_back(t);
    }
    for (std::size_t i = 1; i < chosen.size(); ++i) parent[find(chosen[i])] = find(chosen[0]);
    for (int t : chosen) map[t][j] = 1;
  }
  return scma::FactorGraph::from_mapping(map);
}

// Gaussian random codebooks on the graph's supports.
inline std::vector<scma::Codebook> random_codebooks(scma::Rng& rng, const scma::FactorGraph& g, int m) {
  std::vector<scma::Codebook> out;
  for (int j = 0; j < g.layers(); ++j) {
    scma::Codebook cb;
    cb.tones = g.tones();
    cb.layer = j;
    cb.support = g.tones_of_layer(j);
    cb.codewords.assign(m, std::vector<cplx>(g.tones(), 0.0));
    for (auto& cw : cb.codewords)
      for (int t : cb.support) cw[t] = rng.complex_normal<cplx>(1.0);
    out.push_back(std::move(cb));
  }
  return out;
}

// Exhaustive joint posterior marginals, written independently of the
// detector (plain probabilities, no log-domain tricks beyond a max shift).
inline std::vector<std::vector<double>> brute_marginals(const Eigen::MatrixXcd& y, const Eigen::MatrixXcd& h,
                                                        double noise_var,
                                                        const std::vector<scma::Codebook>& cbs) {
  const int J = static_cast<int>(cbs.size());
  const int R = static_cast<int>(y.rows());
  const int K = static_cast<int>(y.cols());
  std::size_t total = 1;
  for (const auto& cb : cbs) total *= cb.size();
  std::vector<double> loglik(total);
  std::vector<int> idx(J, 0);
  for (std::size_t n = 0; n < total; ++n) {
    std::size_t rem = n;
    for (int j = 0; j < J; ++j) {
      idx[j] = static_cast<int>(rem % cbs[j].size());
      rem /= cbs[j].size();
    }
    double d = 0.0;
    for (int k = 0; k < K; ++k) {
      cplx x = 0.0;
      for (int j = 0; j < J; ++j) x += cbs[j].codewords[idx[j]][k];
      for (int r = 0; r < R; ++r) d += std::norm(y(r, k) - h(r, k) * x);
    }
    loglik[n] = -d / noise_var;
  }
  const double hi = *std::max_element(loglik.begin(), loglik.end());
  std::vector<std::vector<double>> marg(J);
  for (int j = 0; j < J; ++j) marg[j].assign(cbs[j].size(), 0.0);
  for (std::size_t n = 0; n < total; ++n) {
    const double p = std::exp(loglik[n] - hi);
    std::size_t rem = n;
    for (int j = 0; j < J; ++j) {
      marg[j][rem % cbs[j].size()] += p;
      rem /= cbs[j].size();
    }
  }
  for (auto& m : marg) {
    const double z = std::accumulate(m.begin(), m.end(), 0.0);
    for (auto& p : m) p /= z;
  }
  return marg;
}

inline double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

}  // namespace oracle
