// Serial reference vs OpenMP kernels: MPA batch, MAP batch and a small
// system-level run. Prints one CSV row per kernel and checks that both paths
// produce the same result.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include <CLI11.hpp>

#ifdef SCMA_HAVE_OPENMP
#include <omp.h>
#endif

#include "scma/codebook.hpp"
#include "scma/detector.hpp"
#include "scma/netsim.hpp"
#include "scma/rng.hpp"

using namespace scma;

namespace {

double time_it(const std::function<void()>& f, int reps) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

std::vector<ReceivedBlock> make_blocks(const std::vector<Codebook>& cbs, int count, double snr_db) {
  const int K = cbs.front().tones;
  const int J = static_cast<int>(cbs.size());
  const double nv = J / db_to_linear(snr_db);
  std::vector<ReceivedBlock> blocks(count);
  for (int t = 0; t < count; ++t) {
    Rng rng(17, {static_cast<std::uint64_t>(t)});
    auto& b = blocks[t];
    b.noise_var = nv;
    b.h.resize(1, K);
    b.y = Eigen::MatrixXcd::Zero(1, K);
    for (int k = 0; k < K; ++k) b.h(0, k) = rng.complex_normal<cplx>();
    for (int j = 0; j < J; ++j) {
      const auto& cw = cbs[j].codewords[rng.below(cbs[j].size())];
      for (int k = 0; k < K; ++k) b.y(0, k) += b.h(0, k) * cw[k];
    }
    for (int k = 0; k < K; ++k) b.y(0, k) += rng.complex_normal<cplx>(nv);
  }
  return blocks;
}

bool same(const std::vector<LayerPosteriors>& a, const std::vector<LayerPosteriors>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].prob != b[i].prob) return false;
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"serial vs parallel kernel timings"};
  int blocks = 20000;
  int reps = 3;
  int threads = 0;
  int ttis = 100;
  app.add_option("--blocks", blocks, "Detection blocks per batch")->capture_default_str();
  app.add_option("--reps", reps, "Repetitions (best time is reported)")->capture_default_str();
  app.add_option("--threads", threads, "OpenMP threads (0 = runtime default)");
  app.add_option("--ttis", ttis, "TTIs of the system-level run")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  int nthreads = 1;
#ifdef SCMA_HAVE_OPENMP
  if (threads > 0) omp_set_num_threads(threads);
  nthreads = omp_get_max_threads();
#endif

  const auto graph = build_factor_graph(4, 2);
  const auto cbs = build_scma_codebooks(graph, 4);
  const auto input = make_blocks(cbs, blocks, 12.0);

  std::printf("kernel,items,threads,serial_s,parallel_s,speedup,identical\n");
  auto report = [&](const char* name, std::size_t items, double ts, double tp, bool ok) {
    std::printf("%s,%zu,%d,%.4f,%.4f,%.2f,%s\n", name, items, nthreads, ts, tp, ts / tp, ok ? "yes" : "no");
  };

  {
    std::vector<LayerPosteriors> s;
    std::vector<LayerPosteriors> p;
    const double ts = time_it([&] { s = mpa_detect_batch(input, cbs, graph, {}, Execution::Serial); }, reps);
    const double tp = time_it([&] { p = mpa_detect_batch(input, cbs, graph, {}, Execution::Parallel); }, reps);
    report("mpa_batch", input.size(), ts, tp, same(s, p));
  }
  {
    const std::span<const ReceivedBlock> sub(input.data(), std::min<std::size_t>(input.size(), 2000));
    std::vector<LayerPosteriors> s;
    std::vector<LayerPosteriors> p;
    const double ts = time_it([&] { s = map_oracle_batch(sub, cbs, graph, Execution::Serial); }, reps);
    const double tp = time_it([&] { p = map_oracle_batch(sub, cbs, graph, Execution::Parallel); }, reps);
    report("map_batch", sub.size(), ts, tp, same(s, p));
  }
  {
    ScenarioConfig cfg;
    cfg.sites = 7;
    cfg.users_total = 210;
    cfg.ttis = ttis;
    cfg.mode = AccessMode::MuScma;
    RunMetrics s;
    RunMetrics p;
    const double ts = time_it([&] { s = run(cfg, {false, Execution::Serial}); }, reps);
    const double tp = time_it([&] { p = run(cfg, {false, Execution::Parallel}); }, reps);
    report("netsim_run", static_cast<std::size_t>(cfg.ttis), ts, tp, s.user_rates_kbps == p.user_rates_kbps);
  }
  return 0;
}
