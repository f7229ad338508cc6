#include "scma/runner.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace scma {

namespace {

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

double gain_pct(double value, double reference) {
  return reference > 0.0 ? 100.0 * (value - reference) / reference : 0.0;
}

std::ofstream open_output(const std::filesystem::path& dir, const char* name) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / name);
  if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
  return out;
}

void write_effective_config(const std::filesystem::path& dir, const Experiment& exp) {
  auto out = open_output(dir, "effective_config.txt");
  out << "# modes:";
  for (auto m : exp.modes) out << ' ' << to_string(m);
  out << '\n' << serialize_config(exp.base);
}

}  // namespace

std::vector<std::string> preset_names() { return {"fullbuffer-wideband", "halfload-subband"}; }

Experiment resolve(const RunRequest& request) {
  Experiment exp;
  if (request.config_path) exp.base = parse_config(*request.config_path);
  if (request.scenario) {
    if (*request.scenario == "fullbuffer-wideband") {
      exp.base.scheduler = SchedulerKind::Wideband;
      exp.base.resource_utilization = 1.0;
      exp.modes = {AccessMode::Ofdma, AccessMode::Scma, AccessMode::MuScma};
    } else if (*request.scenario == "halfload-subband") {
      exp.base.scheduler = SchedulerKind::Subband;
      exp.base.resource_utilization = 0.5;
      exp.modes = {AccessMode::Ofdma, AccessMode::Scma};
    } else {
      throw InvalidArgument("unknown scenario '" + *request.scenario +
                            "' (expected fullbuffer-wideband or halfload-subband)");
    }
  }
  if (request.seed) exp.base.seed = *request.seed;
  if (request.drops) exp.base.drops = *request.drops;
  if (request.ttis) exp.base.ttis = *request.ttis;
  for (const auto& o : request.overrides) apply_override(exp.base, o);
  exp.base.validate();
  if (exp.modes.empty()) exp.modes = {exp.base.mode};
  exp.base.mode = exp.modes.front();
  return exp;
}

std::vector<ModeResult> run_experiment(const Experiment& exp, Execution exec, bool keep_schedule) {
  std::vector<ModeResult> out;
  for (auto mode : exp.modes) {
    ScenarioConfig cfg = exp.base;
    cfg.mode = mode;
    out.push_back({mode, run(cfg, {keep_schedule, exec})});
  }
  return out;
}

void write_summary_csv(std::ostream& os, const std::vector<ModeResult>& results) {
  os << "mode,throughput_mbps,coverage_kbps,pairing_fraction,throughput_gain_pct,coverage_gain_pct\n";
  if (results.empty()) return;
  const auto& ref = results.front().metrics;
  for (const auto& r : results) {
    const auto& m = r.metrics;
    os << to_string(r.mode) << ',' << num(m.cell_throughput_mbps) << ',' << num(m.coverage_kbps) << ','
       << num(m.pairing_fraction) << ',' << num(gain_pct(m.cell_throughput_mbps, ref.cell_throughput_mbps)) << ','
       << num(gain_pct(m.coverage_kbps, ref.coverage_kbps)) << '\n';
  }
}

void write_schedule_csv(std::ostream& os, const std::vector<ModeResult>& results) {
  os << "mode,drop,tti,cell,user1,user2,alpha,served_rate_u1,served_rate_u2,gamma_u1,gamma_u2\n";
  for (const auto& r : results) {
    for (const auto& s : r.metrics.schedule) {
      os << to_string(r.mode) << ',' << s.drop << ',' << s.tti << ',' << s.cell << ',' << s.user1 << ',' << s.user2
         << ',' << (s.alpha ? num(*s.alpha) : "") << ',' << num(s.served_rate_u1_mbps) << ','
         << num(s.served_rate_u2_mbps) << ',' << num(s.gamma_u1_db) << ','
         << (s.gamma_u2_db ? num(*s.gamma_u2_db) : "") << '\n';
    }
  }
}

std::vector<ModeResult> run_scenario(const RunRequest& request) {
  const Experiment exp = resolve(request);
  write_effective_config(request.output, exp);
  auto results = run_experiment(exp, request.exec, true);
  {
    auto out = open_output(request.output, "summary.csv");
    write_summary_csv(out, results);
  }
  {
    auto out = open_output(request.output, "schedule_log.csv");
    write_schedule_csv(out, results);
  }
  return results;
}

SweepSpec parse_sweep(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw InvalidArgument("sweep: expected param=v1,v2,...");
  SweepSpec spec;
  spec.parameter = text.substr(0, eq);
  if (spec.parameter != "beta" && spec.parameter != "utilization" && spec.parameter != "users_per_cell")
    throw InvalidArgument("sweep: unknown parameter '" + spec.parameter +
                          "' (expected beta, utilization or users_per_cell)");
  std::string_view rest(text);
  rest.remove_prefix(eq + 1);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const auto item = rest.substr(0, comma);
    double v = 0.0;
    const auto r = std::from_chars(item.data(), item.data() + item.size(), v);
    if (r.ec != std::errc() || r.ptr != item.data() + item.size())
      throw InvalidArgument("sweep: bad value '" + std::string(item) + "'");
    spec.values.push_back(v);
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  if (spec.values.empty()) throw InvalidArgument("sweep: empty value list");
  return spec;
}

std::vector<SweepPoint> sweep(const RunRequest& request, const SweepSpec& spec) {
  if (spec.values.empty()) throw InvalidArgument("sweep: empty value list");
  const Experiment exp = resolve(request);
  std::vector<Experiment> points;
  for (double v : spec.values) {
    Experiment e = exp;
    if (spec.parameter == "beta") {
      e.base.beta = v;
    } else if (spec.parameter == "utilization") {
      e.base.resource_utilization = v;
    } else if (spec.parameter == "users_per_cell") {
      require(v >= 1.0 && v == std::floor(v), "sweep: users_per_cell must be a positive integer");
      e.base.users_total = static_cast<int>(v) * e.base.cells();
    } else {
      throw InvalidArgument("sweep: unknown parameter '" + spec.parameter + "'");
    }
    e.base.validate();
    points.push_back(std::move(e));
  }
  write_effective_config(request.output, exp);
  std::vector<SweepPoint> out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (const auto& r : run_experiment(points[i], request.exec, false))
      out.push_back({spec.values[i], r.mode, r.metrics.cell_throughput_mbps, r.metrics.coverage_kbps});
  }
  auto csv = open_output(request.output, "sweep.csv");
  csv << "value,mode,throughput_mbps,coverage_kbps\n";
  for (const auto& p : out)
    csv << num(p.value) << ',' << to_string(p.mode) << ',' << num(p.throughput_mbps) << ','
        << num(p.coverage_kbps) << '\n';
  return out;
}

}  // namespace scma
