#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "scma/config.hpp"
#include "scma/runner.hpp"

using namespace scma;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("scma_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

int count_lines(const std::string& s) { return static_cast<int>(std::count(s.begin(), s.end(), '\n')); }

int config_error_line(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

RunRequest tiny(const fs::path& out) {
  RunRequest r;
  r.output = out;
  r.overrides = {"sites=1", "users_total=12", "ttis=20"};
  return r;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SCMA_SIM_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("empty config keeps the defaults") {
  CHECK(parse_config_text("") == ScenarioConfig{});
  CHECK(parse_config_text("# only a comment\n\n; another\n") == ScenarioConfig{});
}

TEST_CASE("a single key changes a single field") {
  const auto c = parse_config_text("[scheduling]\nmode = MU-SCMA\n");
  ScenarioConfig expect;
  expect.mode = AccessMode::MuScma;
  CHECK(c == expect);

  const auto d = parse_config_text("[simulation]\nseed = 18446744073709551615  # max\n[radio]\ncarrier_hz=3.5e9\n");
  CHECK(d.seed == 18446744073709551615ULL);
  CHECK(d.carrier_hz == 3.5e9);
}

TEST_CASE("config errors carry the line number") {
  CHECK(config_error_line("[scheduling]\nbeta = 1\nresource_utilization = 1.5\n") == 3);
  CHECK(config_error_line("[deployment]\nsites = 7\n\ncolour = blue\n") == 4);
  CHECK(config_error_line("[deployment]\nsites = seven\n") == 2);
  CHECK(config_error_line("[nowhere]\n") == 1);
  CHECK(config_error_line("[radio]\nbandwidth_rb 50\n") == 2);
  CHECK(config_error_line("[deployment]\nusers_total = 1.5\n") == 2);
  CHECK(config_error_line("[scheduling]\nmode = NOMA\n") == 2);
  CHECK(config_error_line("[radio]\nsubband_width_rb = 7\n") == 2);
  // A key in the wrong section is unknown there.
  CHECK(config_error_line("[radio]\nbeta = 1\n") == 2);
  try {
    parse_config_text("[scheduling]\nresource_utilization = 1.5\n", "scenario.ini");
    FAIL("expected an error");
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    CHECK(what.find("scenario.ini:2") != std::string::npos);
    CHECK(what.find("resource_utilization") != std::string::npos);
  }
}

TEST_CASE("serialization round-trips") {
  ScenarioConfig c;
  c.sites = 7;
  c.beta = 0.1 + 0.2;
  c.carrier_hz = 2.6e9;
  c.mode = AccessMode::Scma;
  c.scheduler = SchedulerKind::Subband;
  c.seed = 123456789012345ULL;
  c.resource_utilization = 1.0 / 3.0;
  CHECK(parse_config_text(serialize_config(c)) == c);
  CHECK(parse_config_text(serialize_config(ScenarioConfig{})) == ScenarioConfig{});
}

TEST_CASE("overrides") {
  ScenarioConfig c;
  apply_override(c, "beta=2");
  CHECK(c.beta == 2.0);
  apply_override(c, "scheduling.mode=SCMA");
  CHECK(c.mode == AccessMode::Scma);
  apply_override(c, " ttis = 7 ");
  CHECK(c.ttis == 7);
  CHECK_THROWS_AS(apply_override(c, "beta"), InvalidArgument);
  CHECK_THROWS_AS(apply_override(c, "gamma=1"), InvalidArgument);
  CHECK_THROWS_AS(apply_override(c, "radio.beta=1"), InvalidArgument);
  CHECK_THROWS_AS(apply_override(c, "sites=x"), InvalidArgument);
  CHECK_THROWS_AS(apply_override(c, "resource_utilization=0"), InvalidArgument);
}

TEST_CASE("presets") {
  RunRequest r;
  r.scenario = "fullbuffer-wideband";
  auto e = resolve(r);
  CHECK(e.modes.size() == 3u);
  CHECK(e.base.scheduler == SchedulerKind::Wideband);
  CHECK(e.base.resource_utilization == 1.0);

  r.scenario = "halfload-subband";
  r.overrides = {"beta=0.5"};
  r.seed = 4;
  e = resolve(r);
  CHECK(e.modes.size() == 2u);
  CHECK(e.base.scheduler == SchedulerKind::Subband);
  CHECK(e.base.resource_utilization == 0.5);
  CHECK(e.base.beta == 0.5);
  CHECK(e.base.seed == 4u);

  r.scenario = "unknown";
  CHECK_THROWS_AS(resolve(r), InvalidArgument);
  CHECK(preset_names().size() == 2u);
}

TEST_CASE("config file, preset and overrides resolve in order") {
  const auto dir = scratch("order");
  {
    std::ofstream f(dir / "s.ini");
    f << "[scheduling]\nresource_utilization = 0.3\nbeta = 1.5\n[simulation]\nseed = 8\n";
  }
  RunRequest r;
  r.config_path = dir / "s.ini";
  auto e = resolve(r);
  CHECK(e.base.resource_utilization == 0.3);
  CHECK(e.modes == std::vector<AccessMode>{AccessMode::Ofdma});
  r.scenario = "fullbuffer-wideband";
  r.seed = 11;
  r.overrides = {"beta=3"};
  e = resolve(r);
  CHECK(e.base.resource_utilization == 1.0);
  CHECK(e.base.seed == 11u);
  CHECK(e.base.beta == 3.0);
}

TEST_CASE("scenario run writes the summary and schedule log") {
  const auto dir = scratch("run");
  auto req = tiny(dir);
  req.scenario = "fullbuffer-wideband";
  const auto results = run_scenario(req);
  REQUIRE(results.size() == 3u);

  const auto summary = slurp(dir / "summary.csv");
  CHECK(summary.rfind("mode,throughput_mbps,coverage_kbps,pairing_fraction,throughput_gain_pct,coverage_gain_pct\n",
                      0) == 0);
  CHECK(count_lines(summary) == 4);
  CHECK(summary.find("\nOFDMA,") != std::string::npos);
  CHECK(summary.find("\nMU-SCMA,") != std::string::npos);

  const auto log = slurp(dir / "schedule_log.csv");
  CHECK(log.rfind("mode,drop,tti,cell,user1,user2,alpha,served_rate_u1,served_rate_u2,gamma_u1,gamma_u2\n", 0) == 0);
  CHECK(count_lines(log) > 1);

  const auto effective = slurp(dir / "effective_config.txt");
  CHECK(effective.rfind("# modes: OFDMA SCMA MU-SCMA\n", 0) == 0);
  const auto reparsed = parse_config_text(effective);
  CHECK(reparsed.sites == 1);
  CHECK(reparsed.users_total == 12);

  const auto second = scratch("run2");
  auto again = req;
  again.output = second;
  run_scenario(again);
  CHECK(slurp(second / "summary.csv") == summary);
  CHECK(slurp(second / "schedule_log.csv") == log);
}

TEST_CASE("summary gains are relative to the first row") {
  std::vector<ModeResult> rs(2);
  rs[0].mode = AccessMode::Ofdma;
  rs[0].metrics.cell_throughput_mbps = 10.0;
  rs[0].metrics.coverage_kbps = 200.0;
  rs[1].mode = AccessMode::MuScma;
  rs[1].metrics.cell_throughput_mbps = 12.5;
  rs[1].metrics.coverage_kbps = 150.0;
  std::ostringstream os;
  write_summary_csv(os, rs);
  CHECK(os.str().find("OFDMA,10,200,0,0,0\n") != std::string::npos);
  CHECK(os.str().find("MU-SCMA,12.5,150,0,25,-25\n") != std::string::npos);
}

TEST_CASE("sweep parsing") {
  const auto s = parse_sweep("beta=0,0.5,1,2");
  CHECK(s.parameter == "beta");
  CHECK(s.values == std::vector<double>{0.0, 0.5, 1.0, 2.0});
  CHECK_THROWS_AS(parse_sweep("beta="), InvalidArgument);
  CHECK_THROWS_AS(parse_sweep("beta"), InvalidArgument);
  CHECK_THROWS_AS(parse_sweep("speed=1,2"), InvalidArgument);
  CHECK_THROWS_AS(parse_sweep("beta=1,,2"), InvalidArgument);
  CHECK_THROWS_AS(sweep(tiny(scratch("empty")), {"beta", {}}), InvalidArgument);
}

TEST_CASE("beta sweep") {
  const auto dir = scratch("sweep");
  auto req = tiny(dir);
  req.overrides.push_back("users_total=30");
  req.overrides.push_back("ttis=60");
  const auto pts = sweep(req, parse_sweep("beta=0,1,2"));
  REQUIRE(pts.size() == 3u);
  for (std::size_t i = 1; i < pts.size(); ++i) CHECK(pts[i].coverage_kbps >= pts[i - 1].coverage_kbps);
  const auto csv = slurp(dir / "sweep.csv");
  CHECK(csv.rfind("value,mode,throughput_mbps,coverage_kbps\n", 0) == 0);
  CHECK(count_lines(csv) == 4);
  CHECK(fs::exists(dir / "effective_config.txt"));

  const auto upc = sweep(tiny(scratch("upc")), parse_sweep("users_per_cell=2,4"));
  REQUIRE(upc.size() == 2u);
  CHECK_THROWS_AS(sweep(tiny(scratch("bad")), parse_sweep("users_per_cell=1.5")), InvalidArgument);
  CHECK_THROWS_AS(sweep(tiny(scratch("bad2")), parse_sweep("utilization=0.5,1.2")), InvalidArgument);
}

TEST_CASE("command-line exit codes") {
  const auto dir = scratch("exit");
  const std::string out = " --output " + dir.string();
  CHECK(run_cli("--ttis 5 --override sites=1 --override users_total=6" + out) == 0);
  CHECK(fs::exists(dir / "summary.csv"));
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("--codebook-csv " + (dir / "cb.csv").string()) == 0);
  CHECK(count_lines(slurp(dir / "cb.csv")) == 1 + 6 * 4 * 4);
  CHECK(run_cli("--scenario nope" + out) == 1);
  CHECK(run_cli("--override resource_utilization=1.5" + out) == 1);
  CHECK(run_cli("--sweep beta=" + out) == 1);
  CHECK(run_cli("--config /nonexistent/file.ini" + out) == 1);
  CHECK(run_cli("--no-such-flag") == 1);
  {
    std::ofstream f(dir / "bad.ini");
    f << "[deployment]\nsites = 7\nbogus = 1\n";
  }
  CHECK(run_cli("--config " + (dir / "bad.ini").string() + out) == 1);
  // An output path that is a regular file cannot be created as a directory.
  CHECK(run_cli("--ttis 2 --override sites=1 --output " + (dir / "bad.ini").string()) == 2);
}
