#include "scma/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <vector>

namespace scma {

ConfigError::ConfigError(const std::string& source, int line, const std::string& what)
    : InvalidArgument(source + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + what), line_(line) {}

namespace {

struct Field {
  const char* section;
  const char* key;
  std::function<bool(ScenarioConfig&, std::string_view)> set;  // false on type mismatch
  std::function<std::string(const ScenarioConfig&)> get;
  const char* type;
};

bool parse_value(std::string_view s, double& out) {
  const auto r = std::from_chars(s.data(), s.data() + s.size(), out);
  return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

bool parse_value(std::string_view s, int& out) {
  const auto r = std::from_chars(s.data(), s.data() + s.size(), out);
  return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

bool parse_value(std::string_view s, std::uint64_t& out) {
  const auto r = std::from_chars(s.data(), s.data() + s.size(), out);
  return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

std::string format_value(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

template <class T>
Field numeric(const char* section, const char* key, T ScenarioConfig::*member, const char* type) {
  return {section, key,
          [member](ScenarioConfig& c, std::string_view s) { return parse_value(s, c.*member); },
          [member](const ScenarioConfig& c) {
            if constexpr (std::is_same_v<T, double>)
              return format_value(c.*member);
            else
              return std::to_string(c.*member);
          },
          type};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      numeric("deployment", "sites", &ScenarioConfig::sites, "integer"),
      numeric("deployment", "sectors_per_site", &ScenarioConfig::sectors_per_site, "integer"),
      numeric("deployment", "inter_site_distance_m", &ScenarioConfig::inter_site_distance_m, "number"),
      numeric("deployment", "users_total", &ScenarioConfig::users_total, "integer"),
      numeric("deployment", "min_distance_m", &ScenarioConfig::min_distance_m, "number"),
      numeric("deployment", "penetration_loss_db", &ScenarioConfig::penetration_loss_db, "number"),
      numeric("deployment", "shadowing_std_db", &ScenarioConfig::shadowing_std_db, "number"),
      numeric("deployment", "tx_power_dbm", &ScenarioConfig::tx_power_dbm, "number"),
      numeric("deployment", "antenna_gain_dbi", &ScenarioConfig::antenna_gain_dbi, "number"),
      numeric("deployment", "noise_figure_db", &ScenarioConfig::noise_figure_db, "number"),
      numeric("deployment", "rx_antennas", &ScenarioConfig::rx_antennas, "integer"),
      numeric("radio", "bandwidth_rb", &ScenarioConfig::bandwidth_rb, "integer"),
      numeric("radio", "subband_width_rb", &ScenarioConfig::subband_width_rb, "integer"),
      numeric("radio", "carrier_hz", &ScenarioConfig::carrier_hz, "number"),
      numeric("radio", "user_speed_kmh", &ScenarioConfig::user_speed_kmh, "number"),
      {"scheduling", "mode",
       [](ScenarioConfig& c, std::string_view s) {
         auto m = parse_access_mode(s);
         if (m) c.mode = *m;
         return m.has_value();
       },
       [](const ScenarioConfig& c) { return std::string(to_string(c.mode)); }, "one of OFDMA, SCMA, MU-SCMA"},
      {"scheduling", "scheduler",
       [](ScenarioConfig& c, std::string_view s) {
         auto k = parse_scheduler(s);
         if (k) c.scheduler = *k;
         return k.has_value();
       },
       [](const ScenarioConfig& c) { return std::string(to_string(c.scheduler)); }, "one of wideband, subband"},
      numeric("scheduling", "beta", &ScenarioConfig::beta, "number"),
      numeric("scheduling", "resource_utilization", &ScenarioConfig::resource_utilization, "number"),
      numeric("scheduling", "rate_backoff", &ScenarioConfig::rate_backoff, "number"),
      numeric("scheduling", "pf_window_tti", &ScenarioConfig::pf_window_tti, "number"),
      numeric("scheduling", "alpha_min", &ScenarioConfig::alpha_min, "number"),
      numeric("scheduling", "alpha_max", &ScenarioConfig::alpha_max, "number"),
      numeric("scheduling", "olla_step_db", &ScenarioConfig::olla_step_db, "number"),
      numeric("scheduling", "bler_target", &ScenarioConfig::bler_target, "number"),
      numeric("simulation", "ttis", &ScenarioConfig::ttis, "integer"),
      numeric("simulation", "drops", &ScenarioConfig::drops, "integer"),
      numeric("simulation", "seed", &ScenarioConfig::seed, "unsigned integer"),
  };
  return table;
}

const Field* find_field(std::string_view section, std::string_view key) {
  for (const auto& f : fields())
    if (f.key == key && (section.empty() || f.section == section)) return &f;
  return nullptr;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool known_section(std::string_view s) {
  for (const auto& f : fields())
    if (f.section == s) return true;
  return false;
}

}  // namespace

ScenarioConfig parse_config_text(std::string_view text, const std::string& source) {
  ScenarioConfig cfg;
  std::map<std::string, int> key_line;
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto c = line.find_first_of("#;"); c != std::string_view::npos) line = line.substr(0, c);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(source, line_no, "malformed section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (!known_section(section)) throw ConfigError(source, line_no, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(source, line_no, "expected key = value");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    const Field* f = find_field(section, key);
    if (!f) {
      const std::string where = section.empty() ? std::string() : " in [" + section + "]";
      throw ConfigError(source, line_no, "unknown key '" + std::string(key) + "'" + where);
    }
    if (!f->set(cfg, value))
      throw ConfigError(source, line_no,
                        "type mismatch for '" + std::string(key) + "': expected " + f->type + ", got '" +
                            std::string(value) + "'");
    key_line[f->key] = line_no;
  }
  try {
    cfg.validate();
  } catch (const InvalidArgument& e) {
    // point at the line that set the offending key, if any
    const std::string msg = e.what();
    int line = 0;
    for (const auto& [key, ln] : key_line)
      if (msg.find(key) != std::string::npos) line = std::max(line, ln);
    throw ConfigError(source, line, msg);
  }
  return cfg;
}

ScenarioConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), 0, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path.string());
}

std::string serialize_config(const ScenarioConfig& config) {
  std::ostringstream os;
  std::string section;
  for (const auto& f : fields()) {
    if (section != f.section) {
      if (!section.empty()) os << '\n';
      section = f.section;
      os << '[' << section << "]\n";
    }
    os << f.key << " = " << f.get(config) << '\n';
  }
  return os.str();
}

void apply_override(ScenarioConfig& config, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos)
    throw InvalidArgument("override '" + std::string(assignment) + "': expected key=value");
  auto name = trim(assignment.substr(0, eq));
  const auto value = trim(assignment.substr(eq + 1));
  std::string_view section;
  if (const auto dot = name.find('.'); dot != std::string_view::npos) {
    section = name.substr(0, dot);
    name = name.substr(dot + 1);
  }
  const Field* f = find_field(section, name);
  if (!f) throw InvalidArgument("override: unknown key '" + std::string(assignment.substr(0, eq)) + "'");
  ScenarioConfig next = config;
  if (!f->set(next, value))
    throw InvalidArgument("override: type mismatch for '" + std::string(name) + "': expected " + f->type);
  next.validate();
  config = next;
}

}  // namespace scma
