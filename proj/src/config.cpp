#include "adia/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>

#include "adia/errors.hpp"

namespace adia {

namespace {

constexpr std::array<const char*, 7> kTags{"sa", "sa+ah", "sa+cd", "oi", "oi+ah", "oi+cd", "oi+ah+cd"};

std::string valid_tags() {
  std::string s;
  for (const char* t : kTags) s += (s.empty() ? "" : ", ") + std::string(t);
  return s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_real(const std::string& key, const std::string& v) {
  double x = 0.0;
  const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || end != v.data() + v.size() || !std::isfinite(x))
    throw ConfigError("key '" + key + "': expected a finite number, got '" + v + "'");
  return x;
}

long long parse_integer(const std::string& key, const std::string& v) {
  long long x = 0;
  const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || end != v.data() + v.size())
    throw ConfigError("key '" + key + "': expected an integer, got '" + v + "'");
  return x;
}

int parse_int(const std::string& key, const std::string& v) {
  const long long x = parse_integer(key, v);
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
    throw ConfigError("key '" + key + "': value out of range");
  return static_cast<int>(x);
}

}  // namespace

std::string strategy_tag(Strategy s) { return kTags[static_cast<std::size_t>(s)]; }

Strategy parse_strategy(const std::string& tag) {
  for (std::size_t k = 0; k < kTags.size(); ++k)
    if (tag == kTags[k]) return kAllStrategies[k];
  throw ConfigError("unknown strategy '" + tag + "'; valid tags: " + valid_tags());
}

bool uses_orientations(Strategy s) {
  return s == Strategy::OI || s == Strategy::OI_AH || s == Strategy::OI_CD || s == Strategy::OI_AH_CD;
}
bool uses_aux(Strategy s) { return s == Strategy::SA_AH || s == Strategy::OI_AH || s == Strategy::OI_AH_CD; }
bool uses_cd(Strategy s) { return s == Strategy::SA_CD || s == Strategy::OI_CD || s == Strategy::OI_AH_CD; }

std::string format_number(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 12);
  return std::string(buf, r.ptr);
}

// ---------------------------------------------------------------------------

void ExperimentConfig::set(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (key == "strategy") {
    strategy = parse_strategy(v);
  } else if (key == "delta") {
    delta = parse_real(key, v);
  } else if (key == "total_time") {
    total_time = parse_real(key, v);
  } else if (key == "n") {
    n = parse_int(key, v);
  } else if (key == "J") {
    J = parse_real(key, v);
  } else if (key == "epsilon") {
    epsilon = parse_real(key, v);
  } else if (key == "schedule") {
    try {
      schedule = Schedule::parse(v);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("key 'schedule': " + std::string(e.what()));
    }
  } else if (key == "dt") {
    integration.dt = parse_real(key, v);
  } else if (key == "sample_count") {
    integration.sample_count = parse_int(key, v);
  } else if (key == "search_dt") {
    search_dt = parse_real(key, v);
  } else if (key == "seed") {
    const long long s = parse_integer(key, v);
    if (s < 0) throw ConfigError("key 'seed': must be nonnegative");
    optimizer.seed = static_cast<std::uint64_t>(s);
  } else if (key == "restarts") {
    optimizer.restarts = parse_int(key, v);
  } else if (key == "max_evals") {
    optimizer.max_evals = parse_int(key, v);
  } else if (key == "tolerance") {
    optimizer.tolerance = parse_real(key, v);
  } else if (key == "simplex_scale") {
    optimizer.simplex_scale = parse_real(key, v);
  } else if (key == "static_max_evals") {
    static_max_evals = parse_int(key, v);
  } else if (key == "static_tolerance") {
    static_tolerance = parse_real(key, v);
  } else if (key == "out_dir") {
    if (v.empty()) throw ConfigError("key 'out_dir': empty path");
    out_dir = v;
  } else if (key == "spectrum_levels") {
    spectrum_levels = parse_int(key, v);
  } else if (key == "spectrum_grid") {
    spectrum_grid = parse_int(key, v);
  } else {
    throw ConfigError("unknown key '" + key + "'");
  }
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::entries() const {
  return {
      {"strategy", strategy_tag(strategy)},
      {"delta", format_number(delta)},
      {"total_time", format_number(total_time)},
      {"n", std::to_string(n)},
      {"J", format_number(J)},
      {"epsilon", format_number(epsilon)},
      {"schedule", schedule.id()},
      {"dt", format_number(integration.dt)},
      {"sample_count", std::to_string(integration.sample_count)},
      {"search_dt", format_number(search_dt)},
      {"seed", std::to_string(optimizer.seed)},
      {"restarts", std::to_string(optimizer.restarts)},
      {"max_evals", std::to_string(optimizer.max_evals)},
      {"tolerance", format_number(optimizer.tolerance)},
      {"simplex_scale", format_number(optimizer.simplex_scale)},
      {"static_max_evals", std::to_string(static_max_evals)},
      {"static_tolerance", format_number(static_tolerance)},
      {"out_dir", out_dir.string()},
      {"spectrum_levels", std::to_string(spectrum_levels)},
      {"spectrum_grid", std::to_string(spectrum_grid)},
  };
}

void ExperimentConfig::validate() const {
  auto check = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
  };
  check(n >= 2 && n <= kMaxSites, "n must lie in [2, " + std::to_string(kMaxSites) + "]");
  check(total_time > 0.0, "total_time must be positive");
  check(J != 0.0, "J must be nonzero");
  check(epsilon > 0.0, "epsilon must be positive");
  check(integration.dt > 0.0, "dt must be positive");
  check(total_time / integration.dt >= 100.0 - 1e-9, "dt too coarse: total_time / dt must be at least 100");
  check(integration.sample_count >= 2, "sample_count must be at least 2");
  check(search_dt > 0.0, "search_dt must be positive");
  check(optimizer.restarts > 0, "restarts must be positive");
  check(optimizer.max_evals > 0, "max_evals must be positive");
  check(optimizer.tolerance >= 0.0, "tolerance must be nonnegative");
  check(optimizer.simplex_scale > 0.0, "simplex_scale must be positive");
  check(static_max_evals > 0, "static_max_evals must be positive");
  check(static_tolerance >= 0.0, "static_tolerance must be nonnegative");
  check(spectrum_levels >= 0, "spectrum_levels must be nonnegative (0 keeps every level)");
  check(spectrum_levels <= (1 << n), "spectrum_levels exceeds the Hilbert space dimension");
  check(spectrum_grid >= 2, "spectrum_grid must be at least 2");
}

ProtocolSpec ExperimentConfig::base_spec() const {
  ProtocolSpec s;
  s.xxz = XXZParams{n, J, delta};
  s.initial = InitialField::transverse(n, epsilon);
  s.schedule = schedule;
  s.total_time = total_time;
  return s;
}

OptimizerConfig ExperimentConfig::static_optimizer() const {
  OptimizerConfig c = optimizer;
  c.max_evals = static_max_evals;
  c.tolerance = static_tolerance;
  return c;
}

IntegrationSettings ExperimentConfig::search_integration() const { return search_settings(total_time, search_dt); }

// ---------------------------------------------------------------------------

void read_config(std::istream& in, ExperimentConfig& cfg, const std::string& origin) {
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = origin + ":" + std::to_string(number) + ": ";
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(where + "missing key");
    try {
      cfg.set(key, line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  if (in.bad()) throw IoError("failed reading " + origin);
}

void load_config(const std::filesystem::path& path, ExperimentConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  read_config(in, cfg, path.string());
}

}  // namespace adia
