#pragma once

// Experiment configuration: strategy tags, flat key=value files and
// command-line overrides.

#include <array>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "adia/dynamics.hpp"
#include "adia/model.hpp"
#include "adia/variational.hpp"

namespace adia {

enum class Strategy { SA, SA_AH, SA_CD, OI, OI_AH, OI_CD, OI_AH_CD };

inline constexpr std::array<Strategy, 7> kAllStrategies{Strategy::SA,    Strategy::SA_AH, Strategy::SA_CD,
                                                        Strategy::OI,    Strategy::OI_AH, Strategy::OI_CD,
                                                        Strategy::OI_AH_CD};

/// "sa", "sa+ah", ..., "oi+ah+cd". parse_strategy throws ConfigError naming
/// the valid tags.
std::string strategy_tag(Strategy s);
Strategy parse_strategy(const std::string& tag);
bool uses_orientations(Strategy s);
bool uses_aux(Strategy s);
bool uses_cd(Strategy s);

struct ExperimentConfig {
  Strategy strategy = Strategy::SA;
  double delta = 1.0;
  double total_time = 10.0;
  int n = 8;
  double J = 1.0;
  double epsilon = 1.0;
  Schedule schedule;

  IntegrationSettings integration;
  /// Step used for objective evaluations inside dynamic searches.
  double search_dt = 5e-3;
  /// Dynamic searches (aux fields, alpha).
  OptimizerConfig optimizer = OptimizerConfig::dynamic_defaults();
  /// Static orientation search; shares restarts and seed with `optimizer`.
  int static_max_evals = OptimizerConfig::static_defaults().max_evals;
  double static_tolerance = OptimizerConfig::static_defaults().tolerance;

  std::filesystem::path out_dir = "out";
  int spectrum_levels = 16;
  int spectrum_grid = 400;

  /// Throws ConfigError for unknown keys and malformed values.
  void set(const std::string& key, const std::string& value);
  /// Every key with its current value, in a fixed order.
  std::vector<std::pair<std::string, std::string>> entries() const;
  void validate() const;

  /// Spec of the unmodified (SA) protocol for this configuration.
  ProtocolSpec base_spec() const;
  OptimizerConfig static_optimizer() const;
  IntegrationSettings search_integration() const;
};

/// Reads `key = value` lines; '#' starts a comment; blank lines are skipped.
/// Later keys win. Errors carry the origin and line number.
void read_config(std::istream& in, ExperimentConfig& cfg, const std::string& origin = "config");
/// Throws IoError when the file cannot be opened.
void load_config(const std::filesystem::path& path, ExperimentConfig& cfg);

/// 12 significant digits, '.' radix, no locale.
std::string format_number(double x);

}  // namespace adia
