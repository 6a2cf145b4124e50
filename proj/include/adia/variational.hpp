#pragma once

// Derivative-free searches over the protocol's variational parameters:
// initial field orientations (static objective), auxiliary fields and the CD
// strength (final <H_f> after a propagation).

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "adia/dynamics.hpp"
#include "adia/model.hpp"

namespace adia {

/// Closed interval, or a period [lo, hi) when `periodic` is set.
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool periodic = false;

  double width() const { return hi - lo; }
  bool finite() const { return std::isfinite(lo) && std::isfinite(hi); }
  /// Clamps into [lo, hi], or wraps into [lo, hi) for periodic entries.
  double project(double x) const;
};

struct ParameterVector {
  std::vector<double> values;
  std::vector<Interval> bounds;

  std::size_t size() const { return values.size(); }
  void project();
  bool within_bounds() const;
  void validate() const;
};

struct OptimizerConfig {
  int restarts = 16;
  int max_evals = 400;
  double tolerance = 1e-4;
  /// Initial simplex edge as a fraction of each finite bound width; unbounded
  /// entries use it as an absolute step.
  double simplex_scale = 0.25;
  std::uint64_t seed = 1;

  static OptimizerConfig static_defaults();
  static OptimizerConfig dynamic_defaults();
  void validate() const;
};

struct RestartTrace {
  std::vector<double> start;
  std::vector<double> best;
  double best_objective = std::numeric_limits<double>::infinity();
  /// (evaluation count, best objective so far), one entry per evaluation.
  std::vector<std::pair<int, double>> history;
  int evaluations = 0;
  bool converged = false;
  bool canonical = false;
  std::string error;  // nonempty when an evaluation threw and ended the restart
};

struct OptimizationReport {
  std::vector<double> best;
  double best_objective = std::numeric_limits<double>::infinity();
  std::size_t best_restart = 0;
  bool converged = false;
  std::uint64_t seed = 0;
  std::vector<RestartTrace> restarts;

  int total_evaluations() const;
};

using Objective = std::function<double(std::span<const double>)>;

/// Bounded multi-start Nelder-Mead. `canonical` starts are always run first;
/// the remaining cfg.restarts - canonical.size() starts are drawn uniformly
/// inside the bounds from cfg.seed. The objective must be reentrant: restarts
/// run concurrently. Exhausting max_evals is not an error.
OptimizationReport minimize(const Objective& objective, const std::vector<Interval>& bounds,
                            const std::vector<std::vector<double>>& canonical, const OptimizerConfig& cfg);

// ---------------------------------------------------------------------------

/// Angles (theta_0, phi_0, theta_1, phi_1, ...) to an InitialField.
InitialField field_from_angles(double epsilon, std::span<const double> angles);
/// Wraps every angle and rotates all azimuths so that phi_0 = 0, which
/// leaves <H_f> unchanged.
std::vector<double> canonical_angles(std::span<const double> angles);

/// Default -x field and the x, y and z Neel patterns, as angle vectors.
std::vector<std::vector<double>> orientation_candidates(int n);

struct OrientationResult {
  InitialField field;
  OptimizationReport report;
};

/// Minimizes the product-state energy <Phi|H_f|Phi> over 2n angles. Never
/// runs dynamics.
OrientationResult optimize_initial_orientations(const XXZParams& p, double epsilon, const OptimizerConfig& cfg);

inline constexpr double kAuxFieldBound = 4.0;

inline constexpr double kSearchDt = 5e-3;

/// Settings for objective evaluations inside a search: step min(dt, T/100)
/// and 11 samples. Reported runs use their own settings.
IntegrationSettings search_settings(double total_time, double dt = kSearchDt);

/// Final <H_f> of a propagation of `spec`.
double final_energy(const Protocol& p, bool with_cd, const IntegrationSettings& settings,
                    const GeneratorCache* cache = nullptr);

struct AuxResult {
  AuxiliaryField field;
  OptimizationReport report;
};

/// Minimizes final <H_f> over omega in [-4 J, 4 J]^n. The all-zero field is
/// always the first start. `settings` are used for the objective as given.
AuxResult optimize_aux_fields(const ProtocolSpec& spec, const OptimizerConfig& cfg,
                              const IntegrationSettings& settings);

struct AlphaResult {
  double alpha = 0.0;
  OptimizationReport report;
};

/// One-dimensional search over alpha in [-bound, bound]: a grid with spacing
/// max(0.01, 0.1 |alpha|), then golden section to |d alpha| < 1e-3 around the
/// three best grid minima. alpha = 0 is always evaluated.
AlphaResult optimize_cd_alpha(const ProtocolSpec& spec, const OptimizerConfig& cfg,
                              const IntegrationSettings& settings);

struct AuxAlphaResult {
  AuxiliaryField field;
  double alpha = 0.0;
  OptimizationReport report;
};

/// Joint search over (omega, alpha) with the zero point as canonical start.
AuxAlphaResult optimize_aux_and_alpha(const ProtocolSpec& spec, const OptimizerConfig& cfg,
                                      const IntegrationSettings& settings);

}  // namespace adia
