#pragma once

// Time-dependent Schroedinger propagation and instantaneous-spectrum tracking.

#include <functional>
#include <optional>
#include <vector>

#include "adia/kernels.hpp"
#include "adia/model.hpp"

namespace adia {

/// Hard limit on | ||psi|| - 1 | during propagation.
inline constexpr double kNormTolerance = 1e-6;
/// Eigenvalues this close to the lowest one count as ground states.
inline constexpr double kGroundClusterTol = 1e-8;

struct IntegrationSettings {
  double dt = 1e-3;
  int sample_count = 1001;

  void validate(double total_time) const;
};

struct EvolutionTrace {
  std::vector<double> times;
  std::vector<double> fidelity_to_target;
  std::vector<double> fidelity_to_instantaneous;
  std::vector<double> energy;  // <phi(t)| H_f |phi(t)>
  CVector final_state;

  double target_ground_energy = 0.0;
  double max_norm_drift = 0.0;
  long steps = 0;
  double step = 0.0;  // uniform RK4 step actually used

  double total_time() const { return times.empty() ? 0.0 : times.back(); }
};

/// Spectral data of the terms that do not depend on the aux field or alpha.
/// Passing it to repeated propagations of the same H_i, H_f skips the
/// eigensolves of Generator construction.
struct GeneratorCache {
  double initial_norm = 0.0;
  double target_norm = 0.0;
  std::optional<HermitianOperator> commutator;  // i [H_i, H_f], only with CD
  double commutator_norm = 0.0;
};
GeneratorCache make_generator_cache(const Protocol& p, bool with_cd);

/// H(t) = H_ad(t) [+ first-order CD term] as a weighted sum of fixed
/// operators, evaluated without forming dense matrices.
class Generator {
 public:
  Generator(const Protocol& p, bool with_cd, const GeneratorCache* cache = nullptr);

  /// Component weights at time t, in the order of combination().
  void weights(double t, std::vector<double>& out) const;
  std::vector<double> weights(double t) const;
  const kernels::LinearCombination& combination() const { return combo_; }

  /// Upper bound on the spectral norm of H(t) over [0, T].
  double norm_bound() const { return norm_bound_; }
  /// Dense H(t), for tests.
  CMatrix dense(double t) const;

 private:
  const Protocol* protocol_;
  bool with_cd_;
  bool has_aux_;
  kernels::LinearCombination combo_;
  double norm_bound_ = 0.0;
};

/// Fixed step used for a run: the largest step <= settings.dt that divides
/// every sampling interval evenly and keeps the RK4 norm loss of the
/// highest-energy component within budget.
struct StepPlan {
  long steps_per_sample = 1;
  double step = 0.0;
};
StepPlan plan_steps(const Generator& g, double total_time, const IntegrationSettings& settings);

/// Full trace: both fidelity curves and <H_f> at every sample time.
EvolutionTrace propagate(const Protocol& p, bool with_cd, const IntegrationSettings& settings,
                         const GeneratorCache* cache = nullptr);
EvolutionTrace propagate(const ProtocolSpec& spec, bool with_cd, const IntegrationSettings& settings);

/// Same integration as propagate() without any per-sample diagnostics;
/// returns the final state. Bit-identical to propagate().final_state.
CVector evolve(const Protocol& p, bool with_cd, const IntegrationSettings& settings,
               const GeneratorCache* cache = nullptr);

/// Optional addition to H_ad(t) for propagate_reference, e.g. an exact CD term.
using ExtraTerm = std::function<HermitianOperator(double t)>;

/// Dense serial propagation of H(t) = assemble(p, t) [+ extra(t)] with the
/// reference RK4 step and a plain dt grid. Slow; meant for oracles and for
/// cross-checking propagate().
EvolutionTrace propagate_reference(const Protocol& p, const ExtraTerm& extra, const IntegrationSettings& settings);

/// Orthonormal basis of the lowest eigenvalue cluster of `h`.
CMatrix ground_space(const HermitianOperator& h, double tol = kGroundClusterTol);
/// || P_ground psi ||, which equals |<Psi|psi>| when the ground state is unique.
double ground_overlap(const CMatrix& ground_basis, const CVector& psi);

struct GroundPath {
  std::vector<double> s_grid;
  std::vector<CVector> states;
  /// True where the continued state is also a lowest-eigenvalue eigenvector.
  std::vector<bool> ground_tracking;
  /// |<path(k-1)|path(k)>|, first entry 1.
  std::vector<double> consecutive_overlap;
};

/// Max-overlap continuation of the instantaneous ground state of the CD-free
/// Hamiltonian. Inside a degenerate level the continued state is the
/// normalized projection of the previous one, the eigenvector of that level
/// with the largest overlap. Throws std::invalid_argument if consecutive grid points
/// differ by 0.1 J or more in operator norm, DegeneracyError if the start is
/// ambiguous.
GroundPath instantaneous_ground_path(const Protocol& p, const std::vector<double>& s_grid);

struct SpectrumTrace {
  std::vector<double> s_grid;
  std::vector<Eigen::VectorXd> levels;  // lowest k eigenvalues per point
};

/// k = 0 keeps every level.
SpectrumTrace spectrum_trace(const Protocol& p, const std::vector<double>& s_grid, int k);

struct GapMinimum {
  double s = 0.0;
  double gap = 0.0;
};

/// Grid minimum of E_j - E_i refined by a parabola through its neighbours.
GapMinimum min_gap(const SpectrumTrace& trace, int i, int j);

std::vector<double> uniform_grid(int points, double lo = 0.0, double hi = 1.0);

}  // namespace adia
