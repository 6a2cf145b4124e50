#pragma once

// Figures of merit of a preparation run.

#include <string>

#include "adia/dynamics.hpp"

namespace adia {

/// Smallest accepted e_initial - e_ground.
inline constexpr double kEnergyGapGuard = 1e-12;

struct RunSummary {
  double n_metric = 0.0;  // normalized energy distance
  double f_ad = 0.0;      // time-averaged instantaneous ground-state overlap
  double final_energy = 0.0;
  double initial_energy = 0.0;
  double ground_energy = 0.0;
  double delta = 0.0;
  double total_time = 0.0;
  std::string strategy;
};

/// (e_initial - e_final) / (e_initial - e_ground); 1 means the ground state
/// was reached, 0 means no improvement.
double normalized_energy_distance(double e_initial, double e_final, double e_ground);

/// (1/T) integral of |<phi(t)|Psi(t)>| dt by the trapezoid rule on the sample grid.
double adiabatic_fidelity(const EvolutionTrace& trace);

/// e_initial is <phi(0)|H_f|phi(0)> taken from the trace's first sample.
RunSummary summarize(const EvolutionTrace& trace, const ProtocolSpec& spec, const std::string& strategy = {});
RunSummary summarize(const EvolutionTrace& trace, double delta, const std::string& strategy = {});

}  // namespace adia
