#include "adia/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace adia {

double normalized_energy_distance(double e_initial, double e_final, double e_ground) {
  const double denom = e_initial - e_ground;
  if (!(denom >= kEnergyGapGuard))
    throw NumericalError("normalized energy distance undefined: initial energy is within " +
                         std::to_string(kEnergyGapGuard) + " of the ground energy");
  return (e_initial - e_final) / denom;
}

double adiabatic_fidelity(const EvolutionTrace& trace) {
  const auto& t = trace.times;
  const auto& f = trace.fidelity_to_instantaneous;
  if (t.size() < 2 || f.size() != t.size())
    throw std::invalid_argument("adiabatic fidelity needs a trace with at least two samples");
  double integral = 0.0;
  for (std::size_t i = 1; i < t.size(); ++i) integral += 0.5 * (t[i] - t[i - 1]) * (f[i] + f[i - 1]);
  return integral / (t.back() - t.front());
}

RunSummary summarize(const EvolutionTrace& trace, double delta, const std::string& strategy) {
  if (trace.energy.empty()) throw std::invalid_argument("empty trace");
  RunSummary r;
  r.initial_energy = trace.energy.front();
  r.final_energy = trace.energy.back();
  r.ground_energy = trace.target_ground_energy;
  r.n_metric = normalized_energy_distance(r.initial_energy, r.final_energy, r.ground_energy);
  r.f_ad = adiabatic_fidelity(trace);
  r.delta = delta;
  r.total_time = trace.total_time();
  r.strategy = strategy;
  return r;
}

RunSummary summarize(const EvolutionTrace& trace, const ProtocolSpec& spec, const std::string& strategy) {
  return summarize(trace, spec.xxz.delta, strategy);
}

}  // namespace adia
