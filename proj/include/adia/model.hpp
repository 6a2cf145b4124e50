#pragma once

// Hamiltonians and schedules of the XXZ-ring preparation protocols.
//
// Units: hbar = 1, energies in J, times in 1/J.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "adia/pauli.hpp"

namespace adia {

struct XXZParams {
  int n = 8;
  double J = 1.0;
  double delta = 1.0;

  void validate() const;
};

using Vec3 = std::array<double, 3>;

/// Local field directions of the single-site initial Hamiltonian
/// H_i = epsilon * sum_j u_j . sigma_j.
struct InitialField {
  double epsilon = 1.0;
  std::vector<Vec3> directions;

  /// u_j = -x for every site, i.e. H_i = -epsilon sum_j sigma^x_j.
  static InitialField transverse(int n, double epsilon = 1.0);
  /// u_j = (sin t cos p, sin t sin p, cos t).
  static InitialField from_angles(double epsilon, const std::vector<double>& theta,
                                  const std::vector<double>& phi);

  int sites() const { return static_cast<int>(directions.size()); }
  /// Polar angle in [0, pi] and azimuth in [0, 2 pi) of site j.
  std::pair<double, double> angles(int site) const;
  void validate() const;
};

struct AuxiliaryField {
  std::vector<double> omegas;

  static AuxiliaryField zeros(int n) { return {std::vector<double>(n, 0.0)}; }
  void validate() const;
};

/// Smooth map lambda: [0, 1] -> [0, 1] with lambda(0) = 0, lambda(1) = 1 and
/// vanishing slope at both ends.
class Schedule {
 public:
  enum class Kind {
    NestedSine,  // sin^2[(pi/2) sin^2(pi s / 2)]
    Smoothstep,  // 3 s^2 - 2 s^3
  };

  Schedule() = default;
  explicit Schedule(Kind k) : kind_(k) {}

  static Schedule parse(const std::string& id);
  std::string id() const;
  Kind kind() const { return kind_; }

  double value(double s) const;
  /// d lambda / ds.
  double derivative(double s) const;
  /// Upper bound of |d lambda / ds| over [0, 1].
  double max_derivative() const;

 private:
  Kind kind_ = Kind::NestedSine;
};

inline constexpr double kDefaultAlphaBoundFactor = 10.0;

struct CdSettings {
  double alpha = 0.0;
  /// |alpha| <= bound; defaults to 10 epsilon.
  double bound = kDefaultAlphaBoundFactor;
};

struct ProtocolSpec {
  XXZParams xxz;
  InitialField initial = InitialField::transverse(8);
  std::optional<AuxiliaryField> aux;
  std::optional<CdSettings> cd;
  Schedule schedule;
  double total_time = 10.0;

  void validate() const;
};

/// A ProtocolSpec with every operator realized. Tests may also build one
/// directly from arbitrary operators.
struct Protocol {
  HermitianOperator initial;
  HermitianOperator target;
  std::optional<HermitianOperator> aux;
  CVector initial_state;
  Schedule schedule;
  double total_time = 1.0;
  std::optional<CdSettings> cd;

  int sites() const { return target.sites(); }
  double s_of(double t) const;
  double lambda_at(double t) const { return schedule.value(s_of(t)); }
  /// d lambda / dt.
  double lambda_rate(double t) const { return schedule.derivative(s_of(t)) / total_time; }
  void validate() const;
};

HermitianOperator build_target(const XXZParams& p);
HermitianOperator build_initial(const InitialField& f);
HermitianOperator build_aux(const AuxiliaryField& a);
/// Total magnetization sum_j sigma^z_j.
HermitianOperator total_magnetization(int n);

/// Product of single-site spinors anti-aligned with u_j; first nonzero
/// amplitude real positive.
CVector product_ground_state(const InitialField& f);

/// <Phi| H_f |Phi> of the product ground state, from single-site Bloch
/// vectors m_j = -u_j; no 2^n-dimensional algebra.
double product_state_energy(const XXZParams& p, const InitialField& f);

double lambda_value(double s, const Schedule& sched = {});
double lambda_derivative(double s, const Schedule& sched = {});

Protocol realize_protocol(const ProtocolSpec& spec);

/// (1 - lambda) H_i + lambda H_f [+ lambda (1 - lambda) H_aux]; never includes CD.
HermitianOperator assemble(const Protocol& p, double t);
HermitianOperator assemble(const ProtocolSpec& spec, double t);
/// Same interpolation evaluated directly at a schedule value.
HermitianOperator assemble_at_lambda(const Protocol& p, double lambda);

/// d H_ad / d lambda = H_f - H_i [+ (1 - 2 lambda) H_aux].
HermitianOperator partial_lambda(const Protocol& p, double lambda);

/// i (d lambda/dt) alpha [H_ad(t), d_lambda H_ad(t)].
HermitianOperator cd_first_order(const Protocol& p, double t);
HermitianOperator cd_first_order(const ProtocolSpec& spec, double t);

inline constexpr double kDefaultGapFloor = 1e-6;

/// Exact counterdiabatic term built from the instantaneous eigenbasis.
/// Eigenvalues closer than gap_floor form one cluster; pairs inside a cluster
/// are dropped. Throws DegeneracyError when the ground level is clustered.
HermitianOperator cd_exact(const Protocol& p, double t, double gap_floor = kDefaultGapFloor);

}  // namespace adia
