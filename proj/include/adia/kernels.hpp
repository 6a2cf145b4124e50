#pragma once

// Hot loops of the propagator.
//
// Every 2^n x 2^n matrix can be written as sum_m D_m P_m, where P_m flips the
// basis-index bits in mask m and D_m is diagonal. Pauli-built Hamiltonians
// touch only a handful of masks (17 for the nearest-neighbour ring with its
// counterdiabatic commutators), so storing the nonzero D_m is lossless and
// makes a matvec cost (#masks x dim) instead of dim^2.
//
// The `reference` namespace keeps the plain dense serial versions; tests check
// the fast kernels against them and bench/ compares their throughput.

#include <cstdint>
#include <span>
#include <vector>

#include "adia/pauli.hpp"

namespace adia::kernels {

/// Rows per OpenMP work item; below this dimension kernels stay serial.
inline constexpr Eigen::Index kParallelMinDim = 1024;

class MaskedOperator {
 public:
  MaskedOperator() = default;

  /// Lossless: every mask with at least one nonzero entry is kept.
  static MaskedOperator from_dense(const CMatrix& m);

  Eigen::Index dim() const { return dim_; }
  std::size_t mask_count() const { return masks_.size(); }
  std::span<const std::uint32_t> masks() const { return masks_; }
  /// Entry (row, row ^ masks()[slot]).
  cplx entry(Eigen::Index row, std::size_t slot) const {
    return diags_[slot * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(row)];
  }

  /// out = M in.
  void apply(const cplx* in, cplx* out) const;
  /// out += weight * M in.
  void apply_add(double weight, const cplx* in, cplx* out) const;

  /// Largest absolute row sum; an upper bound on the spectral norm.
  double row_sum_norm() const;

  CMatrix to_dense() const;

 private:
  Eigen::Index dim_ = 0;
  std::vector<std::uint32_t> masks_;
  std::vector<cplx> diags_;  // slot-major: diags_[slot * dim + row]
};

/// Fixed set of operators combined with time-dependent real weights:
/// H(w) = sum_k w_k M_k. Applying the terms one by one costs the same number
/// of mask passes as applying their merged form, without re-merging at every
/// time point.
class LinearCombination {
 public:
  LinearCombination() = default;
  explicit LinearCombination(std::vector<CMatrix> components);

  std::size_t size() const { return terms_.size(); }
  Eigen::Index dim() const { return dim_; }
  const MaskedOperator& term(std::size_t k) const { return terms_[k]; }

  /// out = H(weights) in. Zero weights are skipped.
  void apply(std::span<const double> weights, const cplx* in, cplx* out) const;

  /// Merged operator, for inspection and tests.
  MaskedOperator combine(std::span<const double> weights) const;

 private:
  Eigen::Index dim_ = 0;
  std::vector<MaskedOperator> terms_;
};

struct Rk4Workspace {
  CVector k1, k2, k3, k4, tmp;
  void resize(Eigen::Index dim);
};

/// One classical RK4 step of d psi/dt = -i H psi with H sampled at the
/// start, midpoint and end of the step.
void rk4_step(const LinearCombination& h, std::span<const double> w_start, std::span<const double> w_mid,
              std::span<const double> w_end, double step, CVector& psi, Rk4Workspace& ws);

namespace reference {

CVector apply(const CMatrix& m, const CVector& v);

void rk4_step(const CMatrix& h_start, const CMatrix& h_mid, const CMatrix& h_end, double h, CVector& psi);

}  // namespace reference

}  // namespace adia::kernels
