#include "adia/kernels.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace adia::kernels {

namespace {

// Nonzero masks of a dense matrix in ascending order, with their diagonals.
void decompose(const CMatrix& m, std::vector<std::uint32_t>& masks, std::vector<cplx>& diags) {
  if (m.rows() != m.cols()) throw std::invalid_argument("masked operator needs a square matrix");
  const auto dim = static_cast<std::uint32_t>(m.rows());
  masks.clear();
  diags.clear();
  for (std::uint32_t mask = 0; mask < dim; ++mask) {
    bool any = false;
    for (std::uint32_t r = 0; r < dim && !any; ++r) any = m(r, r ^ mask) != cplx(0.0, 0.0);
    if (!any) continue;
    masks.push_back(mask);
    for (std::uint32_t r = 0; r < dim; ++r) diags.push_back(m(r, r ^ mask));
  }
}

}  // namespace

MaskedOperator MaskedOperator::from_dense(const CMatrix& m) {
  MaskedOperator op;
  op.dim_ = m.rows();
  decompose(m, op.masks_, op.diags_);
  return op;
}

void MaskedOperator::apply(const cplx* in, cplx* out) const {
  std::fill(out, out + dim_, cplx(0.0, 0.0));
  apply_add(1.0, in, out);
}

void MaskedOperator::apply_add(double weight, const cplx* in, cplx* out) const {
  const Eigen::Index d = dim_;
  const std::size_t nm = masks_.size();
  // Rows split into chunks; each chunk is owned by one thread.
  const Eigen::Index chunk = d >= kParallelMinDim ? kParallelMinDim / 4 : d;
#pragma omp parallel for schedule(static) if (d >= kParallelMinDim)
  for (Eigen::Index lo = 0; lo < d; lo += chunk) {
    const Eigen::Index hi = std::min(lo + chunk, d);
    for (std::size_t s = 0; s < nm; ++s) {
      const std::uint32_t m = masks_[s];
      const cplx* dg = diags_.data() + s * static_cast<std::size_t>(d);
      // r -> r ^ m maps aligned runs of 2^ctz(m) rows onto contiguous runs.
      const Eigen::Index run = m == 0 ? d : Eigen::Index{1} << std::countr_zero(m);
      const Eigen::Index step = std::min(run, hi - lo);
      for (Eigen::Index b = lo; b < hi; b += step) {
        const double* a = reinterpret_cast<const double*>(dg + b);
        const double* x = reinterpret_cast<const double*>(in + (static_cast<std::uint32_t>(b) ^ m));
        double* y = reinterpret_cast<double*>(out + b);
        for (Eigen::Index i = 0; i < 2 * step; i += 2) {
          y[i] += weight * (a[i] * x[i] - a[i + 1] * x[i + 1]);
          y[i + 1] += weight * (a[i] * x[i + 1] + a[i + 1] * x[i]);
        }
      }
    }
  }
}

double MaskedOperator::row_sum_norm() const {
  double best = 0.0;
  const auto d = static_cast<std::size_t>(dim_);
  for (std::size_t r = 0; r < d; ++r) {
    double sum = 0.0;
    for (std::size_t s = 0; s < masks_.size(); ++s) sum += std::abs(diags_[s * d + r]);
    best = std::max(best, sum);
  }
  return best;
}

CMatrix MaskedOperator::to_dense() const {
  CMatrix m = CMatrix::Zero(dim_, dim_);
  const auto d = static_cast<std::size_t>(dim_);
  for (std::size_t s = 0; s < masks_.size(); ++s)
    for (std::size_t r = 0; r < d; ++r) m(r, r ^ masks_[s]) = diags_[s * d + r];
  return m;
}

// ---------------------------------------------------------------------------

LinearCombination::LinearCombination(std::vector<CMatrix> components) {
  if (components.empty()) throw std::invalid_argument("linear combination needs at least one component");
  dim_ = components.front().rows();
  for (const auto& c : components) {
    if (c.rows() != dim_ || c.cols() != dim_) throw std::invalid_argument("component dimension mismatch");
    terms_.push_back(MaskedOperator::from_dense(c));
  }
}

void LinearCombination::apply(std::span<const double> weights, const cplx* in, cplx* out) const {
  if (weights.size() != terms_.size()) throw std::invalid_argument("weight count mismatch");
  std::fill(out, out + dim_, cplx(0.0, 0.0));
  for (std::size_t k = 0; k < terms_.size(); ++k)
    if (weights[k] != 0.0) terms_[k].apply_add(weights[k], in, out);
}

MaskedOperator LinearCombination::combine(std::span<const double> weights) const {
  if (weights.size() != terms_.size()) throw std::invalid_argument("weight count mismatch");
  CMatrix m = CMatrix::Zero(dim_, dim_);
  for (std::size_t k = 0; k < terms_.size(); ++k) m += weights[k] * terms_[k].to_dense();
  return MaskedOperator::from_dense(m);
}

// ---------------------------------------------------------------------------

void Rk4Workspace::resize(Eigen::Index dim) {
  if (k1.size() == dim) return;
  k1.resize(dim);
  k2.resize(dim);
  k3.resize(dim);
  k4.resize(dim);
  tmp.resize(dim);
}

void rk4_step(const LinearCombination& h, std::span<const double> w_start, std::span<const double> w_mid,
              std::span<const double> w_end, double step, CVector& psi, Rk4Workspace& ws) {
  const cplx mi(0.0, -1.0);
  ws.resize(psi.size());

  h.apply(w_start, psi.data(), ws.k1.data());
  ws.k1 *= mi;

  ws.tmp = psi + (0.5 * step) * ws.k1;
  h.apply(w_mid, ws.tmp.data(), ws.k2.data());
  ws.k2 *= mi;

  ws.tmp = psi + (0.5 * step) * ws.k2;
  h.apply(w_mid, ws.tmp.data(), ws.k3.data());
  ws.k3 *= mi;

  ws.tmp = psi + step * ws.k3;
  h.apply(w_end, ws.tmp.data(), ws.k4.data());
  ws.k4 *= mi;

  psi += (step / 6.0) * (ws.k1 + 2.0 * ws.k2 + 2.0 * ws.k3 + ws.k4);
}

namespace reference {

CVector apply(const CMatrix& m, const CVector& v) {
  CVector out = CVector::Zero(m.rows());
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    cplx acc(0.0, 0.0);
    for (Eigen::Index c = 0; c < m.cols(); ++c) acc += m(r, c) * v[c];
    out[r] = acc;
  }
  return out;
}

void rk4_step(const CMatrix& h_start, const CMatrix& h_mid, const CMatrix& h_end, double h, CVector& psi) {
  const cplx mi(0.0, -1.0);
  const CVector k1 = mi * reference::apply(h_start, psi);
  const CVector k2 = mi * reference::apply(h_mid, psi + 0.5 * h * k1);
  const CVector k3 = mi * reference::apply(h_mid, psi + 0.5 * h * k2);
  const CVector k4 = mi * reference::apply(h_end, psi + h * k3);
  psi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace reference

}  // namespace adia::kernels
