#include "adia/pauli.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace adia {

namespace {

// Components smaller than this are treated as zero when fixing eigenvector phase.
constexpr double kPhaseComponentTol = 1e-8;

void check_sites(int n) {
  if (n < 1 || n > kMaxSites)
    throw std::invalid_argument("site count " + std::to_string(n) + " outside [1, " +
                                std::to_string(kMaxSites) + "]");
}

// Bit of the basis index that carries `site`.
inline std::uint32_t site_bit(int site, int n) { return 1u << (n - 1 - site); }

void accumulate(CMatrix& m, const PauliString& s) {
  const std::uint32_t flip = s.flip_mask();
  const std::uint32_t sign = s.phase_mask();
  static constexpr cplx kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  const cplx base = s.coeff * kIPow[s.y_count() % 4];
  const auto dim = static_cast<std::uint32_t>(m.rows());
  for (std::uint32_t col = 0; col < dim; ++col) {
    const bool odd = std::popcount(col & sign) & 1;
    m(col ^ flip, col) += odd ? -base : base;
  }
}

void fix_phase(CMatrix& vectors) {
  for (Eigen::Index k = 0; k < vectors.cols(); ++k) {
    for (Eigen::Index r = 0; r < vectors.rows(); ++r) {
      const cplx c = vectors(r, k);
      if (std::abs(c) > kPhaseComponentTol) {
        vectors.col(k) *= std::conj(c) / std::abs(c);
        vectors(r, k) = std::abs(c);
        break;
      }
    }
  }
}

}  // namespace

char to_char(Pauli p) {
  switch (p) {
    case Pauli::I: return 'I';
    case Pauli::X: return 'X';
    case Pauli::Y: return 'Y';
    case Pauli::Z: return 'Z';
  }
  return '?';
}

Pauli pauli_from_char(char c) {
  switch (c) {
    case 'I': case 'i': return Pauli::I;
    case 'X': case 'x': return Pauli::X;
    case 'Y': case 'y': return Pauli::Y;
    case 'Z': case 'z': return Pauli::Z;
  }
  throw std::invalid_argument(std::string("not a Pauli label: '") + c + "'");
}

PauliString::PauliString(int sites, std::vector<Pauli> f, double c)
    : n(sites), factors(std::move(f)), coeff(c) {
  check_sites(n);
  if (static_cast<int>(factors.size()) != n)
    throw std::invalid_argument("Pauli string needs exactly n factors");
  if (!std::isfinite(coeff)) throw std::invalid_argument("Pauli string coefficient must be finite");
}

PauliString PauliString::parse(const std::string& label, double c) {
  std::vector<Pauli> f;
  f.reserve(label.size());
  for (char ch : label) f.push_back(pauli_from_char(ch));
  return PauliString(static_cast<int>(label.size()), std::move(f), c);
}

PauliString PauliString::on_sites(int sites, std::span<const std::pair<int, Pauli>> placed, double c) {
  check_sites(sites);
  std::vector<Pauli> f(sites, Pauli::I);
  for (auto [site, p] : placed) {
    if (site < 0 || site >= sites) throw std::invalid_argument("site index out of range");
    f[site] = p;
  }
  return PauliString(sites, std::move(f), c);
}

std::uint32_t PauliString::flip_mask() const {
  std::uint32_t m = 0;
  for (int j = 0; j < n; ++j)
    if (factors[j] == Pauli::X || factors[j] == Pauli::Y) m |= site_bit(j, n);
  return m;
}

std::uint32_t PauliString::phase_mask() const {
  std::uint32_t m = 0;
  for (int j = 0; j < n; ++j)
    if (factors[j] == Pauli::Y || factors[j] == Pauli::Z) m |= site_bit(j, n);
  return m;
}

int PauliString::y_count() const {
  int c = 0;
  for (auto p : factors) c += p == Pauli::Y;
  return c;
}

bool PauliString::is_identity() const {
  for (auto p : factors)
    if (p != Pauli::I) return false;
  return true;
}

std::string PauliString::label() const {
  std::string s;
  for (auto p : factors) s.push_back(to_char(p));
  return s;
}

// ---------------------------------------------------------------------------

double hermiticity_defect(const CMatrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

int sites_for_dim(Eigen::Index dim) {
  if (dim < 2 || !std::has_single_bit(static_cast<std::uint64_t>(dim)))
    throw std::invalid_argument("operator dimension " + std::to_string(dim) + " is not a power of two");
  const int n = std::countr_zero(static_cast<std::uint64_t>(dim));
  check_sites(n);
  return n;
}

HermitianOperator::HermitianOperator(CMatrix m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("operator must be square");
  sites_ = sites_for_dim(m.rows());
  const double defect = hermiticity_defect(m);
  if (defect > kHermitianTol)
    throw std::invalid_argument("operator is not Hermitian (max |A - A^+| = " + std::to_string(defect) + ")");
  m_ = std::move(m);
}

HermitianOperator HermitianOperator::zero(int sites) {
  check_sites(sites);
  const Eigen::Index d = Eigen::Index{1} << sites;
  return HermitianOperator(CMatrix::Zero(d, d), sites);
}

HermitianOperator HermitianOperator::identity(int sites) {
  check_sites(sites);
  const Eigen::Index d = Eigen::Index{1} << sites;
  return HermitianOperator(CMatrix::Identity(d, d), sites);
}

bool HermitianOperator::is_real() const { return m_.imag().isZero(0.0); }

double HermitianOperator::expectation(const CVector& psi) const {
  return psi.dot(m_ * psi).real();
}

HermitianOperator& HermitianOperator::operator+=(const HermitianOperator& o) {
  if (o.dim() != dim()) throw std::invalid_argument("operator dimension mismatch");
  m_ += o.m_;
  return *this;
}

HermitianOperator& HermitianOperator::operator-=(const HermitianOperator& o) {
  if (o.dim() != dim()) throw std::invalid_argument("operator dimension mismatch");
  m_ -= o.m_;
  return *this;
}

HermitianOperator& HermitianOperator::operator*=(double s) {
  m_ *= s;
  return *this;
}

CMatrix Spectrum::reconstruct() const {
  return eigenvectors * eigenvalues.cast<cplx>().asDiagonal() * eigenvectors.adjoint();
}

Eigen::Index Spectrum::ground_multiplicity(double tol) const {
  Eigen::Index k = 1;
  while (k < eigenvalues.size() && eigenvalues[k] - eigenvalues[0] <= tol) ++k;
  return k;
}

// ---------------------------------------------------------------------------

HermitianOperator single_site(Pauli axis, int site, int n) {
  check_sites(n);
  if (site < 0 || site >= n)
    throw std::invalid_argument("site " + std::to_string(site) + " out of range for n = " + std::to_string(n));
  const std::pair<int, Pauli> placed[] = {{site, axis}};
  return realize(PauliString::on_sites(n, placed, 1.0));
}

HermitianOperator realize(std::span<const PauliString> strings, std::optional<int> n) {
  if (strings.empty()) {
    if (!n) throw std::invalid_argument("cannot realize an empty Pauli sum without a site count");
    return HermitianOperator::zero(*n);
  }
  const int sites = strings.front().n;
  if (n && *n != sites) throw std::invalid_argument("Pauli strings disagree with requested site count");
  for (const auto& s : strings)
    if (s.n != sites) throw std::invalid_argument("Pauli strings act on different site counts");
  check_sites(sites);
  const Eigen::Index d = Eigen::Index{1} << sites;
  CMatrix m = CMatrix::Zero(d, d);
  for (const auto& s : strings) accumulate(m, s);
  return HermitianOperator(std::move(m));
}

HermitianOperator realize(const PauliString& s) { return realize(std::span<const PauliString>(&s, 1)); }

CMatrix commutator(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("commutator dimension mismatch");
  CMatrix ab = a * b;
  ab.noalias() -= b * a;
  return ab;
}

CMatrix commutator(const HermitianOperator& a, const HermitianOperator& b) {
  return commutator(a.matrix(), b.matrix());
}

HermitianOperator i_commutator(const HermitianOperator& a, const HermitianOperator& b) {
  CMatrix c = cplx(0, 1) * commutator(a, b);
  // Round-off leaves a tiny skew part; symmetrize before the invariant check.
  CMatrix h = 0.5 * (c + c.adjoint());
  return HermitianOperator(std::move(h));
}

Spectrum eigendecompose(const HermitianOperator& h) {
  Spectrum s;
  if (h.is_real()) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.matrix().real());
    if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed to converge");
    s.eigenvalues = es.eigenvalues();
    s.eigenvectors = es.eigenvectors().cast<cplx>();
  } else {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h.matrix());
    if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed to converge");
    s.eigenvalues = es.eigenvalues();
    s.eigenvectors = es.eigenvectors();
  }
  fix_phase(s.eigenvectors);
  return s;
}

Eigen::VectorXd eigenvalues(const HermitianOperator& h) {
  if (h.is_real()) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.matrix().real(), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed to converge");
    return es.eigenvalues();
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h.matrix(), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed to converge");
  return es.eigenvalues();
}

double spectral_norm(const HermitianOperator& h) {
  const Eigen::VectorXd e = eigenvalues(h);
  return std::max(std::abs(e[0]), std::abs(e[e.size() - 1]));
}

}  // namespace adia
