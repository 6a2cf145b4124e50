#pragma once

// Pauli-string algebra on n spin-1/2 sites and its dense matrix realization.
//
// Basis convention: site 0 is the leftmost tensor factor, i.e. the most
// significant bit of the computational-basis index. Bit value 0 is |0>, the
// +1 eigenstate of sigma^z.

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "adia/errors.hpp"

namespace adia {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Dense-matrix budget: operators live on at most this many sites.
inline constexpr int kMaxSites = 12;

/// Entrywise tolerance of the Hermiticity invariant.
inline constexpr double kHermitianTol = 1e-12;

enum class Pauli : std::uint8_t { I, X, Y, Z };

char to_char(Pauli p);
Pauli pauli_from_char(char c);

struct PauliString {
  int n = 0;
  std::vector<Pauli> factors;
  double coeff = 1.0;

  PauliString() = default;
  PauliString(int sites, std::vector<Pauli> f, double c);

  /// Build from a label such as "XZIY".
  static PauliString parse(const std::string& label, double c = 1.0);

  /// Identity string with `p` placed at the given sites.
  static PauliString on_sites(int sites, std::span<const std::pair<int, Pauli>> placed, double c);

  /// Sites carrying X or Y, as a bit mask in the basis-index convention.
  std::uint32_t flip_mask() const;
  /// Sites carrying Y or Z.
  std::uint32_t phase_mask() const;
  int y_count() const;
  bool is_identity() const;
  std::string label() const;
};

/// Dense 2^n x 2^n matrix checked to be Hermitian on construction.
class HermitianOperator {
 public:
  HermitianOperator() = default;
  explicit HermitianOperator(CMatrix m);

  static HermitianOperator zero(int sites);
  static HermitianOperator identity(int sites);

  const CMatrix& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }
  int sites() const { return sites_; }

  cplx operator()(Eigen::Index r, Eigen::Index c) const { return m_(r, c); }

  /// True when every entry has zero imaginary part.
  bool is_real() const;

  double expectation(const CVector& psi) const;

  HermitianOperator& operator+=(const HermitianOperator& o);
  HermitianOperator& operator-=(const HermitianOperator& o);
  HermitianOperator& operator*=(double s);

  friend HermitianOperator operator+(HermitianOperator a, const HermitianOperator& b) { return a += b; }
  friend HermitianOperator operator-(HermitianOperator a, const HermitianOperator& b) { return a -= b; }
  friend HermitianOperator operator*(double s, HermitianOperator a) { return a *= s; }
  friend HermitianOperator operator*(HermitianOperator a, double s) { return a *= s; }

 private:
  HermitianOperator(CMatrix m, int sites) : m_(std::move(m)), sites_(sites) {}

  CMatrix m_;
  int sites_ = 0;
};

struct Spectrum {
  Eigen::VectorXd eigenvalues;  // ascending
  CMatrix eigenvectors;         // column k pairs with eigenvalue k

  Eigen::Index size() const { return eigenvalues.size(); }
  CVector vector(Eigen::Index k) const { return eigenvectors.col(k); }
  /// V diag(E) V^dagger.
  CMatrix reconstruct() const;
  /// Number of leading eigenvalues within `tol` of the lowest one.
  Eigen::Index ground_multiplicity(double tol) const;
};

/// Largest entrywise deviation |A - A^dagger|.
double hermiticity_defect(const CMatrix& m);

/// Site count of a power-of-two dimension; throws if it is not one.
int sites_for_dim(Eigen::Index dim);

HermitianOperator single_site(Pauli axis, int site, int n);

/// Sum of coeff * (tensor product of factors). An empty list needs `n`.
HermitianOperator realize(std::span<const PauliString> strings, std::optional<int> n = std::nullopt);
HermitianOperator realize(const PauliString& s);

/// AB - BA. The result is anti-Hermitian for Hermitian inputs.
CMatrix commutator(const CMatrix& a, const CMatrix& b);
CMatrix commutator(const HermitianOperator& a, const HermitianOperator& b);

/// i * [a, b], which is Hermitian.
HermitianOperator i_commutator(const HermitianOperator& a, const HermitianOperator& b);

/// Full eigendecomposition; the first nonzero component of each eigenvector
/// is made real positive.
Spectrum eigendecompose(const HermitianOperator& h);

/// Eigenvalues only, ascending.
Eigen::VectorXd eigenvalues(const HermitianOperator& h);

/// Largest |eigenvalue|.
double spectral_norm(const HermitianOperator& h);

}  // namespace adia
