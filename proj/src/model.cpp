#include "adia/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace adia {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kUnitTol = 1e-12;
constexpr double kAmplitudeTol = 1e-8;

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

// Entry (j + 1) mod n, so a two-site ring counts its bond twice.
inline int next_site(int j, int n) { return (j + 1) % n; }

}  // namespace

void XXZParams::validate() const {
  require(n >= 2 && n <= kMaxSites, "XXZ ring needs 2 <= n <= " + std::to_string(kMaxSites));
  require(J > 0.0 && std::isfinite(J), "exchange coupling J must be positive");
  require(std::isfinite(delta), "anisotropy must be finite");
}

InitialField InitialField::transverse(int n, double epsilon) {
  return {epsilon, std::vector<Vec3>(n, Vec3{-1.0, 0.0, 0.0})};
}

constexpr double kAngleSnap = 1e-14;

InitialField InitialField::from_angles(double epsilon, const std::vector<double>& theta,
                                       const std::vector<double>& phi) {
  require(theta.size() == phi.size(), "angle vectors differ in length");
  InitialField f{epsilon, {}};
  f.directions.reserve(theta.size());
  for (std::size_t j = 0; j < theta.size(); ++j) {
    const double st = std::sin(theta[j]);
    Vec3 u{st * std::cos(phi[j]), st * std::sin(phi[j]), std::cos(theta[j])};
    // Round-off residue such as cos(pi / 2) would make H_i needlessly complex.
    for (double& c : u)
      if (std::abs(c) < kAngleSnap) c = 0.0;
    const double norm = std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
    for (double& c : u) c /= norm;
    f.directions.push_back(u);
  }
  return f;
}

std::pair<double, double> InitialField::angles(int site) const {
  const Vec3& u = directions.at(site);
  const double theta = std::acos(std::clamp(u[2], -1.0, 1.0));
  double phi = std::atan2(u[1], u[0]);
  if (phi < 0.0) phi += 2.0 * kPi;
  if (phi >= 2.0 * kPi) phi = 0.0;
  return {theta, phi};
}

void InitialField::validate() const {
  require(std::isfinite(epsilon) && epsilon > 0.0, "initial field strength must be positive");
  require(!directions.empty(), "initial field has no sites");
  for (const auto& u : directions) {
    const double norm = std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
    require(std::abs(norm - 1.0) <= kUnitTol, "initial field direction is not a unit vector");
  }
}

void AuxiliaryField::validate() const {
  for (double w : omegas) require(std::isfinite(w), "auxiliary field strengths must be finite");
}

// ---------------------------------------------------------------------------

Schedule Schedule::parse(const std::string& id) {
  if (id == "nested-sine") return Schedule(Kind::NestedSine);
  if (id == "smoothstep") return Schedule(Kind::Smoothstep);
  throw std::invalid_argument("unknown schedule '" + id + "' (expected nested-sine or smoothstep)");
}

std::string Schedule::id() const { return kind_ == Kind::NestedSine ? "nested-sine" : "smoothstep"; }

double Schedule::value(double s) const {
  require(s >= 0.0 && s <= 1.0, "normalized time outside [0, 1]");
  if (s == 0.0) return 0.0;
  if (s == 1.0) return 1.0;
  switch (kind_) {
    case Kind::NestedSine: {
      const double inner = std::sin(0.5 * kPi * s);
      const double outer = std::sin(0.5 * kPi * inner * inner);
      return outer * outer;
    }
    case Kind::Smoothstep:
      return s * s * (3.0 - 2.0 * s);
  }
  return 0.0;
}

double Schedule::derivative(double s) const {
  require(s >= 0.0 && s <= 1.0, "normalized time outside [0, 1]");
  if (s == 0.0 || s == 1.0) return 0.0;
  switch (kind_) {
    case Kind::NestedSine: {
      const double inner = std::sin(0.5 * kPi * s);
      return std::sin(kPi * inner * inner) * 0.25 * kPi * kPi * std::sin(kPi * s);
    }
    case Kind::Smoothstep:
      return 6.0 * s * (1.0 - s);
  }
  return 0.0;
}

double Schedule::max_derivative() const { return kind_ == Kind::NestedSine ? 0.25 * kPi * kPi : 1.5; }

double lambda_value(double s, const Schedule& sched) { return sched.value(s); }
double lambda_derivative(double s, const Schedule& sched) { return sched.derivative(s); }

// ---------------------------------------------------------------------------

void ProtocolSpec::validate() const {
  xxz.validate();
  initial.validate();
  require(initial.sites() == xxz.n, "initial field site count differs from the ring size");
  if (aux) {
    aux->validate();
    require(static_cast<int>(aux->omegas.size()) == xxz.n, "auxiliary field site count differs from the ring size");
  }
  if (cd) {
    require(std::isfinite(cd->alpha) && cd->bound >= 0.0, "invalid CD settings");
    require(std::abs(cd->alpha) <= cd->bound, "CD strength |alpha| exceeds its bound");
  }
  require(total_time > 0.0 && std::isfinite(total_time), "total time must be positive");
}

double Protocol::s_of(double t) const {
  require(t >= 0.0 && t <= total_time, "time outside [0, T]");
  if (t == total_time) return 1.0;
  return t / total_time;
}

void Protocol::validate() const {
  require(initial.dim() == target.dim(), "initial and target dimensions differ");
  if (aux) require(aux->dim() == target.dim(), "auxiliary dimension differs");
  require(initial_state.size() == target.dim(), "initial state dimension differs");
  require(std::abs(initial_state.norm() - 1.0) <= 1e-10, "initial state is not normalized");
  require(total_time > 0.0, "total time must be positive");
  if (cd) require(std::abs(cd->alpha) <= cd->bound, "CD strength |alpha| exceeds its bound");
}

// ---------------------------------------------------------------------------

HermitianOperator build_target(const XXZParams& p) {
  p.validate();
  std::vector<PauliString> terms;
  for (int j = 0; j < p.n; ++j) {
    const int k = next_site(j, p.n);
    for (auto [axis, c] : {std::pair{Pauli::X, p.J}, {Pauli::Y, p.J}, {Pauli::Z, p.J * p.delta}}) {
      if (c == 0.0) continue;
      const std::pair<int, Pauli> placed[] = {{j, axis}, {k, axis}};
      terms.push_back(PauliString::on_sites(p.n, placed, c));
    }
  }
  return realize(terms, p.n);
}

HermitianOperator build_initial(const InitialField& f) {
  f.validate();
  const int n = f.sites();
  std::vector<PauliString> terms;
  for (int j = 0; j < n; ++j) {
    const Vec3& u = f.directions[j];
    const Pauli axes[] = {Pauli::X, Pauli::Y, Pauli::Z};
    for (int a = 0; a < 3; ++a) {
      if (u[a] == 0.0) continue;
      const std::pair<int, Pauli> placed[] = {{j, axes[a]}};
      terms.push_back(PauliString::on_sites(n, placed, f.epsilon * u[a]));
    }
  }
  return realize(terms, n);
}

HermitianOperator build_aux(const AuxiliaryField& a) {
  a.validate();
  const int n = static_cast<int>(a.omegas.size());
  std::vector<PauliString> terms;
  for (int j = 0; j < n; ++j) {
    if (a.omegas[j] == 0.0) continue;
    const std::pair<int, Pauli> placed[] = {{j, Pauli::Z}};
    terms.push_back(PauliString::on_sites(n, placed, a.omegas[j]));
  }
  return realize(terms, n);
}

HermitianOperator total_magnetization(int n) {
  return build_aux(AuxiliaryField{std::vector<double>(n, 1.0)});
}

CVector product_ground_state(const InitialField& f) {
  f.validate();
  const int n = f.sites();
  std::vector<std::array<cplx, 2>> spinors(n);
  for (int j = 0; j < n; ++j) {
    // Spin along m = -u: cos(t/2)|0> + e^{ip} sin(t/2)|1> with (t, p) the angles of m.
    const Vec3& u = f.directions[j];
    const double mz = std::clamp(-u[2], -1.0, 1.0);
    const double half = 0.5 * std::acos(mz);
    const double phi = std::atan2(-u[1], -u[0]);
    spinors[j] = {cplx(std::cos(half), 0.0), std::polar(std::sin(half), phi)};
  }
  const Eigen::Index dim = Eigen::Index{1} << n;
  CVector psi(dim);
  for (Eigen::Index b = 0; b < dim; ++b) {
    cplx amp(1.0, 0.0);
    for (int j = 0; j < n; ++j) amp *= spinors[j][(b >> (n - 1 - j)) & 1];
    psi[b] = amp;
  }
  for (Eigen::Index b = 0; b < dim; ++b) {
    if (std::abs(psi[b]) > kAmplitudeTol) {
      psi *= std::conj(psi[b]) / std::abs(psi[b]);
      psi[b] = std::abs(psi[b]);
      break;
    }
  }
  psi.normalize();
  return psi;
}

double product_state_energy(const XXZParams& p, const InitialField& f) {
  p.validate();
  require(f.sites() == p.n, "initial field site count differs from the ring size");
  double e = 0.0;
  for (int j = 0; j < p.n; ++j) {
    const Vec3& a = f.directions[j];
    const Vec3& b = f.directions[next_site(j, p.n)];
    // m = -u on both sites; the signs cancel in each product.
    e += a[0] * b[0] + a[1] * b[1] + p.delta * a[2] * b[2];
  }
  return p.J * e;
}

Protocol realize_protocol(const ProtocolSpec& spec) {
  spec.validate();
  Protocol p{build_initial(spec.initial),
             build_target(spec.xxz),
             std::nullopt,
             product_ground_state(spec.initial),
             spec.schedule,
             spec.total_time,
             spec.cd};
  if (spec.aux) p.aux = build_aux(*spec.aux);
  return p;
}

HermitianOperator assemble_at_lambda(const Protocol& p, double lambda) {
  CMatrix m = (1.0 - lambda) * p.initial.matrix() + lambda * p.target.matrix();
  if (p.aux) m += (lambda * (1.0 - lambda)) * p.aux->matrix();
  return HermitianOperator(std::move(m));
}

HermitianOperator assemble(const Protocol& p, double t) {
  const double s = p.s_of(t);
  if (s == 0.0) return p.initial;
  if (s == 1.0) return p.target;
  return assemble_at_lambda(p, p.schedule.value(s));
}

HermitianOperator assemble(const ProtocolSpec& spec, double t) { return assemble(realize_protocol(spec), t); }

HermitianOperator partial_lambda(const Protocol& p, double lambda) {
  CMatrix m = p.target.matrix() - p.initial.matrix();
  if (p.aux) m += (1.0 - 2.0 * lambda) * p.aux->matrix();
  return HermitianOperator(std::move(m));
}

HermitianOperator cd_first_order(const Protocol& p, double t) {
  if (!p.cd) throw std::invalid_argument("protocol has no CD settings");
  require(std::abs(p.cd->alpha) <= p.cd->bound, "CD strength |alpha| exceeds its bound");
  const double lambda = p.lambda_at(t);
  const double rate = p.lambda_rate(t);
  HermitianOperator h = i_commutator(assemble_at_lambda(p, lambda), partial_lambda(p, lambda));
  h *= rate * p.cd->alpha;
  return h;
}

HermitianOperator cd_first_order(const ProtocolSpec& spec, double t) {
  return cd_first_order(realize_protocol(spec), t);
}

HermitianOperator cd_exact(const Protocol& p, double t, double gap_floor) {
  const double lambda = p.lambda_at(t);
  const double rate = p.lambda_rate(t);
  const Spectrum sp = eigendecompose(assemble_at_lambda(p, lambda));
  const Eigen::Index d = sp.size();

  std::vector<int> cluster(d, 0);
  for (Eigen::Index k = 1; k < d; ++k)
    cluster[k] = cluster[k - 1] + (sp.eigenvalues[k] - sp.eigenvalues[k - 1] > gap_floor ? 1 : 0);
  if (d > 1 && cluster[1] == 0) {
    std::vector<double> levels;
    for (Eigen::Index k = 0; k < d && cluster[k] == 0; ++k) levels.push_back(sp.eigenvalues[k]);
    throw DegeneracyError("exact CD undefined: ground level is degenerate (" + std::to_string(levels.size()) +
                              " levels within the gap floor)",
                          std::move(levels));
  }

  const CMatrix& v = sp.eigenvectors;
  const CMatrix dh = rate * partial_lambda(p, lambda).matrix();
  CMatrix m = v.adjoint() * dh * v;
  for (Eigen::Index r = 0; r < d; ++r) {
    for (Eigen::Index c = 0; c < d; ++c) {
      if (cluster[r] == cluster[c]) {
        m(r, c) = 0.0;
      } else {
        // i |m><m| dH |n><n| / (E_n - E_m) with m = r, n = c.
        m(r, c) *= cplx(0.0, 1.0) / (sp.eigenvalues[c] - sp.eigenvalues[r]);
      }
    }
  }
  CMatrix h = v * m * v.adjoint();
  return HermitianOperator(0.5 * (h + h.adjoint()));
}

}  // namespace adia
