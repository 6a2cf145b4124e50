#include "adia/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace adia {

namespace {

// Worst-case RK4 norm loss allowed over a run.
constexpr double kNormLossBudget = kNormTolerance;
// RK4 applied to exp(-i x) loses |1 - |R(ix)|^2| ~ x^6 / 72 per step.
constexpr double kRk4NormLossCoeff = 1.0 / 72.0;
constexpr double kMaxPhasePerStep = 0.1;
constexpr double kMaxGridStepNorm = 0.1;

double row_sum_norm(const CMatrix& m) { return m.cwiseAbs().rowwise().sum().maxCoeff(); }

}  // namespace

void IntegrationSettings::validate(double total_time) const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("time step must be positive");
  if (total_time / dt < 100.0 - 1e-9)
    throw std::invalid_argument("time step too coarse: T/dt must be at least 100");
  if (sample_count < 2) throw std::invalid_argument("need at least two trace samples");
}

// ---------------------------------------------------------------------------

namespace {

// i [H, D] for diagonal D: entry (r, c) is i H_rc (d_c - d_r).
CMatrix i_commutator_diagonal(const CMatrix& h, const Eigen::VectorXd& d) {
  CMatrix c(h.rows(), h.cols());
  for (Eigen::Index col = 0; col < h.cols(); ++col)
    for (Eigen::Index row = 0; row < h.rows(); ++row) c(row, col) = cplx(0.0, d[col] - d[row]) * h(row, col);
  return c;
}

bool cd_active(const Protocol& p, bool with_cd) { return with_cd && p.cd && p.cd->alpha != 0.0; }

}  // namespace

GeneratorCache make_generator_cache(const Protocol& p, bool with_cd) {
  GeneratorCache c;
  c.initial_norm = spectral_norm(p.initial);
  c.target_norm = spectral_norm(p.target);
  if (with_cd) {
    c.commutator = i_commutator(p.initial, p.target);
    c.commutator_norm = spectral_norm(*c.commutator);
  }
  return c;
}

Generator::Generator(const Protocol& p, bool with_cd, const GeneratorCache* cache)
    : protocol_(&p), with_cd_(cd_active(p, with_cd)), has_aux_(p.aux.has_value()) {
  p.validate();
  if (with_cd && !p.cd) throw std::invalid_argument("CD requested but the protocol has no CD settings");

  GeneratorCache local;
  if (!cache || (with_cd_ && !cache->commutator)) {
    local = make_generator_cache(p, with_cd_);
    cache = &local;
  }

  std::vector<CMatrix> c{p.initial.matrix(), p.target.matrix()};
  Eigen::VectorXd aux_diag;
  if (has_aux_) {
    aux_diag = p.aux->matrix().diagonal().real();
    c.push_back(p.aux->matrix());
  }
  // (1 - lambda) a + lambda b peaks at an endpoint; lambda (1 - lambda) <= 1/4.
  norm_bound_ = std::max(cache->initial_norm, cache->target_norm);
  if (has_aux_) norm_bound_ += 0.25 * aux_diag.cwiseAbs().maxCoeff();
  if (with_cd_) {
    c.push_back(cache->commutator->matrix());
    double cn = cache->commutator_norm;
    if (has_aux_) {
      c.push_back(i_commutator_diagonal(p.initial.matrix(), aux_diag));
      c.push_back(i_commutator_diagonal(p.target.matrix(), aux_diag));
      cn += row_sum_norm(c[4]) + row_sum_norm(c[5]);
    }
    // Bracket weights (1 - lambda)^2 and lambda^2 never exceed one.
    norm_bound_ += std::abs(p.cd->alpha) * p.schedule.max_derivative() / p.total_time * cn;
  }
  combo_ = kernels::LinearCombination(std::move(c));
}

void Generator::weights(double t, std::vector<double>& w) const {
  const Protocol& p = *protocol_;
  const double lambda = p.lambda_at(t);
  w.assign({1.0 - lambda, lambda});
  if (has_aux_) w.push_back(lambda * (1.0 - lambda));
  if (with_cd_) {
    // i g [H_ad, d_lambda H_ad] = g (C_if + (1 - lambda)^2 C_ia - lambda^2 C_fa).
    const double g = p.lambda_rate(t) * p.cd->alpha;
    w.push_back(g);
    if (has_aux_) {
      w.push_back(g * (1.0 - lambda) * (1.0 - lambda));
      w.push_back(-g * lambda * lambda);
    }
  }
}

std::vector<double> Generator::weights(double t) const {
  std::vector<double> w;
  weights(t, w);
  return w;
}

CMatrix Generator::dense(double t) const {
  const auto w = weights(t);
  CMatrix m = CMatrix::Zero(combo_.dim(), combo_.dim());
  for (std::size_t k = 0; k < combo_.size(); ++k) m += w[k] * combo_.term(k).to_dense();
  return m;
}

StepPlan plan_steps(const Generator& g, double total_time, const IntegrationSettings& settings) {
  settings.validate(total_time);
  const double interval = total_time / (settings.sample_count - 1);
  double h_max = settings.dt;
  const double b = g.norm_bound();
  if (b > 0.0) {
    const double x = std::min(kMaxPhasePerStep,
                              std::pow(kNormLossBudget / (kRk4NormLossCoeff * total_time * b), 0.2));
    h_max = std::min(h_max, x / b);
  }
  StepPlan plan;
  plan.steps_per_sample = std::max<long>(1, static_cast<long>(std::ceil(interval / h_max - 1e-9)));
  plan.step = interval / static_cast<double>(plan.steps_per_sample);
  return plan;
}

// ---------------------------------------------------------------------------

namespace {

struct Integrator {
  const Generator& gen;
  double total_time;
  int samples;
  StepPlan plan;

  std::vector<double> w_start, w_mid, w_end;
  kernels::Rk4Workspace ws;

  Integrator(const Generator& g, double T, const IntegrationSettings& s)
      : gen(g), total_time(T), samples(s.sample_count), plan(plan_steps(g, T, s)) {}

  double sample_time(int i) const {
    return i == samples - 1 ? total_time : total_time * static_cast<double>(i) / (samples - 1);
  }

  // Advances psi from sample i to sample i + 1.
  void advance(int i, CVector& psi) {
    const double t0 = sample_time(i);
    const double t1 = sample_time(i + 1);
    const double h = plan.step;
    gen.weights(t0, w_start);
    for (long k = 0; k < plan.steps_per_sample; ++k) {
      const double a = t0 + static_cast<double>(k) * h;
      const double b = k + 1 == plan.steps_per_sample ? t1 : t0 + static_cast<double>(k + 1) * h;
      gen.weights(0.5 * (a + b), w_mid);
      gen.weights(b, w_end);
      kernels::rk4_step(gen.combination(), w_start, w_mid, w_end, b - a, psi, ws);
      std::swap(w_start, w_end);
    }
  }
};

double check_norm(const CVector& psi, double t) {
  const double drift = std::abs(psi.norm() - 1.0);
  if (!(drift <= kNormTolerance))
    throw NumericalError("norm drift " + std::to_string(drift) + " at t = " + std::to_string(t) +
                         " exceeds tolerance; reduce dt");
  return drift;
}

}  // namespace

CMatrix ground_space(const HermitianOperator& h, double tol) {
  const Spectrum sp = eigendecompose(h);
  return sp.eigenvectors.leftCols(sp.ground_multiplicity(tol));
}

double ground_overlap(const CMatrix& ground_basis, const CVector& psi) {
  return (ground_basis.adjoint() * psi).norm();
}

namespace {

double sample_time(const Protocol& p, int i, int samples) {
  return i == samples - 1 ? p.total_time : p.total_time * static_cast<double>(i) / (samples - 1);
}

// Shared per-sample bookkeeping of propagate() and propagate_reference().
class TraceRecorder {
 public:
  TraceRecorder(const Protocol& p, int samples) : hf_(kernels::MaskedOperator::from_dense(p.target.matrix())) {
    trace_.times.resize(samples);
    for (int i = 0; i < samples; ++i) trace_.times[i] = sample_time(p, i, samples);

    const Spectrum target = eigendecompose(p.target);
    target_ground_ = target.eigenvectors.leftCols(target.ground_multiplicity(kGroundClusterTol));
    trace_.target_ground_energy = target.eigenvalues[0];

    // Reference ground spaces do not depend on the state; build them up front.
    instantaneous_.resize(samples);
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < samples; ++i) instantaneous_[i] = ground_space(assemble(p, trace_.times[i]));
    hpsi_.resize(p.target.dim());
  }

  void record(int i, const CVector& psi) {
    trace_.max_norm_drift = std::max(trace_.max_norm_drift, check_norm(psi, trace_.times[i]));
    trace_.fidelity_to_target.push_back(ground_overlap(target_ground_, psi));
    trace_.fidelity_to_instantaneous.push_back(ground_overlap(instantaneous_[i], psi));
    hf_.apply(psi.data(), hpsi_.data());
    trace_.energy.push_back(psi.dot(hpsi_).real());
  }

  EvolutionTrace finish(CVector psi, double step, long steps) {
    trace_.final_state = std::move(psi);
    trace_.step = step;
    trace_.steps = steps;
    return std::move(trace_);
  }

 private:
  EvolutionTrace trace_;
  CMatrix target_ground_;
  std::vector<CMatrix> instantaneous_;
  kernels::MaskedOperator hf_;
  CVector hpsi_;
};

}  // namespace

EvolutionTrace propagate(const Protocol& p, bool with_cd, const IntegrationSettings& settings,
                         const GeneratorCache* cache) {
  const Generator gen(p, with_cd, cache);
  Integrator integ(gen, p.total_time, settings);
  const int samples = settings.sample_count;
  TraceRecorder rec(p, samples);

  CVector psi = p.initial_state;
  rec.record(0, psi);
  for (int i = 0; i + 1 < samples; ++i) {
    integ.advance(i, psi);
    rec.record(i + 1, psi);
  }
  return rec.finish(std::move(psi), integ.plan.step, integ.plan.steps_per_sample * (samples - 1));
}

EvolutionTrace propagate_reference(const Protocol& p, const ExtraTerm& extra, const IntegrationSettings& settings) {
  p.validate();
  settings.validate(p.total_time);
  const int samples = settings.sample_count;
  const double interval = p.total_time / (samples - 1);
  const long per_sample = std::max<long>(1, static_cast<long>(std::ceil(interval / settings.dt - 1e-9)));
  auto h_at = [&](double t) {
    CMatrix h = assemble(p, t).matrix();
    if (extra) h += extra(t).matrix();
    return h;
  };

  TraceRecorder rec(p, samples);
  CVector psi = p.initial_state;
  rec.record(0, psi);
  for (int i = 0; i + 1 < samples; ++i) {
    const double t0 = sample_time(p, i, samples);
    const double t1 = sample_time(p, i + 1, samples);
    const double h = (t1 - t0) / static_cast<double>(per_sample);
    CMatrix h_start = h_at(t0);
    for (long k = 0; k < per_sample; ++k) {
      const double a = t0 + static_cast<double>(k) * h;
      const double b = k + 1 == per_sample ? t1 : t0 + static_cast<double>(k + 1) * h;
      CMatrix h_end = h_at(b);
      kernels::reference::rk4_step(h_start, h_at(0.5 * (a + b)), h_end, b - a, psi);
      h_start = std::move(h_end);
    }
    rec.record(i + 1, psi);
  }
  return rec.finish(std::move(psi), interval / static_cast<double>(per_sample), per_sample * (samples - 1));
}

EvolutionTrace propagate(const ProtocolSpec& spec, bool with_cd, const IntegrationSettings& settings) {
  const Protocol p = realize_protocol(spec);
  return propagate(p, with_cd, settings);
}

CVector evolve(const Protocol& p, bool with_cd, const IntegrationSettings& settings, const GeneratorCache* cache) {
  const Generator gen(p, with_cd, cache);
  Integrator integ(gen, p.total_time, settings);
  CVector psi = p.initial_state;
  for (int i = 0; i + 1 < settings.sample_count; ++i) {
    integ.advance(i, psi);
    check_norm(psi, integ.sample_time(i + 1));
  }
  return psi;
}

// ---------------------------------------------------------------------------

std::vector<double> uniform_grid(int points, double lo, double hi) {
  if (points < 2) throw std::invalid_argument("grid needs at least two points");
  std::vector<double> g(points);
  for (int i = 0; i < points; ++i) g[i] = lo + (hi - lo) * static_cast<double>(i) / (points - 1);
  g.back() = hi;
  return g;
}

GroundPath instantaneous_ground_path(const Protocol& p, const std::vector<double>& s_grid) {
  if (s_grid.empty()) throw std::invalid_argument("empty grid");
  const double diff_norm = spectral_norm(HermitianOperator(p.target.matrix() - p.initial.matrix()));
  const double aux_norm = p.aux ? p.aux->matrix().diagonal().cwiseAbs().maxCoeff() : 0.0;
  std::vector<double> lambdas(s_grid.size());
  for (std::size_t k = 0; k < s_grid.size(); ++k) lambdas[k] = p.schedule.value(s_grid[k]);
  for (std::size_t k = 1; k < s_grid.size(); ++k) {
    const double dl = lambdas[k] - lambdas[k - 1];
    const double dmu = lambdas[k] * (1.0 - lambdas[k]) - lambdas[k - 1] * (1.0 - lambdas[k - 1]);
    if (std::abs(dl) * diff_norm + std::abs(dmu) * aux_norm >= kMaxGridStepNorm)
      throw std::invalid_argument("grid too coarse for ground-state continuation near s = " +
                                  std::to_string(s_grid[k]));
  }

  std::vector<Spectrum> spectra(s_grid.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t k = 0; k < s_grid.size(); ++k)
    spectra[k] = eigendecompose(assemble_at_lambda(p, lambdas[k]));

  GroundPath path;
  path.s_grid = s_grid;
  const Eigen::Index mult0 = spectra[0].ground_multiplicity(kGroundClusterTol);
  if (mult0 > 1) {
    std::vector<double> levels(spectra[0].eigenvalues.data(), spectra[0].eigenvalues.data() + mult0);
    throw DegeneracyError("ambiguous start: ground level degenerate at the first grid point", std::move(levels));
  }
  path.states.push_back(spectra[0].vector(0));
  path.ground_tracking.push_back(true);
  path.consecutive_overlap.push_back(1.0);
  for (std::size_t k = 1; k < s_grid.size(); ++k) {
    // Degenerate levels get an arbitrary basis from the eigensolver, so the
    // candidates are whole clusters: the continued state is the projection of
    // the previous one onto the cluster that captures most of it.
    const Spectrum& sp = spectra[k];
    const CVector coeffs = sp.eigenvectors.adjoint() * path.states.back();
    Eigen::Index best_lo = 0, best_len = 1;
    double best = -1.0;
    for (Eigen::Index lo = 0; lo < sp.size();) {
      Eigen::Index hi = lo + 1;
      while (hi < sp.size() && sp.eigenvalues[hi] - sp.eigenvalues[hi - 1] <= kGroundClusterTol) ++hi;
      const double w = coeffs.segment(lo, hi - lo).norm();
      if (w > best) {
        best = w;
        best_lo = lo;
        best_len = hi - lo;
      }
      lo = hi;
    }
    CVector next = sp.eigenvectors.middleCols(best_lo, best_len) * coeffs.segment(best_lo, best_len);
    next /= next.norm();
    path.states.push_back(std::move(next));
    path.ground_tracking.push_back(best_lo == 0);
    path.consecutive_overlap.push_back(best);
  }
  return path;
}

SpectrumTrace spectrum_trace(const Protocol& p, const std::vector<double>& s_grid, int k) {
  if (k < 0) throw std::invalid_argument("level count must be nonnegative");
  SpectrumTrace trace;
  trace.s_grid = s_grid;
  trace.levels.resize(s_grid.size());
  const Eigen::Index keep = k == 0 ? p.target.dim() : std::min<Eigen::Index>(k, p.target.dim());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < s_grid.size(); ++i) {
    const Eigen::VectorXd e = eigenvalues(assemble_at_lambda(p, p.schedule.value(s_grid[i])));
    trace.levels[i] = e.head(keep);
  }
  return trace;
}

GapMinimum min_gap(const SpectrumTrace& trace, int i, int j) {
  if (trace.levels.empty()) throw std::invalid_argument("empty spectrum trace");
  const auto k = trace.levels.front().size();
  if (!(0 <= i && i < j && j < k)) throw std::invalid_argument("min_gap needs 0 <= i < j < level count");
  const std::size_t n = trace.levels.size();
  std::vector<double> gap(n);
  for (std::size_t p = 0; p < n; ++p) gap[p] = trace.levels[p][j] - trace.levels[p][i];
  const std::size_t at = static_cast<std::size_t>(std::min_element(gap.begin(), gap.end()) - gap.begin());
  GapMinimum best{trace.s_grid[at], gap[at]};
  if (at == 0 || at + 1 == n) return best;

  const double x0 = trace.s_grid[at - 1], x1 = trace.s_grid[at], x2 = trace.s_grid[at + 1];
  const double y0 = gap[at - 1], y1 = gap[at], y2 = gap[at + 1];
  const double d01 = (y1 - y0) / (x1 - x0);
  const double d12 = (y2 - y1) / (x2 - x1);
  const double curv = (d12 - d01) / (x2 - x0);
  if (curv <= 0.0) return best;
  // Vertex of the interpolating parabola y1 + d01 (x - x1) + curv (x - x0)(x - x1).
  const double vertex = 0.5 * (x0 + x1) - d01 / (2.0 * curv);
  if (vertex <= x0 || vertex >= x2) return best;
  const double yv = y1 + d01 * (vertex - x1) + curv * (vertex - x0) * (vertex - x1);
  best.s = vertex;
  best.gap = std::clamp(yv, 0.0, y1);
  return best;
}

}  // namespace adia
