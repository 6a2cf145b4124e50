#include "adia/variational.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>

namespace adia {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

double Interval::project(double x) const {
  if (periodic) {
    const double w = width();
    double y = std::fmod(x - lo, w);
    if (y < 0.0) y += w;
    if (y >= w) y = 0.0;
    return lo + y;
  }
  return std::clamp(x, lo, hi);
}

void ParameterVector::project() {
  for (std::size_t k = 0; k < values.size(); ++k) values[k] = bounds[k].project(values[k]);
}

bool ParameterVector::within_bounds() const {
  for (std::size_t k = 0; k < values.size(); ++k) {
    const Interval& b = bounds[k];
    if (!(values[k] >= b.lo && (b.periodic ? values[k] < b.hi : values[k] <= b.hi))) return false;
  }
  return true;
}

void ParameterVector::validate() const {
  require(values.size() == bounds.size(), "parameter and bound counts differ");
  for (const auto& b : bounds) {
    require(b.lo <= b.hi, "empty parameter interval");
    require(!b.periodic || (b.finite() && b.width() > 0.0), "periodic interval must be finite");
  }
}

OptimizerConfig OptimizerConfig::static_defaults() {
  OptimizerConfig c;
  c.max_evals = 2000;
  c.tolerance = 1e-6;
  return c;
}

OptimizerConfig OptimizerConfig::dynamic_defaults() { return OptimizerConfig{}; }

void OptimizerConfig::validate() const {
  require(restarts > 0, "restart count must be positive");
  require(max_evals > 0, "evaluation budget must be positive");
  require(tolerance >= 0.0 && std::isfinite(tolerance), "tolerance must be nonnegative");
  require(simplex_scale > 0.0 && std::isfinite(simplex_scale), "simplex scale must be positive");
}

int OptimizationReport::total_evaluations() const {
  int n = 0;
  for (const auto& r : restarts) n += r.evaluations;
  return n;
}

// ---------------------------------------------------------------------------

namespace {

using Point = std::vector<double>;

struct BudgetExhausted {};

// One Nelder-Mead run. The simplex lives in lifted coordinates where periodic
// entries are not wrapped; the objective and the trace only see projected
// points.
class NelderMead {
 public:
  NelderMead(const Objective& f, const std::vector<Interval>& bounds, const OptimizerConfig& cfg, RestartTrace& out)
      : f_(f), bounds_(bounds), cfg_(cfg), out_(out) {}

  void run(Point x0) {
    const std::size_t n = x0.size();
    for (std::size_t k = 0; k < n; ++k)
      if (!bounds_[k].periodic) x0[k] = bounds_[k].project(x0[k]);

    std::vector<Point> x(n + 1, x0);
    std::vector<double> fx(n + 1);
    try {
      fx[0] = eval(x[0]);
      for (std::size_t k = 0; k < n; ++k) {
        const Interval& b = bounds_[k];
        double step = b.finite() ? cfg_.simplex_scale * b.width() : cfg_.simplex_scale;
        if (!b.periodic && x0[k] + step > b.hi) step = -step;
        x[k + 1][k] = lift(x0[k] + step, k);
        fx[k + 1] = eval(x[k + 1]);
      }
      iterate(x, fx);
    } catch (const BudgetExhausted&) {
    }
  }

 private:
  double lift(double v, std::size_t k) const { return bounds_[k].periodic ? v : bounds_[k].project(v); }

  double eval(const Point& lifted) {
    if (out_.evaluations >= cfg_.max_evals) throw BudgetExhausted{};
    Point p(lifted.size());
    for (std::size_t k = 0; k < p.size(); ++k) p[k] = bounds_[k].project(lifted[k]);
    const double v = f_(p);
    ++out_.evaluations;
    if (!std::isfinite(v)) throw NumericalError("objective returned a non-finite value");
    if (v < out_.best_objective) {
      out_.best_objective = v;
      out_.best = std::move(p);
    }
    out_.history.emplace_back(out_.evaluations, out_.best_objective);
    return v;
  }

  Point affine(const Point& c, const Point& x, double t) const {
    // c + t (x - c), projected for bounded entries.
    Point y(c.size());
    for (std::size_t k = 0; k < c.size(); ++k) y[k] = lift(c[k] + t * (x[k] - c[k]), k);
    return y;
  }

  void iterate(std::vector<Point>& x, std::vector<double>& fx) {
    const std::size_t n = x.size() - 1;
    std::vector<std::size_t> order(n + 1);
    for (;;) {
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fx[a] < fx[b]; });
      std::vector<Point> xs(n + 1);
      std::vector<double> fs(n + 1);
      for (std::size_t i = 0; i <= n; ++i) {
        xs[i] = std::move(x[order[i]]);
        fs[i] = fx[order[i]];
      }
      x = std::move(xs);
      fx = std::move(fs);

      if (fx[n] - fx[0] <= cfg_.tolerance) {
        out_.converged = true;
        return;
      }

      Point c(x[0].size(), 0.0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < c.size(); ++k) c[k] += x[i][k] / static_cast<double>(n);

      const Point xr = affine(c, x[n], -1.0);
      const double fr = eval(xr);
      if (fr < fx[0]) {
        const Point xe = affine(c, x[n], -2.0);
        const double fe = eval(xe);
        if (fe < fr) {
          x[n] = xe;
          fx[n] = fe;
        } else {
          x[n] = xr;
          fx[n] = fr;
        }
        continue;
      }
      if (fr < fx[n - 1]) {
        x[n] = xr;
        fx[n] = fr;
        continue;
      }
      const bool outside = fr < fx[n];
      const Point xc = outside ? affine(c, xr, 0.5) : affine(c, x[n], 0.5);
      const double fc = eval(xc);
      if (fc < std::min(fr, fx[n])) {
        x[n] = xc;
        fx[n] = fc;
        continue;
      }
      for (std::size_t i = 1; i <= n; ++i) {
        x[i] = affine(x[0], x[i], 0.5);
        fx[i] = eval(x[i]);
      }
    }
  }

  const Objective& f_;
  const std::vector<Interval>& bounds_;
  const OptimizerConfig& cfg_;
  RestartTrace& out_;
};

}  // namespace

OptimizationReport minimize(const Objective& objective, const std::vector<Interval>& bounds,
                            const std::vector<std::vector<double>>& canonical, const OptimizerConfig& cfg) {
  cfg.validate();
  require(!bounds.empty(), "no parameters to optimize");
  ParameterVector probe{std::vector<double>(bounds.size(), 0.0), bounds};
  probe.validate();

  OptimizationReport report;
  report.seed = cfg.seed;
  const auto total = static_cast<std::size_t>(std::max<int>(cfg.restarts, static_cast<int>(canonical.size())));
  report.restarts.resize(total);

  // Starts are drawn up front so the result does not depend on scheduling.
  std::mt19937_64 rng(cfg.seed);
  for (std::size_t r = 0; r < total; ++r) {
    RestartTrace& t = report.restarts[r];
    if (r < canonical.size()) {
      require(canonical[r].size() == bounds.size(), "canonical start has the wrong size");
      t.start = canonical[r];
      t.canonical = true;
      continue;
    }
    t.start.resize(bounds.size());
    for (std::size_t k = 0; k < bounds.size(); ++k) {
      const Interval& b = bounds[k];
      const double lo = std::isfinite(b.lo) ? b.lo : -1.0;
      const double hi = std::isfinite(b.hi) ? b.hi : 1.0;
      t.start[k] = std::uniform_real_distribution<double>(lo, hi)(rng);
    }
  }

#pragma omp parallel for schedule(dynamic)
  for (std::size_t r = 0; r < total; ++r) {
    RestartTrace& t = report.restarts[r];
    try {
      NelderMead(objective, bounds, cfg, t).run(t.start);
    } catch (const std::exception& e) {
      t.error = e.what();
      t.converged = false;
    }
  }

  for (std::size_t r = 0; r < total; ++r) {
    const RestartTrace& t = report.restarts[r];
    if (t.best_objective < report.best_objective) {
      report.best_objective = t.best_objective;
      report.best = t.best;
      report.best_restart = r;
      report.converged = t.converged;
    }
  }
  if (report.best.empty()) throw NumericalError("every restart failed: " + report.restarts.front().error);
  return report;
}

// ---------------------------------------------------------------------------

InitialField field_from_angles(double epsilon, std::span<const double> angles) {
  require(angles.size() % 2 == 0, "angle vector needs (theta, phi) pairs");
  const std::size_t n = angles.size() / 2;
  std::vector<double> theta(n), phi(n);
  for (std::size_t j = 0; j < n; ++j) {
    theta[j] = angles[2 * j];
    phi[j] = angles[2 * j + 1];
  }
  return InitialField::from_angles(epsilon, theta, phi);
}

std::vector<double> canonical_angles(std::span<const double> angles) {
  require(angles.size() % 2 == 0 && !angles.empty(), "angle vector needs (theta, phi) pairs");
  const Interval period{0.0, kTwoPi, true};
  std::vector<double> out(angles.begin(), angles.end());
  for (std::size_t j = 0; j < out.size(); j += 2) {
    double theta = period.project(out[j]);
    double phi = out[j + 1];
    if (theta > std::numbers::pi) {
      theta = kTwoPi - theta;
      phi += std::numbers::pi;
    }
    out[j] = theta;
    out[j + 1] = phi;
  }
  const double phi0 = out[1];
  for (std::size_t j = 1; j < out.size(); j += 2) out[j] = period.project(out[j] - phi0);
  return out;
}

std::vector<std::vector<double>> orientation_candidates(int n) {
  require(n >= 1, "need at least one site");
  const double pi = std::numbers::pi;
  std::vector<std::vector<double>> c(4, std::vector<double>(2 * static_cast<std::size_t>(n)));
  for (int j = 0; j < n; ++j) {
    const bool odd = j % 2 == 1;
    const auto t = static_cast<std::size_t>(2 * j);
    c[0][t] = pi / 2;  // -x everywhere
    c[0][t + 1] = pi;
    c[1][t] = pi / 2;  // x Neel
    c[1][t + 1] = odd ? pi : 0.0;
    c[2][t] = pi / 2;  // y Neel
    c[2][t + 1] = odd ? 1.5 * pi : 0.5 * pi;
    c[3][t] = odd ? pi : 0.0;  // z Neel
    c[3][t + 1] = 0.0;
  }
  return c;
}

OrientationResult optimize_initial_orientations(const XXZParams& p, double epsilon, const OptimizerConfig& cfg) {
  p.validate();
  require(epsilon > 0.0, "epsilon must be positive");
  const Objective energy = [&](std::span<const double> a) {
    return product_state_energy(p, field_from_angles(epsilon, a));
  };
  const std::vector<Interval> bounds(2 * static_cast<std::size_t>(p.n), Interval{0.0, kTwoPi, true});
  OrientationResult r{{}, minimize(energy, bounds, orientation_candidates(p.n), cfg)};
  r.report.best = canonical_angles(r.report.best);
  r.field = field_from_angles(epsilon, r.report.best);
  return r;
}

// ---------------------------------------------------------------------------

IntegrationSettings search_settings(double total_time, double dt) {
  require(total_time > 0.0 && dt > 0.0, "search settings need positive T and dt");
  IntegrationSettings s;
  s.dt = std::min(dt, total_time / 100.0);
  s.sample_count = 11;
  return s;
}

double final_energy(const Protocol& p, bool with_cd, const IntegrationSettings& settings,
                    const GeneratorCache* cache) {
  return p.target.expectation(evolve(p, with_cd, settings, cache));
}

namespace {

constexpr double kAlphaGridStep = 0.01;
constexpr double kAlphaGridRatio = 0.1;
constexpr std::size_t kAlphaRefinements = 3;
constexpr double kAlphaResolution = 1e-3;

double alpha_bound(const ProtocolSpec& spec) {
  return spec.cd ? spec.cd->bound : kDefaultAlphaBoundFactor * spec.initial.epsilon;
}

CdSettings cd_with(const ProtocolSpec& spec, double alpha) {
  CdSettings cd = spec.cd.value_or(CdSettings{0.0, alpha_bound(spec)});
  cd.alpha = std::clamp(alpha, -cd.bound, cd.bound);
  return cd;
}

}  // namespace

AuxResult optimize_aux_fields(const ProtocolSpec& spec, const OptimizerConfig& cfg,
                              const IntegrationSettings& settings) {
  ProtocolSpec base = spec;
  base.aux = AuxiliaryField::zeros(spec.xxz.n);
  const Protocol proto = realize_protocol(base);
  const bool with_cd = base.cd && base.cd->alpha != 0.0;
  const GeneratorCache cache = make_generator_cache(proto, with_cd);

  const Objective energy = [&](std::span<const double> w) {
    Protocol p = proto;
    p.aux = build_aux(AuxiliaryField{std::vector<double>(w.begin(), w.end())});
    return final_energy(p, with_cd, settings, &cache);
  };
  const std::vector<Interval> bounds(static_cast<std::size_t>(spec.xxz.n), Interval{-kAuxFieldBound, kAuxFieldBound});
  const std::vector<std::vector<double>> starts{std::vector<double>(spec.xxz.n, 0.0)};
  AuxResult r{{}, minimize(energy, bounds, starts, cfg)};
  r.field.omegas = r.report.best;
  return r;
}

AlphaResult optimize_cd_alpha(const ProtocolSpec& spec, const OptimizerConfig& cfg,
                              const IntegrationSettings& settings) {
  cfg.validate();
  const double bound = alpha_bound(spec);
  ProtocolSpec base = spec;
  base.cd = cd_with(spec, 0.0);
  const Protocol proto = realize_protocol(base);
  const GeneratorCache cache = make_generator_cache(proto, true);

  AlphaResult r;
  r.report.seed = cfg.seed;
  r.report.restarts.resize(1);
  RestartTrace& t = r.report.restarts.front();
  t.start = {0.0};
  t.canonical = true;
  auto f = [&](double a) {
    Protocol p = proto;
    p.cd->alpha = std::clamp(a, -bound, bound);
    const double v = final_energy(p, true, settings, &cache);
    ++t.evaluations;
    if (v < t.best_objective) {
      t.best_objective = v;
      t.best = {p.cd->alpha};
    }
    t.history.emplace_back(t.evaluations, t.best_objective);
    return v;
  };

  f(0.0);
  if (bound > 0.0) {
    // Spacing max(0.01, 0.1 |alpha|): fine where the first-order term is a
    // perturbation, coarser further out.
    std::vector<double> pos;
    for (double a = 0.01; a < bound; a += std::max(kAlphaGridStep, kAlphaGridRatio * a)) pos.push_back(a);
    pos.push_back(bound);
    std::vector<double> grid;
    for (auto it = pos.rbegin(); it != pos.rend(); ++it) grid.push_back(-*it);
    grid.push_back(0.0);
    grid.insert(grid.end(), pos.begin(), pos.end());

    std::vector<double> vals(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) vals[k] = grid[k] == 0.0 ? t.history.front().second : f(grid[k]);

    // Golden section inside the neighbours of the best few grid minima.
    std::vector<std::size_t> minima;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const bool left = k == 0 || vals[k] <= vals[k - 1];
      const bool right = k + 1 == grid.size() || vals[k] <= vals[k + 1];
      if (left && right) minima.push_back(k);
    }
    std::stable_sort(minima.begin(), minima.end(), [&](std::size_t x, std::size_t y) { return vals[x] < vals[y]; });
    if (minima.size() > kAlphaRefinements) minima.resize(kAlphaRefinements);

    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    for (std::size_t m : minima) {
      double lo = grid[m == 0 ? 0 : m - 1];
      double hi = grid[std::min(m + 1, grid.size() - 1)];
      double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
      double fa = f(a), fb = f(b);
      while (hi - lo > kAlphaResolution) {
        if (fa < fb) {
          hi = b;
          b = a;
          fb = fa;
          a = hi - g * (hi - lo);
          fa = f(a);
        } else {
          lo = a;
          a = b;
          fa = fb;
          b = lo + g * (hi - lo);
          fb = f(b);
        }
      }
    }
  }
  t.converged = true;
  r.report.best = t.best;
  r.report.best_objective = t.best_objective;
  r.report.converged = true;
  r.alpha = t.best.front();
  return r;
}

AuxAlphaResult optimize_aux_and_alpha(const ProtocolSpec& spec, const OptimizerConfig& cfg,
                                      const IntegrationSettings& settings) {
  const double bound = alpha_bound(spec);
  const auto n = static_cast<std::size_t>(spec.xxz.n);
  ProtocolSpec base = spec;
  base.aux = AuxiliaryField::zeros(spec.xxz.n);
  base.cd = cd_with(spec, 0.0);
  const Protocol proto = realize_protocol(base);
  const GeneratorCache cache = make_generator_cache(proto, true);

  const Objective energy = [&](std::span<const double> v) {
    Protocol p = proto;
    p.aux = build_aux(AuxiliaryField{std::vector<double>(v.begin(), v.begin() + static_cast<long>(n))});
    p.cd->alpha = v[n];
    return final_energy(p, true, settings, &cache);
  };
  std::vector<Interval> bounds(n, Interval{-kAuxFieldBound, kAuxFieldBound});
  bounds.push_back(Interval{-bound, bound});

  // Zero point, and the zero field with the best alpha of the CD-only search.
  std::vector<std::vector<double>> starts{std::vector<double>(n + 1, 0.0)};
  const AlphaResult alone = optimize_cd_alpha(base, cfg, settings);
  if (alone.alpha != 0.0) {
    starts.push_back(std::vector<double>(n + 1, 0.0));
    starts.back()[n] = alone.alpha;
  }
  AuxAlphaResult r{{}, 0.0, minimize(energy, bounds, starts, cfg)};
  r.field.omegas.assign(r.report.best.begin(), r.report.best.begin() + static_cast<long>(n));
  r.alpha = r.report.best[n];
  return r;
}

}  // namespace adia
