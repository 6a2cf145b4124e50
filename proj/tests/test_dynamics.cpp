#include <doctest.h>

#include <algorithm>

#include "adia/dynamics.hpp"
#include "adia/metrics.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace adia;

namespace {

IntegrationSettings coarse(double dt, int samples = 11) { return {dt, samples}; }

double min_of(const std::vector<double>& v) { return *std::min_element(v.begin(), v.end()); }
double max_of(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

}  // namespace

TEST_CASE("stationary state of a constant Hamiltonian") {
  Protocol p;
  // |0> is the ground state of -sigma^z.
  p.initial = -1.0 * single_site(Pauli::Z, 0, 1);
  p.target = p.initial;
  p.initial_state = CVector::Unit(2, 0);
  p.total_time = 3.0;
  const EvolutionTrace tr = propagate(p, false, {1e-3, 101});
  CHECK(tr.times.size() == 101);
  CHECK(tr.times.front() == 0.0);
  CHECK(tr.times.back() == 3.0);
  for (double f : tr.fidelity_to_target) CHECK(f == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(tr.final_state(0) - std::exp(cplx(0, 3.0))) < 1e-9);
}

TEST_CASE("integration settings are validated") {
  const Protocol p = realize_protocol(testing::small_spec(3, 1.0, 1.0));
  CHECK_THROWS(propagate(p, false, {0.02, 11}));
  CHECK_THROWS(propagate(p, false, {0.0, 11}));
  CHECK_THROWS(propagate(p, false, {1e-3, 1}));
  CHECK_THROWS(propagate(p, true, {1e-3, 11}));  // no CD settings
}

TEST_CASE("step halving: norm drift and final state converge at fourth order") {
  const Protocol p = realize_protocol(testing::small_spec(4, 0.5, 2.0));
  const EvolutionTrace a = propagate(p, false, coarse(4e-3));
  const EvolutionTrace b = propagate(p, false, coarse(2e-3));
  const EvolutionTrace c = propagate(p, false, coarse(1e-3));
  REQUIRE(a.step == doctest::Approx(4e-3));
  REQUIRE(b.step == doctest::Approx(2e-3));
  const double drift_a = std::abs(a.final_state.norm() - 1.0);
  const double drift_b = std::abs(b.final_state.norm() - 1.0);
  CHECK(drift_a < 1e-6);
  CHECK(drift_a / drift_b >= 8.0);
  const double e1 = (a.final_state - b.final_state).norm();
  const double e2 = (b.final_state - c.final_state).norm();
  CHECK(e1 / e2 >= 8.0);
}

TEST_CASE("default step is converged on the 8-site ring") {
  ProtocolSpec spec = testing::small_spec(8, 1.0, 10.0);
  const Protocol p = realize_protocol(spec);
  const CVector fine = evolve(p, false, {5e-4, 1001});
  const CVector coarse_state = evolve(p, false, {1e-3, 1001});
  CHECK((fine - coarse_state).norm() < 1e-8);
  const CMatrix g = ground_space(p.target);
  CHECK(std::abs(ground_overlap(g, fine) - ground_overlap(g, coarse_state)) < 1e-6);
}

TEST_CASE("evolve is bit-identical to propagate") {
  ProtocolSpec spec = testing::small_spec(4, 1.5, 1.0);
  spec.aux = AuxiliaryField{{0.3, -0.6, 1.1, 0.0}};
  spec.cd = CdSettings{0.4, 10.0};
  const Protocol p = realize_protocol(spec);
  const IntegrationSettings s{1e-3, 51};
  CHECK((evolve(p, true, s) - propagate(p, true, s).final_state).cwiseAbs().maxCoeff() == 0.0);
  const GeneratorCache cache = make_generator_cache(p, true);
  CHECK((evolve(p, true, s, &cache) - evolve(p, true, s)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("generator weights reproduce assemble plus the first-order CD term") {
  ProtocolSpec spec = testing::small_spec(4, 0.5, 3.0);
  spec.aux = AuxiliaryField{{0.5, -1.0, 0.2, 0.8}};
  spec.cd = CdSettings{-1.3, 10.0};
  const Protocol p = realize_protocol(spec);
  const Generator g(p, true);
  for (double t : {0.0, 0.4, 1.5, 2.9, 3.0}) {
    const CMatrix expected = assemble(p, t).matrix() + cd_first_order(p, t).matrix();
    CHECK((g.dense(t) - expected).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(spectral_norm(HermitianOperator(expected)) <= g.norm_bound() + 1e-9);
  }
  const Generator plain(p, false);
  CHECK((plain.dense(1.1) - assemble(p, 1.1).matrix()).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("fast propagation agrees with the dense reference path") {
  ProtocolSpec spec = testing::small_spec(4, 1.0, 1.0);
  spec.aux = AuxiliaryField{{0.2, 0.4, -0.5, 1.0}};
  spec.cd = CdSettings{0.7, 10.0};
  const Protocol p = realize_protocol(spec);
  const EvolutionTrace fast = propagate(p, true, {2e-3, 21});
  // Same step on both paths.
  const EvolutionTrace slow =
      propagate_reference(p, [&](double t) { return cd_first_order(p, t); }, {fast.step, 21});
  CHECK(slow.step == doctest::Approx(fast.step).epsilon(1e-12));
  CHECK((fast.final_state - slow.final_state).norm() < 1e-12);
  for (std::size_t i = 0; i < fast.times.size(); ++i) {
    CHECK(fast.fidelity_to_instantaneous[i] == doctest::Approx(slow.fidelity_to_instantaneous[i]).epsilon(1e-9));
    CHECK(fast.energy[i] == doctest::Approx(slow.energy[i]).epsilon(1e-9));
  }
}

TEST_CASE("exact CD keeps a gapped instance on its ground state") {
  const Protocol p = realize_protocol(testing::gapped_spec(0.5));
  const EvolutionTrace bare = propagate(p, false, {1e-3, 101});
  const EvolutionTrace driven = propagate_reference(p, [&](double t) { return cd_exact(p, t); }, {1e-3, 101});
  CHECK(min_of(driven.fidelity_to_instantaneous) > 0.999);
  // Without the CD term the fast protocol leaks.
  CHECK(min_of(bare.fidelity_to_instantaneous) < 0.99);
}

TEST_CASE("fidelities stay within [0, 1] and energy starts at the product-state value") {
  const ProtocolSpec spec = testing::small_spec(6, 1.0, 3.0);
  const EvolutionTrace tr = propagate(spec, false, {1e-3, 201});
  CHECK(min_of(tr.fidelity_to_target) >= 0.0);
  CHECK(max_of(tr.fidelity_to_target) <= 1.0 + 1e-9);
  CHECK(min_of(tr.fidelity_to_instantaneous) >= 0.0);
  CHECK(max_of(tr.fidelity_to_instantaneous) <= 1.0 + 1e-9);
  CHECK(tr.fidelity_to_instantaneous.front() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(tr.energy.front() == doctest::Approx(product_state_energy(spec.xxz, spec.initial)).epsilon(1e-12));
  CHECK(tr.max_norm_drift < 1e-6);
  for (std::size_t i = 1; i < tr.times.size(); ++i) CHECK(tr.times[i] > tr.times[i - 1]);
}

TEST_CASE("ground path of a constant protocol") {
  Protocol p = realize_protocol(testing::small_spec(4, 0.5));
  p.initial = p.target;
  p.initial_state = eigendecompose(p.target).vector(0);
  const GroundPath path = instantaneous_ground_path(p, uniform_grid(50));
  for (double o : path.consecutive_overlap) CHECK(o == doctest::Approx(1.0).epsilon(1e-12));
  for (bool g : path.ground_tracking) CHECK(g);

  const SpectrumTrace tr = spectrum_trace(p, uniform_grid(20), 4);
  const Eigen::VectorXd e = eigenvalues(p.target);
  const GapMinimum gm = min_gap(tr, 0, 1);
  CHECK(gm.gap == doctest::Approx(e(1) - e(0)).epsilon(1e-10));
  CHECK(gm.gap >= 0.0);
}

TEST_CASE("ground path continuity on the 8-site ring") {
  for (double delta : {0.5, 1.0, 1.5}) {
    CAPTURE(delta);
    const Protocol p = realize_protocol(testing::small_spec(8, delta, 10.0));
    const GroundPath path = instantaneous_ground_path(p, uniform_grid(2000));
    CHECK(min_of(path.consecutive_overlap) >= 0.9);
    if (delta == 1.0) CHECK(std::count(path.ground_tracking.begin(), path.ground_tracking.end(), false) > 0);
  }
  const Protocol p = realize_protocol(testing::small_spec(8, 1.0, 10.0));
  CHECK_THROWS_AS(instantaneous_ground_path(p, uniform_grid(5)), std::invalid_argument);
}

TEST_CASE("spectrum trace endpoints and the crossing region") {
  const Protocol p = realize_protocol(testing::small_spec(8, 1.0, 10.0));
  const SpectrumTrace tr = spectrum_trace(p, uniform_grid(200), 16);
  REQUIRE(tr.levels.size() == 200);
  CHECK(tr.levels.front().size() == 16);
  CHECK(tr.levels.front()(0) == doctest::Approx(-8.0).epsilon(1e-12));
  const Eigen::VectorXd ef = eigenvalues(p.target);
  CHECK((tr.levels.back() - ef.head(16)).cwiseAbs().maxCoeff() < 1e-10);
  for (const auto& lv : tr.levels)
    for (Eigen::Index k = 1; k < lv.size(); ++k) CHECK(lv(k) >= lv(k - 1));

  const GapMinimum gm = min_gap(tr, 0, 1);
  CHECK(gm.gap < 0.05);
  CHECK(gm.s > 0.0);
  CHECK(gm.s < 1.0);

  const SpectrumTrace all = spectrum_trace(p, uniform_grid(3), 0);
  CHECK(all.levels[1].size() == 256);
}

TEST_CASE("uniform grid") {
  const auto g = uniform_grid(5);
  REQUIRE(g.size() == 5);
  CHECK(g.front() == 0.0);
  CHECK(g.back() == 1.0);
  CHECK(g[2] == doctest::Approx(0.5));
}
