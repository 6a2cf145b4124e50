// Dense serial reference kernels against the masked OpenMP kernels on the
// 8- and 10-site rings.

#include <benchmark/benchmark.h>

#include "adia/dynamics.hpp"
#include "adia/kernels.hpp"
#include "adia/model.hpp"

using namespace adia;

namespace {

struct Fixture {
  CMatrix hi, hf;
  kernels::LinearCombination combo;
  CVector psi;

  explicit Fixture(int n) {
    hi = build_initial(InitialField::transverse(n)).matrix();
    hf = build_target({n, 1.0, 0.5}).matrix();
    combo = kernels::LinearCombination({hi, hf});
    psi = product_ground_state(InitialField::transverse(n));
  }
};

const Fixture& fixture(int n) {
  static const Fixture f8(8), f10(10);
  return n == 8 ? f8 : f10;
}

void BM_MatvecReference(benchmark::State& state) {
  const Fixture& f = fixture(static_cast<int>(state.range(0)));
  const CMatrix h = 0.5 * (f.hi + f.hf);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::reference::apply(h, f.psi));
}

void BM_MatvecMasked(benchmark::State& state) {
  const Fixture& f = fixture(static_cast<int>(state.range(0)));
  const std::vector<double> w{0.5, 0.5};
  CVector out(f.psi.size());
  for (auto _ : state) {
    f.combo.apply(w, f.psi.data(), out.data());
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_Rk4Reference(benchmark::State& state) {
  const Fixture& f = fixture(static_cast<int>(state.range(0)));
  const CMatrix a = 0.6 * f.hi + 0.4 * f.hf, b = 0.5 * (f.hi + f.hf), c = 0.4 * f.hi + 0.6 * f.hf;
  CVector psi = f.psi;
  for (auto _ : state) kernels::reference::rk4_step(a, b, c, 1e-3, psi);
  benchmark::DoNotOptimize(psi.data());
}

void BM_Rk4Masked(benchmark::State& state) {
  const Fixture& f = fixture(static_cast<int>(state.range(0)));
  const std::vector<double> a{0.6, 0.4}, b{0.5, 0.5}, c{0.4, 0.6};
  kernels::Rk4Workspace ws;
  CVector psi = f.psi;
  for (auto _ : state) kernels::rk4_step(f.combo, a, b, c, 1e-3, psi, ws);
  benchmark::DoNotOptimize(psi.data());
}

void BM_PropagateSA(benchmark::State& state) {
  ProtocolSpec spec;
  spec.xxz = {8, 1.0, 1.0};
  spec.total_time = 1.0;
  const Protocol p = realize_protocol(spec);
  for (auto _ : state) benchmark::DoNotOptimize(evolve(p, false, {1e-3, 1001}));
}

}  // namespace

BENCHMARK(BM_MatvecReference)->Arg(8)->Arg(10);
BENCHMARK(BM_MatvecMasked)->Arg(8)->Arg(10);
BENCHMARK(BM_Rk4Reference)->Arg(8)->Arg(10);
BENCHMARK(BM_Rk4Masked)->Arg(8)->Arg(10);
BENCHMARK(BM_PropagateSA)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
