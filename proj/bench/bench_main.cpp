// Serial reference against the OpenMP kernels. Arg 0 is serial, 1 parallel.

#include <random>

#include <benchmark/benchmark.h>

#include "finecalc/calculus.hpp"
#include "finecalc/fueter_sce.hpp"
#include "finecalc/resolvent.hpp"

using namespace finecalc;

namespace {

ParavectorOperator bench_operator(int d) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<JointEigenvalue> eigs(d);
  for (auto& e : eigs) {
    e.fill(0.0);
    for (int i = 1; i <= kMaxGenerators; ++i) e[i] = u(rng);
  }
  return make_commuting_operator(eigs, random_basis(d, rng));
}

Execution exec_of(const benchmark::State& state) {
  return state.range(0) ? Execution::parallel : Execution::serial;
}

void BM_apply_harmonic(benchmark::State& state) {
  const ParavectorOperator t = bench_operator(static_cast<int>(state.range(1)));
  const Contour c = enclosing_contour(t, UnitImaginary::e(1), 256);
  const StemPolynomial f = StemPolynomial::real({0.5, -1.0, 0.3, 0.2, 1.0});
  for (auto _ : state) benchmark::DoNotOptimize(apply(CalculusKind::DDelta, f, t, c, Side::left, exec_of(state)));
}
BENCHMARK(BM_apply_harmonic)->ArgsProduct({{0, 1}, {2, 4}})->Unit(benchmark::kMillisecond);

void BM_identity_sweep(benchmark::State& state) {
  const ParavectorOperator t = bench_operator(static_cast<int>(state.range(1)));
  SamplerConfig cfg;
  cfg.parallel = state.range(0) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(sweep(IdentityId::HARM_RES_A, t, cfg));
}
BENCHMARK(BM_identity_sweep)->ArgsProduct({{0, 1}, {2, 4}})->Unit(benchmark::kMillisecond);

void BM_kernel_check(benchmark::State& state) {
  KernelCheckOptions opt;
  opt.probes = 50;
  opt.exec = exec_of(state);
  const Paravector s = UnitImaginary::e(2).point(0.3, 0.8);
  for (auto _ : state) benchmark::DoNotOptimize(check_kernel_identity_DDelta(s, opt));
}
BENCHMARK(BM_kernel_check)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_chain(benchmark::State& state) {
  ChainOptions opt;
  opt.probes = 50;
  opt.exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(check_fine_structure_chain(StemPolynomial::monomial(7), opt));
}
BENCHMARK(BM_chain)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
