#include <benchmark/benchmark.h>

#include "grassdyn/dynamics.hpp"
#include "grassdyn/functionals.hpp"

using namespace grassdyn;

namespace {

ConstructionParams pow5_p2() {
  ConstructionParams params;
  params.p = 2;
  params.scheme = IndexScheme::pow5;
  params.source = SourceKind::classic;
  return params;
}

Exec exec_of(const benchmark::State& state) { return state.range(1) == 0 ? Exec::serial : Exec::parallel; }

void BM_summability(benchmark::State& state) {
  const FunctionalTable t(pow5_p2(), 0);
  const auto R = static_cast<std::size_t>(state.range(0));
  (void)summability_partial(t, R, Exec::serial);  // warm the memo
  for (auto _ : state) benchmark::DoNotOptimize(summability_partial(t, R, exec_of(state)).value);
  state.SetLabel(exec_of(state) == Exec::serial ? "serial" : "parallel");
}
BENCHMARK(BM_summability)->ArgsProduct({{200, 400}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_score(benchmark::State& state) {
  const auto N = static_cast<std::size_t>(state.range(0));
  const OperatorSpec op = direct_sum({diagonal({0.5, 0.7}), backward_shift(N)});
  const auto targets = sample_targets(N + 2, 2, 8, {0, 8}, 1);
  std::vector<Vector> y(2, Vector(N));
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < N; j += 3) y[i].set(j, 1.0 / static_cast<double>(1 + j + i));
  }
  const Subspace L = span_construction(y);
  for (auto _ : state) benchmark::DoNotOptimize(score_against(op, L, targets, 200, 0.15, exec_of(state)).hits);
  state.SetLabel(exec_of(state) == Exec::serial ? "serial" : "parallel");
}
BENCHMARK(BM_score)->ArgsProduct({{64, 128}, {0, 1}})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
