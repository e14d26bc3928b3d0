#include "wlsc/decompose.hpp"
#include "wlsc/functional.hpp"
#include "wlsc/qslb_check.hpp"
#include "wlsc/sequences.hpp"

#include <benchmark/benchmark.h>

using namespace wlsc;

namespace {

SequenceSpec jump(double h) {
  SequenceSpec s;
  s.kind = SequenceKind::JumpMigration;
  s.h = h;
  s.n_max = 256;
  return s;
}

void BM_EvalF(benchmark::State& state) {
  const double h = 1.0 / static_cast<double>(state.range(0));
  const Integrand f = catalog::area(1, 1);
  const RecessionFn finf = recession_of(f);
  const BVFunction u = generate(jump(h), 8);
  for (auto _ : state) benchmark::DoNotOptimize(eval_F(f, finf, u).total);
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_EvalF)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

void BM_HalfBallSolve(benchmark::State& state) {
  const double h = 1.0 / static_cast<double>(state.range(0));
  const RecessionFn finf = recession_of(catalog::negnorm(1, 2));
  QslbOptions o;
  o.h = h;
  o.solver.restarts = 2;
  o.solver.max_iter = 100;
  o.solver.workers = 1;
  for (auto _ : state)
    benchmark::DoNotOptimize(halfball_deficit(finf, 1, 2, {Point::Zero(), Point(0, -1)}, o).deficit);
}
BENCHMARK(BM_HalfBallSolve)->Arg(5)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_Decomposition(benchmark::State& state) {
  const auto n_max = static_cast<int>(state.range(0));
  std::vector<BVFunction> seq;
  for (int k = 1; k <= 4 * n_max; ++k) seq.push_back(generate(jump(1.0 / 512), k));
  const CoverSpec cover{{CompactSet::point(Point(0, 0)), CompactSet::interval(0.125, 1)}};
  for (auto _ : state) {
    const DecompositionResult r = local_decompose(seq, cover, n_max);
    benchmark::DoNotOptimize(verify_properties(r).reassembly_error);
  }
}
BENCHMARK(BM_Decomposition)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
