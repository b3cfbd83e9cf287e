#include <benchmark/benchmark.h>

#include "gmt/beta.hpp"
#include "gmt/carleson.hpp"
#include "gmt/content.hpp"
#include "gmt/corpus.hpp"
#include "gmt/frostman.hpp"
#include "gmt/gauge.hpp"
#include "gmt/sparsify.hpp"

using namespace gmt;

namespace {

CellSet dense(int depth) {
  GeneratorSpec s;
  s.kind = SetKind::kRandomDense;
  s.dim = 2;
  s.depth = depth;
  s.density = 0.7;
  s.seed = 1;
  return generate(s).set;
}

CellSet cantor(int depth) {
  GeneratorSpec s;
  s.kind = SetKind::kFourCornerCantor;
  s.dim = 2;
  s.depth = depth;
  return generate(s).set;
}

void BM_ContentDense(benchmark::State& state) {
  const CellSet set = dense(static_cast<int>(state.range(0)));
  const Gauge h = power_gauge(1);
  for (auto _ : state) benchmark::DoNotOptimize(dyadic_cover_value(set, h, 0));
  state.counters["cells"] = set.size();
}
BENCHMARK(BM_ContentDense)->Arg(6)->Arg(8)->Arg(10);

void BM_FrostmanDense(benchmark::State& state) {
  const CellSet set = dense(static_cast<int>(state.range(0)));
  const Gauge h = power_gauge(1);
  for (auto _ : state) benchmark::DoNotOptimize(build_frostman(set, h).total());
}
BENCHMARK(BM_FrostmanDense)->Arg(6)->Arg(8)->Arg(10);

void BM_VerifyFrostman(benchmark::State& state) {
  const CellSet set = dense(static_cast<int>(state.range(0)));
  const Gauge h = power_gauge(1);
  const CellMeasure mu = build_frostman(set, h);
  for (auto _ : state) benchmark::DoNotOptimize(verify_frostman(mu, h).max_ratio);
}
BENCHMARK(BM_VerifyFrostman)->Arg(6)->Arg(8);

void BM_SparseSquare(benchmark::State& state) {
  const CellSet square = CellSet::full_cube(2, static_cast<int>(state.range(0)), DyadicCube::root(2));
  const Gauge h = power_excess_gauge(1, 0.5);
  const CellMeasure mu = build_frostman(square, h);
  for (auto _ : state) benchmark::DoNotOptimize(build_sparse_measure(mu, h, 1, 4).measure.total());
}
BENCHMARK(BM_SparseSquare)->Arg(24)->Arg(40);

void BM_SquareFunctionCantor(benchmark::State& state) {
  const CellSet set = cantor(24);
  const CellMeasure mu = build_frostman(set, power_gauge(1));
  const MeasureIndex index(mu);
  const Point x = DyadicCube(2, 24, set.cells().front()).center();
  for (auto _ : state) benchmark::DoNotOptimize(square_function(index, x, 1, 2, static_cast<int>(state.range(0))).square_function);
}
BENCHMARK(BM_SquareFunctionCantor)->Arg(12)->Arg(20);

void BM_EpsilonHalfspace(benchmark::State& state) {
  const Point x{0.1, 0.2};
  const DomainPair dp = halfspace_pair(x, Point{0.6, 0.8});
  for (auto _ : state) benchmark::DoNotOptimize(epsilon_n(dp, x, 0.5, 256, static_cast<std::size_t>(state.range(0))).value);
}
BENCHMARK(BM_EpsilonHalfspace)->Arg(10000)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();
