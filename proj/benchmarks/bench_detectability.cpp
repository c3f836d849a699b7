#include <benchmark/benchmark.h>

#include "ffgap/detectability.hpp"
#include "ffgap/models.hpp"

using namespace ffgap;

static void BM_ColumnDecomposition(benchmark::State& state) {
  const auto g = make_chain(static_cast<std::size_t>(state.range(0)));
  const auto phi = heisenberg_fm(g);
  for (auto _ : state) benchmark::DoNotOptimize(column_decomposition(phi, g, g.all_vertices(), 2.0, 0));
}
BENCHMARK(BM_ColumnDecomposition)->Arg(12)->Arg(16)->Arg(20)->Unit(benchmark::kMillisecond);

static void BM_DlPerpNorm(benchmark::State& state) {
  const auto g = make_chain(static_cast<std::size_t>(state.range(0)));
  const auto phi = heisenberg_fm(g);
  const auto dl = dl_operator(column_decomposition(phi, g, g.all_vertices(), 2.0, 0));
  const auto perp = complement_map(ground_space(phi, g.all_vertices()), dl.host);
  for (auto _ : state) benchmark::DoNotOptimize(estimate_norm(dl.map * perp));
}
BENCHMARK(BM_DlPerpNorm)->Arg(10)->Arg(12)->Arg(14)->Unit(benchmark::kMillisecond);

static void BM_SmuggleCheck(benchmark::State& state) {
  const auto g = make_chain(12);
  const auto phi = heisenberg_fm(g);
  const auto region = g.all_vertices();
  const auto t = layer_product(phi, region, layer_coloring(phi));
  const auto dl = dl_operator(column_decomposition(phi, g, region, 6.0, 0));
  const auto f = SmuggledPolynomial::step({2, 0.4});
  for (auto _ : state) benchmark::DoNotOptimize(smuggle_check(dl, t, f, 1, 2, 1));
}
BENCHMARK(BM_SmuggleCheck)->Unit(benchmark::kMillisecond);

static void BM_OverlapBound(benchmark::State& state) {
  const auto g = make_chain(static_cast<std::size_t>(state.range(0)));
  const auto phi = heisenberg_fm(g);
  const auto pair = split_pairs(g.all_vertices(), 2, 1, g)[0];
  for (auto _ : state) benchmark::DoNotOptimize(overlap_bound_check(phi, g, pair, {2.0, 0.05, 2, 2}));
}
BENCHMARK(BM_OverlapBound)->Arg(10)->Arg(12)->Unit(benchmark::kMillisecond);

static void BM_ChebyshevStep(benchmark::State& state) {
  const ChebyshevStep p{static_cast<int>(state.range(0)), 0.3};
  double x = 0.31;
  for (auto _ : state) {
    benchmark::DoNotOptimize(chebyshev_step(p, x));
    x = x < 0.99 ? x + 1e-3 : 0.31;
  }
}
BENCHMARK(BM_ChebyshevStep)->Arg(4)->Arg(30);
