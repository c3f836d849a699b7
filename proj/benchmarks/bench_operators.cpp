#include <benchmark/benchmark.h>

#include "ffgap/models.hpp"
#include "ffgap/operators.hpp"

using namespace ffgap;

static void BM_AssembleSparse(benchmark::State& state) {
  const auto g = make_chain(static_cast<std::size_t>(state.range(0)));
  const auto phi = heisenberg_fm(g);
  for (auto _ : state) benchmark::DoNotOptimize(hamiltonian(phi, g.all_vertices(), true));
  state.SetComplexityN(1LL << state.range(0));
}
BENCHMARK(BM_AssembleSparse)->DenseRange(8, 16, 4)->Unit(benchmark::kMillisecond);

static void BM_KernelIntersection(benchmark::State& state) {
  const auto g = make_chain(static_cast<std::size_t>(state.range(0)));
  const auto phi = aklt(g);
  for (auto _ : state) benchmark::DoNotOptimize(kernel_intersection(phi, g.all_vertices()));
}
BENCHMARK(BM_KernelIntersection)->DenseRange(6, 10, 2)->Unit(benchmark::kMillisecond);

// Kernel by intersection, then Lanczos deflated against it.
static void BM_RegionSpectrum(benchmark::State& state) {
  const auto g = make_chain(static_cast<std::size_t>(state.range(0)));
  const auto phi = heisenberg_fm(g);
  for (auto _ : state) benchmark::DoNotOptimize(region_spectrum(phi, g.all_vertices(), true));
}
BENCHMARK(BM_RegionSpectrum)->DenseRange(8, 16, 2)->Unit(benchmark::kMillisecond);

// Same operator through the dense and the Krylov route.
static void BM_SpectralDataRoute(benchmark::State& state) {
  const auto g = make_chain(10);
  const auto h = hamiltonian(heisenberg_fm(g), g.all_vertices(), true);
  SolverOptions opts;
  opts.caps.dense_max = state.range(0) ? 4096 : 0;
  for (auto _ : state) benchmark::DoNotOptimize(spectral_data(h, opts));
  state.SetLabel(state.range(0) ? "dense" : "krylov");
}
BENCHMARK(BM_SpectralDataRoute)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
