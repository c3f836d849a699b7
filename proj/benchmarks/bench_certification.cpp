#include <benchmark/benchmark.h>

#include <cmath>

#include "ffgap/certification.hpp"
#include "ffgap/models.hpp"

using namespace ffgap;

static void BM_CertifySynthetic(benchmark::State& state) {
  GapSequence seq;
  for (int k = 1; k <= state.range(0); ++k) {
    seq.k.push_back(k);
    seq.l.push_back(side_length(k, 1));
    seq.lambda.push_back(1.0);
    seq.s.push_back(double(k) * k);
    seq.delta.push_back(std::ldexp(1.0, -k));
  }
  CertifyOptions opts;
  opts.s_rule = parse_s_rule("power:1:2", 1);
  for (auto _ : state) benchmark::DoNotOptimize(certify(seq, 1.0, static_cast<int>(state.range(0)), opts));
}
BENCHMARK(BM_CertifySynthetic)->Arg(20)->Arg(200);

static void BM_ThresholdTest(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(threshold_test(ScalingHypothesis{1.0, 0.5}, 2, 1, 200));
}
BENCHMARK(BM_ThresholdTest);

static void BM_SplitPairs2D(benchmark::State& state) {
  const auto g = make_grid({static_cast<std::size_t>(state.range(0)), 6});
  for (auto _ : state) benchmark::DoNotOptimize(split_pairs(g.all_vertices(), 6, 2, g));
}
BENCHMARK(BM_SplitPairs2D)->Arg(20)->Arg(60);

static void BM_MeasureDeltaToy(benchmark::State& state) {
  const auto g = make_chain(24);
  const auto phi = commuting_toy(g, ToyVariant::kPolarizing);
  for (auto _ : state)
    benchmark::DoNotOptimize(measure_delta_k(phi, g, static_cast<int>(state.range(0)), 1, {0.0}, {23.0}));
}
BENCHMARK(BM_MeasureDeltaToy)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
