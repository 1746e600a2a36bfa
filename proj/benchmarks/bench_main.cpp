#include <benchmark/benchmark.h>

#include <vector>

#include "linser/bergman.hpp"
#include "linser/energy.hpp"
#include "linser/envelopes.hpp"
#include "linser/norms.hpp"

using namespace linser;

namespace {

void gram_assembly(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const auto mu = disk_quadrature(1.0, k + 2, 2 * k + 4);
  const SectionBasis basis = section_basis(SeriesSpec::full(1), k);
  const Weight w = Weight::blended_disk();
  for (auto _ : state) benchmark::DoNotOptimize(gram_matrix(basis, w, mu));
  state.counters["nodes"] = static_cast<double>(mu.size());
}
BENCHMARK(gram_assembly)->Arg(16)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void orthonormalization(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const GramMatrix g = gram_matrix(SeriesSpec::full(1), k, Weight::blended_disk(), disk_quadrature(1.0, k + 2, 2 * k + 4));
  for (auto _ : state) benchmark::DoNotOptimize(orthonormalize(g));
}
BENCHMARK(orthonormalization)->Arg(16)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void chebyshev_lp(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const SupNorm h = make_sup_norm(SeriesSpec::full(1), k, Weight::blended_disk(), SampleSet::disk(1.0, 8, 512));
  const Point x = Point::at({1.5, 0.0});
  int iterations = 0;
  for (auto _ : state) {
    const auto r = fs_sup_chebyshev(h, x, 16);
    iterations = r.lp_iterations;
    benchmark::DoNotOptimize(r.value);
  }
  state.counters["lp_iterations"] = iterations;
}
BENCHMARK(chebyshev_lp)->Arg(8)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);

void radial_oracle(benchmark::State& state) {
  const SampleSet set = SampleSet::disk(1.0, 4, 8);
  const int points = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(radial_limit_envelope(Weight::fs(1), set, points));
}
BENCHMARK(radial_oracle)->Arg(401)->Arg(2401)->Arg(9601)->Unit(benchmark::kMillisecond);

void bergman_density(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const auto mu = disk_quadrature(1.0, k + 2, 2 * k + 4);
  for (auto _ : state) benchmark::DoNotOptimize(normalized_density(SeriesSpec::full(1), k, Weight::blended_disk(), mu));
}
BENCHMARK(bergman_density)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
