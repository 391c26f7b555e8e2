// Serial reference paths against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "shelab/fracops.hpp"
#include "shelab/gaussfield.hpp"
#include "shelab/sheet.hpp"

namespace {

shelab::Exec exec_of(const benchmark::State& st) {
  return st.range(0) == 0 ? shelab::Exec::Serial : shelab::Exec::Parallel;
}

void BM_Replicate(benchmark::State& st) {
  const auto geom = shelab::SheetGeometry::make({-8.6, 8.6, 1.0}, 0.05, 1.0 / 256.0);
  const auto w = shelab::greenrep_weights(geom, 0.0, 1.0);
  const shelab::CellWeights* ws[] = {&w};
  for (auto _ : st) benchmark::DoNotOptimize(shelab::replicate(ws, 7, 64, 0, exec_of(st)));
  st.SetItemsProcessed(st.iterations() * 64);
}
BENCHMARK(BM_Replicate)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Toeplitz(benchmark::State& st) {
  const std::size_t n = 8192;
  std::vector<double> kernel(2 * n - 1), src(n);
  for (std::size_t i = 0; i < kernel.size(); ++i) kernel[i] = 1.0 / std::sqrt(1.0 + std::abs(double(i) - double(n)));
  for (std::size_t i = 0; i < n; ++i) src[i] = std::sin(0.01 * double(i));
  for (auto _ : st) benchmark::DoNotOptimize(shelab::toeplitz_apply(kernel, src, 0, n, exec_of(st)));
}
BENCHMARK(BM_Toeplitz)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_OpA2(benchmark::State& st) {
  const auto h = shelab::bump(2.0, 1.0, 8.0, 8192);
  for (auto _ : st) benchmark::DoNotOptimize(shelab::op_A2(h, exec_of(st)));
}
BENCHMARK(BM_OpA2)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
