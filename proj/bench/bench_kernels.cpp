#include <benchmark/benchmark.h>

#include "spad/reference.hpp"
#include "spad/verify.hpp"

namespace {

spad::Image scene(std::size_t n) {
  spad::Image img(n, n);
  for (std::size_t i = 0; i < img.size(); ++i) img[i] = static_cast<double>(i % 97) / 96.0;
  return img;
}

void BM_SimulateParallel(benchmark::State& state) {
  const auto img = scene(static_cast<std::size_t>(state.range(0)));
  const spad::SensorConfig c;
  for (auto _ : state) benchmark::DoNotOptimize(spad::simulate_image(img, 4.0, c, 1));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(img.size()));
}

void BM_SimulateSerial(benchmark::State& state) {
  const auto img = scene(static_cast<std::size_t>(state.range(0)));
  const spad::SensorConfig c;
  for (auto _ : state) {
    benchmark::DoNotOptimize(spad::reference::simulate_image(img, 4.0, c, 1));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(img.size()));
}

void BM_GradientParallel(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto ev = spad::simulate_image(scene(n), 4.0, spad::SensorConfig{}, 1);
  const spad::Grid<double> flux(n, n, 2e5);
  for (auto _ : state) benchmark::DoNotOptimize(spad::grad_log_likelihood_map(ev, flux));
}

void BM_GradientSerial(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto ev = spad::simulate_image(scene(n), 4.0, spad::SensorConfig{}, 1);
  const spad::Grid<double> flux(n, n, 2e5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(spad::reference::grad_log_likelihood_map(ev, flux));
  }
}

void BM_HistogramParallel(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(spad::simulate_count_histogram(
        spad::Rate(1e5), 1e-3, 50e-9, static_cast<std::size_t>(state.range(0)), 1));
  }
}

void BM_HistogramSerial(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(spad::reference::simulate_count_histogram(
        spad::Rate(1e5), 1e-3, 50e-9, static_cast<std::size_t>(state.range(0)), 1));
  }
}

}  // namespace

BENCHMARK(BM_SimulateParallel)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SimulateSerial)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_GradientParallel)->Arg(256)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_GradientSerial)->Arg(256)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_HistogramParallel)->Arg(100000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_HistogramSerial)->Arg(100000)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
