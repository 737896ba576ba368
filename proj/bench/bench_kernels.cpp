// SPDX-License-Identifier: Apache-2.0
//
// Serial reference kernels against the OpenMP ones on a mid-sized scene.
#include <benchmark/benchmark.h>

#include "usmb/beamform.hpp"
#include "usmb/reference.hpp"
#include "usmb/simulator.hpp"
#include "usmb/tof.hpp"

using namespace usmb;

namespace {

struct Scene {
  TransducerArray array = TransducerArray::linear(64, 1.54e-4, 5e6, 4e7);
  std::vector<TransmitEvent> events{TransmitEvent::plane_wave(0.0)};
  ScattererField field = sim::cyst_phantom(500, -0.006, 0.006, 0.022, 0.038, {0.0, 0.03}, 0.002, 1);
  sim::SimulationParams params;
  ImagingGrid grid = ImagingGrid::uniform(-0.005, 0.005, 81, 0.024, 0.036, 157);
  RfDataCube cube;
  tof::DelayTensor delays;
  FocusedTensor focused{grid, 64, 1, false};

  Scene() {
    params.num_samples = sim::required_samples(array, events, field, sim::PulseModel{}, 1540.0);
    cube = sim::simulate(array, events, field, sim::PulseModel{}, params);
    delays = tof::compute_delays(array, events, grid, 1540.0);
    focused = tof::focus(cube, delays, grid);
  }
};

const Scene& scene() {
  static const Scene s;
  return s;
}

void BM_SimulateParallel(benchmark::State& st) {
  const auto& s = scene();
  for (auto _ : st) benchmark::DoNotOptimize(sim::simulate(s.array, s.events, s.field, {}, s.params));
}
void BM_SimulateReference(benchmark::State& st) {
  const auto& s = scene();
  for (auto _ : st) {
    benchmark::DoNotOptimize(reference::simulate(s.array, s.events, s.field, {}, s.params));
  }
}
void BM_FocusParallel(benchmark::State& st) {
  const auto& s = scene();
  for (auto _ : st) benchmark::DoNotOptimize(tof::focus(s.cube, s.delays, s.grid));
}
void BM_FocusReference(benchmark::State& st) {
  const auto& s = scene();
  for (auto _ : st) benchmark::DoNotOptimize(reference::focus(s.cube, s.delays, s.grid, {}));
}
void BM_DasParallel(benchmark::State& st) {
  const auto& s = scene();
  const auto w = ApodizationWindow::make(ApodizationKind::Hanning, 64);
  for (auto _ : st) benchmark::DoNotOptimize(bf::das(s.focused, w));
}
void BM_DasReference(benchmark::State& st) {
  const auto& s = scene();
  const auto w = ApodizationWindow::make(ApodizationKind::Hanning, 64);
  for (auto _ : st) benchmark::DoNotOptimize(reference::das(s.focused, w));
}
void BM_MvParallel(benchmark::State& st) {
  const auto& s = scene();
  for (auto _ : st) benchmark::DoNotOptimize(bf::mv(s.focused, {32, 2, 0.01}));
}
void BM_MvReference(benchmark::State& st) {
  const auto& s = scene();
  for (auto _ : st) benchmark::DoNotOptimize(reference::mv(s.focused, {32, 2, 0.01}));
}

}  // namespace

BENCHMARK(BM_SimulateParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SimulateReference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FocusParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FocusReference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DasParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DasReference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MvParallel)->Unit(benchmark::kMillisecond)->Iterations(1);
BENCHMARK(BM_MvReference)->Unit(benchmark::kMillisecond)->Iterations(1);

BENCHMARK_MAIN();
