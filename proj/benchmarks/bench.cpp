#include <benchmark/benchmark.h>

#include "th/holo.hpp"
#include "th/localmodel.hpp"
#include "th/tspace.hpp"

namespace {

th::Scene fixture(const std::string& name) {
  return th::load_scene(std::string(TH_SCENES_DIR) + "/" + name + ".json");
}

void BM_LieTowerEval(benchmark::State& state) {
  const th::Scene s = fixture("torus");
  const th::Point p{0.3, 1.9, 0.4};
  for (auto _ : state) benchmark::DoNotOptimize(s.lie_value(3, p));
}
BENCHMARK(BM_LieTowerEval);

void BM_TraceAnnulus(benchmark::State& state) {
  const th::Scene s = fixture("annulus");
  for (auto _ : state) benchmark::DoNotOptimize(th::trace(s, th::Point{1.0, 0.5, 0.0}));
}
BENCHMARK(BM_TraceAnnulus);

void BM_Complex(benchmark::State& state, const char* name) {
  const th::Scene s = fixture(name);
  for (auto _ : state) benchmark::DoNotOptimize(th::build_complex(s));
}
BENCHMARK_CAPTURE(BM_Complex, disk, "disk")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Complex, annulus, "annulus")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Complex, ball, "ball")->Unit(benchmark::kMillisecond);

void BM_Reconstruct(benchmark::State& state) {
  const th::BoundaryData data = th::extract_boundary_data(fixture("annulus"));
  for (auto _ : state) benchmark::DoNotOptimize(th::reconstruct(data));
}
BENCHMARK(BM_Reconstruct)->Unit(benchmark::kMillisecond);

void BM_Roundtrip(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(th::roundtrip({1, 2, 1}));
}
BENCHMARK(BM_Roundtrip)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
