// Microbenchmarks for the hot paths: color inversion, segmentation stages,
// quantification, gradients, and the whole per-frame pipeline.  Shared
// fixtures are rendered once; each benchmark measures just its own stage.
#include <benchmark/benchmark.h>

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "elq/color_scale.hpp"
#include "elq/gradients.hpp"
#include "elq/phantom.hpp"
#include "elq/pipeline.hpp"
#include "elq/quantify.hpp"
#include "elq/segmentation.hpp"
#include "elq/stats.hpp"

using namespace elq;

namespace {

PhantomScene bench_scene() {
  PhantomScene scene;  // 640x480
  scene.standoff_thickness = 80;
  scene.standoff_strainability = 80.0;
  scene.tissue_layers = {TissueLayer{0.0, 0.5, 40.0}, TissueLayer{0.5, 1.0, 80.0}};
  scene.color_noise_sigma = 2.0;
  scene.seed = 9;
  return scene;
}

const PhantomFrame& bench_frame() {
  static const PhantomFrame frame = render(bench_scene());
  return frame;
}

const RunConfig& bench_config() {
  static const RunConfig config = [] {
    RunConfig c;
    c.colorbar = bench_frame().truth.bar_roi;
    return c;
  }();
  return config;
}

// A fully valid 640x480 RS matrix with mild structure, for the gradient passes.
const RSMap& bench_rs() {
  static const RSMap rs = [] {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> noise(-0.05, 0.05);
    Raster<double> m(640, 480);
    for (int y = 0; y < m.height(); ++y)
      for (int x = 0; x < m.width(); ++x) m.at(x, y) = 1.0 + 0.001 * y + noise(rng);
    return RSMap::from_matrix(m);
  }();
  return rs;
}

}  // namespace

static void BM_ColorScaleInvert(benchmark::State& state) {
  const std::vector<Rgb> map = default_colormap();
  const ColorScale scale(map);
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> level(0, 99);
  std::uniform_int_distribution<int> jitter(-6, 6);
  std::vector<Rgb> probes(1024);
  for (Rgb& c : probes) {
    const Rgb base = map[size_t(level(rng))];
    auto j = [&](uint8_t v) { return uint8_t(std::clamp(int(v) + jitter(rng), 0, 255)); };
    c = Rgb{j(base.r), j(base.g), j(base.b)};
  }
  size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(scale.invert(probes[i++ & 1023]));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ColorScaleInvert);

static void BM_PhantomRender(benchmark::State& state) {
  const PhantomScene scene = bench_scene();
  for (auto _ : state) {
    const PhantomFrame f = render(scene);
    benchmark::DoNotOptimize(f.frame.pixels().at(0, 0));
  }
}
BENCHMARK(BM_PhantomRender)->Unit(benchmark::kMillisecond);

static void BM_SuppressBmode(benchmark::State& state) {
  const ElastogramFrame& frame = bench_frame().frame;
  for (auto _ : state) {
    const Raster<uint8_t> mask = suppress_bmode(frame);
    benchmark::DoNotOptimize(mask.at(0, 0));
  }
}
BENCHMARK(BM_SuppressBmode)->Unit(benchmark::kMillisecond);

static void BM_FindSkinLine(benchmark::State& state) {
  const Raster<uint8_t> mask = suppress_bmode(bench_frame().frame);
  for (auto _ : state) {
    const std::vector<int> line = find_skin_line(mask);
    benchmark::DoNotOptimize(line[0]);
  }
}
BENCHMARK(BM_FindSkinLine)->Unit(benchmark::kMillisecond);

static void BM_ComputeQs(benchmark::State& state) {
  const ElastogramFrame& frame = bench_frame().frame;
  const ColorScale scale = extract_color_scale(frame, bench_config().colorbar);
  const Raster<uint8_t> mask = suppress_bmode(frame);
  const Raster<RegionLabel> labels = split_standoff_tissue(mask, find_skin_line(mask));
  for (auto _ : state) {
    const QSMap qs = compute_qs(frame, labels, scale);
    benchmark::DoNotOptimize(qs.values().at(0, 0));
  }
}
BENCHMARK(BM_ComputeQs)->Unit(benchmark::kMillisecond);

static void BM_GradientField(benchmark::State& state) {
  const RSMap& rs = bench_rs();
  for (auto _ : state) {
    const GradientField f = gradient_field(rs, 1.0, 1.0);
    benchmark::DoNotOptimize(f.gx.at(1, 0));
  }
}
BENCHMARK(BM_GradientField)->Unit(benchmark::kMillisecond);

static void BM_Aggregate(benchmark::State& state) {
  GradientField f = gradient_field(bench_rs(), 1.0, 1.0);
  for (auto _ : state) {
    aggregate(f, 1);
    benchmark::DoNotOptimize(f.total_gr);
  }
}
BENCHMARK(BM_Aggregate)->Unit(benchmark::kMillisecond);

static void BM_AnalyzeFrame(benchmark::State& state) {
  const ElastogramFrame& frame = bench_frame().frame;
  const RunConfig& config = bench_config();
  for (auto _ : state) {
    const FrameResult r = analyze_frame(frame, config);
    benchmark::DoNotOptimize(r.reported_gr);
  }
}
BENCHMARK(BM_AnalyzeFrame)->Unit(benchmark::kMillisecond);

static void BM_GroupCompare(benchmark::State& state) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> unit(0.0, 1.0);
  std::vector<double> a(100), b(100);
  for (double& v : a) v = unit(rng);
  for (double& v : b) v = 0.3 + unit(rng);
  for (auto _ : state) {
    const TestResult r = group_compare(a, b);
    benchmark::DoNotOptimize(r.p_two_tailed);
  }
}
BENCHMARK(BM_GroupCompare);

BENCHMARK_MAIN();
