#include <random>

#include <benchmark/benchmark.h>

#include "gpsim/sampling.hpp"
#include "gpsim/scoring.hpp"
#include "gpsim/spatial_index.hpp"
#include "gpsim/texturing.hpp"
#include "gpsim/tools/fixtures.hpp"

namespace gpsim {
namespace {

void BM_ScorePair(benchmark::State& state) {
  const Mesh ref = fixtures::icosphere(fixtures::kLadderSubdivisions);
  const Mesh dist = fixtures::decimate(ref, ref.faces.size() / 2);
  const TextureImage tex = fixtures::smooth_texture(256);
  const TextureImage noisy = fixtures::add_gaussian_noise(tex, 10, 1);
  MetricConfig config;
  config.keypoints = static_cast<std::size_t>(state.range(0));
  config.threads = static_cast<unsigned>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(score_pair(ref, tex, dist, noisy, config).q);
}
BENCHMARK(BM_ScorePair)
    ->Args({500, 1})
    ->Args({500, 0})
    ->Args({100, 1})
    ->Unit(benchmark::kMillisecond);

void BM_RasterizeTriangle(benchmark::State& state) {
  const double size = static_cast<double>(state.range(0));
  const std::array<PixelPoint, 3> tri{{{0.3, 0.7}, {size, 0.2}, {0.5 * size, size}}};
  const int image = static_cast<int>(size) + 1;
  for (auto _ : state) benchmark::DoNotOptimize(rasterize_triangle(tri, image, image));
}
BENCHMARK(BM_RasterizeTriangle)->Arg(4)->Arg(32)->Arg(256);

void BM_NearestNeighbor(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Vec3> points(static_cast<std::size_t>(state.range(0)));
  for (Vec3& p : points) p = Vec3(u(rng), u(rng), u(rng));
  const KdTree tree(points);
  std::vector<Vec3> queries(500);
  for (Vec3& q : queries) q = Vec3(u(rng), u(rng), u(rng));
  for (auto _ : state) {
    for (const Vec3& q : queries) benchmark::DoNotOptimize(tree.nearest(q));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(queries.size()));
}
BENCHMARK(BM_NearestNeighbor)->Arg(10000)->Arg(100000);

void BM_FarthestPointSampling(benchmark::State& state) {
  const Mesh mesh = fixtures::icosphere(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(sample_fps_indices(mesh, 500));
}
BENCHMARK(BM_FarthestPointSampling)->Arg(4)->Arg(5)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace gpsim

BENCHMARK_MAIN();
