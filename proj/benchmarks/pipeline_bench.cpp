#include <benchmark/benchmark.h>

#include <memory>
#include <random>
#include <vector>

#include "splatcolor/features.hpp"
#include "splatcolor/matching.hpp"
#include "splatcolor/renderer.hpp"
#include "splatcolor/spatial_index.hpp"
#include "splatcolor/types.hpp"

namespace {

using namespace splatcolor;

std::vector<Vec3> random_points(size_t n, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Vec3> pts(n);
    for (Vec3& p : pts) p = Vec3(u(rng), u(rng), u(rng));
    return pts;
}

SplatScene bench_scene(int count, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> g(0.0, 1.0);
    SplatScene scene;
    scene.sh_degree = 2;
    const int n_coeffs = scene.sh_coeff_count();
    for (int i = 0; i < count; ++i) {
        Gaussian2D gs;
        gs.center = Vec3(2 * u(rng) - 1, 2 * u(rng) - 1, 2 * u(rng) - 1);
        Quat q(g(rng), g(rng), g(rng), g(rng));
        gs.rotation = q.normalized();
        gs.set_scales({0.05 + 0.2 * u(rng), 0.05 + 0.2 * u(rng)});
        gs.set_opacity(0.1 + 0.8 * u(rng));
        for (int ch = 0; ch < 3; ++ch) {
            gs.sh[ch].assign(n_coeffs, 0.0);
            gs.sh[ch][0] = u(rng) - 0.5;
        }
        scene.gaussians.push_back(std::move(gs));
    }
    return scene;
}

CameraView bench_camera(int size) {
    CameraView cam;
    cam.id = "bench";
    cam.width = size;
    cam.height = size;
    cam.fx = cam.fy = 0.8 * size;
    cam.cx = cam.cy = 0.5 * size;
    cam.rotation = Mat3::Identity();
    cam.translation = Vec3(0, 0, 4.0);
    return cam;
}

void BM_IndexQuery(benchmark::State& state, NNMode mode) {
    const size_t n = size_t(state.range(0));
    std::vector<Vec3> pts = random_points(n, 7);
    std::vector<Vec3> queries = random_points(4096, 8);
    const double radius = 3.0 * median_nn_spacing(pts);
    std::unique_ptr<SpatialIndex> index = make_index(pts, mode);
    size_t qi = 0;
    for (auto _ : state) {
        auto r = index->nn_within_radius(queries[qi], radius);
        benchmark::DoNotOptimize(r);
        qi = (qi + 1) % queries.size();
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK_CAPTURE(BM_IndexQuery, kdtree, NNMode::kKdTree)->Arg(10000)->Arg(100000);
BENCHMARK_CAPTURE(BM_IndexQuery, linear, NNMode::kLinear)->Arg(10000);

void BM_IndexBuild(benchmark::State& state) {
    std::vector<Vec3> pts = random_points(size_t(state.range(0)), 7);
    for (auto _ : state) {
        KdTreeIndex index(pts);
        benchmark::DoNotOptimize(index.size());
    }
}
BENCHMARK(BM_IndexBuild)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_RenderView(benchmark::State& state) {
    SplatScene scene = bench_scene(int(state.range(0)), 11);
    CameraView cam = bench_camera(128);
    RenderOptions opts;
    opts.threads = 1;
    for (auto _ : state) {
        RenderBuffers rb = render_view(scene, cam, std::nullopt, opts);
        benchmark::DoNotOptimize(rb.color.data.data());
    }
    state.SetItemsProcessed(state.iterations() * 128 * 128);
}
BENCHMARK(BM_RenderView)->Arg(500)->Arg(2000)->Arg(5000)->Unit(benchmark::kMillisecond);

void BM_CacheReplay(benchmark::State& state) {
    SplatScene scene = bench_scene(int(state.range(0)), 11);
    CameraView cam = bench_camera(128);
    RenderOptions opts;
    opts.threads = 1;
    opts.want_cache = true;
    RenderBuffers rb = render_view(scene, cam, std::nullopt, opts);
    for (auto _ : state) {
        ImageRGB img = render_from_cache(*rb.cache, scene, std::nullopt, Vec3::Zero(), -1, 1);
        benchmark::DoNotOptimize(img.data.data());
    }
    state.SetItemsProcessed(state.iterations() * 128 * 128);
}
BENCHMARK(BM_CacheReplay)->Arg(2000)->Arg(5000)->Unit(benchmark::kMillisecond);

void BM_MatchFeatures(benchmark::State& state) {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    auto fill = [&](FeatureMap& m) {
        m.data.resize(m.cell_count() * size_t(m.dim));
        for (double& x : m.data) x = u(rng);
    };
    FeatureMap target;
    target.height_f = target.width_f = int(state.range(0));
    target.dim = 64;
    target.patch = 8;
    target.stride = 4;
    fill(target);
    std::vector<FeatureMap> refs(3, target);
    for (FeatureMap& r : refs) fill(r);
    for (auto _ : state) {
        CorrespondenceMap map = match_features(target, refs, 1);
        benchmark::DoNotOptimize(map.cells.data());
    }
}
BENCHMARK(BM_MatchFeatures)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
