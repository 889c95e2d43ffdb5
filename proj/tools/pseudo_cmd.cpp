#include <cstdio>
#include <filesystem>
#include <memory>
#include <random>
#include <set>

#include "commands.hpp"
#include "common.hpp"
#include "splatcolor/camera_io.hpp"
#include "splatcolor/errors.hpp"
#include "splatcolor/image_io.hpp"
#include "splatcolor/point_cloud.hpp"
#include "splatcolor/pseudo_color.hpp"
#include "splatcolor/renderer.hpp"
#include "splatcolor/scene_io.hpp"
#include "splatcolor/spatial_index.hpp"

namespace cli {

using namespace splatcolor;
namespace fs = std::filesystem;

namespace {

struct PseudoArgs {
    CommonArgs common;
    std::string scene_path;
    std::string cameras_path;
    std::string refs_csv;
    std::string color_dir;
    std::string nn_mode = "kdtree";
    // Standalone index benchmark; skips the dataset entirely.
    int bench_points = 0;
    int bench_queries = 0;
};

NNMode parse_nn_mode(const std::string& s) {
    if (s == "kdtree") return NNMode::kKdTree;
    if (s == "linear") return NNMode::kLinear;
    throw InvalidInputError("--nn-mode must be 'kdtree' or 'linear', got: " + s);
}

// Synthetic point/query load for timing the index alone. Prints one stats
// line; the checksum makes runs comparable across modes.
void run_bench(const PseudoArgs& args) {
    NNMode mode = parse_nn_mode(args.nn_mode);
    std::mt19937_64 rng(args.common.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::vector<Vec3> points(args.bench_points);
    for (Vec3& p : points) p = Vec3(unit(rng), unit(rng), unit(rng));
    std::vector<Vec3> queries(args.bench_queries);
    for (Vec3& q : queries) q = Vec3(unit(rng), unit(rng), unit(rng));

    // Radius in the same regime pseudo-color assignment uses.
    double radius = 3.0 * median_nn_spacing(points);

    Timer build_timer;
    std::unique_ptr<SpatialIndex> index = make_index(points, mode);
    double build_s = build_timer.seconds();

    uint64_t checksum = 0;
    Timer query_timer;
    for (const Vec3& q : queries) {
        auto r = index->nn_within_radius(q, radius);
        if (r) checksum += r->index + 1;
    }
    double query_s = query_timer.seconds();

    std::printf("nn_bench: mode=%s points=%d queries=%d radius=%.6g build_s=%.4f "
                "query_s=%.4f checksum=%llu\n",
                args.nn_mode.c_str(), args.bench_points, args.bench_queries, radius, build_s,
                query_s, (unsigned long long)checksum);
}

void run(const PseudoArgs& args) {
    if (args.bench_points > 0 || args.bench_queries > 0) {
        if (args.bench_points <= 0 || args.bench_queries <= 0)
            throw InvalidInputError("--bench-points and --bench-queries go together");
        run_bench(args);
        return;
    }
    if (args.scene_path.empty() || args.cameras_path.empty() || args.refs_csv.empty() ||
        args.color_dir.empty() || args.common.out_dir.empty())
        throw InvalidInputError("pseudo needs --scene, --cameras, --refs, --color-dir, and --out");

    Config cfg = load_config(args.common.config_path);
    NNMode mode = parse_nn_mode(args.nn_mode);
    SplatScene scene = load_scene_ply(args.scene_path);
    std::vector<CameraView> cams = load_cameras(args.cameras_path);
    std::vector<std::string> ref_ids = split_ids(args.refs_csv);
    if (ref_ids.empty()) throw InvalidInputError("--refs lists no view ids");

    double coverage = cfg.get_double("coverage_threshold", 0.5);
    int cloud_stride = cfg.get_int("cloud_stride", 1);
    RadiusPolicy policy = radius_policy_from(cfg);

    prepare_out_dir(args.common.out_dir, args.common.force);
    fs::path out(args.common.out_dir);
    fs::create_directories(out / "pseudo");

    RenderOptions ropts;
    ropts.threads = args.common.threads;

    // Reference views: rendered depth + hand-colorized image -> 3D points.
    std::set<size_t> ref_set;
    Timer render_timer;
    std::vector<ColorViewInput> ref_inputs;
    for (const std::string& id : ref_ids) {
        size_t ci = find_camera(cams, id);
        ref_set.insert(ci);
        ColorViewInput in;
        in.camera = cams[ci];
        in.color = load_image((fs::path(args.color_dir) / (id + ".png")).string());
        if (in.color.width != in.camera.width || in.color.height != in.camera.height)
            throw DataError("colorized image size does not match camera " + id);
        in.mask = load_mask_or_full(in.camera);
        RenderBuffers rb = render_view(scene, in.camera, std::nullopt, ropts);
        in.depth = std::move(rb.depth);
        in.accum = std::move(rb.accum);
        ref_inputs.push_back(std::move(in));
    }

    Timer cloud_timer;
    ColoredPointCloud cloud = build_point_cloud(ref_inputs, cloud_stride, coverage);
    double cloud_s = cloud_timer.seconds();
    save_cloud_ply(cloud, (out / "cloud.ply").string());

    bool zero_radius =
        policy.mode == RadiusPolicy::Mode::kAbsolute && policy.value == 0.0;
    double radius = 0.0;
    double index_s = 0.0;
    std::unique_ptr<SpatialIndex> index;
    if (zero_radius) {
        std::fprintf(stderr, "warning: radius 0, all pseudo-color maps will be empty\n");
    } else {
        radius = resolve_radius(policy, cloud.positions);
        Timer index_timer;
        index = make_index(cloud.positions, mode);
        index_s = index_timer.seconds();
    }

    double query_s = 0.0;
    size_t total_valid = 0, total_candidates = 0, n_maps = 0;
    for (size_t ci = 0; ci < cams.size(); ++ci) {
        if (ref_set.count(ci)) continue;
        const CameraView& cam = cams[ci];
        RenderBuffers rb = render_view(scene, cam, std::nullopt, ropts);
        ImageMask mask = load_mask_or_full(cam);

        PseudoColorMap map;
        if (zero_radius) {
            map.width = cam.width;
            map.height = cam.height;
            map.colors = ImageRGB(cam.width, cam.height);
            map.valid = ImageMask(cam.width, cam.height, false);
        } else {
            Timer query_timer;
            map = compute_pseudo_colors(cam, rb.depth, rb.accum, mask, *index, cloud, radius,
                                        coverage, args.common.threads);
            query_s += query_timer.seconds();
        }
        save_pseudo_map(map, (out / "pseudo" / (cam.id + ".png")).string(),
                        (out / "pseudo" / (cam.id + "_valid.png")).string());
        total_valid += map.n_valid;
        total_candidates += mask.count_true();
        ++n_maps;
        if (map.n_valid == 0)
            std::fprintf(stderr, "warning: view %s: no valid pseudo-colors\n", cam.id.c_str());
    }

    write_manifest(args.common.out_dir, "pseudo",
                   {{"scene", args.scene_path},
                    {"cameras", args.cameras_path},
                    {"color_dir", args.color_dir}},
                   cfg, args.common.seed,
                   {{"refs", args.refs_csv}, {"nn_mode", args.nn_mode}});

    if (args.common.verbosity > 0) {
        std::printf("pseudo: %zu cloud points from %zu refs, %zu maps, radius %.6g\n",
                    cloud.size(), ref_ids.size(), n_maps, radius);
        std::printf("pseudo: valid fraction %.3f (%zu / %zu masked pixels)\n",
                    total_candidates ? (double)total_valid / total_candidates : 0.0, total_valid,
                    total_candidates);
        std::printf("timing: renders=%.3fs cloud=%.3fs index_build=%.3fs nn_queries=%.3fs\n",
                    render_timer.seconds() - cloud_s - index_s - query_s, cloud_s, index_s,
                    query_s);
    }
}

}  // namespace

void register_pseudo(CLI::App& app) {
    auto args = std::make_shared<PseudoArgs>();
    CLI::App* cmd = app.add_subcommand(
        "pseudo", "Project reference-view colors into 3D and onto the remaining views");
    cmd->add_option("--scene", args->scene_path, "Fitted grayscale scene PLY");
    cmd->add_option("--cameras", args->cameras_path, "Camera manifest JSON");
    cmd->add_option("--refs", args->refs_csv, "Comma-separated colorized view ids");
    cmd->add_option("--color-dir", args->color_dir, "Directory with <id>.png colorized images");
    cmd->add_option("--out", args->common.out_dir, "Run directory");
    cmd->add_option("--config", args->common.config_path, "Config file (key = value)");
    cmd->add_option("--seed", args->common.seed, "Random seed");
    cmd->add_option("--threads", args->common.threads, "Worker cap (0 = hardware)");
    cmd->add_option("--nn-mode", args->nn_mode, "kdtree | linear");
    cmd->add_option("--bench-points", args->bench_points,
                    "Index benchmark: random point count (skips the dataset)");
    cmd->add_option("--bench-queries", args->bench_queries, "Index benchmark: query count");
    cmd->add_flag("--force", args->common.force, "Allow writing into a non-empty directory");
    cmd->add_option("--verbosity", args->common.verbosity, "0 quiet, 1 normal, 2 chatty");
    cmd->callback([args] { run(*args); });
}

}  // namespace cli
