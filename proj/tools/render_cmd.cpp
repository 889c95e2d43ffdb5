#include <cstdio>
#include <filesystem>
#include <memory>

#include "commands.hpp"
#include "common.hpp"
#include "splatcolor/act.hpp"
#include "splatcolor/camera_io.hpp"
#include "splatcolor/errors.hpp"
#include "splatcolor/image_io.hpp"
#include "splatcolor/renderer.hpp"
#include "splatcolor/scene_io.hpp"

namespace cli {

using namespace splatcolor;
namespace fs = std::filesystem;

namespace {

struct RenderArgs {
    CommonArgs common;
    std::string scene_path;
    std::string cameras_path;
    std::string act_path;
    std::string ids_csv;
    bool novel = false;
    int trajectory = 0;
    int bits = 16;
};

// Pose interpolation along the camera list: slerp on rotations, lerp on
// positions, intrinsics from the first camera.
CameraView interpolate_pose(const std::vector<CameraView>& cams, double s, int frame) {
    int m = (int)cams.size() - 1;
    int k = std::min((int)(s), m - 1);
    double f = s - k;
    const CameraView& a = cams[k];
    const CameraView& b = cams[k + 1];

    Quat qa(a.rotation), qb(b.rotation);
    Vec3 pos = (1.0 - f) * a.position() + f * b.position();

    CameraView cam = cams[0];
    char id[24];
    std::snprintf(id, sizeof id, "frame%04d", frame);
    cam.id = id;
    cam.rotation = qa.slerp(f, qb).toRotationMatrix();
    cam.translation = -(cam.rotation * pos);
    cam.image_path.clear();
    cam.mask_path.clear();
    return cam;
}

void run(const RenderArgs& args) {
    SplatScene scene = load_scene_ply(args.scene_path);
    std::vector<CameraView> cams = load_cameras(args.cameras_path);

    std::vector<ViewACT> act_entries;
    std::optional<ACTParams> averaged;
    if (!args.act_path.empty()) {
        act_entries = load_act_file(args.act_path);
        if (args.novel) {
            std::vector<ACTParams> all;
            for (const ViewACT& e : act_entries) all.push_back(e.params);
            averaged = average_act(all);
        }
    }
    auto act_for = [&](const std::string& id) -> std::optional<ACTParams> {
        if (args.novel) return averaged;
        for (const ViewACT& e : act_entries)
            if (e.id == id) return e.params;
        return std::nullopt;
    };

    std::vector<CameraView> to_render;
    if (args.trajectory > 0) {
        if (cams.size() < 2)
            throw InvalidInputError("--trajectory needs at least 2 cameras to interpolate");
        for (int i = 0; i < args.trajectory; ++i) {
            double s = args.trajectory == 1
                           ? 0.0
                           : (double)i / (args.trajectory - 1) * (cams.size() - 1);
            to_render.push_back(interpolate_pose(cams, s, i));
        }
    } else if (!args.ids_csv.empty()) {
        for (const std::string& id : split_ids(args.ids_csv))
            to_render.push_back(cams[find_camera(cams, id)]);
    } else {
        to_render = cams;
    }

    prepare_out_dir(args.common.out_dir, args.common.force);
    fs::path out(args.common.out_dir);
    fs::create_directories(out / "renders");

    RenderOptions ropts;
    ropts.threads = args.common.threads;
    Timer timer;
    for (const CameraView& cam : to_render) {
        RenderBuffers rb = render_view(scene, cam, act_for(cam.id), ropts);
        save_image(rb.color, (out / "renders" / (cam.id + ".png")).string(), args.bits);
    }

    Config cfg = load_config(args.common.config_path);
    write_manifest(args.common.out_dir, "render",
                   {{"scene", args.scene_path},
                    {"cameras", args.cameras_path},
                    {"act", args.act_path}},
                   cfg, args.common.seed,
                   {{"novel", args.novel ? "true" : "false"}});

    if (args.common.verbosity > 0)
        std::printf("render: %zu frames in %.2fs -> %s\n", to_render.size(), timer.seconds(),
                    (out / "renders").string().c_str());
}

}  // namespace

void register_render(CLI::App& app) {
    auto args = std::make_shared<RenderArgs>();
    CLI::App* cmd = app.add_subcommand("render", "Render cameras or an interpolated trajectory");
    cmd->add_option("--scene", args->scene_path, "Scene PLY")->required();
    cmd->add_option("--cameras", args->cameras_path, "Camera manifest JSON")->required();
    cmd->add_option("--out", args->common.out_dir, "Run directory")->required();
    cmd->add_option("--act", args->act_path, "Per-view ACT JSON from fit-gray");
    cmd->add_option("--ids", args->ids_csv, "Render only these view ids");
    cmd->add_flag("--novel", args->novel,
                  "Treat views as novel: apply the average of the ACT file's parameters");
    cmd->add_option("--trajectory", args->trajectory,
                    "Render N interpolated frames along the camera list");
    cmd->add_option("--bits", args->bits, "PNG bit depth, 8 or 16");
    cmd->add_option("--config", args->common.config_path, "Config file (key = value)");
    cmd->add_option("--seed", args->common.seed, "Random seed");
    cmd->add_option("--threads", args->common.threads, "Worker cap (0 = hardware)");
    cmd->add_flag("--force", args->common.force, "Allow writing into a non-empty directory");
    cmd->add_option("--verbosity", args->common.verbosity, "0 quiet, 1 normal, 2 chatty");
    cmd->callback([args] { run(*args); });
}

}  // namespace cli
