#include <cstdio>
#include <filesystem>
#include <memory>

#include "commands.hpp"
#include "common.hpp"
#include "splatcolor/camera_io.hpp"
#include "splatcolor/errors.hpp"
#include "splatcolor/scene_io.hpp"

namespace cli {

using namespace splatcolor;
namespace fs = std::filesystem;

namespace {

struct FitGrayArgs {
    CommonArgs common;
    std::string scene_path;
    std::string cameras_path;
    bool no_act = false;
    std::string init_sh = "neutral";  // neutral | keep
};

void run(const FitGrayArgs& args) {
    Config cfg = load_config(args.common.config_path);
    SplatScene scene = load_scene_ply(args.scene_path);
    std::vector<CameraView> cams = load_cameras(args.cameras_path);
    std::vector<GrayView> views = load_gray_views(cams);

    if (args.init_sh == "neutral") {
        for (Gaussian2D& g : scene.gaussians)
            for (auto& ch : g.sh) std::fill(ch.begin(), ch.end(), 0.0);
    } else if (args.init_sh != "keep") {
        throw InvalidInputError("--init-sh must be 'neutral' or 'keep'");
    }

    prepare_out_dir(args.common.out_dir, args.common.force);
    OptimizerConfig oc = optimizer_config_from(cfg, args.common.seed, args.common.threads);
    double act_sigma = cfg.get_double("act_sigma", 0.01);

    Timer timer;
    FitGrayResult result = fit_grayscale(scene, views, oc, !args.no_act, act_sigma);
    double fit_seconds = timer.seconds();

    fs::path out(args.common.out_dir);
    save_scene_ply(scene, (out / "scene_fitted.ply").string());
    std::vector<ViewACT> act_entries;
    for (size_t v = 0; v < views.size(); ++v)
        act_entries.push_back({views[v].camera.id, result.act[v]});
    save_act_file(act_entries, (out / "act.json").string());
    write_train_log_csv(result.log, (out / "train_log.csv").string());
    write_manifest(args.common.out_dir, "fit-gray",
                   {{"scene", args.scene_path}, {"cameras", args.cameras_path}}, cfg,
                   args.common.seed, {{"act", args.no_act ? "off" : "on"}});

    if (args.common.verbosity > 0) {
        std::printf("fit-gray: %d iterations over %zu views in %.1fs\n", oc.iterations,
                    views.size(), fit_seconds);
        std::printf("fit-gray: final loss %.6f, mean train PSNR %.2f dB\n", result.final_loss,
                    result.final_psnr);
    }
}

}  // namespace

void register_fit_gray(CLI::App& app) {
    auto args = std::make_shared<FitGrayArgs>();
    CLI::App* cmd =
        app.add_subcommand("fit-gray", "Fit SH appearance + per-view ACT to grayscale images");
    cmd->add_option("--scene", args->scene_path, "Input scene PLY")->required();
    cmd->add_option("--cameras", args->cameras_path, "Camera manifest JSON")->required();
    cmd->add_option("--out", args->common.out_dir, "Run directory")->required();
    cmd->add_option("--config", args->common.config_path, "Config file (key = value)");
    cmd->add_option("--seed", args->common.seed, "Random seed");
    cmd->add_option("--threads", args->common.threads, "Worker cap (0 = hardware)");
    cmd->add_flag("--no-act", args->no_act, "Keep every view's color transform at identity");
    cmd->add_option("--init-sh", args->init_sh,
                    "neutral: start from flat mid-gray; keep: start from the input PLY");
    cmd->add_flag("--force", args->common.force, "Allow writing into a non-empty directory");
    cmd->add_option("--verbosity", args->common.verbosity, "0 quiet, 1 normal, 2 chatty");
    cmd->callback([args] { run(*args); });
}

}  // namespace cli
