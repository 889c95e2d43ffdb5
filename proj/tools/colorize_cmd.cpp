#include <cstdio>
#include <filesystem>
#include <memory>
#include <set>

#include "commands.hpp"
#include "common.hpp"
#include "splatcolor/camera_io.hpp"
#include "splatcolor/errors.hpp"
#include "splatcolor/features.hpp"
#include "splatcolor/image_io.hpp"
#include "splatcolor/matching.hpp"
#include "splatcolor/scene_io.hpp"

namespace cli {

using namespace splatcolor;
namespace fs = std::filesystem;

namespace {

struct ColorizeArgs {
    CommonArgs common;
    std::string scene_path;
    std::string cameras_path;
    std::string refs_csv;
    std::string color_dir;
    std::string pseudo_dir;
    std::string ablate;  // "", tcm, ccm, act
};

ImageRGB gray_to_rgb(const ImageGray& g) {
    ImageRGB out(g.width, g.height);
    for (size_t i = 0; i < g.data.size(); ++i)
        out.data[3 * i] = out.data[3 * i + 1] = out.data[3 * i + 2] = g.data[i];
    return out;
}

void run(const ColorizeArgs& args) {
    Config cfg = load_config(args.common.config_path);
    LossWeights weights = loss_weights_from(cfg);
    if (args.ablate == "tcm") {
        weights.lambda_tcm = 0.0;
    } else if (args.ablate == "ccm") {
        weights.lambda_cc = 0.0;
    } else if (args.ablate == "act") {
        // ACT acts on the grayscale fit, not on this stage; recorded in the
        // manifest so a pipeline script can pair it with fit-gray --no-act.
        std::fprintf(stderr,
                     "note: --ablate act changes nothing here; run fit-gray --no-act for the "
                     "matching grayscale stage\n");
    } else if (!args.ablate.empty()) {
        throw InvalidInputError("--ablate must be tcm, ccm, or act, got: " + args.ablate);
    }
    weights.validate();

    SplatScene scene = load_scene_ply(args.scene_path);
    std::vector<CameraView> cams = load_cameras(args.cameras_path);
    std::vector<std::string> ref_ids = split_ids(args.refs_csv);
    if (ref_ids.empty()) throw InvalidInputError("--refs lists no view ids");

    int patch = cfg.get_int("patch", 8);
    int stride = cfg.get_int("stride", 4);
    int feat_downscale = cfg.get_int("feat_downscale", 4);
    bool need_corr = weights.lambda_tcm > 0 || weights.lambda_cc > 0;
    bool need_pseudo = weights.lambda_pc > 0;

    ColorizeInputs inputs;
    inputs.feat_downscale = feat_downscale;

    // Reference views: colorized target at full resolution, plus the coarse
    // grayscale/color descriptors the matching losses compare against.
    std::set<size_t> ref_set;
    std::vector<FeatureMap> ref_gray_feats;
    for (const std::string& id : ref_ids) {
        size_t ci = find_camera(cams, id);
        ref_set.insert(ci);
        ColorizeRefView ref;
        ref.camera = cams[ci];
        ref.target = load_image((fs::path(args.color_dir) / (id + ".png")).string());
        if (ref.target.width != ref.camera.width || ref.target.height != ref.camera.height)
            throw DataError("colorized image size does not match camera " + id);
        ref.mask = load_mask_or_full(ref.camera);

        if (need_corr) {
            ImageGray gray = load_gray(ref.camera.image_path);
            ref_gray_feats.push_back(
                extract_features_builtin(box_downscale_gray(gray, feat_downscale), patch, stride));
            inputs.ref_color_feats.push_back(
                extract_patch_means(box_downscale(ref.target, feat_downscale), patch, stride));
        }
        inputs.refs.push_back(std::move(ref));
    }

    if (need_pseudo && args.pseudo_dir.empty())
        throw ConfigError("lambda_pc > 0 needs --pseudo-dir (or set lambda_pc = 0)");

    // Remaining views: pseudo-color supervision from the pseudo stage and
    // correspondences matched against the reference descriptors.
    for (size_t ci = 0; ci < cams.size(); ++ci) {
        if (ref_set.count(ci)) continue;
        ColorizeAuxView aux;
        aux.camera = cams[ci];
        if (need_pseudo) {
            fs::path base = fs::path(args.pseudo_dir) / "pseudo";
            std::string color_path = (base / (aux.camera.id + ".png")).string();
            std::string valid_path = (base / (aux.camera.id + "_valid.png")).string();
            if (!fs::exists(color_path) || !fs::exists(valid_path))
                throw ConfigError("missing pseudo map for view " + aux.camera.id + " under " +
                                  args.pseudo_dir);
            aux.pseudo = load_pseudo_map(color_path, valid_path);
        }
        if (need_corr) {
            ImageGray gray = load_gray(aux.camera.image_path);
            FeatureMap feats =
                extract_features_builtin(box_downscale_gray(gray, feat_downscale), patch, stride);
            aux.corr = match_features(feats, ref_gray_feats, args.common.threads);
        }
        inputs.aux.push_back(std::move(aux));
    }

    prepare_out_dir(args.common.out_dir, args.common.force);
    OptimizerConfig oc = optimizer_config_from(cfg, args.common.seed, args.common.threads);

    Timer timer;
    ColorizeResult result = colorize(scene, inputs, weights, oc);
    double train_s = timer.seconds();

    fs::path out(args.common.out_dir);
    save_scene_ply(scene, (out / "scene_color.ply").string());
    write_train_log_csv(result.log, (out / "train_log.csv").string());
    write_manifest(args.common.out_dir, "colorize",
                   {{"scene", args.scene_path},
                    {"cameras", args.cameras_path},
                    {"color_dir", args.color_dir},
                    {"pseudo_dir", args.pseudo_dir}},
                   cfg, args.common.seed,
                   {{"refs", args.refs_csv}, {"ablate", args.ablate}});

    if (args.common.verbosity > 0) {
        std::printf("colorize: %d iterations, %zu refs + %zu aux views\n", oc.iterations,
                    inputs.refs.size(), inputs.aux.size());
        std::printf("timing: train=%.3fs (%.1f it/s)\n", train_s,
                    train_s > 0 ? oc.iterations / train_s : 0.0);
        std::printf("colorize: final loss %.6f -> %s\n", result.final_loss,
                    (out / "scene_color.ply").string().c_str());
    }
}

}  // namespace

void register_colorize(CLI::App& app) {
    auto args = std::make_shared<ColorizeArgs>();
    CLI::App* cmd = app.add_subcommand(
        "colorize", "Optimize color SH from sparse colorized references + pseudo supervision");
    cmd->add_option("--scene", args->scene_path, "Fitted grayscale scene PLY")->required();
    cmd->add_option("--cameras", args->cameras_path, "Camera manifest JSON")->required();
    cmd->add_option("--refs", args->refs_csv, "Comma-separated colorized view ids")->required();
    cmd->add_option("--color-dir", args->color_dir, "Directory with <id>.png colorized images")
        ->required();
    cmd->add_option("--pseudo-dir", args->pseudo_dir, "Run directory of the pseudo stage");
    cmd->add_option("--out", args->common.out_dir, "Run directory")->required();
    cmd->add_option("--config", args->common.config_path, "Config file (key = value)");
    cmd->add_option("--seed", args->common.seed, "Random seed");
    cmd->add_option("--threads", args->common.threads, "Worker cap (0 = hardware)");
    cmd->add_option("--ablate", args->ablate, "Drop one ingredient: tcm | ccm | act");
    cmd->add_flag("--force", args->common.force, "Allow writing into a non-empty directory");
    cmd->add_option("--verbosity", args->common.verbosity, "0 quiet, 1 normal, 2 chatty");
    cmd->callback([args] { run(*args); });
}

}  // namespace cli
