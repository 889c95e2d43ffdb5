#pragma once

#include <chrono>
#include <map>
#include <string>
#include <vector>

#include "splatcolor/config.hpp"
#include "splatcolor/optimizer.hpp"
#include "splatcolor/pseudo_color.hpp"
#include "splatcolor/types.hpp"

namespace cli {

// Options every subcommand shares. Numeric knobs live in the config file;
// the command line carries paths, the seed, and run control.
struct CommonArgs {
    std::string out_dir;
    std::string config_path;
    uint64_t seed = 0;
    int threads = 0;
    bool force = false;
    int verbosity = 1;  // 0 quiet, 1 normal, 2 chatty
};

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

// Creates the run directory. An existing non-empty directory is rejected
// unless force is set; manifest.json does not count as content.
void prepare_out_dir(const std::string& dir, bool force);

// manifest.json: subcommand, inputs, config hash, seed. Deliberately free of
// timestamps so reruns with the same seed are byte-identical.
void write_manifest(const std::string& out_dir, const std::string& subcommand,
                    const std::vector<std::pair<std::string, std::string>>& inputs,
                    const splatcolor::Config& config, uint64_t seed,
                    const std::vector<std::pair<std::string, std::string>>& extra = {});

splatcolor::Config load_config(const std::string& path);  // empty path -> defaults

// Comma-separated id list.
std::vector<std::string> split_ids(const std::string& csv);

// Index of the camera with this id; throws InvalidInputError when absent.
size_t find_camera(const std::vector<splatcolor::CameraView>& cams, const std::string& id);

// Loads every camera's grayscale image and mask (missing mask path -> all
// foreground).
std::vector<splatcolor::GrayView> load_gray_views(
    const std::vector<splatcolor::CameraView>& cams);

splatcolor::ImageMask load_mask_or_full(const splatcolor::CameraView& cam);

// Grayscale counterpart of box_downscale.
splatcolor::ImageGray box_downscale_gray(const splatcolor::ImageGray& img, int factor);

// Reads back a map written by save_pseudo_map.
splatcolor::PseudoColorMap load_pseudo_map(const std::string& color_path,
                                           const std::string& valid_path);

// Optimizer / loss-weight settings from config keys (documented in README).
splatcolor::OptimizerConfig optimizer_config_from(const splatcolor::Config& cfg, uint64_t seed,
                                                  int threads);
splatcolor::LossWeights loss_weights_from(const splatcolor::Config& cfg);
splatcolor::RadiusPolicy radius_policy_from(const splatcolor::Config& cfg);

}  // namespace cli
