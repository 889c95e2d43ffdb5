#include "common.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "splatcolor/errors.hpp"
#include "splatcolor/image_io.hpp"

namespace cli {

using namespace splatcolor;
namespace fs = std::filesystem;

void prepare_out_dir(const std::string& dir, bool force) {
    fs::path p(dir);
    if (fs::exists(p)) {
        bool has_content = false;
        for (const auto& e : fs::directory_iterator(p)) {
            if (e.path().filename() != "manifest.json") {
                has_content = true;
                break;
            }
        }
        if (has_content && !force)
            throw InvalidInputError("output directory not empty: " + dir + " (use --force)");
    }
    fs::create_directories(p);
}

void write_manifest(const std::string& out_dir, const std::string& subcommand,
                    const std::vector<std::pair<std::string, std::string>>& inputs,
                    const Config& config, uint64_t seed,
                    const std::vector<std::pair<std::string, std::string>>& extra) {
    nlohmann::ordered_json j;
    j["tool"] = "splatcolor";
    j["version"] = "0.1.0";
    j["subcommand"] = subcommand;
    nlohmann::ordered_json in = nlohmann::ordered_json::object();
    for (const auto& [k, v] : inputs) in[k] = v;
    j["inputs"] = in;
    char hash[32];
    std::snprintf(hash, sizeof hash, "%016llx", (unsigned long long)config.hash());
    j["config_hash"] = hash;
    j["config"] = config.entries();
    j["seed"] = seed;
    for (const auto& [k, v] : extra) j[k] = v;

    std::ofstream out(fs::path(out_dir) / "manifest.json", std::ios::binary);
    out << j.dump(2) << "\n";
}

Config load_config(const std::string& path) {
    if (path.empty()) return Config{};
    return Config::parse_file(path);
}

std::vector<std::string> split_ids(const std::string& csv) {
    std::vector<std::string> ids;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) ids.push_back(item);
    }
    return ids;
}

size_t find_camera(const std::vector<CameraView>& cams, const std::string& id) {
    for (size_t i = 0; i < cams.size(); ++i)
        if (cams[i].id == id) return i;
    throw InvalidInputError("view id not in camera manifest: " + id);
}

ImageMask load_mask_or_full(const CameraView& cam) {
    if (cam.mask_path.empty()) return ImageMask(cam.width, cam.height, true);
    return load_mask(cam.mask_path);
}

std::vector<GrayView> load_gray_views(const std::vector<CameraView>& cams) {
    std::vector<GrayView> views;
    views.reserve(cams.size());
    for (const CameraView& cam : cams) {
        GrayView v;
        v.camera = cam;
        v.target = load_gray(cam.image_path);
        if (v.target.width != cam.width || v.target.height != cam.height)
            throw DataError("image size does not match camera " + cam.id);
        v.mask = load_mask_or_full(cam);
        views.push_back(std::move(v));
    }
    return views;
}

ImageGray box_downscale_gray(const ImageGray& img, int factor) {
    if (factor < 1) throw InvalidInputError("downscale factor must be >= 1");
    ImageGray out(img.width / factor, img.height / factor);
    for (int y = 0; y < out.height; ++y)
        for (int x = 0; x < out.width; ++x) {
            double sum = 0;
            for (int dy = 0; dy < factor; ++dy)
                for (int dx = 0; dx < factor; ++dx)
                    sum += img.at(x * factor + dx, y * factor + dy);
            out.at(x, y) = sum / (factor * factor);
        }
    return out;
}

PseudoColorMap load_pseudo_map(const std::string& color_path, const std::string& valid_path) {
    PseudoColorMap map;
    map.colors = load_image(color_path);
    map.valid = load_mask(valid_path);
    if (map.valid.width != map.colors.width || map.valid.height != map.colors.height)
        throw DataError("pseudo map and validity mask sizes differ: " + color_path);
    map.width = map.colors.width;
    map.height = map.colors.height;
    map.n_valid = map.valid.count_true();
    return map;
}

OptimizerConfig optimizer_config_from(const Config& cfg, uint64_t seed, int threads) {
    OptimizerConfig oc;
    oc.iterations = cfg.get_int("iterations", oc.iterations);
    oc.sh_lr = cfg.get_double("sh_lr", oc.sh_lr);
    oc.sh_rest_lr_div = cfg.get_double("sh_rest_lr_div", oc.sh_rest_lr_div);
    oc.sh_lr_final_scale = cfg.get_double("sh_lr_final_scale", oc.sh_lr_final_scale);
    oc.act_lr = cfg.get_double("act_lr", oc.act_lr);
    oc.sh_degree_interval = cfg.get_int("sh_degree_interval", oc.sh_degree_interval);
    oc.seed = seed;
    oc.threads = threads;
    oc.validate();
    return oc;
}

LossWeights loss_weights_from(const Config& cfg) {
    LossWeights w;
    w.lambda_pc = cfg.get_double("lambda_pc", w.lambda_pc);
    w.lambda_tcm = cfg.get_double("lambda_tcm", w.lambda_tcm);
    w.lambda_cc = cfg.get_double("lambda_cc", w.lambda_cc);
    return w;
}

RadiusPolicy radius_policy_from(const Config& cfg) {
    RadiusPolicy p;
    std::string mode = cfg.get_string("radius_mode", "median_scale");
    if (mode == "absolute")
        p.mode = RadiusPolicy::Mode::kAbsolute;
    else if (mode == "median_scale")
        p.mode = RadiusPolicy::Mode::kMedianScale;
    else
        throw ConfigError("radius_mode must be 'absolute' or 'median_scale', got: " + mode);
    p.value = cfg.get_double("radius_value", 3.0);
    return p;
}

}  // namespace cli
