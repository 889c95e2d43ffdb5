#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>

#include "commands.hpp"
#include "common.hpp"
#include "splatcolor/act.hpp"
#include "splatcolor/camera_io.hpp"
#include "splatcolor/errors.hpp"
#include "splatcolor/image_io.hpp"
#include "splatcolor/metrics.hpp"

namespace cli {

using namespace splatcolor;
namespace fs = std::filesystem;

namespace {

struct EvalArgs {
    std::string renders_dir;
    std::string references_dir;
    std::string masks_dir;
    std::string out_csv;
};

std::vector<std::string> png_stems(const std::string& dir) {
    std::vector<std::string> stems;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.path().extension() == ".png" &&
            e.path().stem().string().find("_valid") == std::string::npos)
            stems.push_back(e.path().stem().string());
    }
    std::sort(stems.begin(), stems.end());
    return stems;
}

void run_eval(const EvalArgs& args) {
    std::vector<std::string> ids = png_stems(args.renders_dir);
    std::vector<std::string> ref_ids = png_stems(args.references_dir);
    if (ids != ref_ids)
        throw InvalidInputError("render and reference file sets differ (" +
                                std::to_string(ids.size()) + " vs " +
                                std::to_string(ref_ids.size()) + " PNGs)");
    if (ids.empty()) throw InvalidInputError("no PNG files to evaluate");

    std::string csv = "view_id,psnr,ssim\n";
    double sum_psnr = 0, sum_ssim = 0;
    for (const std::string& id : ids) {
        ImageRGB render = load_image((fs::path(args.renders_dir) / (id + ".png")).string());
        ImageRGB ref = load_image((fs::path(args.references_dir) / (id + ".png")).string());
        ImageMask mask;
        const ImageMask* mask_ptr = nullptr;
        if (!args.masks_dir.empty()) {
            mask = load_mask((fs::path(args.masks_dir) / (id + ".png")).string());
            mask_ptr = &mask;
        }
        double p = psnr(render, ref, mask_ptr);
        double s = ssim(render, ref, mask_ptr);
        sum_psnr += p;
        sum_ssim += s;
        char row[128];
        std::snprintf(row, sizeof row, "%s,%.6f,%.6f\n", id.c_str(), p, s);
        csv += row;
    }
    char mean_row[128];
    std::snprintf(mean_row, sizeof mean_row, "mean,%.6f,%.6f\n", sum_psnr / ids.size(),
                  sum_ssim / ids.size());
    csv += mean_row;

    std::fputs(csv.c_str(), stdout);
    if (!args.out_csv.empty()) {
        std::ofstream out(args.out_csv, std::ios::binary);
        out << csv;
    }
}

struct ActExportArgs {
    std::string act_path;
    std::string out_path;
};

void run_act_export(const ActExportArgs& args) {
    std::vector<ViewACT> entries = load_act_file(args.act_path);
    std::vector<ACTParams> all;
    for (const ViewACT& e : entries) all.push_back(e.params);
    ACTParams mean = average_act(all);
    save_act_file({{"mean", mean}}, args.out_path);
    std::printf("act-export: averaged %zu views -> %s\n", all.size(), args.out_path.c_str());
}

}  // namespace

void register_eval(CLI::App& app) {
    auto args = std::make_shared<EvalArgs>();
    CLI::App* cmd = app.add_subcommand("eval", "PSNR/SSIM of renders against references");
    cmd->add_option("--renders", args->renders_dir, "Directory of rendered PNGs")->required();
    cmd->add_option("--references", args->references_dir, "Directory of reference PNGs")
        ->required();
    cmd->add_option("--masks", args->masks_dir, "Optional directory of <id>.png masks");
    cmd->add_option("--out", args->out_csv, "Also write the CSV here");
    cmd->callback([args] { run_eval(*args); });
}

void register_act_export(CLI::App& app) {
    auto args = std::make_shared<ActExportArgs>();
    CLI::App* cmd =
        app.add_subcommand("act-export", "Average a per-view ACT file for novel-view use");
    cmd->add_option("--act", args->act_path, "Per-view ACT JSON")->required();
    cmd->add_option("--out", args->out_path, "Output JSON path")->required();
    cmd->callback([args] { run_act_export(*args); });
}

}  // namespace cli
