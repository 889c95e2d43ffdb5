#include <cstdio>
#include <memory>

#include "commands.hpp"
#include "common.hpp"
#include "splatcolor/errors.hpp"
#include "splatcolor/synth.hpp"

namespace cli {

using namespace splatcolor;

namespace {

struct SynthArgs {
    CommonArgs common;
    std::string preset = "default";
    int views = -1;  // total; -1 keeps the preset's split
};

SynthSpec spec_for_preset(const std::string& preset) {
    SynthSpec spec;  // "default": azimuthal color field, no drift
    if (preset == "default") {
    } else if (preset == "drift") {
        spec.gain_min = 0.8;
        spec.gain_max = 1.25;
        spec.bias_min = -0.05;
        spec.bias_max = 0.05;
    } else if (preset == "occlusion") {
        spec.field = SynthSpec::Field::kZonal;
    } else {
        throw InvalidInputError("unknown preset: " + preset +
                                " (expected default, drift, or occlusion)");
    }
    return spec;
}

void apply_config(SynthSpec& spec, const Config& cfg) {
    spec.gaussian_count = cfg.get_int("gaussians", spec.gaussian_count);
    spec.radius = cfg.get_double("radius", spec.radius);
    spec.protrusion_count = cfg.get_int("protrusions", spec.protrusion_count);
    spec.protrusion_amplitude = cfg.get_double("protrusion_amplitude", spec.protrusion_amplitude);
    spec.protrusion_sharpness = cfg.get_double("protrusion_sharpness", spec.protrusion_sharpness);
    spec.lateral_views = cfg.get_int("views_lateral", spec.lateral_views);
    spec.vertical_views = cfg.get_int("views_vertical", spec.vertical_views);
    spec.width = cfg.get_int("width", spec.width);
    spec.height = cfg.get_int("height", spec.height);
    spec.gain_min = cfg.get_double("gain_min", spec.gain_min);
    spec.gain_max = cfg.get_double("gain_max", spec.gain_max);
    spec.bias_min = cfg.get_double("bias_min", spec.bias_min);
    spec.bias_max = cfg.get_double("bias_max", spec.bias_max);
    spec.sh_degree = cfg.get_int("synth_sh_degree", spec.sh_degree);
    spec.opacity = cfg.get_double("opacity", spec.opacity);
    spec.scale_multiplier = cfg.get_double("scale_multiplier", spec.scale_multiplier);
    if (cfg.has("field")) {
        std::string f = cfg.get_string("field", "");
        if (f == "azimuthal")
            spec.field = SynthSpec::Field::kAzimuthal;
        else if (f == "zonal")
            spec.field = SynthSpec::Field::kZonal;
        else
            throw ConfigError("field must be 'azimuthal' or 'zonal', got: " + f);
    }
}

void run(const SynthArgs& args) {
    Config cfg = load_config(args.common.config_path);
    SynthSpec spec = spec_for_preset(args.preset);
    apply_config(spec, cfg);
    if (args.views >= 0) {
        // Keep the default 2:1 lateral-to-vertical split.
        spec.lateral_views = (2 * args.views + 2) / 3;
        spec.vertical_views = args.views - spec.lateral_views;
    }
    spec.validate();

    prepare_out_dir(args.common.out_dir, args.common.force);
    SynthDataset ds = generate_scene(spec, args.common.seed);
    save_dataset(ds, args.common.out_dir);
    write_manifest(args.common.out_dir, "synth", {}, cfg, args.common.seed,
                   {{"preset", args.preset}});

    if (args.common.verbosity > 0)
        std::printf("synth: %zu gaussians, %zu views, %dx%d -> %s\n", ds.scene.size(),
                    ds.cameras.size(), spec.width, spec.height, args.common.out_dir.c_str());
}

}  // namespace

void register_synth(CLI::App& app) {
    auto args = std::make_shared<SynthArgs>();
    CLI::App* cmd = app.add_subcommand("synth", "Generate a synthetic ground-truth dataset");
    cmd->add_option("--out", args->common.out_dir, "Output dataset directory")->required();
    cmd->add_option("--config", args->common.config_path, "Config file (key = value)");
    cmd->add_option("--seed", args->common.seed, "Random seed");
    cmd->add_option("--preset", args->preset, "default | drift | occlusion");
    cmd->add_option("--views", args->views, "Total view count (overrides the preset split)");
    cmd->add_flag("--force", args->common.force, "Allow writing into a non-empty directory");
    cmd->add_option("--verbosity", args->common.verbosity, "0 quiet, 1 normal, 2 chatty");
    cmd->callback([args] { run(*args); });
}

}  // namespace cli
