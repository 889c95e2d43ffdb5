#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "splatcolor/types.hpp"

namespace splatcolor {

// Procedural ground-truth scene: a spheroid with Gaussian protrusion bumps
// ("pollen grain"), disks tangent to the surface, and a color field whose
// luminance is strictly monotone in a scalar surface coordinate, so the
// grayscale appearance determines the true color. Two field layouts: one
// varying with azimuth, one varying pole-to-pole (azimuth-symmetric, useful
// for occlusion experiments).
struct SynthSpec {
    int gaussian_count = 5000;
    double radius = 1.0;
    int protrusion_count = 12;
    double protrusion_amplitude = 0.12;
    double protrusion_sharpness = 18.0;

    enum class Field { kAzimuthal, kZonal };
    Field field = Field::kAzimuthal;

    int lateral_views = 16;   // azimuth arc at fixed elevation
    int vertical_views = 8;   // elevation arc at fixed azimuth
    int width = 256;
    int height = 256;

    // Per-view illumination drift: scalar gain/bias sampled uniformly from
    // these ranges and applied to the grayscale images (as the equivalent
    // per-gaussian affine map, so a fitted model can represent it exactly).
    double gain_min = 1.0, gain_max = 1.0;
    double bias_min = 0.0, bias_max = 0.0;

    int sh_degree = 1;        // ground-truth color sits in the DC term
    double opacity = 0.9;
    double scale_multiplier = 1.0;

    // Throws InvalidInputError on non-positive counts, radius, opacity out of
    // (0,1), or resolution below 64x64.
    void validate() const;
};

struct SynthDataset {
    SplatScene scene;       // ground-truth color SH
    SplatScene gray_scene;  // desaturated twin, same geometry
    std::vector<CameraView> cameras;
    std::vector<ImageGray> gray_images;  // rendered from gray_scene with drift applied
    std::vector<ImageRGB> color_images;  // clean ground-truth color renders
    std::vector<ImageMask> masks;        // accum > 0.5 on the ground-truth render
    std::vector<ACTParams> true_act;     // drift actually applied per view
};

SynthDataset generate_scene(const SynthSpec& spec, uint64_t seed);

// Replaces every channel's coefficients by their Rec. 709 luminance
// combination, coefficient by coefficient; valid because decoding and
// blending are linear in the coefficients.
SplatScene desaturate(const SplatScene& scene);

// Writes the on-disk layout: scene_color.ply, scene_gray.ply, cameras.json,
// act_truth.json, gray/<id>.png, color/<id>.png, masks/<id>.png.
void save_dataset(const SynthDataset& ds, const std::string& dir);

}  // namespace splatcolor
