#pragma once

#include <string>

#include "splatcolor/types.hpp"

namespace splatcolor {

// Binary little-endian splat PLY with the field layout used by public splat
// trainers: x y z nx ny nz f_dc_0..2 f_rest_* opacity(logit) scale_0 scale_1
// (log) rot_0..3 (quaternion wxyz). f_rest is channel-major. Extra vertex
// properties are skipped; missing required ones raise SchemaError; NaN values
// raise DataError naming the element.
SplatScene load_scene_ply(const std::string& path);
void save_scene_ply(const SplatScene& scene, const std::string& path);

}  // namespace splatcolor
