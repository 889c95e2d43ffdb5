#pragma once

#include <string>
#include <vector>

#include "splatcolor/types.hpp"

namespace splatcolor {

// Camera manifest: JSON array of records
// {id, width, height, fx, fy, cx, cy, rotation:[qw,qx,qy,qz] (world-to-camera),
//  translation:[tx,ty,tz], image, mask?, act?:{w:[3], b:[3]}}.
// Relative image/mask paths are resolved against the manifest's directory.
std::vector<CameraView> load_cameras(const std::string& path);
void save_cameras(const std::vector<CameraView>& cameras, const std::string& path);

// Per-view ACT parameter file: JSON array of {id, w:[3], b:[3]}.
struct ViewACT {
    std::string id;
    ACTParams params;
};
std::vector<ViewACT> load_act_file(const std::string& path);
void save_act_file(const std::vector<ViewACT>& entries, const std::string& path);

}  // namespace splatcolor
