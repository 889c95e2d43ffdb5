#pragma once

#include <optional>

#include "splatcolor/types.hpp"

namespace splatcolor {

struct ProjectedPoint {
    Vec2 pixel;
    double depth;  // camera-space z
};

// Pinhole projection. Returns nullopt when the point is not in front of the
// camera (camera-space z <= 0).
std::optional<ProjectedPoint> project(const CameraView& camera, const Vec3& point);

// Inverse of project: pixel + camera-space depth back to world coordinates.
// Throws InvalidInputError for depth <= 0.
Vec3 unproject(const CameraView& camera, const Vec2& pixel, double depth);

// World-space ray through a continuous pixel coordinate. dir is unit length;
// dz converts ray parameter to camera-space z (z = t * dz).
struct PixelRay {
    Vec3 origin;
    Vec3 dir;
    double dz;
};
PixelRay pixel_ray(const CameraView& camera, const Vec2& pixel);

}  // namespace splatcolor
