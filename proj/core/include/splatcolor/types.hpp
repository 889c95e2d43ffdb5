#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "splatcolor/image.hpp"

namespace splatcolor {

using Quat = Eigen::Quaterniond;
using Mat3 = Eigen::Matrix3d;

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
inline double logit(double p) { return std::log(p) - std::log1p(-p); }

// Per-image affine color transformation: c' = w .* c + b.
struct ACTParams {
    Vec3 w = Vec3::Ones();
    Vec3 b = Vec3::Zero();

    bool is_identity() const { return w == Vec3::Ones() && b == Vec3::Zero(); }
};

// Oriented planar Gaussian disk. Scales and opacity are kept in their file
// parameterizations (log / logit) so PLY round trips are bit-exact; accessors
// return the activated values used everywhere else.
struct Gaussian2D {
    Vec3 center = Vec3::Zero();
    Quat rotation = Quat::Identity();  // tangent frame columns (t_u, t_v, normal)
    Vec2 log_scales = Vec2::Zero();
    double opacity_logit = 0.0;
    std::array<std::vector<double>, 3> sh;  // per channel, (degree+1)^2 coefficients

    Vec2 scales() const { return {std::exp(log_scales[0]), std::exp(log_scales[1])}; }
    double opacity() const { return sigmoid(opacity_logit); }
    void set_scales(const Vec2& s) { log_scales = {std::log(s[0]), std::log(s[1])}; }
    void set_opacity(double a) { opacity_logit = logit(a); }

    // Orthonormal frame of the normalized rotation.
    Mat3 frame() const { return rotation.normalized().toRotationMatrix(); }
};

struct SplatScene {
    std::vector<Gaussian2D> gaussians;
    int sh_degree = 3;

    size_t size() const { return gaussians.size(); }
    bool empty() const { return gaussians.empty(); }
    int sh_coeff_count() const { return (sh_degree + 1) * (sh_degree + 1); }

    // Throws DataError when a gaussian violates the type invariants.
    void validate() const;
};

// Pinhole camera with a rigid world-to-camera pose.
struct CameraView {
    std::string id;
    int width = 0;
    int height = 0;
    double fx = 0, fy = 0, cx = 0, cy = 0;
    Mat3 rotation = Mat3::Identity();  // world -> camera
    Vec3 translation = Vec3::Zero();
    std::string image_path;
    std::string mask_path;
    std::optional<ACTParams> act;

    Vec3 position() const { return -(rotation.transpose() * translation); }
    Vec3 to_camera(const Vec3& p_world) const { return rotation * p_world + translation; }
    Vec3 to_world(const Vec3& p_cam) const { return rotation.transpose() * (p_cam - translation); }

    // Throws DataError on invalid intrinsics or a non-orthonormal rotation.
    void validate() const;
};

}  // namespace splatcolor
