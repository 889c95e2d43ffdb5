#include "splatcolor/camera.hpp"

#include "splatcolor/errors.hpp"

namespace splatcolor {

void CameraView::validate() const {
    if (width <= 0 || height <= 0)
        throw DataError("camera '" + id + "': non-positive image size");
    if (!(fx > 0.0) || !(fy > 0.0))
        throw DataError("camera '" + id + "': focal lengths must be positive");
    if (!(cx >= 0.0 && cx < width) || !(cy >= 0.0 && cy < height))
        throw DataError("camera '" + id + "': principal point outside the image");
    const Mat3 rtr = rotation.transpose() * rotation;
    if ((rtr - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-4)
        throw DataError("camera '" + id + "': rotation is not orthonormal (beyond 1e-4)");
    if (!translation.allFinite() || !rotation.allFinite())
        throw DataError("camera '" + id + "': non-finite pose");
}

std::optional<ProjectedPoint> project(const CameraView& camera, const Vec3& point) {
    const Vec3 pc = camera.to_camera(point);
    if (!(pc.z() > 0.0)) return std::nullopt;
    return ProjectedPoint{{camera.fx * pc.x() / pc.z() + camera.cx,
                           camera.fy * pc.y() / pc.z() + camera.cy},
                          pc.z()};
}

Vec3 unproject(const CameraView& camera, const Vec2& pixel, double depth) {
    if (!(depth > 0.0)) throw InvalidInputError("unproject: depth must be positive");
    const Vec3 pc{(pixel.x() - camera.cx) / camera.fx * depth,
                  (pixel.y() - camera.cy) / camera.fy * depth, depth};
    return camera.to_world(pc);
}

PixelRay pixel_ray(const CameraView& camera, const Vec2& pixel) {
    const Vec3 dc{(pixel.x() - camera.cx) / camera.fx, (pixel.y() - camera.cy) / camera.fy, 1.0};
    const double inv_len = 1.0 / dc.norm();
    PixelRay ray;
    ray.origin = camera.position();
    ray.dir = camera.rotation.transpose() * (dc * inv_len);
    ray.dz = inv_len;
    return ray;
}

}  // namespace splatcolor
