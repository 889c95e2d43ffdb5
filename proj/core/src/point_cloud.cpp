#include "splatcolor/point_cloud.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "splatcolor/camera.hpp"
#include "splatcolor/errors.hpp"

namespace splatcolor {

ColoredPointCloud build_point_cloud(const std::vector<ColorViewInput>& views, int stride,
                                    double coverage_threshold) {
    if (stride < 1) throw InvalidInputError("build_point_cloud: stride must be >= 1");
    if (views.empty()) throw InvalidInputError("build_point_cloud: no reference views");

    ColoredPointCloud cloud;
    for (const ColorViewInput& v : views) {
        const int w = v.camera.width, h = v.camera.height;
        if (v.color.width != w || v.color.height != h)
            throw InvalidInputError("view '" + v.camera.id + "': color image size mismatch");
        if (v.mask.width != w || v.mask.height != h)
            throw InvalidInputError("view '" + v.camera.id + "': mask size mismatch");
        if (v.depth.width != w || v.depth.height != h)
            throw InvalidInputError("view '" + v.camera.id + "': missing or mismatched depth map");
        if (v.accum.width != w || v.accum.height != h)
            throw InvalidInputError("view '" + v.camera.id +
                                    "': missing or mismatched accumulation map");

        for (int y = 0; y < h; y += stride) {
            for (int x = 0; x < w; x += stride) {
                const size_t pix = static_cast<size_t>(y) * w + x;
                if (!v.mask.data[pix]) continue;
                if (v.accum.data[pix] <= coverage_threshold) continue;
                const double depth = v.depth.data[pix];
                if (depth <= 0) continue;
                cloud.positions.push_back(
                    unproject(v.camera, {x + 0.5, y + 0.5}, depth));
                cloud.colors.push_back(v.color.at(x, y));
                cloud.source_view.push_back(v.camera.id);
                cloud.source_pixel.emplace_back(x, y);
            }
        }
    }
    if (cloud.positions.empty())
        throw DataError("build_point_cloud: no foreground pixel passed the mask and coverage "
                        "filters; the cloud would be empty");
    return cloud;
}

void save_cloud_ply(const ColoredPointCloud& cloud, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot write point cloud: " + path);
    f << "ply\nformat binary_little_endian 1.0\n"
      << "element vertex " << cloud.size() << "\n"
      << "property float x\nproperty float y\nproperty float z\n"
      << "property uchar red\nproperty uchar green\nproperty uchar blue\n"
      << "end_header\n";
    for (size_t i = 0; i < cloud.size(); ++i) {
        const float xyz[3] = {static_cast<float>(cloud.positions[i][0]),
                              static_cast<float>(cloud.positions[i][1]),
                              static_cast<float>(cloud.positions[i][2])};
        f.write(reinterpret_cast<const char*>(xyz), sizeof(xyz));
        for (int c = 0; c < 3; ++c) {
            const double q = std::clamp(cloud.colors[i][c], 0.0, 1.0) * 255.0;
            const uint8_t b = static_cast<uint8_t>(std::lround(q));
            f.write(reinterpret_cast<const char*>(&b), 1);
        }
    }
    if (!f) throw DataError("short write on point cloud: " + path);
}

}  // namespace splatcolor
