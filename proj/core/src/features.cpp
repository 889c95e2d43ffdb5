#include "splatcolor/features.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "splatcolor/errors.hpp"

namespace splatcolor {

FeatureGrid feature_grid(int width, int height, int patch, int stride) {
    FeatureGrid g;
    if (width >= patch) g.width_f = (width - patch) / stride + 1;
    if (height >= patch) g.height_f = (height - patch) / stride + 1;
    return g;
}

namespace {

void check_geometry(int width, int height, int patch, int stride) {
    if (patch < 2) throw InvalidInputError("feature patch must be >= 2");
    if (stride < 1) throw InvalidInputError("feature stride must be >= 1");
    if (width < patch || height < patch)
        throw InvalidInputError("image " + std::to_string(width) + "x" + std::to_string(height) +
                                " is smaller than one " + std::to_string(patch) + "px patch");
}

}  // namespace

FeatureMap extract_features_builtin(const ImageGray& img, int patch, int stride) {
    check_geometry(img.width, img.height, patch, stride);
    const FeatureGrid grid = feature_grid(img.width, img.height, patch, stride);

    FeatureMap map;
    map.height_f = grid.height_f;
    map.width_f = grid.width_f;
    map.dim = patch * patch;
    map.patch = patch;
    map.stride = stride;
    map.data.resize(map.cell_count() * map.dim);

    for (int i = 0; i < map.height_f; ++i) {
        for (int j = 0; j < map.width_f; ++j) {
            std::span<double> v = map.cell(i, j);
            const int y0 = i * stride, x0 = j * stride;
            double mean = 0, sumsq = 0;
            for (int dy = 0; dy < patch; ++dy)
                for (int dx = 0; dx < patch; ++dx) {
                    const double px = img.data[static_cast<size_t>(y0 + dy) * img.width + x0 + dx];
                    v[dy * patch + dx] = px;
                    mean += px;
                    sumsq += px * px;
                }
            mean /= map.dim;
            double norm2 = 0;
            for (double& x : v) {
                x -= mean;
                norm2 += x * x;
            }
            // Flat patches keep the zero vector. The comparison is relative to
            // the raw magnitude: mean subtraction leaves rounding dust on a
            // constant patch, and normalizing that dust would fabricate a
            // full-strength descriptor out of noise.
            if (norm2 > sumsq * 1e-24) {
                const double inv = 1.0 / std::sqrt(norm2);
                for (double& x : v) x *= inv;
            } else {
                for (double& x : v) x = 0.0;
            }
        }
    }
    return map;
}

FeatureMap extract_patch_means(const ImageRGB& img, int patch, int stride) {
    check_geometry(img.width, img.height, patch, stride);
    const FeatureGrid grid = feature_grid(img.width, img.height, patch, stride);

    FeatureMap map;
    map.height_f = grid.height_f;
    map.width_f = grid.width_f;
    map.dim = 3;
    map.patch = patch;
    map.stride = stride;
    map.data.resize(map.cell_count() * 3);

    const double inv_area = 1.0 / (static_cast<double>(patch) * patch);
    for (int i = 0; i < map.height_f; ++i) {
        for (int j = 0; j < map.width_f; ++j) {
            std::span<double> v = map.cell(i, j);
            const int y0 = i * stride, x0 = j * stride;
            double sum[3] = {0, 0, 0};
            for (int dy = 0; dy < patch; ++dy)
                for (int dx = 0; dx < patch; ++dx) {
                    const size_t at =
                        (static_cast<size_t>(y0 + dy) * img.width + x0 + dx) * 3;
                    sum[0] += img.data[at];
                    sum[1] += img.data[at + 1];
                    sum[2] += img.data[at + 2];
                }
            for (int c = 0; c < 3; ++c) v[c] = sum[c] * inv_area;
        }
    }
    return map;
}

void save_feature_map(const FeatureMap& map, const std::string& data_path,
                      const FeatureFileInfo& info) {
    std::ofstream f(data_path, std::ios::binary);
    if (!f) throw DataError("cannot write feature file: " + data_path);
    std::vector<float> buf(map.data.begin(), map.data.end());
    f.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(float)));
    if (!f) throw DataError("short write on feature file: " + data_path);

    nlohmann::json sidecar{{"view_id", info.view_id}, {"role", info.role},
                           {"height_f", map.height_f}, {"width_f", map.width_f},
                           {"dim", map.dim},           {"patch", map.patch},
                           {"stride", map.stride}};
    std::ofstream s(data_path + ".json");
    if (!s) throw DataError("cannot write feature sidecar: " + data_path + ".json");
    s << sidecar.dump(2) << "\n";
}

FeatureMap load_feature_map(const std::string& data_path, FeatureFileInfo* info) {
    std::ifstream s(data_path + ".json");
    if (!s) throw SchemaError("missing feature sidecar: " + data_path + ".json");
    nlohmann::json sidecar;
    try {
        s >> sidecar;
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError("feature sidecar " + data_path + ".json: " + e.what());
    }

    FeatureMap map;
    try {
        map.height_f = sidecar.at("height_f").get<int>();
        map.width_f = sidecar.at("width_f").get<int>();
        map.dim = sidecar.at("dim").get<int>();
        map.patch = sidecar.at("patch").get<int>();
        map.stride = sidecar.at("stride").get<int>();
        if (info) {
            info->view_id = sidecar.at("view_id").get<std::string>();
            info->role = sidecar.at("role").get<std::string>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError("feature sidecar " + data_path + ".json: " + e.what());
    }
    if (map.height_f <= 0 || map.width_f <= 0 || map.dim <= 0)
        throw SchemaError("feature sidecar " + data_path + ".json: non-positive grid fields");

    std::ifstream f(data_path, std::ios::binary);
    if (!f) throw SchemaError("cannot open feature file: " + data_path);
    const size_t count = map.cell_count() * map.dim;
    std::vector<float> buf(count);
    f.read(reinterpret_cast<char*>(buf.data()),
           static_cast<std::streamsize>(count * sizeof(float)));
    if (static_cast<size_t>(f.gcount()) != count * sizeof(float))
        throw DataError("feature file " + data_path + " is shorter than its sidecar promises");
    map.data.assign(buf.begin(), buf.end());
    for (double v : map.data)
        if (!std::isfinite(v))
            throw DataError("feature file " + data_path + " contains non-finite values");
    return map;
}

}  // namespace splatcolor
