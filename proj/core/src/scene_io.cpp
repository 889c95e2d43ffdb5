#include "splatcolor/scene_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "splatcolor/errors.hpp"
#include "splatcolor/sh.hpp"

static_assert(std::endian::native == std::endian::little,
              "splat PLY I/O assumes a little-endian host");

namespace splatcolor {

void SplatScene::validate() const {
    const size_t expect = static_cast<size_t>(sh_coeff_count());
    for (size_t i = 0; i < gaussians.size(); ++i) {
        const Gaussian2D& g = gaussians[i];
        const std::string where = "gaussian " + std::to_string(i);
        if (!g.center.allFinite()) throw DataError(where + ": non-finite center");
        if (std::abs(g.rotation.norm() - 1.0) > 1e-3)
            throw DataError(where + ": quaternion norm far from 1");
        if (!g.log_scales.allFinite() || !std::isfinite(g.opacity_logit))
            throw DataError(where + ": non-finite scale/opacity parameters");
        for (int c = 0; c < 3; ++c)
            if (g.sh[c].size() != expect)
                throw DataError(where + ": SH length " + std::to_string(g.sh[c].size()) +
                                " does not match degree " + std::to_string(sh_degree));
    }
}

namespace {

struct PlyHeader {
    size_t vertex_count = 0;
    std::vector<std::string> properties;  // in file order, all float32
    size_t data_offset = 0;
};

PlyHeader parse_header(std::ifstream& f, const std::string& path) {
    PlyHeader h;
    std::string line;
    if (!std::getline(f, line) || line != "ply") throw SchemaError(path + ": not a PLY file");
    if (!std::getline(f, line) || line != "format binary_little_endian 1.0")
        throw SchemaError(path + ": expected binary_little_endian 1.0 format");
    bool in_vertex = false;
    while (std::getline(f, line)) {
        if (line == "end_header") {
            h.data_offset = static_cast<size_t>(f.tellg());
            return h;
        }
        std::istringstream ss(line);
        std::string tok;
        ss >> tok;
        if (tok == "comment") continue;
        if (tok == "element") {
            std::string name;
            size_t count;
            ss >> name >> count;
            in_vertex = (name == "vertex");
            if (in_vertex) h.vertex_count = count;
            continue;
        }
        if (tok == "property" && in_vertex) {
            std::string type, name;
            ss >> type >> name;
            if (type != "float" && type != "float32")
                throw SchemaError(path + ": vertex property '" + name +
                                  "' has unsupported type '" + type + "' (float32 only)");
            h.properties.push_back(name);
        }
    }
    throw SchemaError(path + ": missing end_header");
}

int require_prop(const std::map<std::string, int>& index, const std::string& name,
                 const std::string& path) {
    auto it = index.find(name);
    if (it == index.end())
        throw SchemaError(path + ": missing required property '" + name + "'");
    return it->second;
}

int f_rest_degree(const std::map<std::string, int>& index, const std::string& path) {
    int n_rest = 0;
    while (index.count("f_rest_" + std::to_string(n_rest))) ++n_rest;
    if (n_rest % 3 != 0)
        throw SchemaError(path + ": f_rest count " + std::to_string(n_rest) +
                          " is not divisible by 3");
    const int per_channel = n_rest / 3;
    for (int d = 0; d <= kMaxShDegree; ++d)
        if (per_channel == sh_coeff_count(d) - 1) return d;
    throw SchemaError(path + ": f_rest count " + std::to_string(n_rest) +
                      " does not correspond to an SH degree in 0..3");
}

}  // namespace

SplatScene load_scene_ply(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw SchemaError("cannot open scene PLY: " + path);
    const PlyHeader header = parse_header(f, path);

    std::map<std::string, int> index;
    for (size_t i = 0; i < header.properties.size(); ++i)
        index[header.properties[i]] = static_cast<int>(i);

    const int ix = require_prop(index, "x", path);
    const int iy = require_prop(index, "y", path);
    const int iz = require_prop(index, "z", path);
    const int idc0 = require_prop(index, "f_dc_0", path);
    const int idc1 = require_prop(index, "f_dc_1", path);
    const int idc2 = require_prop(index, "f_dc_2", path);
    const int iop = require_prop(index, "opacity", path);
    const int is0 = require_prop(index, "scale_0", path);
    const int is1 = require_prop(index, "scale_1", path);
    const int ir0 = require_prop(index, "rot_0", path);
    const int ir1 = require_prop(index, "rot_1", path);
    const int ir2 = require_prop(index, "rot_2", path);
    const int ir3 = require_prop(index, "rot_3", path);

    SplatScene scene;
    scene.sh_degree = f_rest_degree(index, path);
    const int rest_per_channel = sh_coeff_count(scene.sh_degree) - 1;
    std::vector<int> irest(3 * rest_per_channel);
    for (int k = 0; k < 3 * rest_per_channel; ++k)
        irest[k] = require_prop(index, "f_rest_" + std::to_string(k), path);

    const size_t n_props = header.properties.size();
    std::vector<float> row(n_props);
    scene.gaussians.resize(header.vertex_count);
    for (size_t v = 0; v < header.vertex_count; ++v) {
        f.read(reinterpret_cast<char*>(row.data()), n_props * sizeof(float));
        if (!f) throw SchemaError(path + ": truncated vertex data at element " +
                                  std::to_string(v));
        for (size_t p = 0; p < n_props; ++p) {
            if (std::isnan(row[p]))
                throw DataError(path + ": NaN in property '" + header.properties[p] +
                                "' of element " + std::to_string(v));
        }
        Gaussian2D& g = scene.gaussians[v];
        g.center = {row[ix], row[iy], row[iz]};
        g.rotation = Quat(row[ir0], row[ir1], row[ir2], row[ir3]);  // w, x, y, z
        g.log_scales = {row[is0], row[is1]};
        g.opacity_logit = row[iop];
        const float dc[3] = {row[idc0], row[idc1], row[idc2]};
        for (int c = 0; c < 3; ++c) {
            g.sh[c].resize(rest_per_channel + 1);
            g.sh[c][0] = dc[c];
            for (int m = 0; m < rest_per_channel; ++m)
                g.sh[c][m + 1] = row[irest[c * rest_per_channel + m]];
        }
    }
    scene.validate();
    return scene;
}

void save_scene_ply(const SplatScene& scene, const std::string& path) {
    scene.validate();
    const int rest_per_channel = scene.sh_coeff_count() - 1;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot open for writing: " + path);

    f << "ply\nformat binary_little_endian 1.0\n";
    f << "element vertex " << scene.size() << "\n";
    const char* base[] = {"x", "y", "z", "nx", "ny", "nz", "f_dc_0", "f_dc_1", "f_dc_2"};
    for (const char* p : base) f << "property float " << p << "\n";
    for (int k = 0; k < 3 * rest_per_channel; ++k) f << "property float f_rest_" << k << "\n";
    for (const char* p : {"opacity", "scale_0", "scale_1", "rot_0", "rot_1", "rot_2", "rot_3"})
        f << "property float " << p << "\n";
    f << "end_header\n";

    std::vector<float> row(9 + 3 * rest_per_channel + 7);
    for (const Gaussian2D& g : scene.gaussians) {
        size_t k = 0;
        row[k++] = static_cast<float>(g.center.x());
        row[k++] = static_cast<float>(g.center.y());
        row[k++] = static_cast<float>(g.center.z());
        row[k++] = 0.f;  // normals are not stored
        row[k++] = 0.f;
        row[k++] = 0.f;
        for (int c = 0; c < 3; ++c) row[k++] = static_cast<float>(g.sh[c][0]);
        for (int c = 0; c < 3; ++c)
            for (int m = 0; m < rest_per_channel; ++m)
                row[k++] = static_cast<float>(g.sh[c][m + 1]);
        row[k++] = static_cast<float>(g.opacity_logit);
        row[k++] = static_cast<float>(g.log_scales[0]);
        row[k++] = static_cast<float>(g.log_scales[1]);
        row[k++] = static_cast<float>(g.rotation.w());
        row[k++] = static_cast<float>(g.rotation.x());
        row[k++] = static_cast<float>(g.rotation.y());
        row[k++] = static_cast<float>(g.rotation.z());
        f.write(reinterpret_cast<const char*>(row.data()), row.size() * sizeof(float));
    }
    if (!f) throw DataError("write failed: " + path);
}

}  // namespace splatcolor
