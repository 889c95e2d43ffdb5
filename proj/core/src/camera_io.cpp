#include "splatcolor/camera_io.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "splatcolor/errors.hpp"

namespace splatcolor {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

Vec3 vec3_of(const json& a, const std::string& what) {
    if (!a.is_array() || a.size() != 3) throw SchemaError(what + " must be an array of 3 numbers");
    return {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
}

std::string resolve(const fs::path& base, const std::string& p) {
    if (p.empty()) return p;
    fs::path q(p);
    return q.is_absolute() ? q.string() : (base / q).string();
}

json vec3_json(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }

}  // namespace

std::vector<CameraView> load_cameras(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw SchemaError("cannot open camera manifest: " + path);
    json doc;
    try {
        f >> doc;
    } catch (const json::parse_error& e) {
        throw SchemaError("camera manifest " + path + ": " + e.what());
    }
    if (!doc.is_array()) throw SchemaError("camera manifest must be a JSON array: " + path);

    const fs::path base = fs::path(path).parent_path();
    std::vector<CameraView> cameras;
    cameras.reserve(doc.size());
    for (size_t i = 0; i < doc.size(); ++i) {
        const json& r = doc[i];
        const std::string where = path + " record " + std::to_string(i);
        try {
            CameraView cam;
            cam.id = r.at("id").get<std::string>();
            cam.width = r.at("width").get<int>();
            cam.height = r.at("height").get<int>();
            cam.fx = r.at("fx").get<double>();
            cam.fy = r.at("fy").get<double>();
            cam.cx = r.at("cx").get<double>();
            cam.cy = r.at("cy").get<double>();
            const json& q = r.at("rotation");
            if (!q.is_array() || q.size() != 4)
                throw SchemaError(where + ": rotation must be [qw,qx,qy,qz]");
            Quat quat(q[0].get<double>(), q[1].get<double>(), q[2].get<double>(),
                      q[3].get<double>());
            if (std::abs(quat.norm() - 1.0) > 1e-4)
                throw DataError("camera '" + cam.id + "': rotation quaternion norm " +
                                std::to_string(quat.norm()) + " beyond 1e-4 of unit");
            cam.rotation = quat.normalized().toRotationMatrix();
            cam.translation = vec3_of(r.at("translation"), where + ": translation");
            cam.image_path = resolve(base, r.value("image", std::string{}));
            cam.mask_path = resolve(base, r.value("mask", std::string{}));
            if (r.contains("act")) {
                ACTParams act;
                act.w = vec3_of(r["act"].at("w"), where + ": act.w");
                act.b = vec3_of(r["act"].at("b"), where + ": act.b");
                cam.act = act;
            }
            cam.validate();
            cameras.push_back(std::move(cam));
        } catch (const json::exception& e) {
            throw SchemaError(where + ": " + e.what());
        }
    }
    return cameras;
}

void save_cameras(const std::vector<CameraView>& cameras, const std::string& path) {
    const fs::path base = fs::path(path).parent_path();
    json doc = json::array();
    for (const CameraView& cam : cameras) {
        Quat q(cam.rotation);
        // Canonical sign so identical rotations serialize identically.
        if (q.w() < 0) q.coeffs() = -q.coeffs();
        json r{{"id", cam.id},       {"width", cam.width}, {"height", cam.height},
               {"fx", cam.fx},       {"fy", cam.fy},       {"cx", cam.cx},
               {"cy", cam.cy},       {"rotation", json::array({q.w(), q.x(), q.y(), q.z()})},
               {"translation", vec3_json(cam.translation)}};
        auto relativize = [&](const std::string& p) -> std::string {
            if (p.empty()) return p;
            std::error_code ec;
            fs::path rel = fs::relative(p, base, ec);
            return ec ? p : rel.string();
        };
        if (!cam.image_path.empty()) r["image"] = relativize(cam.image_path);
        if (!cam.mask_path.empty()) r["mask"] = relativize(cam.mask_path);
        if (cam.act) r["act"] = json{{"w", vec3_json(cam.act->w)}, {"b", vec3_json(cam.act->b)}};
        doc.push_back(std::move(r));
    }
    std::ofstream f(path);
    if (!f) throw DataError("cannot write camera manifest: " + path);
    f << doc.dump(2) << "\n";
}

std::vector<ViewACT> load_act_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw SchemaError("cannot open ACT file: " + path);
    json doc;
    try {
        f >> doc;
    } catch (const json::parse_error& e) {
        throw SchemaError("ACT file " + path + ": " + e.what());
    }
    if (!doc.is_array()) throw SchemaError("ACT file must be a JSON array: " + path);
    std::vector<ViewACT> out;
    for (const json& r : doc) {
        ViewACT v;
        v.id = r.at("id").get<std::string>();
        v.params.w = vec3_of(r.at("w"), path + ": w");
        v.params.b = vec3_of(r.at("b"), path + ": b");
        out.push_back(std::move(v));
    }
    return out;
}

void save_act_file(const std::vector<ViewACT>& entries, const std::string& path) {
    json doc = json::array();
    for (const ViewACT& v : entries)
        doc.push_back(json{{"id", v.id}, {"w", vec3_json(v.params.w)}, {"b", vec3_json(v.params.b)}});
    std::ofstream f(path);
    if (!f) throw DataError("cannot write ACT file: " + path);
    f << doc.dump(2) << "\n";
}

}  // namespace splatcolor
