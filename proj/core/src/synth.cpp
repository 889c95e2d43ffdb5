#include "splatcolor/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

#include "splatcolor/camera.hpp"
#include "splatcolor/camera_io.hpp"
#include "splatcolor/errors.hpp"
#include "splatcolor/image_io.hpp"
#include "splatcolor/renderer.hpp"
#include "splatcolor/scene_io.hpp"
#include "splatcolor/sh.hpp"

namespace splatcolor {
namespace {

namespace fs = std::filesystem;

constexpr double kPi = 3.14159265358979323846;

// Radial profile of the bumped spheroid for a unit direction.
double surface_radius(const SynthSpec& spec, const std::vector<Vec3>& bump_dirs,
                      const Vec3& dir) {
    double r = 1.0;
    for (const Vec3& b : bump_dirs) {
        double d = dir.dot(b) - 1.0;  // 0 at the bump apex, negative elsewhere
        r += spec.protrusion_amplitude * std::exp(spec.protrusion_sharpness * d);
    }
    return spec.radius * r;
}

// Signed distance-like implicit: negative inside.
double implicit(const SynthSpec& spec, const std::vector<Vec3>& bump_dirs, const Vec3& p) {
    double n = p.norm();
    if (n < 1e-12) return -spec.radius;
    return n - surface_radius(spec, bump_dirs, p / n);
}

Vec3 surface_normal(const SynthSpec& spec, const std::vector<Vec3>& bump_dirs, const Vec3& p) {
    const double h = 1e-4 * spec.radius;
    Vec3 g;
    for (int i = 0; i < 3; ++i) {
        Vec3 e = Vec3::Zero();
        e[i] = h;
        g[i] = implicit(spec, bump_dirs, p + e) - implicit(spec, bump_dirs, p - e);
    }
    double n = g.norm();
    if (n < 1e-12) return p.normalized();
    return g / n;
}

Vec3 random_unit_vector(std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    while (true) {
        Vec3 v(gauss(rng), gauss(rng), gauss(rng));
        double n = v.norm();
        if (n > 1e-6) return v / n;
    }
}

// Color with luminance exactly 0.15 + 0.7 u. The chroma direction has zero
// Rec. 709 luminance, and the amplitude keeps every channel inside (0,1), so
// the decoded colors never clamp and the grayscale twin determines u.
Vec3 colormap(double u) {
    const double lum = 0.15 + 0.7 * u;
    const Vec3 chroma(1.0, -(0.2126 + 0.0722) / 0.7152, 1.0);
    return Vec3::Constant(lum) + 0.12 * std::sin(2.0 * kPi * u) * chroma;
}

double field_coordinate(SynthSpec::Field field, const Vec3& dir) {
    if (field == SynthSpec::Field::kAzimuthal) {
        double phi = std::atan2(dir.y(), dir.x());
        return 0.5 * (std::sin(phi) + 1.0);
    }
    // Zonal: pole-to-pole, azimuth-symmetric.
    double z = std::clamp(dir.z(), -1.0, 1.0);
    return std::acos(z) / kPi;
}

CameraView make_orbit_camera(const SynthSpec& spec, const std::string& id, double azimuth,
                             double elevation, double distance, double focal) {
    Vec3 dir(std::cos(elevation) * std::cos(azimuth), std::cos(elevation) * std::sin(azimuth),
             std::sin(elevation));
    Vec3 pos = distance * dir;

    Vec3 z_c = (-dir).normalized();  // camera forward, toward the origin
    Vec3 x_c = z_c.cross(Vec3(0, 0, 1));
    if (x_c.norm() < 1e-6) x_c = z_c.cross(Vec3(0, 1, 0));
    x_c.normalize();
    Vec3 y_c = z_c.cross(x_c);

    CameraView cam;
    cam.id = id;
    cam.width = spec.width;
    cam.height = spec.height;
    cam.fx = cam.fy = focal;
    cam.cx = 0.5 * spec.width;
    cam.cy = 0.5 * spec.height;
    cam.rotation.row(0) = x_c;
    cam.rotation.row(1) = y_c;
    cam.rotation.row(2) = z_c;
    cam.translation = -(cam.rotation * pos);
    return cam;
}

}  // namespace

void SynthSpec::validate() const {
    if (gaussian_count <= 0) throw InvalidInputError("gaussian_count must be positive");
    if (radius <= 0) throw InvalidInputError("radius must be positive");
    if (protrusion_count < 0) throw InvalidInputError("protrusion_count must be non-negative");
    if (width < 64 || height < 64) throw InvalidInputError("resolution below 64x64");
    if (lateral_views < 0 || vertical_views < 0 || lateral_views + vertical_views == 0)
        throw InvalidInputError("need at least one view");
    if (gain_min > gain_max || bias_min > bias_max)
        throw InvalidInputError("empty drift range");
    if (sh_degree < 0 || sh_degree > kMaxShDegree)
        throw InvalidInputError("sh_degree out of range");
    if (!(opacity > 0.0 && opacity < 1.0)) throw InvalidInputError("opacity must be in (0,1)");
    if (scale_multiplier <= 0) throw InvalidInputError("scale_multiplier must be positive");
}

SplatScene desaturate(const SplatScene& scene) {
    SplatScene gray = scene;
    for (Gaussian2D& g : gray.gaussians) {
        for (size_t m = 0; m < g.sh[0].size(); ++m) {
            double lum = 0.2126 * g.sh[0][m] + 0.7152 * g.sh[1][m] + 0.0722 * g.sh[2][m];
            g.sh[0][m] = g.sh[1][m] = g.sh[2][m] = lum;
        }
    }
    return gray;
}

SynthDataset generate_scene(const SynthSpec& spec, uint64_t seed) {
    spec.validate();
    std::mt19937_64 rng(seed);

    std::vector<Vec3> bump_dirs;
    bump_dirs.reserve(spec.protrusion_count);
    for (int i = 0; i < spec.protrusion_count; ++i) bump_dirs.push_back(random_unit_vector(rng));

    SynthDataset ds;
    ds.scene.sh_degree = spec.sh_degree;
    ds.scene.gaussians.reserve(spec.gaussian_count);

    const int n_coeffs = ds.scene.sh_coeff_count();
    const double base_scale =
        spec.scale_multiplier * 1.35 * 2.0 * spec.radius / std::sqrt((double)spec.gaussian_count);
    std::uniform_real_distribution<double> jitter(0.8, 1.25);

    for (int i = 0; i < spec.gaussian_count; ++i) {
        Vec3 dir = random_unit_vector(rng);
        double ju = jitter(rng);
        double jv = jitter(rng);

        Gaussian2D g;
        g.center = dir * surface_radius(spec, bump_dirs, dir);

        Vec3 n = surface_normal(spec, bump_dirs, g.center);
        Vec3 helper = std::abs(n.z()) < 0.9 ? Vec3(0, 0, 1) : Vec3(1, 0, 0);
        Vec3 t_u = helper.cross(n).normalized();
        Vec3 t_v = n.cross(t_u);
        Mat3 frame;
        frame.col(0) = t_u;
        frame.col(1) = t_v;
        frame.col(2) = n;
        g.rotation = Quat(frame);

        g.set_scales({base_scale * ju, base_scale * jv});
        g.set_opacity(spec.opacity);

        Vec3 color = colormap(field_coordinate(spec.field, dir));
        for (int ch = 0; ch < 3; ++ch) {
            g.sh[ch].assign(n_coeffs, 0.0);
            g.sh[ch][0] = (color[ch] - 0.5) / kShC0;
        }
        ds.scene.gaussians.push_back(std::move(g));
    }

    ds.gray_scene = desaturate(ds.scene);

    // Frame the object from its numeric bounding radius.
    double r_max = spec.radius;
    {
        // Fibonacci sphere sampling; dense enough for the default sharpness.
        const int n_samples = 2048;
        for (int i = 0; i < n_samples; ++i) {
            double z = 1.0 - 2.0 * (i + 0.5) / n_samples;
            double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
            double phi = kPi * (1.0 + std::sqrt(5.0)) * i;
            Vec3 d(rho * std::cos(phi), rho * std::sin(phi), z);
            r_max = std::max(r_max, surface_radius(spec, bump_dirs, d));
        }
    }
    const double distance = 3.0 * r_max;
    const double focal = 0.42 * spec.width * (distance - r_max) / r_max;

    auto deg = [](double d) { return d * kPi / 180.0; };
    for (int i = 0; i < spec.lateral_views; ++i) {
        double a = spec.lateral_views == 1
                       ? 0.0
                       : -deg(80) + 2.0 * deg(80) * i / (spec.lateral_views - 1);
        char id[16];
        std::snprintf(id, sizeof id, "lat%02d", i);
        ds.cameras.push_back(make_orbit_camera(spec, id, a, deg(25), distance, focal));
    }
    for (int i = 0; i < spec.vertical_views; ++i) {
        double e = spec.vertical_views == 1
                       ? deg(45)
                       : deg(10) + (deg(80) - deg(10)) * i / (spec.vertical_views - 1);
        char id[16];
        std::snprintf(id, sizeof id, "ver%02d", i);
        ds.cameras.push_back(make_orbit_camera(spec, id, 0.0, e, distance, focal));
    }

    std::uniform_real_distribution<double> gain(spec.gain_min, spec.gain_max);
    std::uniform_real_distribution<double> bias(spec.bias_min, spec.bias_max);
    for (size_t v = 0; v < ds.cameras.size(); ++v) {
        ACTParams act;
        act.w = Vec3::Constant(gain(rng));
        act.b = Vec3::Constant(bias(rng));
        ds.true_act.push_back(act);
    }

    for (size_t v = 0; v < ds.cameras.size(); ++v) {
        const CameraView& cam = ds.cameras[v];
        RenderBuffers color = render_view(ds.scene, cam, std::nullopt);
        RenderBuffers gray = render_view(ds.gray_scene, cam, ds.true_act[v]);

        ds.color_images.push_back(std::move(color.color));

        ImageGray g(cam.width, cam.height);
        for (size_t i = 0; i < g.data.size(); ++i) g.data[i] = gray.color.data[3 * i];
        ds.gray_images.push_back(std::move(g));

        ImageMask mask(cam.width, cam.height);
        for (size_t i = 0; i < mask.data.size(); ++i)
            mask.data[i] = color.accum.data[i] > 0.5 ? 1 : 0;
        ds.masks.push_back(std::move(mask));
    }
    return ds;
}

void save_dataset(const SynthDataset& ds, const std::string& dir) {
    fs::create_directories(fs::path(dir) / "gray");
    fs::create_directories(fs::path(dir) / "color");
    fs::create_directories(fs::path(dir) / "masks");

    save_scene_ply(ds.scene, (fs::path(dir) / "scene_color.ply").string());
    save_scene_ply(ds.gray_scene, (fs::path(dir) / "scene_gray.ply").string());

    std::vector<CameraView> cams = ds.cameras;
    std::vector<ViewACT> act_truth;
    for (size_t v = 0; v < cams.size(); ++v) {
        const std::string& id = cams[v].id;
        cams[v].image_path = (fs::path(dir) / "gray" / (id + ".png")).string();
        cams[v].mask_path = (fs::path(dir) / "masks" / (id + ".png")).string();
        save_gray(ds.gray_images[v], cams[v].image_path, 16);
        save_image(ds.color_images[v], (fs::path(dir) / "color" / (id + ".png")).string(), 16);
        save_mask(ds.masks[v], cams[v].mask_path);
        act_truth.push_back({id, ds.true_act[v]});
    }
    save_cameras(cams, (fs::path(dir) / "cameras.json").string());
    save_act_file(act_truth, (fs::path(dir) / "act_truth.json").string());
}

}  // namespace splatcolor
