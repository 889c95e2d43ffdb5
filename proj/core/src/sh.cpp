#include "splatcolor/sh.hpp"

#include <cmath>

#include "splatcolor/errors.hpp"

namespace splatcolor {

namespace {
constexpr double kC1 = 0.4886025119029199;
constexpr double kC2[5] = {1.0925484305920792, -1.0925484305920792, 0.31539156525252005,
                           -1.0925484305920792, 0.5462742152960396};
constexpr double kC3[7] = {-0.5900435899266435, 2.890611442640554,  -0.4570457994644658,
                           0.3731763325901154,  -0.4570457994644658, 1.445305721320277,
                           -0.5900435899266435};
}  // namespace

void sh_basis(const Vec3& dir, int degree, std::array<double, kMaxShCoeffs>& out) {
    const double x = dir[0], y = dir[1], z = dir[2];
    out[0] = kShC0;
    if (degree < 1) return;
    out[1] = -kC1 * y;
    out[2] = kC1 * z;
    out[3] = -kC1 * x;
    if (degree < 2) return;
    const double xx = x * x, yy = y * y, zz = z * z;
    const double xy = x * y, yz = y * z, xz = x * z;
    out[4] = kC2[0] * xy;
    out[5] = kC2[1] * yz;
    out[6] = kC2[2] * (2.0 * zz - xx - yy);
    out[7] = kC2[3] * xz;
    out[8] = kC2[4] * (xx - yy);
    if (degree < 3) return;
    out[9] = kC3[0] * y * (3.0 * xx - yy);
    out[10] = kC3[1] * xy * z;
    out[11] = kC3[2] * y * (4.0 * zz - xx - yy);
    out[12] = kC3[3] * z * (2.0 * zz - 3.0 * xx - 3.0 * yy);
    out[13] = kC3[4] * x * (4.0 * zz - xx - yy);
    out[14] = kC3[5] * z * (xx - yy);
    out[15] = kC3[6] * x * (xx - 3.0 * yy);
}

double sh_eval_channel_raw(std::span<const double> coeffs, const Vec3& dir, int degree) {
    std::array<double, kMaxShCoeffs> basis;
    sh_basis(dir, degree, basis);
    const int n = sh_coeff_count(degree);
    double v = 0.5;
    for (int i = 0; i < n; ++i) v += coeffs[i] * basis[i];
    return v;
}

Vec3 sh_eval(const std::array<std::vector<double>, 3>& coeffs, const Vec3& dir, int degree) {
    const size_t expect = static_cast<size_t>(sh_coeff_count(degree));
    for (int c = 0; c < 3; ++c) {
        if (coeffs[c].size() != expect) {
            throw InvalidInputError("sh_eval: channel " + std::to_string(c) + " has " +
                                    std::to_string(coeffs[c].size()) + " coefficients, expected " +
                                    std::to_string(expect));
        }
    }
    std::array<double, kMaxShCoeffs> basis;
    sh_basis(dir, degree, basis);
    const int n = sh_coeff_count(degree);
    Vec3 rgb;
    for (int c = 0; c < 3; ++c) {
        double v = 0.5;
        const double* co = coeffs[c].data();
        for (int i = 0; i < n; ++i) v += co[i] * basis[i];
        rgb[c] = std::max(0.0, v);
    }
    return rgb;
}

Vec3 sh_decode(const std::array<std::vector<double>, 3>& coeffs,
               const std::array<double, kMaxShCoeffs>& basis, int n_coeffs,
               std::array<bool, 3>* active) {
    Vec3 rgb;
    for (int c = 0; c < 3; ++c) {
        const auto& co = coeffs[c];
        const int n = std::min<int>(n_coeffs, static_cast<int>(co.size()));
        double v = 0.5;
        for (int i = 0; i < n; ++i) v += co[i] * basis[i];
        if (active) (*active)[c] = v > 0.0;
        rgb[c] = std::max(0.0, v);
    }
    return rgb;
}

}  // namespace splatcolor
