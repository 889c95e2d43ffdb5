#pragma once

#include <array>
#include <span>

#include "splatcolor/types.hpp"

namespace splatcolor {

// DC scale of the real SH basis, 1/(2*sqrt(pi)). Splat colors follow the
// common convention color = 0.5 + kShC0 * f_dc.
inline constexpr double kShC0 = 0.28209479177387814;
inline constexpr int kMaxShDegree = 3;
inline constexpr int kMaxShCoeffs = (kMaxShDegree + 1) * (kMaxShDegree + 1);

inline constexpr int sh_coeff_count(int degree) { return (degree + 1) * (degree + 1); }

// Real SH basis values Y_0..Y_{(degree+1)^2-1} at a unit direction, in the
// splatting coefficient order (DC, then degree 1 in -y/z/-x order, ...).
void sh_basis(const Vec3& dir, int degree, std::array<double, kMaxShCoeffs>& out);

// Pre-clamp channel value: 0.5 + sum_i coeffs[i] * Y_i(dir).
double sh_eval_channel_raw(std::span<const double> coeffs, const Vec3& dir, int degree);

// Decoded color max(0, 0.5 + sum c*Y) per channel.
// Throws InvalidInputError if a channel's coefficient count != (degree+1)^2.
Vec3 sh_eval(const std::array<std::vector<double>, 3>& coeffs, const Vec3& dir, int degree);

// Decode against a precomputed basis, truncated to n_coeffs (the renderer and
// gradient passes reuse one basis per pixel). When `active` is given, each
// channel reports whether the zero clamp is disengaged there, i.e. whether the
// decode is locally differentiable in the coefficients.
Vec3 sh_decode(const std::array<std::vector<double>, 3>& coeffs,
               const std::array<double, kMaxShCoeffs>& basis, int n_coeffs,
               std::array<bool, 3>* active = nullptr);

}  // namespace splatcolor
