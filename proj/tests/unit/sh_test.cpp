#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "splatcolor/errors.hpp"
#include "splatcolor/sh.hpp"

using namespace splatcolor;

TEST_SUITE("sh") {

TEST_CASE("basis matches the Legendre-recurrence reference at every degree") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> gauss;
    for (int trial = 0; trial < 200; ++trial) {
        Vec3 dir(gauss(rng), gauss(rng), gauss(rng));
        if (dir.norm() < 1e-6) continue;
        dir.normalize();
        for (int degree = 0; degree <= kMaxShDegree; ++degree) {
            std::array<double, kMaxShCoeffs> ours{}, ref{};
            sh_basis(dir, degree, ours);
            oracle::sh_basis(dir, degree, ref);
            for (int i = 0; i < sh_coeff_count(degree); ++i)
                CHECK(ours[i] == doctest::Approx(ref[i]).epsilon(1e-12));
        }
    }
}

TEST_CASE("DC-only coefficients decode to 0.5 + C0 * dc") {
    std::array<std::vector<double>, 3> coeffs;
    for (int c = 0; c < 3; ++c) coeffs[c] = {(0.3 * (c + 1) - 0.5) / kShC0};
    Vec3 rgb = sh_eval(coeffs, Vec3(0, 0, 1), 0);
    CHECK(rgb[0] == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(rgb[1] == doctest::Approx(0.6).epsilon(1e-14));
    CHECK(rgb[2] == doctest::Approx(0.9).epsilon(1e-14));
}

TEST_CASE("decode clamps negatives to zero, raw evaluation does not") {
    std::array<std::vector<double>, 3> coeffs;
    for (auto& ch : coeffs) ch = {(-0.2 - 0.5) / kShC0};  // pre-clamp value -0.2
    Vec3 rgb = sh_eval(coeffs, Vec3(1, 0, 0), 0);
    CHECK(rgb[0] == 0.0);
    CHECK(sh_eval_channel_raw(coeffs[0], Vec3(1, 0, 0), 0) == doctest::Approx(-0.2));
}

TEST_CASE("decode reports the clamp indicator per channel") {
    std::array<double, kMaxShCoeffs> basis{};
    sh_basis(Vec3(0, 0, 1), 0, basis);
    std::array<std::vector<double>, 3> coeffs;
    coeffs[0] = {0.1 / kShC0};             // positive: active
    coeffs[1] = {-0.5 / kShC0};            // exactly zero pre-clamp: inactive
    coeffs[2] = {-0.7 / kShC0};            // negative: inactive
    std::array<bool, 3> active{};
    Vec3 rgb = sh_decode(coeffs, basis, 1, &active);
    CHECK(rgb[0] == doctest::Approx(0.6));
    CHECK(rgb[1] == doctest::Approx(0.0));
    CHECK(rgb[2] == 0.0);
    CHECK(active[0]);
    CHECK_FALSE(active[1]);
    CHECK_FALSE(active[2]);
}

TEST_CASE("decode truncates to the requested coefficient count") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    std::array<std::vector<double>, 3> coeffs;
    for (auto& ch : coeffs) {
        ch.resize(16);
        for (double& v : ch) v = u(rng);
    }
    Vec3 dir = Vec3(0.3, -0.5, 0.8).normalized();
    std::array<double, kMaxShCoeffs> basis{};
    sh_basis(dir, 3, basis);

    Vec3 dc_only = sh_decode(coeffs, basis, 1);
    std::array<std::vector<double>, 3> trimmed;
    for (int c = 0; c < 3; ++c) trimmed[c] = {coeffs[c][0]};
    Vec3 expect = sh_eval(trimmed, dir, 0);
    for (int c = 0; c < 3; ++c) CHECK(dc_only[c] == doctest::Approx(expect[c]).epsilon(1e-14));

    // A count beyond the stored coefficients uses what is there.
    Vec3 full = sh_decode(coeffs, basis, 16);
    Vec3 beyond = sh_decode(coeffs, basis, 99);
    for (int c = 0; c < 3; ++c) CHECK(full[c] == beyond[c]);
}

TEST_CASE("strict evaluation rejects coefficient count mismatches") {
    std::array<std::vector<double>, 3> coeffs;
    coeffs[0] = {0.1};
    coeffs[1] = {0.1};
    coeffs[2] = {0.1, 0.2};
    CHECK_THROWS_AS(sh_eval(coeffs, Vec3(0, 0, 1), 0), InvalidInputError);
    CHECK_THROWS_AS(sh_eval(coeffs, Vec3(0, 0, 1), 1), InvalidInputError);
}

TEST_CASE("coefficient counts per degree") {
    CHECK(sh_coeff_count(0) == 1);
    CHECK(sh_coeff_count(1) == 4);
    CHECK(sh_coeff_count(2) == 9);
    CHECK(sh_coeff_count(3) == 16);
}

}  // TEST_SUITE
