#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "splatcolor/errors.hpp"
#include "splatcolor/spatial_index.hpp"

using namespace splatcolor;

namespace {

std::vector<Vec3> random_points(size_t n, uint64_t seed, double spread = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-spread, spread);
    std::vector<Vec3> pts(n);
    for (auto& p : pts) p = Vec3(u(rng), u(rng), u(rng));
    return pts;
}

std::vector<Vec3> clustered_points(size_t clusters, size_t per_cluster, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    std::normal_distribution<double> gauss(0.0, 0.05);
    std::vector<Vec3> pts;
    for (size_t c = 0; c < clusters; ++c) {
        Vec3 center(u(rng), u(rng), u(rng));
        for (size_t i = 0; i < per_cluster; ++i)
            pts.push_back(center + Vec3(gauss(rng), gauss(rng), gauss(rng)));
    }
    return pts;
}

void check_agreement(const SpatialIndex& index, const std::vector<Vec3>& pts,
                     const std::vector<Vec3>& queries, double radius) {
    for (const Vec3& q : queries) {
        auto got = index.nn_within_radius(q, radius);
        auto want = oracle::nearest(pts, q, radius);
        REQUIRE(got.has_value() == want.has_value());
        if (got) {
            CHECK(got->index == want->index);
            CHECK(got->distance == doctest::Approx(want->distance).epsilon(1e-12));
        }
    }
}

}  // namespace

TEST_SUITE("spatial_index") {

TEST_CASE("basic nearest neighbor on a hand-laid line") {
    std::vector<Vec3> pts = {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {5, 0, 0}};
    for (NNMode mode : {NNMode::kLinear, NNMode::kKdTree}) {
        auto index = make_index(pts, mode);
        auto r = index->nn_within_radius(Vec3(1.2, 0, 0), 10.0);
        REQUIRE(r);
        CHECK(r->index == 1);
        CHECK(r->distance == doctest::Approx(0.2));

        r = index->nn_within_radius(Vec3(4.0, 0, 0), 10.0);
        REQUIRE(r);
        CHECK(r->index == 3);

        CHECK_FALSE(index->nn_within_radius(Vec3(100, 0, 0), 1.0).has_value());
    }
}

TEST_CASE("radius boundary is inclusive") {
    std::vector<Vec3> pts = {{0, 0, 0}};
    for (NNMode mode : {NNMode::kLinear, NNMode::kKdTree}) {
        auto index = make_index(pts, mode);
        auto exactly = index->nn_within_radius(Vec3(2, 0, 0), 2.0);
        REQUIRE(exactly.has_value());
        CHECK(exactly->distance == doctest::Approx(2.0));
        CHECK_FALSE(index->nn_within_radius(Vec3(2.0000001, 0, 0), 2.0).has_value());
    }
}

TEST_CASE("exact duplicates resolve to the lowest index") {
    std::vector<Vec3> pts = {{1, 1, 1}, {0, 0, 0}, {0, 0, 0}, {0, 0, 0}, {1, 1, 1}};
    for (NNMode mode : {NNMode::kLinear, NNMode::kKdTree}) {
        auto index = make_index(pts, mode);
        auto r = index->nn_within_radius(Vec3(0.01, 0, 0), 5.0);
        REQUIRE(r);
        CHECK(r->index == 1);
        r = index->nn_within_radius(Vec3(0.99, 1, 1), 5.0);
        REQUIRE(r);
        CHECK(r->index == 0);
    }
}

TEST_CASE("equidistant distinct points resolve to the lowest index") {
    // Queries from the midpoint of symmetric pairs: exact ties in distance.
    std::vector<Vec3> pts = {{-1, 0, 0}, {1, 0, 0}, {0, -1, 0}, {0, 1, 0}};
    for (NNMode mode : {NNMode::kLinear, NNMode::kKdTree}) {
        auto index = make_index(pts, mode);
        auto r = index->nn_within_radius(Vec3(0, 0, 0), 2.0);
        REQUIRE(r);
        CHECK(r->index == 0);
    }
}

TEST_CASE("tree and scan agree on uniform points") {
    auto pts = random_points(2000, 11);
    auto queries = random_points(500, 12, 1.2);
    KdTreeIndex tree(pts);
    check_agreement(tree, pts, queries, 0.3);
    check_agreement(tree, pts, queries, -1.0);  // unbounded
    LinearIndex linear(pts);
    check_agreement(linear, pts, queries, 0.3);
}

TEST_CASE("tree and scan agree on clustered points") {
    auto pts = clustered_points(40, 50, 21);
    auto queries = random_points(400, 22, 12.0);
    KdTreeIndex tree(pts);
    check_agreement(tree, pts, queries, 1.0);
    check_agreement(tree, pts, queries, 1e9);
}

TEST_CASE("tree and scan agree on a grid with many exact ties") {
    std::vector<Vec3> pts;
    for (int x = 0; x < 8; ++x)
        for (int y = 0; y < 8; ++y)
            for (int z = 0; z < 8; ++z) pts.push_back(Vec3(x, y, z));
    KdTreeIndex tree(pts);
    LinearIndex linear(pts);
    // Query from cell centers: 8 lattice points all at the same distance.
    for (int x = 0; x < 7; ++x)
        for (int y = 0; y < 7; ++y)
            for (int z = 0; z < 7; ++z) {
                Vec3 q(x + 0.5, y + 0.5, z + 0.5);
                auto a = tree.nn_within_radius(q, 2.0);
                auto b = linear.nn_within_radius(q, 2.0);
                REQUIRE(a);
                REQUIRE(b);
                CHECK(a->index == b->index);
                CHECK(a->distance == b->distance);
            }
}

TEST_CASE("nearest with exclusion skips the point itself") {
    std::vector<Vec3> pts = {{0, 0, 0}, {1, 0, 0}, {4, 0, 0}};
    for (NNMode mode : {NNMode::kLinear, NNMode::kKdTree}) {
        auto index = make_index(pts, mode);
        auto r = index->nearest(pts[0], 0);
        REQUIRE(r);
        CHECK(r->index == 1);
        CHECK(r->distance == doctest::Approx(1.0));
        r = index->nearest(pts[2], 2);
        REQUIRE(r);
        CHECK(r->index == 1);
        CHECK(r->distance == doctest::Approx(3.0));
    }
}

TEST_CASE("empty index returns no result") {
    for (NNMode mode : {NNMode::kLinear, NNMode::kKdTree}) {
        auto index = make_index({}, mode);
        CHECK(index->size() == 0);
        CHECK_FALSE(index->nn_within_radius(Vec3::Zero(), 1.0).has_value());
        CHECK_FALSE(index->nearest(Vec3::Zero()).has_value());
    }
}

TEST_CASE("single point excluded from its own nearest query yields nothing") {
    for (NNMode mode : {NNMode::kLinear, NNMode::kKdTree}) {
        auto index = make_index({Vec3(1, 2, 3)}, mode);
        CHECK_FALSE(index->nearest(Vec3(1, 2, 3), 0).has_value());
        auto r = index->nearest(Vec3(0, 0, 0));
        REQUIRE(r);
        CHECK(r->index == 0);
    }
}

TEST_CASE("median spacing of a uniform line is the lattice step") {
    std::vector<Vec3> pts;
    for (int i = 0; i < 11; ++i) pts.push_back(Vec3(0.5 * i, 0, 0));
    CHECK(median_nn_spacing(pts) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("median spacing matches a direct computation on random points") {
    auto pts = random_points(301, 33);
    std::vector<double> spacings;
    for (size_t i = 0; i < pts.size(); ++i) {
        auto r = oracle::nearest(pts, pts[i], -1.0, i);
        REQUIRE(r);
        spacings.push_back(r->distance);
    }
    std::sort(spacings.begin(), spacings.end());
    CHECK(median_nn_spacing(pts) == doctest::Approx(spacings[150]).epsilon(1e-12));
}

TEST_CASE("median spacing needs at least two points") {
    CHECK_THROWS_AS(median_nn_spacing({}), InvalidInputError);
    CHECK_THROWS_AS(median_nn_spacing({Vec3::Zero()}), InvalidInputError);
    CHECK(median_nn_spacing({Vec3::Zero(), Vec3(1, 0, 0)}) == doctest::Approx(1.0));
}

}  // TEST_SUITE
