#pragma once

#include <limits>
#include <memory>
#include <optional>
#include <vector>

#include "splatcolor/types.hpp"

namespace splatcolor {

struct NNResult {
    size_t index;
    double distance;
};

// Nearest-neighbor search over a fixed point set. Both implementations follow
// the same total order on candidates, (squared distance, point index), so a
// tree query and a linear scan agree exactly, ties and radius boundary
// included (distance <= radius counts as inside).
class SpatialIndex {
public:
    static constexpr size_t kNone = std::numeric_limits<size_t>::max();

    virtual ~SpatialIndex() = default;
    virtual size_t size() const = 0;
    virtual std::optional<NNResult> nn_within_radius(const Vec3& query, double radius) const = 0;
    // Unbounded nearest neighbor, optionally skipping one index (used for
    // spacing statistics where a point must not match itself).
    virtual std::optional<NNResult> nearest(const Vec3& query, size_t exclude = kNone) const = 0;
};

// Reference implementation: exhaustive scan in index order.
class LinearIndex final : public SpatialIndex {
public:
    explicit LinearIndex(std::vector<Vec3> points);
    size_t size() const override { return points_.size(); }
    std::optional<NNResult> nn_within_radius(const Vec3& query, double radius) const override;
    std::optional<NNResult> nearest(const Vec3& query, size_t exclude = kNone) const override;

private:
    std::vector<Vec3> points_;
};

// Balanced KD-tree, median split on the widest axis, leaf size 16. Queries
// are read-only and safe to run from many threads.
class KdTreeIndex final : public SpatialIndex {
public:
    explicit KdTreeIndex(std::vector<Vec3> points);
    size_t size() const override { return points_.size(); }
    std::optional<NNResult> nn_within_radius(const Vec3& query, double radius) const override;
    std::optional<NNResult> nearest(const Vec3& query, size_t exclude = kNone) const override;

private:
    struct Node {
        double split = 0;
        int axis = -1;                // -1 marks a leaf
        uint32_t left = 0, right = 0; // children for inner nodes
        uint32_t begin = 0, end = 0;  // perm_ range for leaves
    };

    uint32_t build(uint32_t begin, uint32_t end);
    void query(uint32_t node, const Vec3& q, size_t exclude, double& best_d2,
               size_t& best_idx) const;

    std::vector<Vec3> points_;
    std::vector<uint32_t> perm_;
    std::vector<Node> nodes_;
    uint32_t root_ = 0;
};

enum class NNMode { kKdTree, kLinear };

std::unique_ptr<SpatialIndex> make_index(std::vector<Vec3> points, NNMode mode);

// Median over all points of the distance to the closest other point.
// Throws InvalidInputError with fewer than 2 points.
double median_nn_spacing(const std::vector<Vec3>& points);

}  // namespace splatcolor
