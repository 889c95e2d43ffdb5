#include "splatcolor/spatial_index.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "splatcolor/errors.hpp"

namespace splatcolor {

namespace {

constexpr uint32_t kLeafSize = 16;

// Shared acceptance rule: strictly closer wins, equal distance falls back to
// the lower point index. Keeping this identical across implementations is
// what makes tree and scan results bit-equal.
inline void consider(double d2, size_t idx, double& best_d2, size_t& best_idx) {
    if (d2 < best_d2 || (d2 == best_d2 && idx < best_idx)) {
        best_d2 = d2;
        best_idx = idx;
    }
}

std::optional<NNResult> finish(double best_d2, size_t best_idx) {
    if (best_idx == SpatialIndex::kNone) return std::nullopt;
    return NNResult{best_idx, std::sqrt(best_d2)};
}

}  // namespace

LinearIndex::LinearIndex(std::vector<Vec3> points) : points_(std::move(points)) {}

std::optional<NNResult> LinearIndex::nn_within_radius(const Vec3& query, double radius) const {
    double best_d2 = radius * radius;
    size_t best_idx = kNone;
    for (size_t i = 0; i < points_.size(); ++i)
        consider((points_[i] - query).squaredNorm(), i, best_d2, best_idx);
    return finish(best_d2, best_idx);
}

std::optional<NNResult> LinearIndex::nearest(const Vec3& query, size_t exclude) const {
    double best_d2 = std::numeric_limits<double>::infinity();
    size_t best_idx = kNone;
    for (size_t i = 0; i < points_.size(); ++i) {
        if (i == exclude) continue;
        consider((points_[i] - query).squaredNorm(), i, best_d2, best_idx);
    }
    return finish(best_d2, best_idx);
}

KdTreeIndex::KdTreeIndex(std::vector<Vec3> points) : points_(std::move(points)) {
    perm_.resize(points_.size());
    std::iota(perm_.begin(), perm_.end(), 0u);
    if (!points_.empty()) {
        nodes_.reserve(2 * points_.size() / kLeafSize + 2);
        root_ = build(0, static_cast<uint32_t>(points_.size()));
    }
}

uint32_t KdTreeIndex::build(uint32_t begin, uint32_t end) {
    const uint32_t id = static_cast<uint32_t>(nodes_.size());
    nodes_.emplace_back();
    if (end - begin <= kLeafSize) {
        nodes_[id].begin = begin;
        nodes_[id].end = end;
        return id;
    }

    Vec3 lo = points_[perm_[begin]], hi = lo;
    for (uint32_t k = begin + 1; k < end; ++k) {
        lo = lo.cwiseMin(points_[perm_[k]]);
        hi = hi.cwiseMax(points_[perm_[k]]);
    }
    int axis = 0;
    (hi - lo).maxCoeff(&axis);

    // (coordinate, index) is a strict total order, so the median element and
    // the two halves are deterministic even with duplicate coordinates.
    const uint32_t mid = begin + (end - begin) / 2;
    std::nth_element(perm_.begin() + begin, perm_.begin() + mid, perm_.begin() + end,
                     [&](uint32_t a, uint32_t b) {
                         const double ca = points_[a][axis], cb = points_[b][axis];
                         return ca != cb ? ca < cb : a < b;
                     });
    const double split = points_[perm_[mid]][axis];

    const uint32_t left = build(begin, mid);
    const uint32_t right = build(mid, end);
    nodes_[id].axis = axis;
    nodes_[id].split = split;
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
}

void KdTreeIndex::query(uint32_t node_id, const Vec3& q, size_t exclude, double& best_d2,
                        size_t& best_idx) const {
    const Node& node = nodes_[node_id];
    if (node.axis < 0) {
        for (uint32_t k = node.begin; k < node.end; ++k) {
            const uint32_t idx = perm_[k];
            if (idx == exclude) continue;
            consider((points_[idx] - q).squaredNorm(), idx, best_d2, best_idx);
        }
        return;
    }

    // Left child holds coordinates <= split, right child >= split. A child is
    // skipped only when its axis gap strictly exceeds the current best, so
    // boundary ties are always visited and the index tie-break stays exact.
    const double diff = q[node.axis] - node.split;
    const uint32_t near = diff < 0 ? node.left : node.right;
    const uint32_t far = diff < 0 ? node.right : node.left;
    query(near, q, exclude, best_d2, best_idx);
    if (diff * diff <= best_d2) query(far, q, exclude, best_d2, best_idx);
}

std::optional<NNResult> KdTreeIndex::nn_within_radius(const Vec3& query_pt, double radius) const {
    if (points_.empty()) return std::nullopt;
    double best_d2 = radius * radius;
    size_t best_idx = kNone;
    query(root_, query_pt, kNone, best_d2, best_idx);
    return finish(best_d2, best_idx);
}

std::optional<NNResult> KdTreeIndex::nearest(const Vec3& query_pt, size_t exclude) const {
    if (points_.empty()) return std::nullopt;
    double best_d2 = std::numeric_limits<double>::infinity();
    size_t best_idx = kNone;
    query(root_, query_pt, exclude, best_d2, best_idx);
    return finish(best_d2, best_idx);
}

std::unique_ptr<SpatialIndex> make_index(std::vector<Vec3> points, NNMode mode) {
    if (mode == NNMode::kLinear) return std::make_unique<LinearIndex>(std::move(points));
    return std::make_unique<KdTreeIndex>(std::move(points));
}

double median_nn_spacing(const std::vector<Vec3>& points) {
    if (points.size() < 2)
        throw InvalidInputError("median_nn_spacing needs at least 2 points, got " +
                                std::to_string(points.size()));
    KdTreeIndex index(points);
    std::vector<double> spacing(points.size());
    for (size_t i = 0; i < points.size(); ++i)
        spacing[i] = index.nearest(points[i], i)->distance;
    const size_t mid = spacing.size() / 2;
    std::nth_element(spacing.begin(), spacing.begin() + mid, spacing.end());
    return spacing[mid];
}

}  // namespace splatcolor
