#include "sphrs/kdtree.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace sphrs {

namespace {

constexpr int kLeafSize = 8;

double coord(PixelCoord p, int axis) noexcept { return axis == 0 ? p.u : p.v; }

}  // namespace

NearestIndex::NearestIndex(std::span<const PixelCoord> points) : points_(points.begin(), points.end()) {
    order_.resize(points_.size());
    std::iota(order_.begin(), order_.end(), 0);
    if (!points_.empty()) {
        nodes_.reserve(2 * points_.size() / kLeafSize + 2);
        build(0, static_cast<int>(points_.size()));
    }
}

int NearestIndex::build(int begin, int end) {
    Node node{begin, end};
    node.lo[0] = node.lo[1] = std::numeric_limits<double>::infinity();
    node.hi[0] = node.hi[1] = -std::numeric_limits<double>::infinity();
    for (int i = begin; i < end; ++i) {
        const PixelCoord p = points_[static_cast<std::size_t>(order_[static_cast<std::size_t>(i)])];
        node.lo[0] = std::min(node.lo[0], p.u);
        node.hi[0] = std::max(node.hi[0], p.u);
        node.lo[1] = std::min(node.lo[1], p.v);
        node.hi[1] = std::max(node.hi[1], p.v);
    }
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(node);
    if (end - begin <= kLeafSize) return id;

    const int axis = (node.hi[0] - node.lo[0]) >= (node.hi[1] - node.lo[1]) ? 0 : 1;
    const int mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end, [&](int a, int b) {
        const double ca = coord(points_[static_cast<std::size_t>(a)], axis);
        const double cb = coord(points_[static_cast<std::size_t>(b)], axis);
        return ca != cb ? ca < cb : a < b;
    });
    const int left = build(begin, mid);
    const int right = build(mid, end);
    nodes_[static_cast<std::size_t>(id)].left = left;
    nodes_[static_cast<std::size_t>(id)].right = right;
    nodes_[static_cast<std::size_t>(id)].axis = axis;
    nodes_[static_cast<std::size_t>(id)].split = coord(points_[static_cast<std::size_t>(order_[static_cast<std::size_t>(mid)])], axis);
    return id;
}

void NearestIndex::search(int id, PixelCoord q, double& best_d2, int& best) const noexcept {
    const Node& node = nodes_[static_cast<std::size_t>(id)];
    // Squared distance from q to the node's bounding box.
    const double dx = std::max({node.lo[0] - q.u, 0.0, q.u - node.hi[0]});
    const double dy = std::max({node.lo[1] - q.v, 0.0, q.v - node.hi[1]});
    if (dx * dx + dy * dy > best_d2) return;

    if (node.left < 0) {
        for (int i = node.begin; i < node.end; ++i) {
            const int idx = order_[static_cast<std::size_t>(i)];
            const PixelCoord p = points_[static_cast<std::size_t>(idx)];
            const double ex = p.u - q.u;
            const double ey = p.v - q.v;
            const double d2 = ex * ex + ey * ey;
            if (d2 < best_d2 || (d2 == best_d2 && idx < best)) {
                best_d2 = d2;
                best = idx;
            }
        }
        return;
    }
    const bool go_left = coord(q, node.axis) < node.split;
    search(go_left ? node.left : node.right, q, best_d2, best);
    search(go_left ? node.right : node.left, q, best_d2, best);
}

int NearestIndex::nearest(PixelCoord q) const noexcept {
    if (points_.empty()) return -1;
    double best_d2 = std::numeric_limits<double>::infinity();
    int best = -1;
    search(0, q, best_d2, best);
    return best;
}

}  // namespace sphrs
