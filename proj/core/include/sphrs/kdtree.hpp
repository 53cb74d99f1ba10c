#pragma once

#include <span>
#include <vector>

#include "sphrs/projections.hpp"

namespace sphrs {

/// Static 2-D kd-tree for exact nearest-neighbor queries. Ties in squared
/// Euclidean distance resolve to the lowest point index.
class NearestIndex {
public:
    explicit NearestIndex(std::span<const PixelCoord> points);

    /// Index of the nearest point; -1 if the index is empty.
    int nearest(PixelCoord q) const noexcept;

    std::size_t size() const noexcept { return points_.size(); }

private:
    struct Node {
        int begin;
        int end;
        int left{-1};
        int right{-1};
        int axis{0};
        double split{0.0};
        double lo[2]{0.0, 0.0};
        double hi[2]{0.0, 0.0};
    };

    int build(int begin, int end);
    void search(int node, PixelCoord q, double& best_d2, int& best) const noexcept;

    std::vector<PixelCoord> points_;
    std::vector<int> order_;
    std::vector<Node> nodes_;
};

}  // namespace sphrs
