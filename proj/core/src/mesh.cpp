#include "sphrs/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sphrs/errors.hpp"

namespace sphrs {

MeshSamples::MeshSamples(std::vector<PixelCoord> positions, std::vector<double> values) {
    if (positions.size() != values.size()) throw ConfigError("MeshSamples: positions/values length mismatch");
    for (std::size_t i = 0; i < positions.size(); ++i) {
        if (!std::isfinite(positions[i].u) || !std::isfinite(positions[i].v) || !std::isfinite(values[i])) {
            throw ConfigError("MeshSamples: non-finite input");
        }
    }

    const std::size_t n = positions.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (positions[a].u != positions[b].u) return positions[a].u < positions[b].u;
        if (positions[a].v != positions[b].v) return positions[a].v < positions[b].v;
        return a < b;
    });

    // owner[i] = index of the earliest sample that i merges into.
    std::vector<std::size_t> owner(n);
    std::iota(owner.begin(), owner.end(), std::size_t{0});
    auto find = [&owner](std::size_t i) {
        while (owner[i] != i) i = owner[i] = owner[owner[i]];
        return i;
    };
    bool any = false;
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t i = order[k];
        for (std::size_t l = k + 1; l < n; ++l) {
            const std::size_t j = order[l];
            if (positions[j].u - positions[i].u > kDuplicateTolerance) break;
            if (positions[j].u == positions[i].u && positions[j].v - positions[i].v > kDuplicateTolerance) {
                // Rest of this equal-u run lies further away in v.
                while (l + 1 < n && positions[order[l + 1]].u == positions[i].u) ++l;
                continue;
            }
            if (std::abs(positions[j].v - positions[i].v) <= kDuplicateTolerance) {
                const std::size_t root_i = find(i);
                const std::size_t root_j = find(j);
                owner[std::max(root_i, root_j)] = std::min(root_i, root_j);
                any = true;
            }
        }
    }

    if (!any) {
        positions_ = std::move(positions);
        values_ = std::move(values);
        return;
    }

    // Resolve chains so every sample points at its earliest representative.
    for (std::size_t i = 0; i < n; ++i) owner[i] = find(i);
    std::vector<double> sum(n, 0.0);
    std::vector<std::size_t> count(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        sum[owner[i]] += values[i];
        ++count[owner[i]];
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (owner[i] != i) {
            ++merged_;
            continue;
        }
        positions_.push_back(positions[i]);
        values_.push_back(sum[i] / static_cast<double>(count[i]));
    }
}

}  // namespace sphrs
