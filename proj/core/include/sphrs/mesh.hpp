#pragma once

#include <span>
#include <vector>

#include "sphrs/projections.hpp"

namespace sphrs {

/// Scattered sample positions with scalar values. Positions closer than
/// `kDuplicateTolerance` in both coordinates are merged at construction;
/// the merged sample keeps the slot of its first occurrence and the mean value.
class MeshSamples {
public:
    static constexpr double kDuplicateTolerance = 1e-12;

    MeshSamples() = default;
    /// Throws ConfigError on length mismatch or non-finite input.
    MeshSamples(std::vector<PixelCoord> positions, std::vector<double> values);

    std::span<const PixelCoord> positions() const noexcept { return positions_; }
    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return positions_.size(); }
    bool empty() const noexcept { return positions_.empty(); }
    /// Number of input samples folded into earlier ones.
    std::size_t merged_duplicates() const noexcept { return merged_; }

private:
    std::vector<PixelCoord> positions_;
    std::vector<double> values_;
    std::size_t merged_{0};
};

}  // namespace sphrs
