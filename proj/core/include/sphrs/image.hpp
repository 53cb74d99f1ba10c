#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sphrs {

/// Row-major single-channel raster with values in [0, v_max].
class ImageBuffer {
public:
    ImageBuffer() = default;
    /// Filled with `fill`. Throws ConfigError for non-positive sizes or v_max.
    ImageBuffer(int width, int height, double v_max = 255.0, double fill = 0.0);
    /// Takes ownership of `data`; throws ConfigError if the size does not match
    /// or a value is non-finite or outside [0, v_max].
    ImageBuffer(int width, int height, double v_max, std::vector<double> data);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    double v_max() const noexcept { return v_max_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double at(int x, int y) const noexcept { return data_[index(x, y)]; }
    /// Stores `value` clamped to [0, v_max].
    void set(int x, int y, double value) noexcept;

    std::span<const double> data() const noexcept { return data_; }

    friend bool operator==(const ImageBuffer&, const ImageBuffer&) = default;

private:
    std::size_t index(int x, int y) const noexcept {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
    }

    int width_{0};
    int height_{0};
    double v_max_{255.0};
    std::vector<double> data_;
};

/// Clamps to [0, v_max]; NaN maps to 0.
double clamp_sample(double value, double v_max) noexcept;

}  // namespace sphrs
