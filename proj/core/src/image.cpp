#include "sphrs/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sphrs/errors.hpp"

namespace sphrs {

namespace {

void check_dims(int width, int height, double v_max) {
    if (width <= 0 || height <= 0) {
        throw ConfigError("image dimensions must be positive, got " + std::to_string(width) + "x" +
                          std::to_string(height));
    }
    if (!(v_max > 0.0) || !std::isfinite(v_max)) throw ConfigError("image v_max must be positive");
}

}  // namespace

double clamp_sample(double value, double v_max) noexcept {
    if (!(value > 0.0)) return 0.0;
    return std::min(value, v_max);
}

ImageBuffer::ImageBuffer(int width, int height, double v_max, double fill)
    : width_(width), height_(height), v_max_(v_max) {
    check_dims(width, height, v_max);
    data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), clamp_sample(fill, v_max));
}

ImageBuffer::ImageBuffer(int width, int height, double v_max, std::vector<double> data)
    : width_(width), height_(height), v_max_(v_max), data_(std::move(data)) {
    check_dims(width, height, v_max);
    if (data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
        throw ConfigError("image data length does not match dimensions");
    }
    for (double v : data_) {
        if (!std::isfinite(v) || v < 0.0 || v > v_max) throw ConfigError("image sample outside [0, v_max]");
    }
}

void ImageBuffer::set(int x, int y, double value) noexcept { data_[index(x, y)] = clamp_sample(value, v_max_); }

}  // namespace sphrs
