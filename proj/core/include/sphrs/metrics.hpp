#pragma once

#include <memory>
#include <vector>

#include "sphrs/image.hpp"
#include "sphrs/projections.hpp"

namespace sphrs {

/// Reported in place of +infinity for identical images.
inline constexpr double kIdenticalPsnr = 999.0;

/// Per-pixel spherical area weights of a projection format.
struct WeightMap {
    ProjectionKind kind{ProjectionKind::ERP};
    int width{0};
    int height{0};
    std::vector<double> weights;
};

/// ERP rows: cos((j + 0.5 - H/2) pi / H). CMP faces: (1 + a^2 + b^2)^(-3/2)
/// at the face-local pixel center (a, b). Cached per format.
std::shared_ptr<const WeightMap> weight_map(const ProjectionFormat& fmt);

/// 10 log10(v_max^2 / MSE); kIdenticalPsnr when MSE is zero.
/// Throws ConfigError on dimension or v_max mismatch.
double psnr(const ImageBuffer& a, const ImageBuffer& b);

/// PSNR with the error of each pixel weighted by `weights` (same size).
double weighted_psnr(const ImageBuffer& a, const ImageBuffer& b, const std::vector<double>& weights);

/// Weighted-to-spherically-uniform PSNR; images must match `fmt`.
double ws_psnr(const ImageBuffer& a, const ImageBuffer& b, const ProjectionFormat& fmt);

/// Mean SSIM over the valid region of an 11x11 Gaussian window (sigma 1.5),
/// K1 = 0.01, K2 = 0.03, dynamic range v_max, population covariances.
/// Throws ConfigError if either dimension is below 11.
double ssim(const ImageBuffer& a, const ImageBuffer& b);

}  // namespace sphrs
