#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "sphrs/errors.hpp"
#include "sphrs/metrics.hpp"
#include "test_seed.hpp"

namespace {

using namespace sphrs;

ImageBuffer pattern(int w, int h, double v_max, double (*f)(int, int)) {
    ImageBuffer img(w, h, v_max);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) img.set(x, y, f(x, y));
    return img;
}

double ramp(int x, int y) { return (x * 7 + y * 13) % 256; }
double ramp_perturbed(int x, int y) { return std::clamp(ramp(x, y) + (x * x + 3 * y) % 17 - 8, 0.0, 255.0); }
double quadratic(int x, int y) { return (x * x * 3 + y * y * 5) % 256; }

ImageBuffer random_image(const ProjectionFormat& f, std::uint64_t salt) {
    auto rng = sphrs::testing::make_rng(salt);
    std::uniform_int_distribution<int> d(0, 255);
    ImageBuffer img(f.width(), f.height());
    for (int y = 0; y < f.height(); ++y)
        for (int x = 0; x < f.width(); ++x) img.set(x, y, d(rng));
    return img;
}

TEST(Psnr, UniformDifferenceOfOne) {
    const auto f = ProjectionFormat::erp(64, 32);
    const ImageBuffer a(64, 32, 255.0, 100.0);
    const ImageBuffer b(64, 32, 255.0, 101.0);
    EXPECT_NEAR(psnr(a, b), 48.1308, 1e-3);
    EXPECT_NEAR(ws_psnr(a, b, f), 48.1308, 1e-3);
}

TEST(Psnr, UniformDifferenceOfOneCmp) {
    const auto f = ProjectionFormat::cmp(16);
    const ImageBuffer a(48, 32, 255.0, 7.0);
    const ImageBuffer b(48, 32, 255.0, 8.0);
    EXPECT_NEAR(ws_psnr(a, b, f), 20.0 * std::log10(255.0), 1e-12);
}

TEST(Psnr, IdenticalGivesSentinel) {
    const auto f = ProjectionFormat::erp(32, 16);
    const auto a = random_image(f, 1);
    EXPECT_EQ(psnr(a, a), kIdenticalPsnr);
    EXPECT_EQ(ws_psnr(a, a, f), kIdenticalPsnr);
}

TEST(Psnr, ZeroVersusFullScaleIsZeroDecibels) {
    const ImageBuffer a(16, 8, 255.0, 0.0);
    const ImageBuffer b(16, 8, 255.0, 255.0);
    EXPECT_EQ(psnr(a, b), 0.0);
    EXPECT_NEAR(ws_psnr(a, b, ProjectionFormat::erp(16, 8)), 0.0, 1e-12);
}

TEST(Psnr, RejectsMismatch) {
    const ImageBuffer a(16, 8);
    EXPECT_THROW(psnr(a, ImageBuffer(8, 8)), ConfigError);
    EXPECT_THROW(psnr(a, ImageBuffer(16, 8, 65535.0)), ConfigError);
    EXPECT_THROW(ws_psnr(a, a, ProjectionFormat::erp(32, 16)), ConfigError);
    EXPECT_THROW(ssim(a, ImageBuffer(16, 12)), ConfigError);
}

TEST(WsPsnr, PoleErrorCountsLessThanEquatorError) {
    const auto f = ProjectionFormat::erp(64, 32);
    const ImageBuffer ref(64, 32, 255.0, 50.0);
    ImageBuffer top = ref;
    ImageBuffer equator = ref;
    for (int x = 0; x < 64; ++x) {
        top.set(x, 0, 60.0);
        equator.set(x, 15, 60.0);
    }
    EXPECT_GT(ws_psnr(ref, top, f), ws_psnr(ref, equator, f));
    EXPECT_DOUBLE_EQ(psnr(ref, top), psnr(ref, equator));
}

TEST(WsPsnr, EqualsPsnrForUniformWeights) {
    const auto f = ProjectionFormat::erp(32, 16);
    const auto a = random_image(f, 2);
    const auto b = random_image(f, 3);
    EXPECT_NEAR(weighted_psnr(a, b, std::vector<double>(a.size(), 0.37)), psnr(a, b), 1e-12);
}

TEST(WsPsnr, Symmetric) {
    for (const auto& f : {ProjectionFormat::erp(32, 16), ProjectionFormat::cmp(8)}) {
        const auto a = random_image(f, 4);
        const auto b = random_image(f, 5);
        EXPECT_EQ(psnr(a, b), psnr(b, a));
        EXPECT_EQ(ws_psnr(a, b, f), ws_psnr(b, a, f));
        EXPECT_EQ(ssim(a, b), ssim(b, a));
    }
}

TEST(WeightMap, ErpDecreasesTowardPoles) {
    const auto map = weight_map(ProjectionFormat::erp(64, 32));
    ASSERT_EQ(map->weights.size(), 64u * 32u);
    for (int y = 0; y < 16; ++y) {
        const double w = map->weights[static_cast<std::size_t>(y) * 64];
        const double below = map->weights[static_cast<std::size_t>(y + 1) * 64];
        EXPECT_GT(w, 0.0);
        if (y < 15) EXPECT_LT(w, below);
        EXPECT_DOUBLE_EQ(w, map->weights[static_cast<std::size_t>(31 - y) * 64]) << "north/south symmetry";
    }
}

TEST(WeightMap, CmpPeaksAtFaceCenter) {
    const int f = 16;
    const auto map = weight_map(ProjectionFormat::cmp(f));
    const auto& w = map->weights;
    for (int face = 0; face < 6; ++face) {
        const int ox = (face % 3) * f;
        const int oy = (face / 3) * f;
        double peak = 0.0;
        for (int y = 0; y < f; ++y)
            for (int x = 0; x < f; ++x) {
                const double v = w[static_cast<std::size_t>(oy + y) * 3 * f + ox + x];
                EXPECT_GT(v, 0.0);
                peak = std::max(peak, v);
            }
        const double center = w[static_cast<std::size_t>(oy + f / 2) * 3 * f + ox + f / 2];
        EXPECT_DOUBLE_EQ(center, peak);
    }
}

TEST(WeightMap, CmpWeightsApproximateSolidAngle) {
    // Sum of weights times the pixel area (2/f)^2 tends to the solid angle of a face.
    const int f = 256;
    const auto map = weight_map(ProjectionFormat::cmp(f));
    double sum = 0.0;
    for (double v : map->weights) sum += v;
    const double area = 2.0 / f * 2.0 / f;
    EXPECT_NEAR(sum * area, 4.0 * std::numbers::pi, 1e-4);
}

TEST(WeightMap, CachedPerFormat) {
    const auto a = weight_map(ProjectionFormat::erp(32, 16));
    const auto b = weight_map(ProjectionFormat::erp(32, 16));
    EXPECT_EQ(a.get(), b.get());
    EXPECT_NE(a.get(), weight_map(ProjectionFormat::erp(64, 32)).get());
}

TEST(Ssim, IdenticalIsExactlyOne) {
    const auto a = random_image(ProjectionFormat::erp(32, 16), 6);
    EXPECT_EQ(ssim(a, a), 1.0);
    const ImageBuffer c(20, 20, 255.0, 77.0);
    EXPECT_EQ(ssim(c, c), 1.0);
}

TEST(Ssim, MatchesReferenceValues) {
    // Gaussian-weighted SSIM (sigma 1.5, population covariance, data range 255),
    // averaged over the valid region, from an independent implementation.
    const auto a = pattern(24, 20, 255.0, ramp);
    EXPECT_NEAR(ssim(a, pattern(24, 20, 255.0, ramp_perturbed)), 0.9872717283813093, 1e-12);
    EXPECT_NEAR(ssim(a, pattern(24, 20, 255.0, quadratic)), 0.010907027540676571, 1e-12);
}

TEST(Ssim, ScalesWithDynamicRange) {
    ImageBuffer a(24, 20, 65535.0);
    ImageBuffer b(24, 20, 65535.0);
    for (int y = 0; y < 20; ++y)
        for (int x = 0; x < 24; ++x) {
            a.set(x, y, 257.0 * ramp(x, y));
            b.set(x, y, 257.0 * ramp_perturbed(x, y));
        }
    EXPECT_NEAR(ssim(a, b), 0.987271728381309, 1e-12);
}

TEST(Ssim, NegativeImageScoresLow) {
    const auto f = ProjectionFormat::erp(64, 32);
    const auto a = random_image(f, 7);
    ImageBuffer neg(64, 32);
    for (int y = 0; y < 32; ++y)
        for (int x = 0; x < 64; ++x) neg.set(x, y, 255.0 - a.at(x, y));
    EXPECT_LT(ssim(a, neg), 0.1);
}

TEST(Ssim, RejectsSmallImages) {
    const ImageBuffer a(10, 40);
    EXPECT_THROW(ssim(a, a), ConfigError);
}

}  // namespace
