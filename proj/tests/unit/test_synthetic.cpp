#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sphrs/errors.hpp"
#include "sphrs/synthetic.hpp"

namespace {

using namespace sphrs;

std::size_t idx(int l, int m) { return static_cast<std::size_t>(l * (l + 1) / 2 + m); }

TEST(Legendre, MatchesSphericalHarmonicReference) {
    // Y_lm(theta = 0.7, phi = 0) with the Condon-Shortley phase.
    const auto p = normalized_legendre(20, 0.7);
    EXPECT_NEAR(p[idx(0, 0)], 0.28209479177387814, 1e-14);
    EXPECT_NEAR(p[idx(1, 0)], 0.3737038139165246, 1e-14);
    EXPECT_NEAR(p[idx(1, 1)], -0.22257344192657688, 1e-14);
    EXPECT_NEAR(p[idx(3, 2)], 0.324400748475796, 1e-14);
    EXPECT_NEAR(p[idx(7, 5)], -0.26890799343163063, 1e-13);
    EXPECT_NEAR(p[idx(12, 0)], -0.039098394539986536, 1e-13);
    EXPECT_NEAR(p[idx(12, 12)], 0.0028934283189623274, 1e-14);
    EXPECT_NEAR(p[idx(20, 3)], 0.3815460569109764, 1e-12);
}

TEST(Legendre, OrthonormalOnTheSphere) {
    const int band = 10;
    const int n = 4000;
    std::vector<double> gram(idx(band, band) + 1);
    std::vector<std::vector<double>> samples;
    for (int k = 0; k < n; ++k) samples.push_back(normalized_legendre(band, (k + 0.5) * std::numbers::pi / n));
    for (int m = 0; m <= band; ++m) {
        for (int l1 = m; l1 <= band; ++l1) {
            for (int l2 = l1; l2 <= band; ++l2) {
                double acc = 0.0;
                for (int k = 0; k < n; ++k) {
                    const double th = (k + 0.5) * std::numbers::pi / n;
                    acc += samples[k][idx(l1, m)] * samples[k][idx(l2, m)] * std::sin(th);
                }
                acc *= 2.0 * std::numbers::pi * std::numbers::pi / n;
                EXPECT_NEAR(acc, l1 == l2 ? 1.0 : 0.0, 1e-6) << "l1=" << l1 << " l2=" << l2 << " m=" << m;
            }
        }
    }
}

TEST(HarmonicField, ErpRenderIsAffineInEvaluate) {
    HarmonicSpec spec;
    spec.band_limit = 12;
    spec.seed = 3;
    spec.quantize = false;
    const HarmonicField field(spec);
    const auto fmt = ProjectionFormat::erp(48, 24);
    const ImageBuffer img = field.render(fmt);
    auto eval_at = [&](int x, int y) {
        const auto c = to_spherical(to_sphere({x + 0.5, y + 0.5}, fmt));
        return field.evaluate(c.theta, c.phi);
    };
    const double e0 = eval_at(3, 4);
    const double e1 = eval_at(30, 17);
    const double scale = (img.at(30, 17) - img.at(3, 4)) / (e1 - e0);
    const double offset = img.at(3, 4) - scale * e0;
    for (int y = 0; y < 24; ++y)
        for (int x = 0; x < 48; ++x) EXPECT_NEAR(img.at(x, y), offset + scale * eval_at(x, y), 1e-9);
}

TEST(HarmonicField, RangeAndQuantization) {
    const auto fmt = ProjectionFormat::erp(64, 32);
    const ImageBuffer img = harmonic_image(fmt, 9, 16);
    double lo = 1e9;
    double hi = -1e9;
    for (double v : img.data()) {
        EXPECT_EQ(v, std::round(v));
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    EXPECT_GE(lo, 0.1 * 255 - 1.0);
    EXPECT_LE(hi, 0.9 * 255 + 1.0);
    EXPECT_GT(hi - lo, 0.5 * 255) << "output range nearly filled";
}

TEST(HarmonicField, DeterministicPerSeed) {
    const auto fmt = ProjectionFormat::cmp(8);
    const auto a = harmonic_image(fmt, 5, 8);
    const auto b = harmonic_image(fmt, 5, 8);
    const auto c = harmonic_image(fmt, 6, 8);
    EXPECT_TRUE(std::ranges::equal(a.data(), b.data()));
    EXPECT_FALSE(std::ranges::equal(a.data(), c.data()));
}

TEST(HarmonicField, Validates) {
    HarmonicSpec spec;
    spec.band_limit = 0;
    EXPECT_THROW(HarmonicField{spec}, ConfigError);
    spec.band_limit = 4;
    spec.low = 0.9;
    spec.high = 0.1;
    EXPECT_THROW(HarmonicField{spec}, ConfigError);
}

TEST(BoxDownscale, AveragesBlocks) {
    const ImageBuffer img(4, 2, 255.0, std::vector<double>{0, 2, 10, 20, 4, 6, 30, 40});
    const ImageBuffer out = box_downscale(img, 2);
    ASSERT_EQ(out.width(), 2);
    ASSERT_EQ(out.height(), 1);
    EXPECT_EQ(out.at(0, 0), 3.0);
    EXPECT_EQ(out.at(1, 0), 25.0);
    EXPECT_THROW(box_downscale(img, 3), ConfigError);
}

}  // namespace
