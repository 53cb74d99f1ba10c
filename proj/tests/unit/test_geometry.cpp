#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "sphrs/geometry.hpp"
#include "test_seed.hpp"

namespace {

using namespace sphrs;
constexpr double kPi = std::numbers::pi;

SphereVec random_unit(std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    for (;;) {
        const double x = n(rng), y = n(rng), z = n(rng);
        if (x * x + y * y + z * z > 1e-8) return SphereVec::normalized(x, y, z);
    }
}

TEST(SphereVec, NormalizesInput) {
    const auto s = SphereVec::normalized(3.0, 0.0, 4.0);
    EXPECT_DOUBLE_EQ(s.x(), 0.6);
    EXPECT_DOUBLE_EQ(s.z(), 0.8);
}

TEST(SphereVec, RejectsZeroAndNonFinite) {
    EXPECT_THROW(SphereVec::normalized(0, 0, 0), std::invalid_argument);
    EXPECT_THROW(SphereVec::normalized(NAN, 1, 0), std::invalid_argument);
    EXPECT_THROW(SphereVec::normalized(INFINITY, 1, 0), std::invalid_argument);
}

TEST(Spherical, AxisConvention) {
    const auto px = to_spherical(SphereVec::normalized(1, 0, 0));
    EXPECT_NEAR(px.theta, kPi / 2, 1e-15);
    EXPECT_NEAR(px.phi, 0.0, 1e-15);
    const auto py = to_spherical(SphereVec::normalized(0, 1, 0));
    EXPECT_NEAR(py.phi, kPi / 2, 1e-15);
    const auto nz = to_spherical(SphereVec::normalized(0, 0, -1));
    EXPECT_NEAR(nz.theta, kPi, 1e-15);
    EXPECT_EQ(nz.phi, 0.0);
    const auto nx = to_spherical(SphereVec::normalized(-1, 0, 0));
    EXPECT_EQ(nx.phi, kPi);
}

TEST(Spherical, RoundTripRandom) {
    auto rng = sphrs::testing::make_rng(1);
    for (int i = 0; i < 2000; ++i) {
        const auto s = random_unit(rng);
        const auto back = from_spherical(to_spherical(s));
        EXPECT_NEAR(back.x(), s.x(), 1e-14);
        EXPECT_NEAR(back.y(), s.y(), 1e-14);
        EXPECT_NEAR(back.z(), s.z(), 1e-14);
    }
}

TEST(Spherical, FromSphericalRejectsOutOfRange) {
    EXPECT_THROW(from_spherical({-0.1, 0.0}), std::domain_error);
    EXPECT_THROW(from_spherical({kPi + 0.1, 0.0}), std::domain_error);
    EXPECT_THROW(from_spherical({1.0, -kPi}), std::domain_error);
    EXPECT_NO_THROW(from_spherical({1.0, kPi}));
}

TEST(Rotation, AlignmentMapsCenterToOpticalAxis) {
    auto rng = sphrs::testing::make_rng(2);
    for (int i = 0; i < 10000; ++i) {
        const auto c = random_unit(rng);
        const auto r = alignment_rotation(c);
        const auto a = r.apply(c.x(), c.y(), c.z());
        ASSERT_NEAR(a[0], 1.0, 1e-10);
        ASSERT_NEAR(a[1], 0.0, 1e-10);
        ASSERT_NEAR(a[2], 0.0, 1e-10);
    }
}

TEST(Rotation, AlignmentAtPolesAndAxes) {
    for (const auto& c : {SphereVec::normalized(0, 0, 1), SphereVec::normalized(0, 0, -1),
                          SphereVec::normalized(-1, 0, 0), SphereVec::normalized(0, -1, 0)}) {
        const auto a = alignment_rotation(c).apply(c.x(), c.y(), c.z());
        EXPECT_NEAR(a[0], 1.0, 1e-15);
        EXPECT_NEAR(a[1], 0.0, 1e-15);
        EXPECT_NEAR(a[2], 0.0, 1e-15);
    }
}

TEST(Rotation, IsProperOrthogonal) {
    auto rng = sphrs::testing::make_rng(3);
    for (int i = 0; i < 500; ++i) {
        const auto r = alignment_rotation(random_unit(rng));
        EXPECT_NEAR(r.determinant(), 1.0, 1e-13);
        const auto p = r * r.transposed();
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) EXPECT_NEAR(p(a, b), a == b ? 1.0 : 0.0, 1e-13);
    }
}

TEST(Rotation, MatchesComposedElementaryRotations) {
    auto rng = sphrs::testing::make_rng(4);
    for (int i = 0; i < 200; ++i) {
        const auto c = random_unit(rng);
        const auto sc = to_spherical(c);
        const auto expected = rotation_y(kPi / 2 - sc.theta) * rotation_z(-sc.phi);
        const auto got = alignment_rotation(c);
        for (std::size_t k = 0; k < 9; ++k) EXPECT_NEAR(got.m[k], expected.m[k], 1e-13);
    }
}

TEST(Rotation, PreservesGreatCircleDistance) {
    auto rng = sphrs::testing::make_rng(5);
    for (int i = 0; i < 1000; ++i) {
        const auto r = alignment_rotation(random_unit(rng));
        const auto a = random_unit(rng);
        const auto b = random_unit(rng);
        EXPECT_NEAR(great_circle_distance(rotate(r, a), rotate(r, b)), great_circle_distance(a, b), 1e-12);
    }
}

TEST(GreatCircle, KnownValues) {
    const auto x = SphereVec::normalized(1, 0, 0);
    const auto y = SphereVec::normalized(0, 1, 0);
    const auto mx = SphereVec::normalized(-1, 0, 0);
    EXPECT_NEAR(great_circle_distance(x, y), kPi / 2, 1e-15);
    EXPECT_NEAR(great_circle_distance(x, mx), kPi, 1e-15);
    EXPECT_EQ(great_circle_distance(x, x), 0.0);
    // Small angles stay accurate where acos would lose precision.
    const auto e = SphereVec::normalized(1, 1e-9, 0);
    EXPECT_NEAR(great_circle_distance(x, e), 1e-9, 1e-22);
}

}  // namespace
