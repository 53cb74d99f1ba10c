#pragma once

#include <array>

namespace sphrs {

/// Unit 3-vector on the sphere. Only constructible through normalization,
/// so every instance satisfies |s| = 1 up to rounding.
class SphereVec {
public:
    /// Normalizes (x, y, z). Throws std::invalid_argument for a zero or
    /// non-finite vector.
    static SphereVec normalized(double x, double y, double z);

    double x() const noexcept { return x_; }
    double y() const noexcept { return y_; }
    double z() const noexcept { return z_; }

    double dot(const SphereVec& o) const noexcept { return x_ * o.x_ + y_ * o.y_ + z_ * o.z_; }

    friend bool operator==(const SphereVec&, const SphereVec&) = default;

private:
    SphereVec(double x, double y, double z) noexcept : x_(x), y_(y), z_(z) {}
    double x_{1.0};
    double y_{0.0};
    double z_{0.0};
};

/// Polar angle theta from +z in [0, pi], azimuth phi from +x toward +y in (-pi, pi].
struct SphericalCoord {
    double theta{0.0};
    double phi{0.0};
};

/// Row-major 3x3 rotation.
struct RotationMatrix {
    std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

    double operator()(int r, int c) const noexcept { return m[static_cast<std::size_t>(r * 3 + c)]; }

    static RotationMatrix identity() noexcept { return {}; }
    RotationMatrix operator*(const RotationMatrix& rhs) const noexcept;
    RotationMatrix transposed() const noexcept;
    double determinant() const noexcept;

    /// Raw product without re-normalization; used for non-unit directions.
    std::array<double, 3> apply(double x, double y, double z) const noexcept {
        return {m[0] * x + m[1] * y + m[2] * z, m[3] * x + m[4] * y + m[5] * z,
                m[6] * x + m[7] * y + m[8] * z};
    }
};

/// theta = atan2(hypot(x, y), z), phi = atan2(y, x); phi = 0 at the poles.
SphericalCoord to_spherical(const SphereVec& s) noexcept;

/// Throws std::domain_error if c is outside theta in [0, pi], phi in (-pi, pi].
SphereVec from_spherical(const SphericalCoord& c);

RotationMatrix rotation_y(double angle) noexcept;
RotationMatrix rotation_z(double angle) noexcept;

/// R_y(pi/2 - theta) * R_z(-phi) for the spherical coordinates of `center`.
/// Maps `center` onto the optical axis (1, 0, 0).
RotationMatrix alignment_rotation(const SphereVec& center) noexcept;

/// R * s, re-normalized.
SphereVec rotate(const RotationMatrix& r, const SphereVec& s) noexcept;

/// atan2(|a x b|, a . b), in [0, pi].
double great_circle_distance(const SphereVec& a, const SphereVec& b) noexcept;

}  // namespace sphrs
