#include "sphrs/geometry.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sphrs {

SphereVec SphereVec::normalized(double x, double y, double z) {
    const double n = std::sqrt(x * x + y * y + z * z);
    if (!(n > 0.0) || !std::isfinite(n)) {
        throw std::invalid_argument("SphereVec: cannot normalize zero or non-finite vector");
    }
    return SphereVec(x / n, y / n, z / n);
}

RotationMatrix RotationMatrix::operator*(const RotationMatrix& rhs) const noexcept {
    RotationMatrix out;
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
            double acc = 0.0;
            for (int k = 0; k < 3; ++k) acc += (*this)(r, k) * rhs(k, c);
            out.m[static_cast<std::size_t>(r * 3 + c)] = acc;
        }
    }
    return out;
}

RotationMatrix RotationMatrix::transposed() const noexcept {
    return {{m[0], m[3], m[6], m[1], m[4], m[7], m[2], m[5], m[8]}};
}

double RotationMatrix::determinant() const noexcept {
    return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
           m[2] * (m[3] * m[7] - m[4] * m[6]);
}

SphericalCoord to_spherical(const SphereVec& s) noexcept {
    const double rho = std::hypot(s.x(), s.y());
    // atan2 form of arccos(z); well conditioned near the poles.
    const double theta = std::atan2(rho, s.z());
    if (rho == 0.0) return {theta, 0.0};
    double phi = std::atan2(s.y(), s.x());
    if (phi <= -std::numbers::pi) phi = std::numbers::pi;
    return {theta, phi};
}

SphereVec from_spherical(const SphericalCoord& c) {
    constexpr double pi = std::numbers::pi;
    if (!(c.theta >= 0.0 && c.theta <= pi) || !(c.phi > -pi && c.phi <= pi)) {
        throw std::domain_error("from_spherical: coordinate out of range");
    }
    const double st = std::sin(c.theta);
    return SphereVec::normalized(st * std::cos(c.phi), st * std::sin(c.phi), std::cos(c.theta));
}

RotationMatrix rotation_y(double angle) noexcept {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return {{c, 0, s, 0, 1, 0, -s, 0, c}};
}

RotationMatrix rotation_z(double angle) noexcept {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return {{c, -s, 0, s, c, 0, 0, 0, 1}};
}

RotationMatrix alignment_rotation(const SphereVec& center) noexcept {
    // With sin(theta) = rho, cos(theta) = z, cos(phi) = x / rho, sin(phi) = y / rho:
    //   R_z(-phi)         = [[cp, sp, 0], [-sp, cp, 0], [0, 0, 1]]
    //   R_y(pi/2 - theta) = [[rho, 0, z], [0, 1, 0], [-z, 0, rho]]
    // Evaluated from the components directly instead of through trig.
    const double rho = std::hypot(center.x(), center.y());
    const double z = center.z();
    double cp = 1.0;
    double sp = 0.0;
    if (rho > 0.0) {
        cp = center.x() / rho;
        sp = center.y() / rho;
    }
    const RotationMatrix rz{{cp, sp, 0, -sp, cp, 0, 0, 0, 1}};
    const RotationMatrix ry{{rho, 0, z, 0, 1, 0, -z, 0, rho}};
    return ry * rz;
}

SphereVec rotate(const RotationMatrix& r, const SphereVec& s) noexcept {
    const auto v = r.apply(s.x(), s.y(), s.z());
    return SphereVec::normalized(v[0], v[1], v[2]);
}

double great_circle_distance(const SphereVec& a, const SphereVec& b) noexcept {
    const double cx = a.y() * b.z() - a.z() * b.y();
    const double cy = a.z() * b.x() - a.x() * b.z();
    const double cz = a.x() * b.y() - a.y() * b.x();
    return std::atan2(std::sqrt(cx * cx + cy * cy + cz * cz), a.dot(b));
}

}  // namespace sphrs
