#include "sphrs/projections.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <string>

#include "sphrs/errors.hpp"

namespace sphrs {

namespace {

constexpr double kPi = std::numbers::pi;

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

// Faces by packed slot, row-major over the 3x2 canvas.
constexpr std::array<FaceId, 6> kSlotFaces{FaceId::PX, FaceId::NX, FaceId::PY,
                                           FaceId::NY, FaceId::PZ, FaceId::NZ};

std::array<double, 3> erp_direction(double u, double v, const ProjectionFormat& fmt) noexcept {
    const double lon = (u / fmt.width() - 0.5) * 2.0 * kPi;
    const double lat = (0.5 - v / fmt.height()) * kPi;
    const double theta = 0.5 * kPi - lat;
    const double st = std::sin(theta);
    return {st * std::cos(lon), st * std::sin(lon), std::cos(theta)};
}

FaceId cmp_face_at(double u, double v, int face) {
    const int col = std::clamp(static_cast<int>(std::floor(u / face)), 0, 2);
    const int row = std::clamp(static_cast<int>(std::floor(v / face)), 0, 1);
    return face_at_slot(col, row);
}

}  // namespace

std::string_view to_string(ProjectionKind kind) noexcept {
    return kind == ProjectionKind::ERP ? "erp" : "cmp";
}

ProjectionKind parse_projection_kind(std::string_view name) {
    const std::string s = lower(name);
    if (s == "erp") return ProjectionKind::ERP;
    if (s == "cmp") return ProjectionKind::CMP;
    throw ConfigError("unknown projection format '" + std::string(name) + "'");
}

ProjectionFormat ProjectionFormat::erp(int width, int height) {
    if (height <= 0 || width != 2 * height) {
        throw ConfigError("ERP format requires width = 2 * height > 0, got " + std::to_string(width) + "x" +
                          std::to_string(height));
    }
    return {ProjectionKind::ERP, width, height};
}

ProjectionFormat ProjectionFormat::cmp(int face_size) {
    if (face_size <= 0) throw ConfigError("CMP face size must be positive");
    return {ProjectionKind::CMP, 3 * face_size, 2 * face_size};
}

ProjectionFormat ProjectionFormat::make(ProjectionKind kind, int width, int height) {
    if (kind == ProjectionKind::ERP) return erp(width, height);
    if (width <= 0 || width % 3 != 0 || height % 2 != 0 || width / 3 != height / 2) {
        throw ConfigError("CMP format requires width / 3 = height / 2, got " + std::to_string(width) + "x" +
                          std::to_string(height));
    }
    return cmp(width / 3);
}

std::array<int, 2> face_slot(FaceId face) noexcept {
    const int idx = static_cast<int>(face);
    return {idx % 3, idx / 3};
}

FaceId face_at_slot(int column, int row) {
    if (column < 0 || column > 2 || row < 0 || row > 1) throw ConfigError("face slot out of range");
    return kSlotFaces[static_cast<std::size_t>(row * 3 + column)];
}

FaceId face_of(const SphereVec& s) noexcept {
    const double ax = std::abs(s.x());
    const double ay = std::abs(s.y());
    const double az = std::abs(s.z());
    if (ax >= ay && ax >= az) return s.x() >= 0.0 ? FaceId::PX : FaceId::NX;
    if (ay >= az) return s.y() >= 0.0 ? FaceId::PY : FaceId::NY;
    return s.z() >= 0.0 ? FaceId::PZ : FaceId::NZ;
}

std::array<double, 3> face_direction(FaceId face, double a, double b) noexcept {
    switch (face) {
        case FaceId::PX: return {1.0, a, -b};
        case FaceId::NX: return {-1.0, -a, -b};
        case FaceId::PY: return {-a, 1.0, -b};
        case FaceId::NY: return {a, -1.0, -b};
        case FaceId::PZ: return {b, a, 1.0};
        case FaceId::NZ: return {-b, a, -1.0};
    }
    return {1.0, a, -b};
}

std::array<double, 2> face_local(FaceId face, const SphereVec& s) noexcept {
    const double x = s.x();
    const double y = s.y();
    const double z = s.z();
    switch (face) {
        case FaceId::PX: return {y / x, -z / x};
        case FaceId::NX: return {y / x, z / x};
        case FaceId::PY: return {-x / y, -z / y};
        case FaceId::NY: return {-x / y, z / y};
        case FaceId::PZ: return {y / z, x / z};
        case FaceId::NZ: return {-y / z, x / z};
    }
    return {0.0, 0.0};
}

SphereVec erp_to_sphere(PixelCoord p, const ProjectionFormat& fmt) {
    if (fmt.kind() != ProjectionKind::ERP) throw ConfigError("erp_to_sphere: format is not ERP");
    if (!(p.u >= 0.0 && p.u <= fmt.width() && p.v >= 0.0 && p.v <= fmt.height())) {
        throw CoordinateDomainError("erp_to_sphere: coordinate outside the ERP canvas");
    }
    const auto d = erp_direction(p.u, p.v, fmt);
    return SphereVec::normalized(d[0], d[1], d[2]);
}

PixelCoord sphere_to_erp(const SphereVec& s, const ProjectionFormat& fmt) {
    if (fmt.kind() != ProjectionKind::ERP) throw ConfigError("sphere_to_erp: format is not ERP");
    const SphericalCoord c = to_spherical(s);
    double u = (c.phi / (2.0 * kPi) + 0.5) * fmt.width();
    if (u >= fmt.width()) u -= fmt.width();
    if (u < 0.0) u = 0.0;
    const double v = c.theta / kPi * fmt.height();
    return {u, v};
}

SphereVec cmp_to_sphere(PixelCoord p, const ProjectionFormat& fmt) {
    if (fmt.kind() != ProjectionKind::CMP) throw ConfigError("cmp_to_sphere: format is not CMP");
    if (!(p.u >= 0.0 && p.u <= fmt.width() && p.v >= 0.0 && p.v <= fmt.height())) {
        throw CoordinateDomainError("cmp_to_sphere: coordinate outside the CMP canvas");
    }
    const int face = fmt.face_size();
    const FaceId id = cmp_face_at(p.u, p.v, face);
    const auto slot = face_slot(id);
    const double a = 2.0 * (p.u - slot[0] * face) / face - 1.0;
    const double b = 2.0 * (p.v - slot[1] * face) / face - 1.0;
    const auto d = face_direction(id, a, b);
    return SphereVec::normalized(d[0], d[1], d[2]);
}

PixelCoord sphere_to_cmp(const SphereVec& s, const ProjectionFormat& fmt) {
    if (fmt.kind() != ProjectionKind::CMP) throw ConfigError("sphere_to_cmp: format is not CMP");
    const int face = fmt.face_size();
    const FaceId id = face_of(s);
    const auto ab = face_local(id, s);
    const auto slot = face_slot(id);
    const double a = std::clamp(ab[0], -1.0, 1.0);
    const double b = std::clamp(ab[1], -1.0, 1.0);
    return {slot[0] * face + (a + 1.0) * 0.5 * face, slot[1] * face + (b + 1.0) * 0.5 * face};
}

SphereVec to_sphere(PixelCoord p, const ProjectionFormat& fmt) {
    switch (fmt.kind()) {
        case ProjectionKind::ERP: return erp_to_sphere(p, fmt);
        case ProjectionKind::CMP: return cmp_to_sphere(p, fmt);
    }
    throw ConfigError("to_sphere: unsupported format");
}

PixelCoord from_sphere(const SphereVec& s, const ProjectionFormat& fmt) {
    switch (fmt.kind()) {
        case ProjectionKind::ERP: return sphere_to_erp(s, fmt);
        case ProjectionKind::CMP: return sphere_to_cmp(s, fmt);
    }
    throw ConfigError("from_sphere: unsupported format");
}

std::array<double, 3> extended_direction(PixelCoord p, PixelCoord anchor, const ProjectionFormat& fmt) {
    if (fmt.kind() == ProjectionKind::ERP) return erp_direction(p.u, p.v, fmt);
    const int face = fmt.face_size();
    const FaceId id = cmp_face_at(anchor.u, anchor.v, face);
    const auto slot = face_slot(id);
    const double a = 2.0 * (p.u - slot[0] * face) / face - 1.0;
    const double b = 2.0 * (p.v - slot[1] * face) / face - 1.0;
    return face_direction(id, a, b);
}

PixelCoord perspective_project(const SphereVec& s, double front_epsilon) {
    if (!(s.x() > front_epsilon)) {
        throw BehindCameraError("perspective_project: point is not in front of the camera");
    }
    return {s.y() / s.x(), -s.z() / s.x()};
}

PixelCoord project_source_to_target(PixelCoord p, const ProjectionFormat& src, const ProjectionFormat& tar) {
    return from_sphere(to_sphere(p, src), tar);
}

PixelCoord project_target_to_source(PixelCoord p, const ProjectionFormat& src, const ProjectionFormat& tar) {
    return from_sphere(to_sphere(p, tar), src);
}

int cmp_face_size_for(int erp_width, int erp_height) noexcept {
    // Intermediate CMP resolutions of the published reference evaluation. They
    // do not follow a single closed-form rule, so they are pinned explicitly.
    if (erp_width == 4096 && erp_height == 2048) return 1152;
    if (erp_width == 2048 && erp_height == 1024) return 608;
    const double equal_samples = std::sqrt(static_cast<double>(erp_width) * erp_height / 6.0);
    return std::max(16, static_cast<int>(std::lround(equal_samples / 16.0)) * 16);
}

}  // namespace sphrs
