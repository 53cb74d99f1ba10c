#pragma once

#include <array>
#include <cstdint>
#include <string_view>

#include "sphrs/geometry.hpp"

namespace sphrs {

/// Continuous image-plane position. (0, 0) is the top-left corner of the
/// top-left pixel; pixel centers sit at half-integers.
struct PixelCoord {
    double u{0.0};
    double v{0.0};
    friend bool operator==(const PixelCoord&, const PixelCoord&) = default;
};

enum class ProjectionKind : std::uint8_t { ERP, CMP };

std::string_view to_string(ProjectionKind kind) noexcept;
/// Accepts "erp" / "cmp" (case-insensitive); throws ConfigError otherwise.
ProjectionKind parse_projection_kind(std::string_view name);

/// Projection format with image dimensions. ERP requires width = 2 * height,
/// CMP uses a 3x2 face packing with width = 3 * face, height = 2 * face.
class ProjectionFormat {
public:
    static ProjectionFormat erp(int width, int height);
    static ProjectionFormat cmp(int face_size);
    /// Validating constructor for either kind; throws ConfigError.
    static ProjectionFormat make(ProjectionKind kind, int width, int height);

    ProjectionKind kind() const noexcept { return kind_; }
    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    /// CMP only; 0 for ERP.
    int face_size() const noexcept { return kind_ == ProjectionKind::CMP ? height_ / 2 : 0; }
    std::size_t pixel_count() const noexcept {
        return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
    }

    friend bool operator==(const ProjectionFormat&, const ProjectionFormat&) = default;

private:
    ProjectionFormat(ProjectionKind k, int w, int h) noexcept : kind_(k), width_(w), height_(h) {}
    ProjectionKind kind_;
    int width_;
    int height_;
};

/// Cube faces named by their outward normal.
enum class FaceId : std::uint8_t { PX = 0, NX, PY, NY, PZ, NZ };

inline constexpr std::array<FaceId, 6> kAllFaces{FaceId::PX, FaceId::NX, FaceId::PY,
                                                 FaceId::NY, FaceId::PZ, FaceId::NZ};

/// Packed position of a face in the 3x2 canvas: {column, row}.
/// Top row PX, NX, PY; bottom row NY, PZ, NZ.
std::array<int, 2> face_slot(FaceId face) noexcept;
FaceId face_at_slot(int column, int row);

/// Face with the largest |component|; ties broken PX > NX > PY > NY > PZ > NZ.
FaceId face_of(const SphereVec& s) noexcept;

/// Face-local parameterization, a horizontal and b vertical (downward) in
/// [-1, 1] on the face. Values beyond +-1 continue the face plane.
///
///   PX ( 1,  a, -b)   NX (-1, -a, -b)   PY (-a,  1, -b)
///   NY ( a, -1, -b)   PZ ( b,  a,  1)   NZ (-b,  a, -1)
std::array<double, 3> face_direction(FaceId face, double a, double b) noexcept;

/// Inverse of face_direction for a direction in front of `face`
/// (positive component along the face normal). Returns {a, b}.
std::array<double, 2> face_local(FaceId face, const SphereVec& s) noexcept;

/// ERP inverse projection. Throws CoordinateDomainError outside [0,W]x[0,H].
SphereVec erp_to_sphere(PixelCoord p, const ProjectionFormat& fmt);
/// ERP forward projection, u in [0, W), v in [0, H].
PixelCoord sphere_to_erp(const SphereVec& s, const ProjectionFormat& fmt);

/// CMP inverse projection. Throws CoordinateDomainError outside the canvas.
SphereVec cmp_to_sphere(PixelCoord p, const ProjectionFormat& fmt);
PixelCoord sphere_to_cmp(const SphereVec& s, const ProjectionFormat& fmt);

/// Format-dispatched xi^{-1} and xi.
SphereVec to_sphere(PixelCoord p, const ProjectionFormat& fmt);
PixelCoord from_sphere(const SphereVec& s, const ProjectionFormat& fmt);

/// Unchecked continuation of the inverse projection past the canvas border,
/// used for block margins: ERP wraps in longitude and reflects over the poles,
/// CMP extends the plane of the face that owns `anchor`.
std::array<double, 3> extended_direction(PixelCoord p, PixelCoord anchor, const ProjectionFormat& fmt);

inline constexpr double kFrontEpsilon = 1e-6;

/// Gnomonic projection onto the plane tangent at (1, 0, 0), focal length 1:
/// (y / x, -z / x). Throws BehindCameraError when x <= front_epsilon.
PixelCoord perspective_project(const SphereVec& s, double front_epsilon = kFrontEpsilon);

/// xi_tar(xi_src^{-1}(p)).
PixelCoord project_source_to_target(PixelCoord p, const ProjectionFormat& src, const ProjectionFormat& tar);
/// xi_src(xi_tar^{-1}(p)).
PixelCoord project_target_to_source(PixelCoord p, const ProjectionFormat& src, const ProjectionFormat& tar);

/// CMP face size for an ERP source of the given size. 4096x2048 and
/// 2048x1024 map to 1152 and 608; other sizes use round(sqrt(W * H / 6) / 16) * 16,
/// at least 16.
int cmp_face_size_for(int erp_width, int erp_height) noexcept;

}  // namespace sphrs
