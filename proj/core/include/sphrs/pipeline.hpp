#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "sphrs/geometry.hpp"
#include "sphrs/image.hpp"
#include "sphrs/mesh.hpp"
#include "sphrs/projections.hpp"
#include "sphrs/resamplers.hpp"

namespace sphrs {

/// Rectangular block of target pixels [x0, x0 + bw) x [y0, y0 + bh).
struct BlockSpec {
    int x0{0};
    int y0{0};
    int bw{0};
    int bh{0};
    /// Geometric block center (x0 + bw / 2, y0 + bh / 2).
    PixelCoord center{};
};

/// Tiles the target canvas with block_size blocks, row-major. CMP blocks stay
/// inside their face; blocks at the right and bottom edges are truncated.
std::vector<BlockSpec> plan_blocks(const ProjectionFormat& tar, int block_size);

struct VarConfig {
    int block_size{32};
    /// Candidate padding around each block, in target pixels.
    int margin{4};
    ResamplerKind resampler{ResamplerKind::Cubic};
    FsmrParams fsmr{};

    /// Block size 8 for FSMR, 32 otherwise.
    static VarConfig for_resampler(ResamplerKind kind);
    /// Throws ConfigError unless block_size >= 4 and margin >= 0.
    void validate() const;
};

/// Where the classical (non-adaptive) baseline resamples.
enum class BaselineDomain : std::uint8_t {
    /// Source samples mapped into target coordinates form one mesh that is
    /// queried at the target pixel centers (mesh-to-grid).
    Target,
    /// Target pixel centers mapped into source coordinates and interpolated on
    /// the source pixel grid (grid-to-mesh). Nearest, Linear and Cubic only.
    Source,
};

struct ClassicalConfig {
    ResamplerKind resampler{ResamplerKind::Cubic};
    BaselineDomain domain{BaselineDomain::Target};
    /// Block size and padding for the block-wise FSMR baseline.
    int fsmr_block_size{8};
    int margin{4};
    FsmrParams fsmr{};

    void validate() const;
};

struct ExecutionOptions {
    /// Worker threads; 0 selects the hardware concurrency.
    int threads{0};
    /// Bucket prefilter for VAR candidate selection. Output is identical
    /// either way; disabling projects every source sample for every block.
    bool filter_candidates{true};
};

/// Source image lifted to the sphere, with a latitude/longitude bucket index.
/// Immutable and shareable across threads.
class SourceSphere {
public:
    SourceSphere(const ImageBuffer& img, const ProjectionFormat& fmt);

    std::size_t size() const noexcept { return values_.size(); }
    const SphereVec& direction(std::size_t i) const noexcept { return dirs_[i]; }
    double value(std::size_t i) const noexcept { return values_[i]; }

    /// Ascending indices of every sample within `radius` (radians, great-circle)
    /// of `center`, plus possibly some farther ones.
    std::vector<int> candidates_within(const SphereVec& center, double radius) const;

private:
    std::vector<SphereVec> dirs_;
    std::vector<double> values_;
    int rows_{1};
    int cols_{1};
    std::vector<int> cell_offsets_;
    std::vector<int> cell_items_;
};

/// Axis-aligned rectangle on the tangent plane.
struct PlaneRect {
    PixelCoord lo{};
    PixelCoord hi{};
    bool contains(PixelCoord p) const noexcept { return p.u >= lo.u && p.u <= hi.u && p.v >= lo.v && p.v <= hi.v; }
};

/// Source samples whose rotated direction lies in front of the camera and whose
/// perspective projection falls inside `rect`, in ascending source order.
/// `filtered` only changes how many samples are examined, never the result.
MeshSamples select_candidates(const SourceSphere& src, const RotationMatrix& r, const PlaneRect& rect,
                              bool filtered = true);

/// Tangent-plane geometry of one VAR block.
struct BlockGeometry {
    RotationMatrix rotation;
    /// Projected target pixel centers, row-major within the block.
    std::vector<PixelCoord> queries;
    /// Bounding box of the block expanded by the margin.
    PlaneRect candidate_rect;
};

/// Throws ConfigError when the expanded block reaches too far from its
/// center for a perspective view (block too large for the sphere coverage).
BlockGeometry block_geometry(const BlockSpec& block, const ProjectionFormat& tar, int margin);

/// Viewport-adaptive resampling: every target block is resampled on the plane
/// tangent to the sphere at its center.
ImageBuffer var_resample(const ImageBuffer& img, const ProjectionFormat& src, const ProjectionFormat& tar,
                         const VarConfig& cfg, const ExecutionOptions& exec = {},
                         ResampleDiagnostics* diagnostics = nullptr);

/// Non-adaptive baseline.
ImageBuffer classical_resample(const ImageBuffer& img, const ProjectionFormat& src, const ProjectionFormat& tar,
                               const ClassicalConfig& cfg, const ExecutionOptions& exec = {},
                               ResampleDiagnostics* diagnostics = nullptr);
ImageBuffer classical_resample(const ImageBuffer& img, const ProjectionFormat& src, const ProjectionFormat& tar,
                               ResamplerKind kind, const ExecutionOptions& exec = {},
                               ResampleDiagnostics* diagnostics = nullptr);

enum class PipelineMode : std::uint8_t { Classical, Var };

/// One conversion method: VAR or classical with the given resampler.
struct ConversionConfig {
    PipelineMode mode{PipelineMode::Var};
    ResamplerKind resampler{ResamplerKind::Cubic};
    /// Block size of the block-based paths (VAR, classical FSMR); 0 selects
    /// 8 for FSMR and 32 otherwise.
    int block_size{0};
    int margin{4};
    FsmrParams fsmr{};
    BaselineDomain baseline{BaselineDomain::Target};

    VarConfig var_config() const;
    ClassicalConfig classical_config() const;
};

ImageBuffer convert(const ImageBuffer& img, const ProjectionFormat& src, const ProjectionFormat& tar,
                    const ConversionConfig& cfg, const ExecutionOptions& exec = {},
                    ResampleDiagnostics* diagnostics = nullptr);

struct RoundtripResult {
    ImageBuffer intermediate;
    ImageBuffer reconstructed;
    ResampleDiagnostics diagnostics;
};

/// src -> tar -> src with the same method in both directions.
RoundtripResult roundtrip(const ImageBuffer& img, const ProjectionFormat& src, const ProjectionFormat& tar,
                          const ConversionConfig& cfg, const ExecutionOptions& exec = {});

/// Runs fn(i) for i in [0, count) on up to `threads` workers (0: hardware
/// concurrency). After a failure no new indices start; the exception of the
/// lowest failed index is rethrown.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace sphrs
