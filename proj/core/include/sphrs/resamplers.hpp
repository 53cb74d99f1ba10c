#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "sphrs/kdtree.hpp"
#include "sphrs/mesh.hpp"
#include "sphrs/triangulation.hpp"

namespace sphrs {

enum class ResamplerKind : std::uint8_t { Nearest, Linear, Cubic, FSMR };

inline constexpr std::array<ResamplerKind, 4> kAllResamplers{ResamplerKind::Nearest, ResamplerKind::Linear,
                                                             ResamplerKind::Cubic, ResamplerKind::FSMR};

std::string_view to_string(ResamplerKind kind) noexcept;
/// "nearest", "linear", "cubic", "fsmr"; throws ConfigError otherwise.
ResamplerKind parse_resampler_kind(std::string_view name);

/// Frequency-selective model parameters.
struct FsmrParams {
    int iterations{512};
    /// Orthogonality-deficiency compensation applied to every coefficient update.
    double gamma{0.5};
    /// Spatial weight base: w(d) = rho^d, d in window pixels from the window center.
    double rho{0.6};

    /// Throws ConfigError unless iterations >= 0, gamma in (0, 1], rho in (0, 1].
    void validate() const;
};

struct ResamplerConfig {
    ResamplerKind kind{ResamplerKind::Cubic};
    FsmrParams fsmr{};
};

/// Per-call counters.
struct ResampleDiagnostics {
    /// Queries answered by nearest neighbor because they fell outside the
    /// hull or the mesh could not be triangulated.
    std::size_t nearest_fallbacks{0};
    /// Linear/Cubic calls on meshes without three non-collinear points.
    std::size_t degenerate_meshes{0};

    ResampleDiagnostics& operator+=(const ResampleDiagnostics& o) noexcept {
        nearest_fallbacks += o.nearest_fallbacks;
        degenerate_meshes += o.degenerate_meshes;
        return *this;
    }
};

/// Affine map from resampling coordinates to a width x height pixel window
/// on which the frequency-selective basis is defined.
struct ModelWindow {
    PixelCoord origin{};
    double scale_u{1.0};
    double scale_v{1.0};
    int width{1};
    int height{1};

    PixelCoord to_window(PixelCoord p) const noexcept {
        return {(p.u - origin.u) * scale_u, (p.v - origin.v) * scale_v};
    }
    /// Window covering [lo, hi] with the given pixel dimensions.
    static ModelWindow spanning(PixelCoord lo, PixelCoord hi, int width, int height) noexcept;
};

struct ResampleOptions {
    /// When set, outputs are clamped to [0, v_max] after interpolation.
    std::optional<double> v_max{};
    /// FSMR model window; derived from the data extent when absent.
    std::optional<ModelWindow> window{};
};

/// Barycentric interpolation in the containing triangle; nullopt outside the hull.
std::optional<double> interpolate_linear(const Triangulation& tri, std::span<const double> values, PixelCoord q);

/// Vertex gradients from a weighted least-squares plane over each vertex's
/// 1-ring (weights 1 / distance^2). Exact for affine data.
std::vector<std::array<double, 2>> estimate_gradients(const Triangulation& tri, std::span<const double> values);

/// Clough-Tocher piecewise cubic interpolant (C1, interpolates values and
/// gradients at the vertices).
class CloughTocher {
public:
    CloughTocher(const Triangulation& tri, std::span<const double> values);
    CloughTocher(const Triangulation& tri, std::span<const double> values,
                 std::vector<std::array<double, 2>> gradients);

    /// nullopt outside the hull.
    std::optional<double> operator()(PixelCoord q) const;
    std::span<const std::array<double, 2>> gradients() const noexcept { return gradients_; }

private:
    const Triangulation* tri_;
    std::vector<double> values_;
    std::vector<std::array<double, 2>> gradients_;
};

std::optional<double> interpolate_cubic(const CloughTocher& interpolant, PixelCoord q);

/// Prebuilt Nearest/Linear/Cubic interpolator over one mesh. Read-only after
/// construction; queries may run concurrently.
class MeshInterpolator {
public:
    MeshInterpolator(ResamplerKind kind, const MeshSamples& src);
    MeshInterpolator(const MeshInterpolator&) = delete;
    MeshInterpolator& operator=(const MeshInterpolator&) = delete;

    /// Unclamped value at q; Linear/Cubic fall back to nearest outside the hull.
    double operator()(PixelCoord q, ResampleDiagnostics* diagnostics = nullptr) const;

    bool degenerate() const noexcept { return degenerate_; }

private:
    ResamplerKind kind_;
    std::vector<double> values_;
    NearestIndex nearest_;
    std::unique_ptr<Triangulation> tri_;
    std::unique_ptr<CloughTocher> cubic_;
    bool degenerate_{false};
};

/// Frequency-selective resampling: a sparse 2-D DCT model over `window`,
/// fitted to the sources (relative to their midrange) by greedy weighted
/// basis selection, evaluated at the queries. Unclamped.
std::vector<double> interpolate_fsmr(const MeshSamples& src, std::span<const PixelCoord> queries,
                                     const FsmrParams& params, const ModelWindow& window);

/// Mesh-to-mesh resampling of `src` at `queries` with the configured method.
/// One value per query, in query order.
std::vector<double> resample(const ResamplerConfig& config, const MeshSamples& src,
                             std::span<const PixelCoord> queries, const ResampleOptions& options = {},
                             ResampleDiagnostics* diagnostics = nullptr);

}  // namespace sphrs
