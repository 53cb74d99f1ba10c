#pragma once

#include <cstdint>
#include <vector>

#include "sphrs/image.hpp"
#include "sphrs/projections.hpp"

namespace sphrs {

/// Random real spherical-harmonic field, band-limited to degree `band_limit`.
/// Coefficients are i.i.d. normal scaled by (1 + l)^(-decay).
struct HarmonicSpec {
    int band_limit{48};
    double decay{1.0};
    std::uint64_t seed{1};
    double v_max{255.0};
    /// Output range as fractions of v_max; the field is rescaled to fill it.
    double low{0.1};
    double high{0.9};
    /// Round to integers (8-bit style data).
    bool quantize{true};
};

/// Orthonormal real spherical-harmonic expansion.
class HarmonicField {
public:
    explicit HarmonicField(const HarmonicSpec& spec);

    /// Unscaled field value at polar angle theta and azimuth phi.
    double evaluate(double theta, double phi) const;

    /// Field sampled at the pixel centers of `fmt`, mapped into the spec range
    /// with an affine scale fixed at construction, then clamped.
    ImageBuffer render(const ProjectionFormat& fmt) const;

    int band_limit() const noexcept { return spec_.band_limit; }

private:
    /// Per-m sums over l of c_lm P_lm(cos theta), cosine and sine parts.
    void azimuthal_terms(double theta, std::vector<double>& a, std::vector<double>& b) const;
    /// out[i] = sum_m a[m] cos(m phi_i) + b[m] sin(m phi_i), phi_i = phi0 + i * step.
    static void synthesize_row(const std::vector<double>& a, const std::vector<double>& b, double phi0, double step,
                               std::vector<double>& out);

    HarmonicSpec spec_;
    double offset_{0.0};
    double scale_{1.0};
    // coeff_[l * (l + 1) + m] for m in [-l, l].
    std::vector<double> coeff_;
};

/// Associated Legendre values P_lm(cos theta) for 0 <= m <= l <= band_limit,
/// stored at [l * (l + 1) / 2 + m], scaled so that P_l0 and
/// sqrt(2) P_lm cos(m phi), sqrt(2) P_lm sin(m phi) are orthonormal on the sphere.
std::vector<double> normalized_legendre(int band_limit, double theta);

/// Spherical-harmonic ERP image with the given seed and defaults otherwise.
ImageBuffer harmonic_image(const ProjectionFormat& fmt, std::uint64_t seed, int band_limit = 48);

/// Averages each factor x factor block; dimensions must be divisible.
ImageBuffer box_downscale(const ImageBuffer& img, int factor);

}  // namespace sphrs
