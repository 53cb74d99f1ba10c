#include "sphrs/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "sphrs/errors.hpp"

namespace sphrs {

namespace {

constexpr double kPi = std::numbers::pi;

std::size_t tri_index(int l, int m) noexcept {
    return static_cast<std::size_t>(l) * static_cast<std::size_t>(l + 1) / 2 + static_cast<std::size_t>(m);
}

}  // namespace

std::vector<double> normalized_legendre(int band_limit, double theta) {
    if (band_limit < 0) throw ConfigError("band limit must be non-negative");
    std::vector<double> p(tri_index(band_limit, band_limit) + 1, 0.0);
    const double x = std::cos(theta);
    const double s = std::sin(theta);
    double pmm = 1.0 / std::sqrt(4.0 * kPi);
    for (int m = 0; m <= band_limit; ++m) {
        if (m > 0) pmm *= -std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s;
        p[tri_index(m, m)] = pmm;
        if (m + 1 > band_limit) continue;
        p[tri_index(m + 1, m)] = std::sqrt(2.0 * m + 3.0) * x * pmm;
        for (int l = m + 2; l <= band_limit; ++l) {
            const double ll = static_cast<double>(l) * l;
            const double mm = static_cast<double>(m) * m;
            const double a = std::sqrt((4.0 * ll - 1.0) / (ll - mm));
            const double l1 = static_cast<double>(l - 1) * (l - 1);
            const double b = std::sqrt((l1 - mm) / (4.0 * l1 - 1.0));
            p[tri_index(l, m)] = a * (x * p[tri_index(l - 1, m)] - b * p[tri_index(l - 2, m)]);
        }
    }
    return p;
}

HarmonicField::HarmonicField(const HarmonicSpec& spec) : spec_(spec) {
    if (spec.band_limit < 1) throw ConfigError("band limit must be at least 1");
    if (!(spec.v_max > 0.0) || !(spec.low < spec.high)) throw ConfigError("invalid harmonic output range");
    const int n = spec.band_limit;
    coeff_.assign(static_cast<std::size_t>(n + 1) * static_cast<std::size_t>(n + 1), 0.0);
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    // Degree 0 only shifts the mean, which the output mapping removes.
    for (int l = 1; l <= n; ++l) {
        const double amp = std::pow(1.0 + l, -spec.decay);
        for (int m = -l; m <= l; ++m) coeff_[static_cast<std::size_t>(l * (l + 1) + m)] = amp * normal(rng);
    }

    // Affine output map from the extrema on a reference grid finer than the band limit.
    const int rows = 2 * (n + 1);
    const int cols = 2 * rows;
    double lo = INFINITY;
    double hi = -INFINITY;
    std::vector<double> a;
    std::vector<double> b;
    std::vector<double> row(static_cast<std::size_t>(cols));
    for (int r = 0; r < rows; ++r) {
        azimuthal_terms((r + 0.5) * kPi / rows, a, b);
        synthesize_row(a, b, -kPi + kPi / cols, 2.0 * kPi / cols, row);
        for (double v : row) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    scale_ = hi > lo ? (spec.high - spec.low) * spec.v_max / (hi - lo) : 0.0;
    offset_ = spec.low * spec.v_max - scale_ * lo;
}

void HarmonicField::azimuthal_terms(double theta, std::vector<double>& a, std::vector<double>& b) const {
    const int n = spec_.band_limit;
    const std::vector<double> p = normalized_legendre(n, theta);
    a.assign(static_cast<std::size_t>(n + 1), 0.0);
    b.assign(static_cast<std::size_t>(n + 1), 0.0);
    for (int l = 0; l <= n; ++l) {
        a[0] += coeff_[static_cast<std::size_t>(l * (l + 1))] * p[tri_index(l, 0)];
        for (int m = 1; m <= l; ++m) {
            const double pm = std::numbers::sqrt2 * p[tri_index(l, m)];
            a[static_cast<std::size_t>(m)] += coeff_[static_cast<std::size_t>(l * (l + 1) + m)] * pm;
            b[static_cast<std::size_t>(m)] += coeff_[static_cast<std::size_t>(l * (l + 1) - m)] * pm;
        }
    }
}

double HarmonicField::evaluate(double theta, double phi) const {
    std::vector<double> a;
    std::vector<double> b;
    azimuthal_terms(theta, a, b);
    double v = 0.0;
    for (int m = 0; m <= spec_.band_limit; ++m) {
        v += a[static_cast<std::size_t>(m)] * std::cos(m * phi) + b[static_cast<std::size_t>(m)] * std::sin(m * phi);
    }
    return v;
}

void HarmonicField::synthesize_row(const std::vector<double>& a, const std::vector<double>& b, double phi0,
                                   double step, std::vector<double>& out) {
    // cos/sin(m phi) by the angle-addition recurrence along m.
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double phi = phi0 + step * static_cast<double>(i);
        const double c1 = std::cos(phi);
        const double s1 = std::sin(phi);
        double cm = 1.0;
        double sm = 0.0;
        double v = a[0];
        for (std::size_t m = 1; m < a.size(); ++m) {
            const double cn = cm * c1 - sm * s1;
            sm = sm * c1 + cm * s1;
            cm = cn;
            v += a[m] * cm + b[m] * sm;
        }
        out[i] = v;
    }
}

ImageBuffer HarmonicField::render(const ProjectionFormat& fmt) const {
    std::vector<double> data(fmt.pixel_count());
    auto store = [&](std::size_t i, double v) {
        double out = offset_ + scale_ * v;
        if (spec_.quantize) out = std::round(out);
        data[i] = std::clamp(out, 0.0, spec_.v_max);
    };
    if (fmt.kind() == ProjectionKind::ERP) {
        // Rows share theta, so the Legendre sums are computed once per row.
        std::vector<double> a;
        std::vector<double> b;
        std::vector<double> row(static_cast<std::size_t>(fmt.width()));
        const double step = 2.0 * kPi / fmt.width();
        for (int y = 0; y < fmt.height(); ++y) {
            azimuthal_terms((y + 0.5) * kPi / fmt.height(), a, b);
            synthesize_row(a, b, -kPi + 0.5 * step, step, row);
            for (int x = 0; x < fmt.width(); ++x) store(static_cast<std::size_t>(y) * fmt.width() + x, row[static_cast<std::size_t>(x)]);
        }
    } else {
        for (int y = 0; y < fmt.height(); ++y) {
            for (int x = 0; x < fmt.width(); ++x) {
                const SphericalCoord c = to_spherical(to_sphere({x + 0.5, y + 0.5}, fmt));
                store(static_cast<std::size_t>(y) * fmt.width() + x, evaluate(c.theta, c.phi));
            }
        }
    }
    return ImageBuffer(fmt.width(), fmt.height(), spec_.v_max, std::move(data));
}

ImageBuffer harmonic_image(const ProjectionFormat& fmt, std::uint64_t seed, int band_limit) {
    HarmonicSpec spec;
    spec.seed = seed;
    spec.band_limit = band_limit;
    return HarmonicField(spec).render(fmt);
}

ImageBuffer box_downscale(const ImageBuffer& img, int factor) {
    if (factor < 1 || img.width() % factor != 0 || img.height() % factor != 0) {
        throw ConfigError("downscale factor must divide both image dimensions");
    }
    if (factor == 1) return img;
    const int w = img.width() / factor;
    const int h = img.height() / factor;
    std::vector<double> out(static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
    const double inv = 1.0 / (static_cast<double>(factor) * factor);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int j = 0; j < factor; ++j) {
                for (int i = 0; i < factor; ++i) acc += img.at(x * factor + i, y * factor + j);
            }
            out[static_cast<std::size_t>(y) * w + x] = clamp_sample(acc * inv, img.v_max());
        }
    }
    return ImageBuffer(w, h, img.v_max(), std::move(out));
}

}  // namespace sphrs
