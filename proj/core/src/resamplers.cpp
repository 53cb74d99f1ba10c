#include "sphrs/resamplers.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <string>

#include "sphrs/errors.hpp"
#include "sphrs/image.hpp"

namespace sphrs {

std::string_view to_string(ResamplerKind kind) noexcept {
    switch (kind) {
        case ResamplerKind::Nearest: return "nearest";
        case ResamplerKind::Linear: return "linear";
        case ResamplerKind::Cubic: return "cubic";
        case ResamplerKind::FSMR: return "fsmr";
    }
    return "unknown";
}

ResamplerKind parse_resampler_kind(std::string_view name) {
    std::string s(name);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    for (ResamplerKind k : kAllResamplers) {
        if (s == to_string(k)) return k;
    }
    throw ConfigError("unknown resampler '" + std::string(name) + "'");
}

void FsmrParams::validate() const {
    if (iterations < 0) throw ConfigError("fsmr: iterations must be >= 0");
    if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("fsmr: gamma must be in (0, 1]");
    if (!(rho > 0.0 && rho <= 1.0)) throw ConfigError("fsmr: rho must be in (0, 1]");
}

ModelWindow ModelWindow::spanning(PixelCoord lo, PixelCoord hi, int width, int height) noexcept {
    ModelWindow w;
    w.origin = lo;
    w.width = std::max(1, width);
    w.height = std::max(1, height);
    const double du = hi.u - lo.u;
    const double dv = hi.v - lo.v;
    w.scale_u = du > 0.0 ? w.width / du : 1.0;
    w.scale_v = dv > 0.0 ? w.height / dv : 1.0;
    return w;
}

// ---------------------------------------------------------------------------
// Linear

std::optional<double> interpolate_linear(const Triangulation& tri, std::span<const double> values, PixelCoord q) {
    const auto loc = tri.locate(q);
    if (!loc) return std::nullopt;
    const auto& t = tri.triangles()[static_cast<std::size_t>(loc->triangle)];
    // Relative to the first vertex so that equal vertex values are reproduced exactly.
    const double base = values[static_cast<std::size_t>(t.vertex[0])];
    return base + loc->barycentric[1] * (values[static_cast<std::size_t>(t.vertex[1])] - base) +
           loc->barycentric[2] * (values[static_cast<std::size_t>(t.vertex[2])] - base);
}

// ---------------------------------------------------------------------------
// Cubic

std::vector<std::array<double, 2>> estimate_gradients(const Triangulation& tri, std::span<const double> values) {
    const auto points = tri.points();
    std::vector<std::array<double, 2>> grad(points.size(), {0.0, 0.0});
    for (std::size_t i = 0; i < points.size(); ++i) {
        const PixelCoord p = points[i];
        double sxx = 0.0;
        double sxy = 0.0;
        double syy = 0.0;
        double sxf = 0.0;
        double syf = 0.0;
        for (int j : tri.vertex_neighbors(static_cast<int>(i))) {
            const PixelCoord q = points[static_cast<std::size_t>(j)];
            const double dx = q.u - p.u;
            const double dy = q.v - p.v;
            const double d2 = dx * dx + dy * dy;
            if (!(d2 > 0.0)) continue;
            const double w = 1.0 / d2;
            const double df = values[static_cast<std::size_t>(j)] - values[i];
            sxx += w * dx * dx;
            sxy += w * dx * dy;
            syy += w * dy * dy;
            sxf += w * dx * df;
            syf += w * dy * df;
        }
        const double det = sxx * syy - sxy * sxy;
        if (std::abs(det) > 1e-14 * (sxx * syy + sxy * sxy)) {
            grad[i] = {(syy * sxf - sxy * syf) / det, (sxx * syf - sxy * sxf) / det};
        }
    }
    return grad;
}

CloughTocher::CloughTocher(const Triangulation& tri, std::span<const double> values)
    : CloughTocher(tri, values, estimate_gradients(tri, values)) {}

CloughTocher::CloughTocher(const Triangulation& tri, std::span<const double> values,
                           std::vector<std::array<double, 2>> gradients)
    : tri_(&tri), values_(values.begin(), values.end()), gradients_(std::move(gradients)) {
    if (values_.size() != tri.points().size() || gradients_.size() != tri.points().size()) {
        throw ConfigError("CloughTocher: values/gradients do not match the triangulation");
    }
}

std::optional<double> CloughTocher::operator()(PixelCoord q) const {
    const auto loc = tri_->locate(q);
    if (!loc) return std::nullopt;
    const auto& tri = tri_->triangles()[static_cast<std::size_t>(loc->triangle)];
    const auto pts = tri_->points();
    const auto v0 = static_cast<std::size_t>(tri.vertex[0]);
    const auto v1 = static_cast<std::size_t>(tri.vertex[1]);
    const auto v2 = static_cast<std::size_t>(tri.vertex[2]);

    const double e12x = pts[v1].u - pts[v0].u;
    const double e12y = pts[v1].v - pts[v0].v;
    const double e23x = pts[v2].u - pts[v1].u;
    const double e23y = pts[v2].v - pts[v1].v;
    const double e31x = pts[v0].u - pts[v2].u;
    const double e31y = pts[v0].v - pts[v2].v;

    const auto& g1 = gradients_[v0];
    const auto& g2 = gradients_[v1];
    const auto& g3 = gradients_[v2];
    const double df12 = g1[0] * e12x + g1[1] * e12y;
    const double df21 = -(g2[0] * e12x + g2[1] * e12y);
    const double df23 = g2[0] * e23x + g2[1] * e23y;
    const double df32 = -(g3[0] * e23x + g3[1] * e23y);
    const double df31 = g3[0] * e31x + g3[1] * e31y;
    const double df13 = -(g1[0] * e31x + g1[1] * e31y);

    // Bezier ordinates c_ijkl on the Clough-Tocher split, l being the centroid
    // index, taken relative to the first vertex value.
    const double base = values_[v0];
    const double c3000 = 0.0;
    const double c0300 = values_[v1] - base;
    const double c0030 = values_[v2] - base;
    const double c2100 = c3000 + df12 / 3.0;
    const double c2010 = c3000 + df13 / 3.0;
    const double c1200 = c0300 + df21 / 3.0;
    const double c0210 = c0300 + df23 / 3.0;
    const double c1020 = c0030 + df31 / 3.0;
    const double c0120 = c0030 + df32 / 3.0;

    const double c2001 = (c2100 + c2010 + c3000) / 3.0;
    const double c0201 = (c1200 + c0300 + c0210) / 3.0;
    const double c0021 = (c1020 + c0120 + c0030) / 3.0;

    // Cross-boundary condition: the derivative along the line joining the
    // centroids of the two triangles sharing an edge is linear along that
    // edge. Hull edges use the direction from the edge midpoint to the
    // centroid (g = -1/2).
    std::array<double, 3> g{-0.5, -0.5, -0.5};
    const double det = e12x * (-e31y) - e12y * (-e31x);
    for (std::size_t k = 0; k < 3; ++k) {
        const int nb = tri.neighbor[k];
        if (nb < 0) continue;
        const auto& nt = tri_->triangles()[static_cast<std::size_t>(nb)];
        double cx = 0.0;
        double cy = 0.0;
        for (int vi : nt.vertex) {
            cx += pts[static_cast<std::size_t>(vi)].u;
            cy += pts[static_cast<std::size_t>(vi)].v;
        }
        cx /= 3.0;
        cy /= 3.0;
        // Barycentric coordinates of the neighbor centroid in this triangle.
        const double rx = cx - pts[v0].u;
        const double ry = cy - pts[v0].v;
        const double y1 = (rx * (-e31y) - ry * (-e31x)) / det;
        const double y2 = (e12x * ry - e12y * rx) / det;
        const double y0 = 1.0 - y1 - y2;
        switch (k) {
            case 0: g[0] = (2.0 * y2 + y1 - 1.0) / (2.0 - 3.0 * y2 - 3.0 * y1); break;
            case 1: g[1] = (2.0 * y0 + y2 - 1.0) / (2.0 - 3.0 * y0 - 3.0 * y2); break;
            default: g[2] = (2.0 * y1 + y0 - 1.0) / (2.0 - 3.0 * y1 - 3.0 * y0); break;
        }
    }

    const double c0111 =
        (g[0] * (-c0300 + 3.0 * c0210 - 3.0 * c0120 + c0030) + (-c0300 + 2.0 * c0210 - c0120 + c0021 + c0201)) / 2.0;
    const double c1011 =
        (g[1] * (-c0030 + 3.0 * c1020 - 3.0 * c2010 + c3000) + (-c0030 + 2.0 * c1020 - c2010 + c2001 + c0021)) / 2.0;
    const double c1101 =
        (g[2] * (-c3000 + 3.0 * c2100 - 3.0 * c1200 + c0300) + (-c3000 + 2.0 * c2100 - c1200 + c2001 + c0201)) / 2.0;

    const double c1002 = (c1101 + c1011 + c2001) / 3.0;
    const double c0102 = (c1101 + c0111 + c0201) / 3.0;
    const double c0012 = (c1011 + c0111 + c0021) / 3.0;
    const double c0003 = (c1002 + c0102 + c0012) / 3.0;

    const auto& bc = loc->barycentric;
    const double minval = std::min({bc[0], bc[1], bc[2]});
    const double b1 = bc[0] - minval;
    const double b2 = bc[1] - minval;
    const double b3 = bc[2] - minval;
    const double b4 = 3.0 * minval;

    // Terms vanish on the zero coordinate, so summing all ordinates evaluates
    // the sub-triangle that contains q.
    return base + b1 * b1 * b1 * c3000 + b2 * b2 * b2 * c0300 + b3 * b3 * b3 * c0030 + b4 * b4 * b4 * c0003 +
           3.0 * (b1 * b1 * b2 * c2100 + b1 * b1 * b3 * c2010 + b1 * b1 * b4 * c2001 + b1 * b2 * b2 * c1200 +
                  b2 * b2 * b3 * c0210 + b2 * b2 * b4 * c0201 + b1 * b3 * b3 * c1020 + b2 * b3 * b3 * c0120 +
                  b3 * b3 * b4 * c0021 + b1 * b4 * b4 * c1002 + b2 * b4 * b4 * c0102 + b3 * b4 * b4 * c0012) +
           6.0 * (b2 * b3 * b4 * c0111 + b1 * b3 * b4 * c1011 + b1 * b2 * b4 * c1101);
}

std::optional<double> interpolate_cubic(const CloughTocher& interpolant, PixelCoord q) { return interpolant(q); }

// ---------------------------------------------------------------------------
// Mesh interpolator

MeshInterpolator::MeshInterpolator(ResamplerKind kind, const MeshSamples& src)
    : kind_(kind), values_(src.values().begin(), src.values().end()), nearest_(src.positions()) {
    if (kind == ResamplerKind::FSMR) throw ConfigError("MeshInterpolator does not handle FSMR");
    if (src.empty()) throw ConfigError("MeshInterpolator: empty mesh");
    if (kind == ResamplerKind::Nearest) return;
    try {
        tri_ = std::make_unique<Triangulation>(src.positions());
    } catch (const DegenerateGeometryError&) {
        degenerate_ = true;
        return;
    }
    if (kind == ResamplerKind::Cubic) cubic_ = std::make_unique<CloughTocher>(*tri_, values_);
}

double MeshInterpolator::operator()(PixelCoord q, ResampleDiagnostics* diagnostics) const {
    if (kind_ != ResamplerKind::Nearest && !degenerate_) {
        const std::optional<double> v =
            kind_ == ResamplerKind::Linear ? interpolate_linear(*tri_, values_, q) : (*cubic_)(q);
        if (v) return *v;
    }
    if (kind_ != ResamplerKind::Nearest && diagnostics != nullptr) ++diagnostics->nearest_fallbacks;
    return values_[static_cast<std::size_t>(nearest_.nearest(q))];
}

// ---------------------------------------------------------------------------
// Frequency-selective model

namespace {

// table[p * n + i] = cos(pi * p * x_i / size) for p in [0, count).
std::vector<double> cosine_table(std::span<const double> x, int size, int count) {
    const std::size_t n = x.size();
    std::vector<double> table(static_cast<std::size_t>(count) * n);
    for (std::size_t i = 0; i < n; ++i) {
        const double step = std::numbers::pi * x[i] / size;
        for (int p = 0; p < count; ++p) table[static_cast<std::size_t>(p) * n + i] = std::cos(step * p);
    }
    return table;
}

}  // namespace

std::vector<double> interpolate_fsmr(const MeshSamples& src, std::span<const PixelCoord> queries,
                                     const FsmrParams& params, const ModelWindow& window) {
    params.validate();
    std::vector<double> out(queries.size(), 0.0);
    if (queries.empty() || src.empty()) return out;

    const int nx = window.width;
    const int ny = window.height;
    const std::size_t n = src.size();
    // The model fits values relative to the source midrange; a constant
    // source then has an exactly zero residual.
    const auto [vmin, vmax] = std::minmax_element(src.values().begin(), src.values().end());
    const double offset = 0.5 * (*vmin + *vmax);
    std::vector<double> residual(n);
    for (std::size_t i = 0; i < n; ++i) residual[i] = src.values()[i] - offset;
    std::vector<double> xs(n);
    std::vector<double> ys(n);
    std::vector<double> weight(n);
    const double cx = 0.5 * nx;
    const double cy = 0.5 * ny;
    const double log_rho = std::log(params.rho);
    for (std::size_t i = 0; i < n; ++i) {
        const PixelCoord w = window.to_window(src.positions()[i]);
        xs[i] = w.u;
        ys[i] = w.v;
        weight[i] = std::exp(log_rho * std::hypot(w.u - cx, w.v - cy));
    }

    // Products of two cosines expand into sums of cosines at the sum and
    // difference frequencies, so every basis inner product is a lookup into
    // the weighted moments W(p, q) for p < 2 nx, q < 2 ny.
    const int px_count = 2 * nx;
    const int py_count = 2 * ny;
    const std::vector<double> cxt = cosine_table(xs, nx, px_count);
    const std::vector<double> cyt = cosine_table(ys, ny, py_count);

    std::vector<double> moments(static_cast<std::size_t>(px_count) * static_cast<std::size_t>(py_count));
    std::vector<double> proj(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny));
    std::vector<double> tmp(n);
    std::vector<double> tmpf(n);
    for (int p = 0; p < px_count; ++p) {
        const double* row = &cxt[static_cast<std::size_t>(p) * n];
        for (std::size_t i = 0; i < n; ++i) {
            tmp[i] = weight[i] * row[i];
            tmpf[i] = tmp[i] * residual[i];
        }
        for (int q = 0; q < py_count; ++q) {
            const double* col = &cyt[static_cast<std::size_t>(q) * n];
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) acc += tmp[i] * col[i];
            moments[static_cast<std::size_t>(p) * static_cast<std::size_t>(py_count) + static_cast<std::size_t>(q)] =
                acc;
            if (p < nx && q < ny) {
                double accf = 0.0;
                for (std::size_t i = 0; i < n; ++i) accf += tmpf[i] * col[i];
                proj[static_cast<std::size_t>(p) * static_cast<std::size_t>(ny) + static_cast<std::size_t>(q)] = accf;
            }
        }
    }
    auto moment = [&](int p, int q) {
        return moments[static_cast<std::size_t>(p) * static_cast<std::size_t>(py_count) + static_cast<std::size_t>(q)];
    };
    auto gram = [&](int k, int l, int k2, int l2) {
        const int ks = k + k2;
        const int kd = std::abs(k - k2);
        const int ls = l + l2;
        const int ld = std::abs(l - l2);
        return 0.25 * (moment(ks, ls) + moment(ks, ld) + moment(kd, ls) + moment(kd, ld));
    };

    const std::size_t basis_count = proj.size();
    std::vector<double> energy(basis_count);
    double max_energy = 0.0;
    for (int k = 0; k < nx; ++k) {
        for (int l = 0; l < ny; ++l) {
            const double e = gram(k, l, k, l);
            energy[static_cast<std::size_t>(k * ny + l)] = e;
            max_energy = std::max(max_energy, e);
        }
    }
    const double energy_floor = 1e-12 * max_energy;

    std::vector<double> coeff(basis_count, 0.0);
    for (int it = 0; it < params.iterations; ++it) {
        std::size_t best = basis_count;
        double best_gain = 0.0;
        for (std::size_t b = 0; b < basis_count; ++b) {
            if (!(energy[b] > energy_floor)) continue;
            const double gain = proj[b] * proj[b] / energy[b];
            if (gain > best_gain) {
                best_gain = gain;
                best = b;
            }
        }
        if (best == basis_count) break;
        const double delta = params.gamma * proj[best] / energy[best];
        coeff[best] += delta;
        const int bk = static_cast<int>(best) / ny;
        const int bl = static_cast<int>(best) % ny;
        for (int k = 0; k < nx; ++k) {
            for (int l = 0; l < ny; ++l) proj[static_cast<std::size_t>(k * ny + l)] -= delta * gram(k, l, bk, bl);
        }
    }

    std::vector<std::size_t> active;
    for (std::size_t b = 0; b < basis_count; ++b) {
        if (coeff[b] != 0.0) active.push_back(b);
    }
    for (std::size_t qi = 0; qi < queries.size(); ++qi) {
        const PixelCoord w = window.to_window(queries[qi]);
        double acc = offset;
        for (std::size_t b : active) {
            const int k = static_cast<int>(b) / ny;
            const int l = static_cast<int>(b) % ny;
            acc += coeff[b] * std::cos(std::numbers::pi * k * w.u / nx) * std::cos(std::numbers::pi * l * w.v / ny);
        }
        out[qi] = acc;
    }
    return out;
}

// ---------------------------------------------------------------------------

std::vector<double> resample(const ResamplerConfig& config, const MeshSamples& src,
                             std::span<const PixelCoord> queries, const ResampleOptions& options,
                             ResampleDiagnostics* diagnostics) {
    std::vector<double> out;
    if (queries.empty()) return out;
    if (src.empty()) throw ConfigError("resample: empty source mesh");
    for (const auto& q : queries) {
        if (!std::isfinite(q.u) || !std::isfinite(q.v)) throw ConfigError("resample: non-finite query");
    }

    if (config.kind == ResamplerKind::FSMR) {
        ModelWindow window;
        if (options.window) {
            window = *options.window;
        } else {
            PixelCoord lo = src.positions()[0];
            PixelCoord hi = lo;
            auto extend = [&](PixelCoord p) {
                lo = {std::min(lo.u, p.u), std::min(lo.v, p.v)};
                hi = {std::max(hi.u, p.u), std::max(hi.v, p.v)};
            };
            for (const auto& p : src.positions()) extend(p);
            for (const auto& p : queries) extend(p);
            const int w = std::clamp(static_cast<int>(std::ceil(hi.u - lo.u)), 1, 32);
            const int h = std::clamp(static_cast<int>(std::ceil(hi.v - lo.v)), 1, 32);
            window = ModelWindow::spanning(lo, hi, w, h);
        }
        out = interpolate_fsmr(src, queries, config.fsmr, window);
    } else {
        const MeshInterpolator interp(config.kind, src);
        ResampleDiagnostics local;
        if (interp.degenerate()) ++local.degenerate_meshes;
        out.reserve(queries.size());
        for (const auto& q : queries) out.push_back(interp(q, &local));
        if (diagnostics != nullptr) *diagnostics += local;
    }
    if (options.v_max) {
        for (double& v : out) v = clamp_sample(v, *options.v_max);
    }
    return out;
}

}  // namespace sphrs
