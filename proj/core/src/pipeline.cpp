#include "sphrs/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>

#include "sphrs/errors.hpp"

namespace sphrs {

namespace {

constexpr double kPi = std::numbers::pi;
// Minimum cosine between a block center and any point of its expanded block.
constexpr double kMinViewCosine = 0.1;

void check_image(const ImageBuffer& img, const ProjectionFormat& fmt) {
    if (img.width() != fmt.width() || img.height() != fmt.height()) {
        throw ConfigError("image is " + std::to_string(img.width()) + "x" + std::to_string(img.height()) +
                          " but the source format is " + std::to_string(fmt.width()) + "x" +
                          std::to_string(fmt.height()));
    }
}

int resolve_threads(int threads) {
    if (threads > 0) return threads;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

PixelCoord pixel_center(int x, int y) noexcept { return {x + 0.5, y + 0.5}; }

std::vector<PixelCoord> lifted_source_in_target(const ProjectionFormat& src, const ProjectionFormat& tar) {
    std::vector<PixelCoord> out;
    out.reserve(src.pixel_count());
    for (int y = 0; y < src.height(); ++y) {
        for (int x = 0; x < src.width(); ++x) out.push_back(project_source_to_target(pixel_center(x, y), src, tar));
    }
    return out;
}

// Source samples in target coordinates. ERP targets get copies of the samples
// near the longitude seam on the opposite side; the band is `band` pixels at
// the equator and widens with 1 / cos(latitude), up to half the width.
MeshSamples target_domain_mesh(const ImageBuffer& img, const ProjectionFormat& src, const ProjectionFormat& tar,
                               int band) {
    std::vector<PixelCoord> pos = lifted_source_in_target(src, tar);
    std::vector<double> val(img.data().begin(), img.data().end());
    if (tar.kind() == ProjectionKind::ERP) {
        const double w = tar.width();
        const double h = tar.height();
        const std::size_t n = pos.size();
        for (std::size_t i = 0; i < n; ++i) {
            const double c = std::cos((0.5 - std::clamp(pos[i].v / h, 0.0, 1.0)) * kPi);
            const double reach = c * 0.5 * w > band ? band / c : 0.5 * w;
            if (pos[i].u < reach) {
                pos.push_back({pos[i].u + w, pos[i].v});
                val.push_back(val[i]);
            } else if (pos[i].u >= w - reach) {
                pos.push_back({pos[i].u - w, pos[i].v});
                val.push_back(val[i]);
            }
        }
    }
    return MeshSamples(std::move(pos), std::move(val));
}

// Uniform bucket grid over target-plane positions.
class PlaneBuckets {
public:
    PlaneBuckets(std::span<const PixelCoord> pts, double cell) : cell_(cell) {
        lo_ = pts.empty() ? PixelCoord{} : pts[0];
        PixelCoord hi = lo_;
        for (const auto& p : pts) {
            lo_ = {std::min(lo_.u, p.u), std::min(lo_.v, p.v)};
            hi = {std::max(hi.u, p.u), std::max(hi.v, p.v)};
        }
        nx_ = std::max(1, static_cast<int>((hi.u - lo_.u) / cell_) + 1);
        ny_ = std::max(1, static_cast<int>((hi.v - lo_.v) / cell_) + 1);
        offsets_.assign(static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_) + 1, 0);
        std::vector<int> cell_of(pts.size());
        for (std::size_t i = 0; i < pts.size(); ++i) {
            cell_of[i] = cell_index(pts[i]);
            ++offsets_[static_cast<std::size_t>(cell_of[i]) + 1];
        }
        for (std::size_t c = 1; c < offsets_.size(); ++c) offsets_[c] += offsets_[c - 1];
        items_.resize(pts.size());
        std::vector<int> fill(offsets_.begin(), offsets_.end() - 1);
        for (std::size_t i = 0; i < pts.size(); ++i) {
            items_[static_cast<std::size_t>(fill[static_cast<std::size_t>(cell_of[i])]++)] = static_cast<int>(i);
        }
    }

    // Ascending indices of points inside [lo, hi].
    std::vector<int> query(std::span<const PixelCoord> pts, PixelCoord lo, PixelCoord hi) const {
        std::vector<int> out;
        const int cx0 = std::clamp(static_cast<int>(std::floor((lo.u - lo_.u) / cell_)), 0, nx_ - 1);
        const int cx1 = std::clamp(static_cast<int>(std::floor((hi.u - lo_.u) / cell_)), 0, nx_ - 1);
        const int cy0 = std::clamp(static_cast<int>(std::floor((lo.v - lo_.v) / cell_)), 0, ny_ - 1);
        const int cy1 = std::clamp(static_cast<int>(std::floor((hi.v - lo_.v) / cell_)), 0, ny_ - 1);
        for (int cy = cy0; cy <= cy1; ++cy) {
            for (int cx = cx0; cx <= cx1; ++cx) {
                const std::size_t c = static_cast<std::size_t>(cy) * static_cast<std::size_t>(nx_) +
                                      static_cast<std::size_t>(cx);
                for (int k = offsets_[c]; k < offsets_[c + 1]; ++k) {
                    const int i = items_[static_cast<std::size_t>(k)];
                    const PixelCoord p = pts[static_cast<std::size_t>(i)];
                    if (p.u >= lo.u && p.u <= hi.u && p.v >= lo.v && p.v <= hi.v) out.push_back(i);
                }
            }
        }
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    int cell_index(PixelCoord p) const noexcept {
        const int cx = std::clamp(static_cast<int>((p.u - lo_.u) / cell_), 0, nx_ - 1);
        const int cy = std::clamp(static_cast<int>((p.v - lo_.v) / cell_), 0, ny_ - 1);
        return cy * nx_ + cx;
    }

    double cell_;
    PixelCoord lo_{};
    int nx_{1};
    int ny_{1};
    std::vector<int> offsets_;
    std::vector<int> items_;
};

// Interpolation on the regular source pixel grid. ERP wraps in longitude and
// reflects across the poles; CMP clamps to the face that owns the position.
class GridSampler {
public:
    GridSampler(const ImageBuffer& img, const ProjectionFormat& fmt) : img_(img), fmt_(fmt) {}

    double sample(PixelCoord p, ResamplerKind kind) const {
        int fx0 = 0;
        int fy0 = 0;
        double u = p.u;
        double v = p.v;
        if (fmt_.kind() == ProjectionKind::CMP) {
            const int f = fmt_.face_size();
            const int col = std::clamp(static_cast<int>(std::floor(u / f)), 0, 2);
            const int row = std::clamp(static_cast<int>(std::floor(v / f)), 0, 1);
            fx0 = col * f;
            fy0 = row * f;
            u -= fx0;
            v -= fy0;
        }
        switch (kind) {
            case ResamplerKind::Nearest:
                return fetch(fx0, fy0, static_cast<int>(std::floor(u)),
                             std::min(static_cast<int>(std::floor(v)), extent_y() - 1));
            case ResamplerKind::Linear: {
                const double x = u - 0.5;
                const double y = v - 0.5;
                const int ix = static_cast<int>(std::floor(x));
                const int iy = static_cast<int>(std::floor(y));
                const double tx = x - ix;
                const double ty = y - iy;
                const double base = fetch(fx0, fy0, ix, iy);
                const double top = tx * (fetch(fx0, fy0, ix + 1, iy) - base);
                const double bot = (fetch(fx0, fy0, ix, iy + 1) - base) +
                                   tx * (fetch(fx0, fy0, ix + 1, iy + 1) - fetch(fx0, fy0, ix, iy + 1));
                return base + (1 - ty) * top + ty * bot;
            }
            case ResamplerKind::Cubic: {
                const double x = u - 0.5;
                const double y = v - 0.5;
                const int ix = static_cast<int>(std::floor(x));
                const int iy = static_cast<int>(std::floor(y));
                const auto wx = keys_weights(x - ix);
                const auto wy = keys_weights(y - iy);
                const double base = fetch(fx0, fy0, ix, iy);
                double acc = 0.0;
                for (int j = 0; j < 4; ++j) {
                    double row = 0.0;
                    for (int i = 0; i < 4; ++i) {
                        row += wx[static_cast<std::size_t>(i)] * (fetch(fx0, fy0, ix - 1 + i, iy - 1 + j) - base);
                    }
                    acc += wy[static_cast<std::size_t>(j)] * row;
                }
                return base + acc;
            }
            case ResamplerKind::FSMR: break;
        }
        throw ConfigError("grid sampling supports nearest, linear and cubic only");
    }

private:
    int extent_x() const noexcept { return fmt_.kind() == ProjectionKind::CMP ? fmt_.face_size() : fmt_.width(); }
    int extent_y() const noexcept { return fmt_.kind() == ProjectionKind::CMP ? fmt_.face_size() : fmt_.height(); }

    double fetch(int fx0, int fy0, int x, int y) const noexcept {
        if (fmt_.kind() == ProjectionKind::ERP) {
            const int w = fmt_.width();
            const int h = fmt_.height();
            if (y < 0) {
                y = -1 - y;
                x += w / 2;
            } else if (y >= h) {
                y = 2 * h - 1 - y;
                x += w / 2;
            }
            y = std::clamp(y, 0, h - 1);
            x = ((x % w) + w) % w;
            return img_.at(x, y);
        }
        const int f = fmt_.face_size();
        return img_.at(fx0 + std::clamp(x, 0, f - 1), fy0 + std::clamp(y, 0, f - 1));
    }

    // Keys cubic convolution weights (a = -1/2) for taps at offsets -1, 0, 1, 2.
    static std::array<double, 4> keys_weights(double t) noexcept {
        const double t2 = t * t;
        const double t3 = t2 * t;
        return {-0.5 * t3 + t2 - 0.5 * t, 1.5 * t3 - 2.5 * t2 + 1.0, -1.5 * t3 + 2.0 * t2 + 0.5 * t,
                0.5 * t3 - 0.5 * t2};
    }

    const ImageBuffer& img_;
    ProjectionFormat fmt_;
};

// Square-pixel model window over `rect`; its longer side spans the block
// plus margin in target pixels.
ModelWindow fsmr_window(const PlaneRect& rect, const BlockSpec& b, int margin) {
    const double du = rect.hi.u - rect.lo.u;
    const double dv = rect.hi.v - rect.lo.v;
    const int n = std::max(b.bw, b.bh) + 2 * margin;
    const double pitch = std::max(du, dv) / n;
    ModelWindow w;
    w.origin = rect.lo;
    w.scale_u = w.scale_v = pitch > 0.0 ? 1.0 / pitch : 1.0;
    w.width = std::max(1, static_cast<int>(std::ceil(du / pitch - 1e-9)));
    w.height = std::max(1, static_cast<int>(std::ceil(dv / pitch - 1e-9)));
    return w;
}

ImageBuffer finish(const ProjectionFormat& tar, double v_max, std::vector<double> out) {
    for (double& v : out) v = clamp_sample(v, v_max);
    return ImageBuffer(tar.width(), tar.height(), v_max, std::move(out));
}

}  // namespace

// ---------------------------------------------------------------------------

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
    const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(resolve_threads(threads)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::mutex mutex;
    std::size_t failed_index = count;
    std::exception_ptr error;
    auto work = [&] {
        for (;;) {
            if (failed.load(std::memory_order_relaxed)) return;
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                const std::lock_guard lock(mutex);
                if (i < failed_index) {
                    failed_index = i;
                    error = std::current_exception();
                }
                failed.store(true);
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

std::vector<BlockSpec> plan_blocks(const ProjectionFormat& tar, int block_size) {
    if (block_size < 1) throw ConfigError("block size must be positive");
    std::vector<BlockSpec> blocks;
    auto tile = [&](int ox, int oy, int w, int h) {
        for (int y = 0; y < h; y += block_size) {
            for (int x = 0; x < w; x += block_size) {
                BlockSpec b;
                b.x0 = ox + x;
                b.y0 = oy + y;
                b.bw = std::min(block_size, w - x);
                b.bh = std::min(block_size, h - y);
                b.center = {b.x0 + 0.5 * b.bw, b.y0 + 0.5 * b.bh};
                blocks.push_back(b);
            }
        }
    };
    if (tar.kind() == ProjectionKind::CMP) {
        const int f = tar.face_size();
        for (int row = 0; row < 2; ++row) {
            for (int col = 0; col < 3; ++col) tile(col * f, row * f, f, f);
        }
    } else {
        tile(0, 0, tar.width(), tar.height());
    }
    return blocks;
}

VarConfig VarConfig::for_resampler(ResamplerKind kind) {
    VarConfig cfg;
    cfg.resampler = kind;
    cfg.block_size = kind == ResamplerKind::FSMR ? 8 : 32;
    return cfg;
}

void VarConfig::validate() const {
    if (block_size < 4) throw ConfigError("block size must be at least 4");
    if (margin < 0) throw ConfigError("margin must be non-negative");
    if (resampler == ResamplerKind::FSMR) fsmr.validate();
}

void ClassicalConfig::validate() const {
    if (fsmr_block_size < 4) throw ConfigError("block size must be at least 4");
    if (margin < 0) throw ConfigError("margin must be non-negative");
    if (domain == BaselineDomain::Source && resampler == ResamplerKind::FSMR) {
        throw ConfigError("the source-domain baseline supports nearest, linear and cubic only");
    }
    if (resampler == ResamplerKind::FSMR) fsmr.validate();
}

// ---------------------------------------------------------------------------
// Source lifting and candidate selection

SourceSphere::SourceSphere(const ImageBuffer& img, const ProjectionFormat& fmt) {
    check_image(img, fmt);
    const std::size_t n = fmt.pixel_count();
    dirs_.reserve(n);
    values_.assign(img.data().begin(), img.data().end());
    for (int y = 0; y < fmt.height(); ++y) {
        for (int x = 0; x < fmt.width(); ++x) dirs_.push_back(to_sphere(pixel_center(x, y), fmt));
    }

    rows_ = std::max(1, static_cast<int>(std::lround(std::sqrt(static_cast<double>(n) / 32.0))));
    cols_ = 2 * rows_;
    std::vector<int> cell_of(n);
    cell_offsets_.assign(static_cast<std::size_t>(rows_) * static_cast<std::size_t>(cols_) + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const SphericalCoord c = to_spherical(dirs_[i]);
        const int r = std::clamp(static_cast<int>(c.theta / kPi * rows_), 0, rows_ - 1);
        const int q = std::clamp(static_cast<int>((c.phi + kPi) / (2.0 * kPi) * cols_), 0, cols_ - 1);
        cell_of[i] = r * cols_ + q;
        ++cell_offsets_[static_cast<std::size_t>(cell_of[i]) + 1];
    }
    for (std::size_t c = 1; c < cell_offsets_.size(); ++c) cell_offsets_[c] += cell_offsets_[c - 1];
    cell_items_.resize(n);
    std::vector<int> fill(cell_offsets_.begin(), cell_offsets_.end() - 1);
    for (std::size_t i = 0; i < n; ++i) {
        cell_items_[static_cast<std::size_t>(fill[static_cast<std::size_t>(cell_of[i])]++)] = static_cast<int>(i);
    }
}

std::vector<int> SourceSphere::candidates_within(const SphereVec& center, double radius) const {
    const SphericalCoord c = to_spherical(center);
    const double row_step = kPi / rows_;
    const double col_step = 2.0 * kPi / cols_;
    const double lo = c.theta - radius;
    const double hi = c.theta + radius;
    const int r0 = std::max(0, static_cast<int>(std::floor(lo / row_step)) - 1);
    const int r1 = std::min(rows_ - 1, static_cast<int>(std::floor(hi / row_step)) + 1);

    // Longitude half-width of a cap that does not contain a pole.
    bool all_columns = lo <= 0.0 || hi >= kPi;
    double half = kPi;
    if (!all_columns) {
        const double s = std::sin(radius) / std::sin(c.theta);
        if (s >= 1.0) {
            all_columns = true;
        } else {
            half = std::asin(s);
        }
    }
    int q0 = 0;
    int q1 = cols_ - 1;
    if (!all_columns) {
        q0 = static_cast<int>(std::floor((c.phi - half + kPi) / col_step)) - 1;
        q1 = static_cast<int>(std::floor((c.phi + half + kPi) / col_step)) + 1;
        if (q1 - q0 + 1 >= cols_) {
            q0 = 0;
            q1 = cols_ - 1;
        }
    }

    std::vector<int> out;
    for (int r = r0; r <= r1; ++r) {
        for (int q = q0; q <= q1; ++q) {
            const int qq = ((q % cols_) + cols_) % cols_;
            const std::size_t cell = static_cast<std::size_t>(r) * static_cast<std::size_t>(cols_) +
                                     static_cast<std::size_t>(qq);
            out.insert(out.end(), cell_items_.begin() + cell_offsets_[cell],
                       cell_items_.begin() + cell_offsets_[cell + 1]);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

MeshSamples select_candidates(const SourceSphere& src, const RotationMatrix& r, const PlaneRect& rect,
                              bool filtered) {
    std::vector<PixelCoord> pos;
    std::vector<double> val;
    auto consider = [&](std::size_t i) {
        const SphereVec s = rotate(r, src.direction(i));
        if (!(s.x() > kFrontEpsilon)) return;
        const PixelCoord p = perspective_project(s);
        if (!rect.contains(p)) return;
        pos.push_back(p);
        val.push_back(src.value(i));
    };
    if (filtered) {
        // Every point of the rectangle lies within atan(max corner norm) of the axis.
        double reach = 0.0;
        for (double u : {rect.lo.u, rect.hi.u}) {
            for (double v : {rect.lo.v, rect.hi.v}) reach = std::max(reach, std::hypot(u, v));
        }
        const double radius = std::atan(reach) + 1e-7;
        const SphereVec axis = SphereVec::normalized(r(0, 0), r(0, 1), r(0, 2));
        for (int i : src.candidates_within(axis, radius)) consider(static_cast<std::size_t>(i));
    } else {
        for (std::size_t i = 0; i < src.size(); ++i) consider(i);
    }
    return MeshSamples(std::move(pos), std::move(val));
}

BlockGeometry block_geometry(const BlockSpec& block, const ProjectionFormat& tar, int margin) {
    BlockGeometry g;
    const SphereVec center = to_sphere(block.center, tar);
    g.rotation = alignment_rotation(center);

    g.queries.reserve(static_cast<std::size_t>(block.bw) * static_cast<std::size_t>(block.bh));
    for (int y = block.y0; y < block.y0 + block.bh; ++y) {
        for (int x = block.x0; x < block.x0 + block.bw; ++x) {
            g.queries.push_back(perspective_project(rotate(g.rotation, to_sphere(pixel_center(x, y), tar))));
        }
    }

    // Plane image of the margin-expanded block: unit grid plus a half-pixel
    // boundary trace.
    const double u0 = block.x0 - margin;
    const double v0 = block.y0 - margin;
    const int w = block.bw + 2 * margin;
    const int h = block.bh + 2 * margin;
    PixelCoord lo{INFINITY, INFINITY};
    PixelCoord hi{-INFINITY, -INFINITY};
    auto add = [&](double u, double v) {
        const auto d = extended_direction({u, v}, block.center, tar);
        const SphereVec s = rotate(g.rotation, SphereVec::normalized(d[0], d[1], d[2]));
        if (s.x() < kMinViewCosine) {
            throw ConfigError("block of " + std::to_string(block.bw) + "x" + std::to_string(block.bh) +
                              " pixels with margin " + std::to_string(margin) +
                              " spans too much of the sphere for this resolution; use a smaller block size");
        }
        const PixelCoord p = perspective_project(s);
        lo = {std::min(lo.u, p.u), std::min(lo.v, p.v)};
        hi = {std::max(hi.u, p.u), std::max(hi.v, p.v)};
    };
    for (int j = 0; j <= h; ++j) {
        for (int i = 0; i <= w; ++i) add(u0 + i, v0 + j);
    }
    for (int i = 0; i < 2 * w; ++i) {
        add(u0 + 0.5 * i + 0.25, v0);
        add(u0 + 0.5 * i + 0.25, v0 + h);
    }
    for (int j = 0; j < 2 * h; ++j) {
        add(u0, v0 + 0.5 * j + 0.25);
        add(u0 + w, v0 + 0.5 * j + 0.25);
    }
    for (const auto& q : g.queries) {
        lo = {std::min(lo.u, q.u), std::min(lo.v, q.v)};
        hi = {std::max(hi.u, q.u), std::max(hi.v, q.v)};
    }
    g.candidate_rect = {lo, hi};
    return g;
}

// ---------------------------------------------------------------------------

ImageBuffer var_resample(const ImageBuffer& img, const ProjectionFormat& src, const ProjectionFormat& tar,
                         const VarConfig& cfg, const ExecutionOptions& exec, ResampleDiagnostics* diagnostics) {
    check_image(img, src);
    cfg.validate();
    const SourceSphere source(img, src);
    const std::vector<BlockSpec> blocks = plan_blocks(tar, cfg.block_size);
    const ResamplerConfig rcfg{cfg.resampler, cfg.fsmr};

    std::vector<double> out(tar.pixel_count(), 0.0);
    std::vector<ResampleDiagnostics> block_diag(blocks.size());
    parallel_for(blocks.size(), exec.threads, [&](std::size_t bi) {
        const BlockSpec& b = blocks[bi];
        const BlockGeometry g = block_geometry(b, tar, cfg.margin);
        const MeshSamples cand = select_candidates(source, g.rotation, g.candidate_rect, exec.filter_candidates);
        if (cand.empty()) throw std::logic_error("var_resample: block without candidate samples");
        ResampleOptions opt;
        if (cfg.resampler == ResamplerKind::FSMR) opt.window = fsmr_window(g.candidate_rect, b, cfg.margin);
        const std::vector<double> vals = resample(rcfg, cand, g.queries, opt, &block_diag[bi]);
        std::size_t k = 0;
        for (int y = b.y0; y < b.y0 + b.bh; ++y) {
            for (int x = b.x0; x < b.x0 + b.bw; ++x) {
                out[static_cast<std::size_t>(y) * static_cast<std::size_t>(tar.width()) + static_cast<std::size_t>(x)] =
                    vals[k++];
            }
        }
    });
    if (diagnostics != nullptr) {
        for (const auto& d : block_diag) *diagnostics += d;
    }
    return finish(tar, img.v_max(), std::move(out));
}

ImageBuffer classical_resample(const ImageBuffer& img, const ProjectionFormat& src, const ProjectionFormat& tar,
                               const ClassicalConfig& cfg, const ExecutionOptions& exec,
                               ResampleDiagnostics* diagnostics) {
    check_image(img, src);
    cfg.validate();
    const int tw = tar.width();
    std::vector<double> out(tar.pixel_count(), 0.0);

    if (cfg.domain == BaselineDomain::Source) {
        const GridSampler sampler(img, src);
        parallel_for(static_cast<std::size_t>(tar.height()), exec.threads, [&](std::size_t row) {
            const int y = static_cast<int>(row);
            for (int x = 0; x < tw; ++x) {
                const PixelCoord p = project_target_to_source(pixel_center(x, y), src, tar);
                out[row * static_cast<std::size_t>(tw) + static_cast<std::size_t>(x)] = sampler.sample(p, cfg.resampler);
            }
        });
        return finish(tar, img.v_max(), std::move(out));
    }

    const MeshSamples mesh = target_domain_mesh(img, src, tar, std::max(cfg.margin, 4));

    if (cfg.resampler != ResamplerKind::FSMR) {
        const MeshInterpolator interp(cfg.resampler, mesh);
        std::vector<ResampleDiagnostics> row_diag(static_cast<std::size_t>(tar.height()));
        if (interp.degenerate()) ++row_diag[0].degenerate_meshes;
        parallel_for(static_cast<std::size_t>(tar.height()), exec.threads, [&](std::size_t row) {
            const int y = static_cast<int>(row);
            for (int x = 0; x < tw; ++x) {
                out[row * static_cast<std::size_t>(tw) + static_cast<std::size_t>(x)] =
                    interp(pixel_center(x, y), &row_diag[row]);
            }
        });
        if (diagnostics != nullptr) {
            for (const auto& d : row_diag) *diagnostics += d;
        }
        return finish(tar, img.v_max(), std::move(out));
    }

    const std::vector<BlockSpec> blocks = plan_blocks(tar, cfg.fsmr_block_size);
    const PlaneBuckets buckets(mesh.positions(), cfg.fsmr_block_size);
    const NearestIndex nearest(mesh.positions());
    const ResamplerConfig rcfg{ResamplerKind::FSMR, cfg.fsmr};
    const int m = cfg.margin;
    std::vector<ResampleDiagnostics> block_diag(blocks.size());
    parallel_for(blocks.size(), exec.threads, [&](std::size_t bi) {
        const BlockSpec& b = blocks[bi];
        const PixelCoord lo{static_cast<double>(b.x0 - m), static_cast<double>(b.y0 - m)};
        const PixelCoord hi{static_cast<double>(b.x0 + b.bw + m), static_cast<double>(b.y0 + b.bh + m)};
        const std::vector<int> idx = buckets.query(mesh.positions(), lo, hi);
        std::vector<PixelCoord> queries;
        for (int y = b.y0; y < b.y0 + b.bh; ++y) {
            for (int x = b.x0; x < b.x0 + b.bw; ++x) queries.push_back(pixel_center(x, y));
        }
        std::vector<double> vals;
        if (idx.empty()) {
            for (const auto& q : queries) {
                vals.push_back(mesh.values()[static_cast<std::size_t>(nearest.nearest(q))]);
                ++block_diag[bi].nearest_fallbacks;
            }
        } else {
            std::vector<PixelCoord> pos;
            std::vector<double> v;
            for (int i : idx) {
                pos.push_back(mesh.positions()[static_cast<std::size_t>(i)]);
                v.push_back(mesh.values()[static_cast<std::size_t>(i)]);
            }
            ResampleOptions opt;
            opt.window = ModelWindow{lo, 1.0, 1.0, b.bw + 2 * m, b.bh + 2 * m};
            vals = resample(rcfg, MeshSamples(std::move(pos), std::move(v)), queries, opt, &block_diag[bi]);
        }
        std::size_t k = 0;
        for (int y = b.y0; y < b.y0 + b.bh; ++y) {
            for (int x = b.x0; x < b.x0 + b.bw; ++x) {
                out[static_cast<std::size_t>(y) * static_cast<std::size_t>(tw) + static_cast<std::size_t>(x)] = vals[k++];
            }
        }
    });
    if (diagnostics != nullptr) {
        for (const auto& d : block_diag) *diagnostics += d;
    }
    return finish(tar, img.v_max(), std::move(out));
}

ImageBuffer classical_resample(const ImageBuffer& img, const ProjectionFormat& src, const ProjectionFormat& tar,
                               ResamplerKind kind, const ExecutionOptions& exec, ResampleDiagnostics* diagnostics) {
    ClassicalConfig cfg;
    cfg.resampler = kind;
    return classical_resample(img, src, tar, cfg, exec, diagnostics);
}

// ---------------------------------------------------------------------------

VarConfig ConversionConfig::var_config() const {
    VarConfig cfg = VarConfig::for_resampler(resampler);
    if (block_size > 0) cfg.block_size = block_size;
    cfg.margin = margin;
    cfg.fsmr = fsmr;
    return cfg;
}

ClassicalConfig ConversionConfig::classical_config() const {
    ClassicalConfig cfg;
    cfg.resampler = resampler;
    cfg.domain = baseline;
    if (block_size > 0) cfg.fsmr_block_size = block_size;
    cfg.margin = margin;
    cfg.fsmr = fsmr;
    return cfg;
}

ImageBuffer convert(const ImageBuffer& img, const ProjectionFormat& src, const ProjectionFormat& tar,
                    const ConversionConfig& cfg, const ExecutionOptions& exec, ResampleDiagnostics* diagnostics) {
    if (cfg.mode == PipelineMode::Var) return var_resample(img, src, tar, cfg.var_config(), exec, diagnostics);
    return classical_resample(img, src, tar, cfg.classical_config(), exec, diagnostics);
}

RoundtripResult roundtrip(const ImageBuffer& img, const ProjectionFormat& src, const ProjectionFormat& tar,
                          const ConversionConfig& cfg, const ExecutionOptions& exec) {
    RoundtripResult r;
    r.intermediate = convert(img, src, tar, cfg, exec, &r.diagnostics);
    r.reconstructed = convert(r.intermediate, tar, src, cfg, exec, &r.diagnostics);
    return r;
}

}  // namespace sphrs
