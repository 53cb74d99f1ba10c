#include "sphrs/triangulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "predicates.hpp"
#include "sphrs/errors.hpp"

namespace sphrs {

namespace {

using detail::incircle;
using detail::orient2d;

std::uint64_t hilbert_index(std::uint32_t x, std::uint32_t y, int order) noexcept {
    std::uint64_t d = 0;
    for (std::uint32_t s = 1u << (order - 1); s > 0; s >>= 1) {
        const std::uint32_t rx = (x & s) > 0 ? 1u : 0u;
        const std::uint32_t ry = (y & s) > 0 ? 1u : 0u;
        d += static_cast<std::uint64_t>(s) * s * ((3u * rx) ^ ry);
        if (ry == 0) {
            if (rx == 1) {
                x = s - 1 - x;
                y = s - 1 - y;
            }
            std::swap(x, y);
        }
    }
    return d;
}

int index_of(const std::array<int, 3>& a, int value) noexcept {
    for (int i = 0; i < 3; ++i) {
        if (a[static_cast<std::size_t>(i)] == value) return i;
    }
    return -1;
}

}  // namespace

Triangulation::Triangulation(std::span<const PixelCoord> points) : points_(points.begin(), points.end()) {
    if (points_.size() < 3) throw DegenerateGeometryError("triangulation needs at least 3 points");
    build();
}

PixelCoord Triangulation::vertex_position(int v) const noexcept {
    const int n = static_cast<int>(points_.size());
    return v < n ? points_[static_cast<std::size_t>(v)] : super_[static_cast<std::size_t>(v - n)];
}

bool Triangulation::is_super(int cell) const noexcept {
    const int n = static_cast<int>(points_.size());
    const auto& v = cells_[static_cast<std::size_t>(cell)].v;
    return v[0] >= n || v[1] >= n || v[2] >= n;
}

void Triangulation::replace_neighbor(int tri, int old_nbr, int new_nbr) {
    if (tri < 0) return;
    auto& n = cells_[static_cast<std::size_t>(tri)].n;
    for (int& x : n) {
        if (x == old_nbr) {
            x = new_nbr;
            return;
        }
    }
}

int Triangulation::walk(PixelCoord q, int start) const {
    int t = start;
    const std::size_t limit = 4 * cells_.size() + 16;
    for (std::size_t step = 0; step < limit; ++step) {
        const Cell& c = cells_[static_cast<std::size_t>(t)];
        int next = -2;
        for (int i = 0; i < 3; ++i) {
            const PixelCoord a = vertex_position(c.v[static_cast<std::size_t>((i + 1) % 3)]);
            const PixelCoord b = vertex_position(c.v[static_cast<std::size_t>((i + 2) % 3)]);
            if (orient2d(a, b, q) < 0.0) {
                next = c.n[static_cast<std::size_t>(i)];
                break;
            }
        }
        if (next == -2) return t;
        if (next == -1) return -1;
        t = next;
    }
    // Exhaustive fallback; not expected for Delaunay triangulations.
    for (std::size_t k = 0; k < cells_.size(); ++k) {
        const Cell& c = cells_[k];
        bool inside = true;
        for (int i = 0; i < 3 && inside; ++i) {
            inside = orient2d(vertex_position(c.v[static_cast<std::size_t>((i + 1) % 3)]),
                              vertex_position(c.v[static_cast<std::size_t>((i + 2) % 3)]), q) >= 0.0;
        }
        if (inside) return static_cast<int>(k);
    }
    return -1;
}

void Triangulation::build() {
    const int n = static_cast<int>(points_.size());
    double xmin = points_[0].u;
    double xmax = xmin;
    double ymin = points_[0].v;
    double ymax = ymin;
    for (const auto& p : points_) {
        xmin = std::min(xmin, p.u);
        xmax = std::max(xmax, p.u);
        ymin = std::min(ymin, p.v);
        ymax = std::max(ymax, p.v);
    }
    const double extent = std::max(xmax - xmin, ymax - ymin);
    if (!(extent > 0.0)) throw DegenerateGeometryError("triangulation input has no spatial extent");
    const double cx = 0.5 * (xmin + xmax);
    const double cy = 0.5 * (ymin + ymax);
    const double k = 1e4 * extent;
    super_ = {PixelCoord{cx - 2.0 * k, cy - k}, PixelCoord{cx + 2.0 * k, cy - k}, PixelCoord{cx, cy + 2.0 * k}};
    cells_.clear();
    cells_.push_back({{n, n + 1, n + 2}, {-1, -1, -1}});
    last_cell_ = 0;

    // Hilbert-curve insertion order keeps point location walks short.
    constexpr int kOrder = 16;
    const double scale = static_cast<double>((1u << kOrder) - 1) / extent;
    std::vector<std::pair<std::uint64_t, int>> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const auto& p = points_[static_cast<std::size_t>(i)];
        const auto hx = static_cast<std::uint32_t>((p.u - xmin) * scale);
        const auto hy = static_cast<std::uint32_t>((p.v - ymin) * scale);
        order[static_cast<std::size_t>(i)] = {hilbert_index(hx, hy, kOrder), i};
    }
    std::sort(order.begin(), order.end());
    cells_.reserve(static_cast<std::size_t>(2 * n + 4));
    for (const auto& entry : order) insert(entry.second);

    cell_to_triangle_.assign(cells_.size(), -1);
    for (std::size_t c = 0; c < cells_.size(); ++c) {
        if (!is_super(static_cast<int>(c))) {
            cell_to_triangle_[c] = static_cast<int>(triangles_.size());
            triangles_.push_back({cells_[c].v, {-1, -1, -1}});
        }
    }
    if (triangles_.empty()) throw DegenerateGeometryError("triangulation input is collinear");
    for (std::size_t c = 0; c < cells_.size(); ++c) {
        const int t = cell_to_triangle_[c];
        if (t < 0) continue;
        for (std::size_t i = 0; i < 3; ++i) {
            const int nb = cells_[c].n[i];
            triangles_[static_cast<std::size_t>(t)].neighbor[i] =
                nb < 0 ? -1 : cell_to_triangle_[static_cast<std::size_t>(nb)];
        }
    }

    std::vector<std::vector<int>> rings(static_cast<std::size_t>(n));
    for (const auto& t : triangles_) {
        for (std::size_t i = 0; i < 3; ++i) {
            rings[static_cast<std::size_t>(t.vertex[i])].push_back(t.vertex[(i + 1) % 3]);
            rings[static_cast<std::size_t>(t.vertex[i])].push_back(t.vertex[(i + 2) % 3]);
        }
    }
    ring_offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
    for (int i = 0; i < n; ++i) {
        auto& r = rings[static_cast<std::size_t>(i)];
        std::sort(r.begin(), r.end());
        r.erase(std::unique(r.begin(), r.end()), r.end());
        ring_offsets_[static_cast<std::size_t>(i) + 1] =
            ring_offsets_[static_cast<std::size_t>(i)] + static_cast<int>(r.size());
    }
    ring_.reserve(static_cast<std::size_t>(ring_offsets_.back()));
    for (const auto& r : rings) ring_.insert(ring_.end(), r.begin(), r.end());

    build_jump_grid();
}

void Triangulation::insert(int point) {
    const PixelCoord p = points_[static_cast<std::size_t>(point)];
    const int t = walk(p, last_cell_);
    if (t < 0) throw DegenerateGeometryError("point outside the bounding triangle");

    const Cell cell = cells_[static_cast<std::size_t>(t)];
    std::array<double, 3> o{};
    int zeros = 0;
    int zero_edge = -1;
    for (int i = 0; i < 3; ++i) {
        o[static_cast<std::size_t>(i)] = orient2d(vertex_position(cell.v[static_cast<std::size_t>((i + 1) % 3)]),
                                                  vertex_position(cell.v[static_cast<std::size_t>((i + 2) % 3)]), p);
        if (o[static_cast<std::size_t>(i)] == 0.0) {
            ++zeros;
            zero_edge = i;
        }
    }
    if (zeros >= 2) {
        ++skipped_;
        return;
    }

    if (zeros == 0) {
        const int a = cell.v[0];
        const int b = cell.v[1];
        const int c = cell.v[2];
        const int na = cell.n[0];
        const int nb = cell.n[1];
        const int nc = cell.n[2];
        const int t0 = t;
        const int t1 = static_cast<int>(cells_.size());
        const int t2 = t1 + 1;
        cells_[static_cast<std::size_t>(t0)] = {{a, b, point}, {t1, t2, nc}};
        cells_.push_back({{b, c, point}, {t2, t0, na}});
        cells_.push_back({{c, a, point}, {t0, t1, nb}});
        replace_neighbor(na, t, t1);
        replace_neighbor(nb, t, t2);
        last_cell_ = t0;
        legalize(t0, point);
        legalize(t1, point);
        legalize(t2, point);
        return;
    }

    // p lies on the edge opposite cell.v[zero_edge]; split both sides.
    const int ia = zero_edge;
    const int a = cell.v[static_cast<std::size_t>(ia)];
    const int q = cell.v[static_cast<std::size_t>((ia + 1) % 3)];
    const int r = cell.v[static_cast<std::size_t>((ia + 2) % 3)];
    const int u = cell.n[static_cast<std::size_t>(ia)];
    const int nA = cell.n[static_cast<std::size_t>((ia + 1) % 3)];
    const int nB = cell.n[static_cast<std::size_t>((ia + 2) % 3)];
    if (u < 0) throw DegenerateGeometryError("point on the bounding triangle boundary");
    const Cell ucell = cells_[static_cast<std::size_t>(u)];
    const int j = index_of(ucell.n, t);
    const int d = ucell.v[static_cast<std::size_t>(j)];
    // ucell rotated to (d, r, q).
    const int nC = ucell.n[static_cast<std::size_t>((j + 1) % 3)];
    const int nD = ucell.n[static_cast<std::size_t>((j + 2) % 3)];

    const int t0 = t;
    const int u0 = u;
    const int t1 = static_cast<int>(cells_.size());
    const int u1 = t1 + 1;
    cells_[static_cast<std::size_t>(t0)] = {{a, q, point}, {u1, t1, nB}};
    cells_.push_back({{a, point, r}, {u0, nA, t0}});
    cells_[static_cast<std::size_t>(u0)] = {{d, r, point}, {t1, u1, nD}};
    cells_.push_back({{d, point, q}, {t0, nC, u0}});
    replace_neighbor(nA, t, t1);
    replace_neighbor(nC, u, u1);
    last_cell_ = t0;
    legalize(t0, point);
    legalize(t1, point);
    legalize(u0, point);
    legalize(u1, point);
}

void Triangulation::legalize(int tri, int apex) {
    std::vector<int> stack{tri};
    while (!stack.empty()) {
        const int t = stack.back();
        stack.pop_back();
        Cell tc = cells_[static_cast<std::size_t>(t)];
        const int k = index_of(tc.v, apex);
        if (k < 0) continue;
        const int u = tc.n[static_cast<std::size_t>(k)];
        if (u < 0) continue;
        const Cell uc = cells_[static_cast<std::size_t>(u)];
        const int j = index_of(uc.n, t);
        const int d = uc.v[static_cast<std::size_t>(j)];
        if (!(incircle(vertex_position(tc.v[0]), vertex_position(tc.v[1]), vertex_position(tc.v[2]),
                       vertex_position(d)) > 0.0)) {
            continue;
        }
        // t = (p, q, r) with neighbors (u, A, B); u = (d, r, q) with neighbors (t, C, D).
        const int q = tc.v[static_cast<std::size_t>((k + 1) % 3)];
        const int r = tc.v[static_cast<std::size_t>((k + 2) % 3)];
        const int nA = tc.n[static_cast<std::size_t>((k + 1) % 3)];
        const int nB = tc.n[static_cast<std::size_t>((k + 2) % 3)];
        const int nC = uc.n[static_cast<std::size_t>((j + 1) % 3)];
        const int nD = uc.n[static_cast<std::size_t>((j + 2) % 3)];
        cells_[static_cast<std::size_t>(t)] = {{apex, q, d}, {nC, u, nB}};
        cells_[static_cast<std::size_t>(u)] = {{apex, d, r}, {nD, nA, t}};
        replace_neighbor(nC, u, t);
        replace_neighbor(nA, t, u);
        stack.push_back(t);
        stack.push_back(u);
    }
}

void Triangulation::build_jump_grid() {
    double xmin = points_[0].u;
    double xmax = xmin;
    double ymin = points_[0].v;
    double ymax = ymin;
    for (const auto& p : points_) {
        xmin = std::min(xmin, p.u);
        xmax = std::max(xmax, p.u);
        ymin = std::min(ymin, p.v);
        ymax = std::max(ymax, p.v);
    }
    const double w = std::max(xmax - xmin, 1e-300);
    const double h = std::max(ymax - ymin, 1e-300);
    const double target_cells = std::max(1.0, static_cast<double>(triangles_.size()) / 4.0);
    grid_step_ = std::sqrt(w * h / target_cells);
    if (!(grid_step_ > 0.0)) grid_step_ = std::max(w, h);
    grid_nx_ = std::clamp(static_cast<int>(std::ceil(w / grid_step_)), 1, 4096);
    grid_ny_ = std::clamp(static_cast<int>(std::ceil(h / grid_step_)), 1, 4096);
    grid_x0_ = xmin;
    grid_y0_ = ymin;
    grid_seed_.assign(static_cast<std::size_t>(grid_nx_) * static_cast<std::size_t>(grid_ny_), 0);
    int seed = 0;
    for (int gy = 0; gy < grid_ny_; ++gy) {
        for (int gx = 0; gx < grid_nx_; ++gx) {
            const PixelCoord c{grid_x0_ + (gx + 0.5) * grid_step_, grid_y0_ + (gy + 0.5) * grid_step_};
            const int found = walk(c, seed);
            if (found >= 0) seed = found;
            grid_seed_[static_cast<std::size_t>(gy) * static_cast<std::size_t>(grid_nx_) +
                       static_cast<std::size_t>(gx)] = seed;
        }
    }
}

std::optional<Triangulation::Location> Triangulation::locate(PixelCoord q) const {
    if (!std::isfinite(q.u) || !std::isfinite(q.v)) return std::nullopt;
    const int gx = std::clamp(static_cast<int>(std::floor((q.u - grid_x0_) / grid_step_)), 0, grid_nx_ - 1);
    const int gy = std::clamp(static_cast<int>(std::floor((q.v - grid_y0_) / grid_step_)), 0, grid_ny_ - 1);
    int c = walk(q, grid_seed_[static_cast<std::size_t>(gy) * static_cast<std::size_t>(grid_nx_) +
                               static_cast<std::size_t>(gx)]);
    if (c < 0) return std::nullopt;

    if (is_super(c)) {
        // q may sit on an edge shared with a real triangle.
        const Cell& cell = cells_[static_cast<std::size_t>(c)];
        int found = -1;
        for (int i = 0; i < 3 && found < 0; ++i) {
            const PixelCoord a = vertex_position(cell.v[static_cast<std::size_t>((i + 1) % 3)]);
            const PixelCoord b = vertex_position(cell.v[static_cast<std::size_t>((i + 2) % 3)]);
            const int nb = cell.n[static_cast<std::size_t>(i)];
            if (nb < 0 || is_super(nb) || orient2d(a, b, q) != 0.0) continue;
            const Cell& other = cells_[static_cast<std::size_t>(nb)];
            bool inside = true;
            for (int e = 0; e < 3 && inside; ++e) {
                inside = orient2d(vertex_position(other.v[static_cast<std::size_t>((e + 1) % 3)]),
                                  vertex_position(other.v[static_cast<std::size_t>((e + 2) % 3)]), q) >= 0.0;
            }
            if (inside) found = nb;
        }
        if (found < 0) return std::nullopt;
        c = found;
    }

    const Cell& cell = cells_[static_cast<std::size_t>(c)];
    const PixelCoord a = points_[static_cast<std::size_t>(cell.v[0])];
    const PixelCoord b = points_[static_cast<std::size_t>(cell.v[1])];
    const PixelCoord d = points_[static_cast<std::size_t>(cell.v[2])];
    const double det = (b.u - a.u) * (d.v - a.v) - (b.v - a.v) * (d.u - a.u);
    const double l1 = ((q.u - a.u) * (d.v - a.v) - (q.v - a.v) * (d.u - a.u)) / det;
    const double l2 = ((b.u - a.u) * (q.v - a.v) - (b.v - a.v) * (q.u - a.u)) / det;
    return Location{cell_to_triangle_[static_cast<std::size_t>(c)], {1.0 - l1 - l2, l1, l2}};
}

std::span<const int> Triangulation::vertex_neighbors(int vertex) const noexcept {
    const auto b = static_cast<std::size_t>(ring_offsets_[static_cast<std::size_t>(vertex)]);
    const auto e = static_cast<std::size_t>(ring_offsets_[static_cast<std::size_t>(vertex) + 1]);
    return std::span<const int>(ring_).subspan(b, e - b);
}

}  // namespace sphrs
