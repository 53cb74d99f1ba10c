#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "sphrs/projections.hpp"

namespace sphrs {

/// Delaunay triangulation of scattered 2-D points (incremental insertion with
/// Lawson flips, exact orientation and in-circle predicates). Vertex indices
/// refer to the input point order.
class Triangulation {
public:
    struct Triangle {
        /// Counterclockwise vertex indices.
        std::array<int, 3> vertex;
        /// neighbor[i] is the triangle across the edge opposite vertex[i],
        /// -1 on the convex hull.
        std::array<int, 3> neighbor;
    };

    struct Location {
        int triangle;
        std::array<double, 3> barycentric;
    };

    /// Throws DegenerateGeometryError for fewer than 3 points or collinear input.
    explicit Triangulation(std::span<const PixelCoord> points);

    std::span<const PixelCoord> points() const noexcept { return points_; }
    std::span<const Triangle> triangles() const noexcept { return triangles_; }

    /// Containing triangle of q with barycentric coordinates, or nullopt if q
    /// lies outside the triangulated hull. Independent of previous queries.
    std::optional<Location> locate(PixelCoord q) const;

    /// Vertices sharing an edge with `vertex`, ascending.
    std::span<const int> vertex_neighbors(int vertex) const noexcept;

    /// Input points that were not inserted because they coincide with an
    /// earlier point.
    std::size_t skipped_duplicates() const noexcept { return skipped_; }

private:
    struct Cell {
        std::array<int, 3> v;
        std::array<int, 3> n;
    };

    void build();
    void insert(int point);
    void legalize(int tri, int apex);
    void replace_neighbor(int tri, int old_nbr, int new_nbr);
    int walk(PixelCoord q, int start) const;
    bool is_super(int cell) const noexcept;
    PixelCoord vertex_position(int v) const noexcept;
    void build_jump_grid();

    std::vector<PixelCoord> points_;
    std::array<PixelCoord, 3> super_{};
    std::vector<Cell> cells_;
    int last_cell_{0};
    std::size_t skipped_{0};

    std::vector<Triangle> triangles_;
    std::vector<int> cell_to_triangle_;

    std::vector<int> ring_offsets_;
    std::vector<int> ring_;

    double grid_x0_{0.0};
    double grid_y0_{0.0};
    double grid_step_{1.0};
    int grid_nx_{1};
    int grid_ny_{1};
    std::vector<int> grid_seed_;
};

}  // namespace sphrs
