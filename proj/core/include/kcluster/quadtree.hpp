#pragma once

#include <climits>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "kcluster/geometry.hpp"

namespace kcluster {

// Lattice cell at a level of the decomposition. Cells exist geometrically at
// every level; only cells on root-to-leaf paths of input points are
// materialized.
struct CellRef {
    int level = 0;
    std::vector<std::int64_t> idx;

    bool operator==(const CellRef& o) const = default;
    bool operator<(const CellRef& o) const {
        if (level != o.level) return level > o.level;  // top first
        return idx < o.idx;
    }
};

struct CellInfo {
    CellRef ref;
    int parent = -1;             // index into cells(), -1 for the root
    std::vector<int> point_ids;  // input points inside
};

// Randomized shifted hierarchical decomposition. Level-i cells are
// axis-aligned hypercubes of side 2^{i+1}/sqrt(d), so their Euclidean
// diameter is exactly 2^{i+1}. The whole dyadic grid hierarchy is translated
// by one uniform random shift. Splitting stops once a cell holds at most one
// distinct point location; chains below materialized leaves are answered by
// grid arithmetic.
class ShiftedQuadtree {
public:
    static constexpr int kNotCut = INT_MIN;

    // points must be normalized (min pairwise distance 1); rho in (0,1).
    static ShiftedQuadtree build(const std::vector<Point>& points, double rho,
                                 std::uint64_t rng_seed);

    int dimension() const { return d_; }
    int top_level() const { return top_level_; }
    int bottom_level() const { return bottom_level_; }
    double rho() const { return rho_; }
    const Point& grid_origin() const { return origin_; }
    const Point& shift() const { return shift_; }
    const std::vector<Point>& points() const { return points_; }

    // side of a level-i cell: 2^{i+1}/sqrt(d)
    double side(int level) const;

    CellRef cell_containing(const Point& p, int level) const;
    const std::vector<CellInfo>& cells() const { return cells_; }
    bool is_materialized(const CellRef& c) const;

    // Max level at which B(x,r) intersects >= 2 cells; kNotCut if the ball
    // stays in a single cell at every level. Touching a boundary without
    // entering the neighboring interior does not count as cut.
    int cut_level_ball(const Point& x, double r) const;

    // Level of the smallest cell containing both points; kNotCut iff they
    // share a leaf-level cell.
    int cut_level_pair(const Point& p, const Point& q) const;

    // Portal lattice: per (d-1)-face, spacing side/portals_per_axis with
    // portals_per_axis = ceil(2*sqrt((d-1)/d)/rho), anchored at the grid
    // origin so parent portals inside a child's closure are child portals.
    int portals_per_axis() const { return portals_per_axis_; }
    double portal_spacing(int level) const {
        return side(level) / portals_per_axis_;
    }

    // Portals of a materialized cell; throws structural_error otherwise.
    std::vector<Point> portals_of(const CellRef& cell) const;

    // Same, for any lattice cell (used by path routing below leaves).
    std::vector<Point> portal_points(const CellRef& cell) const;
    // Integer portal coordinates in units of portal_spacing(cell.level).
    std::vector<std::vector<std::int64_t>> portal_keys_of(
        const CellRef& cell) const;

    Point portal_position(int level,
                          const std::vector<std::int64_t>& key) const;

    struct PortalPath {
        double length = 0.0;
        std::vector<Point> waypoints;
    };

    // Greedy per-level portal choice; length <= dist(p,q) + rho*2^{i+2} with
    // i the pair cut level. The DP performs globally optimal routing; this
    // is the diagnostics variant.
    PortalPath portal_path(const Point& p, const Point& q) const;

    // One line per materialized cell:
    // "level cell-id parent-id min-corner side n-points n-portals"
    std::string dump() const;

private:
    int d_ = 0;
    int top_level_ = 0;
    int bottom_level_ = 0;
    double rho_ = 0.0;
    int portals_per_axis_ = 1;
    Point origin_;
    Point shift_;
    std::vector<Point> points_;
    std::vector<CellInfo> cells_;
    std::map<CellRef, int> cell_index_;
};

}  // namespace kcluster
