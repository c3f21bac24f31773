#pragma once

#include <cstdint>
#include <vector>

#include "kcluster/quadtree.hpp"

namespace kcluster {

// One node of the binarized decomposition. Each decomposition cell of level i
// is refined by d successive axis splits at the cell midplanes; after all d
// splits the children are full level-(i-1) cells. Node boxes are stored as
// integer corners in units of side(cell.level - 1), portal keys in units of
// portal_spacing(cell.level - 1).
struct BinaryNode {
    CellRef cell;   // owning decomposition cell
    int axis = 0;   // axes already split inside the cell (0 = full cell)
    std::vector<std::int64_t> lo;  // box corner, units side(cell.level - 1)

    int parent = -1;
    int left = -1;
    int right = -1;
    bool leaf = false;
    bool empty = false;

    std::vector<int> location_ids;   // client locations inside
    std::vector<int> candidate_ids;  // candidate centers inside

    // sorted, deduplicated; cell-boundary portals restricted to the box plus
    // a fine lattice on every interior split plane bounding the box
    std::vector<std::vector<std::int64_t>> portal_keys;
    std::vector<Point> portals;

    int extent(int /*d*/, int a) const { return a < axis ? 1 : 2; }
};

// Binary refinement of the shifted decomposition over a set of client
// locations and candidate centers. Splitting stops at nodes holding at most
// one distinct location. Both the dynamic program and the exhaustive
// portal-respecting oracle route through these portal layers, so their costs
// are directly comparable.
class BinarySplitTree {
public:
    // locations: relocated client positions (one per client); all points must
    // lie inside the decomposition's root cell.
    static BinarySplitTree build(const ShiftedQuadtree& tree,
                                 const std::vector<Point>& locations,
                                 const std::vector<Point>& candidates);

    const ShiftedQuadtree& decomposition() const { return *tree_; }
    const std::vector<BinaryNode>& nodes() const { return nodes_; }
    const std::vector<Point>& locations() const { return locations_; }
    const std::vector<Point>& candidates() const { return candidates_; }

    int leaf_of_location(int loc_id) const { return loc_leaf_[loc_id]; }
    int leaf_of_candidate(int cand_id) const { return cand_leaf_[cand_id]; }

    // Node box geometry.
    Point node_corner(int node) const;
    double node_side(int node, int a) const;
    // Diameter of the node box.
    double node_diameter(int node) const;

    // Portal keys rescaled to units of portal_spacing(min_unit_level()); lets
    // portals of different nodes be compared exactly.
    int min_unit_level() const { return min_unit_level_; }
    std::vector<std::int64_t> canonical_key(int node, int portal) const;

    // Shortest portal-respecting distance from x (living in leaf node
    // leaf_x) to y (in leaf_y): the path must cross the boundary of every
    // node strictly below the common ancestor at one of its portals.
    double pr_dist(const Point& x, int leaf_x, const Point& y,
                   int leaf_y) const;

private:
    const ShiftedQuadtree* tree_ = nullptr;
    std::vector<BinaryNode> nodes_;
    std::vector<Point> locations_;
    std::vector<Point> candidates_;
    std::vector<int> loc_leaf_;
    std::vector<int> cand_leaf_;
    int min_unit_level_ = 0;

    void fill_portals(BinaryNode& node);
};

}  // namespace kcluster
