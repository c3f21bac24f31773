#include "kcluster/binary_tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "kcluster/errors.hpp"

namespace kcluster {

namespace {


}  // namespace

BinarySplitTree BinarySplitTree::build(const ShiftedQuadtree& tree,
                                       const std::vector<Point>& locations,
                                       const std::vector<Point>& candidates) {
    if (locations.empty() && candidates.empty())
        throw parameter_error("binary tree: no points");
    const int d = tree.dimension();

    BinarySplitTree bt;
    bt.tree_ = &tree;
    bt.locations_ = locations;
    bt.candidates_ = candidates;
    bt.loc_leaf_.assign(locations.size(), -1);
    bt.cand_leaf_.assign(candidates.size(), -1);

    const Point& first = locations.empty() ? candidates[0] : locations[0];
    const int L = tree.top_level();
    CellRef root_ref = tree.cell_containing(first, L);
    auto check_inside = [&](const std::vector<Point>& pts) {
        for (const Point& p : pts)
            if (!(tree.cell_containing(p, L) == root_ref))
                throw structural_error(
                    "binary tree: point outside the root cell");
    };
    check_inside(locations);
    check_inside(candidates);

    BinaryNode root;
    root.cell = root_ref;
    root.axis = 0;
    root.lo.resize(d);
    for (int a = 0; a < d; ++a) root.lo[a] = 2 * root_ref.idx[a];
    root.location_ids.resize(locations.size());
    for (std::size_t i = 0; i < locations.size(); ++i)
        root.location_ids[i] = static_cast<int>(i);
    root.candidate_ids.resize(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i)
        root.candidate_ids[i] = static_cast<int>(i);
    bt.nodes_.push_back(std::move(root));
    bt.min_unit_level_ = L - 1;

    std::size_t head = 0;
    while (head < bt.nodes_.size()) {
        const int ni = static_cast<int>(head++);
        BinaryNode node = bt.nodes_[ni];  // copy, vector may reallocate

        const Point* loc0 = nullptr;
        bool multi = false;
        auto scan = [&](const std::vector<int>& ids,
                        const std::vector<Point>& pts) {
            for (int id : ids) {
                if (!loc0)
                    loc0 = &pts[id];
                else if (pts[id] != *loc0)
                    multi = true;
            }
        };
        scan(node.location_ids, locations);
        scan(node.candidate_ids, candidates);

        if (!multi) {
            bt.nodes_[ni].leaf = true;
            bt.nodes_[ni].empty = (loc0 == nullptr);
            for (int id : node.location_ids) bt.loc_leaf_[id] = ni;
            for (int id : node.candidate_ids) bt.cand_leaf_[id] = ni;
            continue;
        }
        if (node.cell.level < tree.bottom_level() - 80)
            throw internal_error("binary tree: excessive depth");

        const int a = node.axis;
        const double s_child = tree.side(node.cell.level - 1);
        auto side_of = [&](const Point& p) {
            const std::int64_t c = static_cast<std::int64_t>(
                std::floor((p[a] - tree.grid_origin()[a]) / s_child));
            if (c != node.lo[a] && c != node.lo[a] + 1)
                throw internal_error("binary tree: point outside node box");
            return static_cast<int>(c - node.lo[a]);
        };

        BinaryNode child[2];
        for (int h = 0; h < 2; ++h) {
            BinaryNode& cn = child[h];
            cn.parent = ni;
            if (a == d - 1) {
                cn.cell.level = node.cell.level - 1;
                cn.cell.idx.resize(d);
                for (int b = 0; b < d - 1; ++b) cn.cell.idx[b] = node.lo[b];
                cn.cell.idx[d - 1] = node.lo[d - 1] + h;
                cn.axis = 0;
                cn.lo.resize(d);
                for (int b = 0; b < d; ++b) cn.lo[b] = 2 * cn.cell.idx[b];
                bt.min_unit_level_ =
                    std::min(bt.min_unit_level_, cn.cell.level - 1);
            } else {
                cn.cell = node.cell;
                cn.axis = a + 1;
                cn.lo = node.lo;
                cn.lo[a] += h;
            }
        }
        for (int id : node.location_ids)
            child[side_of(locations[id])].location_ids.push_back(id);
        for (int id : node.candidate_ids)
            child[side_of(candidates[id])].candidate_ids.push_back(id);

        bt.nodes_[ni].left = static_cast<int>(bt.nodes_.size());
        bt.nodes_.push_back(std::move(child[0]));
        bt.nodes_[ni].right = static_cast<int>(bt.nodes_.size());
        bt.nodes_.push_back(std::move(child[1]));
    }

    for (auto& n : bt.nodes_)
        if (!n.empty) bt.fill_portals(n);
    return bt;
}

void BinarySplitTree::fill_portals(BinaryNode& node) {
    const int d = tree_->dimension();
    const int n = tree_->portals_per_axis();
    std::set<std::vector<std::int64_t>> keys;

    // cell-boundary portals restricted to the node closure (coarse lattice,
    // rescaled to the node's fine units)
    for (const auto& k : tree_->portal_keys_of(node.cell)) {
        std::vector<std::int64_t> fine(d);
        bool inside = true;
        for (int a = 0; a < d; ++a) {
            fine[a] = 2 * k[a];
            const std::int64_t b_lo = node.lo[a] * n;
            const std::int64_t b_hi = (node.lo[a] + node.extent(d, a)) * n;
            if (fine[a] < b_lo || fine[a] > b_hi) inside = false;
        }
        if (inside) keys.insert(std::move(fine));
    }

    // fine lattice on every interior split plane bounding the node
    for (int b = 0; b < node.axis; ++b) {
        const bool low_half = ((node.lo[b] % 2) + 2) % 2 == 0;
        const std::int64_t plane = (node.lo[b] + (low_half ? 1 : 0)) * n;
        std::vector<std::int64_t> k(d), lo(d), hi(d);
        for (int c = 0; c < d; ++c) {
            lo[c] = node.lo[c] * n;
            hi[c] = (node.lo[c] + node.extent(d, c)) * n;
        }
        lo[b] = hi[b] = plane;
        k = lo;
        while (true) {
            keys.insert(k);
            int c = 0;
            while (c < d && k[c] == hi[c]) k[c] = lo[c], ++c;
            if (c == d) break;
            ++k[c];
        }
    }

    node.portal_keys.assign(keys.begin(), keys.end());
    node.portals.clear();
    for (const auto& k : node.portal_keys)
        node.portals.push_back(tree_->portal_position(node.cell.level - 1, k));
}

Point BinarySplitTree::node_corner(int node) const {
    const BinaryNode& nd = nodes_[node];
    const double s = tree_->side(nd.cell.level - 1);
    const int d = tree_->dimension();
    Point p(d);
    for (int a = 0; a < d; ++a)
        p[a] = tree_->grid_origin()[a] + static_cast<double>(nd.lo[a]) * s;
    return p;
}

double BinarySplitTree::node_side(int node, int a) const {
    const BinaryNode& nd = nodes_[node];
    return nd.extent(tree_->dimension(), a) * tree_->side(nd.cell.level - 1);
}

double BinarySplitTree::node_diameter(int node) const {
    double sq = 0.0;
    for (int a = 0; a < tree_->dimension(); ++a) {
        const double s = node_side(node, a);
        sq += s * s;
    }
    return std::sqrt(sq);
}

std::vector<std::int64_t> BinarySplitTree::canonical_key(int node,
                                                         int portal) const {
    const BinaryNode& nd = nodes_[node];
    const int shift = (nd.cell.level - 1) - min_unit_level_;
    if (shift < 0 || shift > 60)
        throw internal_error("canonical_key: level span too large");
    std::vector<std::int64_t> k = nd.portal_keys[portal];
    for (auto& v : k) v <<= shift;
    return k;
}

double BinarySplitTree::pr_dist(const Point& x, int leaf_x, const Point& y,
                                int leaf_y) const {
    if (leaf_x == leaf_y) return distance(x, y);

    auto depth = [&](int v) {
        int dep = 0;
        for (; nodes_[v].parent >= 0; v = nodes_[v].parent) ++dep;
        return dep;
    };
    int u = leaf_x, v = leaf_y;
    int du = depth(u), dv = depth(v);
    std::vector<int> up, down;
    while (du > dv) up.push_back(u), u = nodes_[u].parent, --du;
    while (dv > du) down.push_back(v), v = nodes_[v].parent, --dv;
    while (u != v) {
        up.push_back(u);
        down.push_back(v);
        u = nodes_[u].parent;
        v = nodes_[v].parent;
    }

    // layered relaxation: one portal layer per node strictly below the
    // common ancestor, x-side bottom-up then y-side top-down
    std::vector<int> layers = up;
    layers.insert(layers.end(), down.rbegin(), down.rend());

    std::vector<Point> prev_pts = {x};
    std::vector<double> prev_d = {0.0};
    for (int node : layers) {
        const auto& portals = nodes_[node].portals;
        if (portals.empty())
            throw internal_error("pr_dist: node without portals on path");
        std::vector<double> cur(portals.size(),
                                std::numeric_limits<double>::infinity());
        for (std::size_t j = 0; j < portals.size(); ++j)
            for (std::size_t i = 0; i < prev_pts.size(); ++i)
                cur[j] = std::min(cur[j],
                                  prev_d[i] + distance(prev_pts[i], portals[j]));
        prev_pts = portals;
        prev_d = std::move(cur);
    }
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < prev_pts.size(); ++i)
        best = std::min(best, prev_d[i] + distance(prev_pts[i], y));
    return best;
}

}  // namespace kcluster
