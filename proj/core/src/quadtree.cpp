#include "kcluster/quadtree.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "kcluster/errors.hpp"
#include "kcluster/rng.hpp"

namespace kcluster {

double ShiftedQuadtree::side(int level) const {
    return std::ldexp(1.0, level + 1) / std::sqrt(static_cast<double>(d_));
}

ShiftedQuadtree ShiftedQuadtree::build(const std::vector<Point>& points,
                                       double rho, std::uint64_t rng_seed) {
    if (points.empty()) throw parameter_error("quadtree: no points");
    if (!(rho > 0.0 && rho < 1.0))
        throw parameter_error("quadtree: rho must be in (0,1)");
    const int d = static_cast<int>(points[0].size());
    for (const Point& p : points) {
        if (static_cast<int>(p.size()) != d)
            throw structural_error("quadtree: dimension mismatch");
        for (double x : p)
            if (!std::isfinite(x))
                throw structural_error("quadtree: non-finite coordinate");
    }

    ShiftedQuadtree t;
    t.d_ = d;
    t.rho_ = rho;
    t.points_ = points;
    t.portals_per_axis_ =
        d == 1 ? 1
               : static_cast<int>(std::ceil(
                     2.0 * std::sqrt((d - 1.0) / d) / rho));

    Point lo = points[0], hi = points[0];
    for (const Point& p : points)
        for (int a = 0; a < d; ++a) {
            lo[a] = std::min(lo[a], p[a]);
            hi[a] = std::max(hi[a], p[a]);
        }
    double extent = 0.0;
    for (int a = 0; a < d; ++a) extent = std::max(extent, hi[a] - lo[a]);

    // root side >= 2 * extent so the root cell still covers everything after
    // shifting by up to side/2 per axis
    const double target = std::max(2.0 * extent, 2.0);
    int L = static_cast<int>(
        std::ceil(std::log2(target * std::sqrt(static_cast<double>(d))))) - 1;
    while (t.side(L) < target) ++L;
    while (L > -1000 && t.side(L - 1) >= target) --L;
    t.top_level_ = L;

    SplitMix64 rng(derive_seed(rng_seed, 0x71d7));
    t.shift_.resize(d);
    t.origin_.resize(d);
    for (int a = 0; a < d; ++a) {
        t.shift_[a] = rng.next_double() * t.side(L) * 0.5;
        t.origin_[a] = lo[a] - t.shift_[a];
    }

    // materialize top-down, splitting cells with >= 2 distinct locations
    CellRef root = t.cell_containing(points[0], L);
    for (const Point& p : points)
        if (!(t.cell_containing(p, L) == root))
            throw internal_error("quadtree: root cell does not cover input");

    CellInfo root_info;
    root_info.ref = root;
    root_info.parent = -1;
    root_info.point_ids.resize(points.size());
    for (std::size_t i = 0; i < points.size(); ++i)
        root_info.point_ids[i] = static_cast<int>(i);
    t.cells_.push_back(std::move(root_info));

    t.bottom_level_ = L;
    std::size_t head = 0;
    while (head < t.cells_.size()) {
        const int ci = static_cast<int>(head++);
        // copy: cells_ may reallocate while children are appended
        const CellInfo cell = t.cells_[ci];
        bool multi = false;
        for (int pid : cell.point_ids)
            if (points[pid] != points[cell.point_ids[0]]) multi = true;
        if (!multi) continue;
        const int child_level = cell.ref.level - 1;
        if (child_level < L - 200)
            throw internal_error("quadtree: excessive depth");
        std::map<CellRef, std::vector<int>> groups;
        for (int pid : cell.point_ids)
            groups[t.cell_containing(points[pid], child_level)].push_back(pid);
        for (auto& [ref, ids] : groups) {
            CellInfo child;
            child.ref = ref;
            child.parent = ci;
            child.point_ids = std::move(ids);
            t.cells_.push_back(std::move(child));
        }
        t.bottom_level_ = std::min(t.bottom_level_, child_level);
    }
    std::stable_sort(t.cells_.begin(), t.cells_.end(),
                     [](const CellInfo& a, const CellInfo& b) {
                         return a.ref < b.ref;
                     });
    // re-link parents after sorting
    std::map<CellRef, int> index;
    for (int i = 0; i < static_cast<int>(t.cells_.size()); ++i)
        index[t.cells_[i].ref] = i;
    for (auto& c : t.cells_) {
        if (c.ref.level == L) {
            c.parent = -1;
            continue;
        }
        CellRef up;
        up.level = c.ref.level + 1;
        up.idx.resize(d);
        for (int a = 0; a < d; ++a)
            up.idx[a] = c.ref.idx[a] >= 0 ? c.ref.idx[a] / 2
                                          : (c.ref.idx[a] - 1) / 2;
        auto it = index.find(up);
        if (it == index.end())
            throw internal_error("quadtree: orphan cell");
        c.parent = it->second;
    }
    t.cell_index_ = std::move(index);
    return t;
}

CellRef ShiftedQuadtree::cell_containing(const Point& p, int level) const {
    CellRef ref;
    ref.level = level;
    ref.idx.resize(d_);
    const double s = side(level);
    for (int a = 0; a < d_; ++a)
        ref.idx[a] = static_cast<std::int64_t>(
            std::floor((p[a] - origin_[a]) / s));
    return ref;
}

bool ShiftedQuadtree::is_materialized(const CellRef& c) const {
    return cell_index_.count(c) > 0;
}

int ShiftedQuadtree::cut_level_ball(const Point& x, double r) const {
    if (r < 0.0) throw parameter_error("cut_level_ball: negative radius");
    if (r == 0.0) return kNotCut;
    for (int i = top_level_; i >= bottom_level_; --i) {
        const double s = side(i);
        for (int a = 0; a < d_; ++a) {
            const double t_lo = (x[a] - r - origin_[a]) / s;
            const double t_hi = (x[a] + r - origin_[a]) / s;
            double f_lo = std::floor(t_lo);
            double f_hi = std::floor(t_hi);
            // touching a boundary from the left does not enter the next cell
            if (f_hi == t_hi) f_hi -= 1.0;
            if (f_lo != f_hi) return i;
        }
    }
    return kNotCut;
}

int ShiftedQuadtree::cut_level_pair(const Point& p, const Point& q) const {
    for (int i = top_level_; i >= bottom_level_; --i)
        if (!(cell_containing(p, i) == cell_containing(q, i))) return i + 1;
    return kNotCut;
}

Point ShiftedQuadtree::portal_position(
    int level, const std::vector<std::int64_t>& key) const {
    const double g = portal_spacing(level);
    Point p(d_);
    for (int a = 0; a < d_; ++a)
        p[a] = origin_[a] + static_cast<double>(key[a]) * g;
    return p;
}

std::vector<std::vector<std::int64_t>> ShiftedQuadtree::portal_keys_of(
    const CellRef& cell) const {
    const int n = portals_per_axis_;
    std::vector<std::int64_t> base(d_), k(d_);
    for (int a = 0; a < d_; ++a) base[a] = cell.idx[a] * n;

    std::vector<std::vector<std::int64_t>> out;
    std::vector<int> off(d_, 0);
    while (true) {
        bool boundary = false;
        for (int a = 0; a < d_; ++a)
            if (off[a] == 0 || off[a] == n) boundary = true;
        if (boundary) {
            for (int a = 0; a < d_; ++a) k[a] = base[a] + off[a];
            out.push_back(k);
        }
        int a = 0;
        while (a < d_ && off[a] == n) off[a++] = 0;
        if (a == d_) break;
        ++off[a];
    }
    return out;
}

std::vector<Point> ShiftedQuadtree::portal_points(const CellRef& cell) const {
    std::vector<Point> out;
    for (const auto& key : portal_keys_of(cell))
        out.push_back(portal_position(cell.level, key));
    return out;
}

std::vector<Point> ShiftedQuadtree::portals_of(const CellRef& cell) const {
    if (!is_materialized(cell))
        throw structural_error("portals_of: cell is not part of the tree");
    return portal_points(cell);
}

ShiftedQuadtree::PortalPath ShiftedQuadtree::portal_path(
    const Point& p, const Point& q) const {
    const int i = cut_level_pair(p, q);
    PortalPath out;
    if (i == kNotCut) {
        out.waypoints = {p, q};
        out.length = distance(p, q);
        return out;
    }
    // one portal per level from the bottom up to i-1 on each side, chosen to
    // minimize the incremental detour toward the other endpoint
    auto chain = [&](const Point& from, const Point& toward) {
        std::vector<Point> c;
        Point cur = from;
        for (int j = bottom_level_; j <= i - 1; ++j) {
            const auto portals = portal_points(cell_containing(from, j));
            double best = std::numeric_limits<double>::infinity();
            Point pick;
            for (const Point& pt : portals) {
                const double v = distance(cur, pt) + distance(pt, toward);
                if (v < best) {
                    best = v;
                    pick = pt;
                }
            }
            c.push_back(pick);
            cur = pick;
        }
        return c;
    };
    std::vector<Point> up = chain(p, q);
    std::vector<Point> down = chain(q, p);
    out.waypoints.push_back(p);
    out.waypoints.insert(out.waypoints.end(), up.begin(), up.end());
    out.waypoints.insert(out.waypoints.end(), down.rbegin(), down.rend());
    out.waypoints.push_back(q);
    KahanSum len;
    for (std::size_t j = 0; j + 1 < out.waypoints.size(); ++j)
        len.add(distance(out.waypoints[j], out.waypoints[j + 1]));
    out.length = len.value();
    return out;
}

std::string ShiftedQuadtree::dump() const {
    std::string out;
    char buf[64];
    for (int ci = 0; ci < static_cast<int>(cells_.size()); ++ci) {
        const CellInfo& c = cells_[ci];
        std::snprintf(buf, sizeof buf, "%d %d %d", c.ref.level, ci, c.parent);
        out += buf;
        const double s = side(c.ref.level);
        for (int a = 0; a < d_; ++a) {
            std::snprintf(buf, sizeof buf, " %.17g",
                          origin_[a] + static_cast<double>(c.ref.idx[a]) * s);
            out += buf;
        }
        const int n = portals_per_axis_;
        std::int64_t n_portals = 1, inner = 1;
        for (int a = 0; a < d_; ++a) {
            n_portals *= n + 1;
            inner *= std::max(n - 1, 0);
        }
        n_portals -= inner;
        std::snprintf(buf, sizeof buf, " %.17g %zu %lld", s,
                      c.point_ids.size(), static_cast<long long>(n_portals));
        out += buf;
        out += '\n';
    }
    return out;
}

}  // namespace kcluster
