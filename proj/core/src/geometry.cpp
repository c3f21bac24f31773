#include "kcluster/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <unordered_map>

#include "kcluster/errors.hpp"

namespace kcluster {

void Instance::validate() const {
    if (dimension < 1) throw parameter_error("dimension must be >= 1");
    if (clients.empty()) throw parameter_error("need at least one client");
    if (candidates.empty()) throw parameter_error("need at least one candidate");
    if (k < 1 || k > static_cast<int>(candidates.size()))
        throw parameter_error("k must satisfy 1 <= k <= m");
    if (objective_z != 1 && objective_z != 2)
        throw parameter_error("objective z must be 1 or 2");
    auto check = [&](const std::vector<Point>& pts, const char* what) {
        for (const Point& p : pts) {
            if (static_cast<int>(p.size()) != dimension)
                throw structural_error(std::string(what) + ": dimension mismatch");
            for (double x : p)
                if (!std::isfinite(x))
                    throw structural_error(std::string(what) + ": non-finite coordinate");
        }
    };
    check(clients, "clients");
    check(candidates, "candidates");
}

Relocation identity_relocation(const Instance& inst) {
    return Relocation{inst.clients};
}

double squared_distance(const Point& p, const Point& q) {
    if (p.size() != q.size())
        throw structural_error("squared_distance: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        double d = p[i] - q[i];
        s += d * d;
    }
    return s;
}

double distance(const Point& p, const Point& q) {
    return std::sqrt(squared_distance(p, q));
}

int nearest_index(const Point& p, const std::vector<Point>& points,
                  const std::vector<int>& subset) {
    if (subset.empty()) throw domain_error("nearest_index: empty center set");
    int best = -1;
    double best_sq = std::numeric_limits<double>::infinity();
    for (int idx : subset) {
        double sq = squared_distance(p, points[idx]);
        if (sq < best_sq || (sq == best_sq && (best < 0 || idx < best))) {
            best_sq = sq;
            best = idx;
        }
    }
    return best;
}

double distance_to_set(const Point& p, const std::vector<Point>& points,
                       const std::vector<int>& subset) {
    return distance(p, points[nearest_index(p, points, subset)]);
}

namespace {

double pow_z(double d, int z) { return z == 1 ? d : d * d; }

}  // namespace

double cost(const Instance& inst, const Solution& sol) {
    if (sol.center_indices.empty()) throw domain_error("cost: empty center set");
    KahanSum sum;
    for (const Point& p : inst.clients) {
        double d = distance_to_set(p, inst.candidates, sol.center_indices);
        sum.add(pow_z(d, inst.objective_z));
    }
    return sum.value();
}

double tilde_cost(const Instance& inst, const Relocation& relocation,
                  const Solution& sol) {
    if (sol.center_indices.empty())
        throw domain_error("tilde_cost: empty center set");
    if (relocation.targets.size() != inst.clients.size())
        throw structural_error("tilde_cost: relocation does not cover all clients");
    KahanSum sum;
    for (std::size_t i = 0; i < inst.clients.size(); ++i) {
        const Point& p = inst.clients[i];
        const Point& tp = relocation.targets[i];
        double d = distance(p, tp) +
                   distance_to_set(tp, inst.candidates, sol.center_indices);
        sum.add(pow_z(d, inst.objective_z));
    }
    return sum.value();
}

namespace {

// Exact minimum pairwise distance via a uniform grid. The cell size starts
// near the expected spacing and shrinks when buckets overflow, so clustered
// inputs stay tractable; a pair at distance <= cell size always lands in
// adjacent cells, which makes the scan exact.
double min_pairwise_grid(const std::vector<Point>& pts) {
    const int d = static_cast<int>(pts[0].size());
    Point lo = pts[0], hi = pts[0];
    for (const Point& p : pts)
        for (int a = 0; a < d; ++a) {
            lo[a] = std::min(lo[a], p[a]);
            hi[a] = std::max(hi[a], p[a]);
        }
    double extent = 0.0;
    for (int a = 0; a < d; ++a) extent = std::max(extent, hi[a] - lo[a]);
    if (extent == 0.0) throw domain_error("all points identical");

    double cell = extent / std::max(1.0, std::pow(static_cast<double>(pts.size()),
                                                  1.0 / d));
    const std::size_t bucket_cap = 64;

    for (int attempt = 0; attempt < 64; ++attempt) {
        std::map<std::vector<std::int64_t>, std::vector<int>> grid;
        bool overflow = false;
        for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
            std::vector<std::int64_t> key(d);
            for (int a = 0; a < d; ++a)
                key[a] = static_cast<std::int64_t>(
                    std::floor((pts[i][a] - lo[a]) / cell));
            auto& bucket = grid[key];
            bucket.push_back(i);
            if (bucket.size() > bucket_cap) overflow = true;
        }
        if (overflow) {
            // Identical points may fill a bucket forever; detect and skip them.
            bool all_dup = true;
            for (auto& [key, bucket] : grid) {
                if (bucket.size() <= bucket_cap) continue;
                for (std::size_t i = 1; i < bucket.size(); ++i)
                    if (pts[bucket[i]] != pts[bucket[0]]) all_dup = false;
            }
            if (!all_dup) {
                cell /= 4.0;
                continue;
            }
        }
        double best = std::numeric_limits<double>::infinity();
        std::vector<std::int64_t> nb(d);
        for (const auto& [key, bucket] : grid) {
            // neighbor offsets in {-1,0,1}^d, visiting each unordered cell
            // pair once via lexicographic ordering
            std::vector<int> off(d, -1);
            while (true) {
                for (int a = 0; a < d; ++a) nb[a] = key[a] + off[a];
                if (!(nb < key)) {
                    auto it = grid.find(nb);
                    if (it != grid.end()) {
                        const bool same = (it->first == key);
                        for (std::size_t i = 0; i < bucket.size(); ++i) {
                            const auto& other = it->second;
                            for (std::size_t j = same ? i + 1 : 0;
                                 j < other.size(); ++j) {
                                double sq =
                                    squared_distance(pts[bucket[i]], pts[other[j]]);
                                if (sq > 0.0) best = std::min(best, sq);
                            }
                        }
                    }
                }
                int a = 0;
                while (a < d && off[a] == 1) off[a++] = -1;
                if (a == d) break;
                ++off[a];
            }
        }
        best = std::sqrt(best);
        if (best <= cell * 1.0000001) return best;
        if (std::isfinite(best)) {
            // found a pair but it might not be minimal at this resolution
            cell = best;
            continue;
        }
        cell *= 2.0;  // no adjacent pair at all, coarsen
    }
    throw internal_error("min_pairwise_distance did not converge");
}

}  // namespace

double min_pairwise_distance(const std::vector<Point>& points) {
    if (points.size() < 2) throw domain_error("need at least two points");
    return min_pairwise_grid(points);
}

double diameter(const std::vector<Point>& points) {
    // bounding-box diagonal is within sqrt(d) of the true diameter and is
    // what the decomposition sizing needs; the exact diameter is only used
    // on small inputs, so fall back to the quadratic scan there
    if (points.size() <= 2048) {
        double best = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i)
            for (std::size_t j = i + 1; j < points.size(); ++j)
                best = std::max(best, squared_distance(points[i], points[j]));
        return std::sqrt(best);
    }
    Point lo = points[0], hi = points[0];
    for (const Point& p : points)
        for (std::size_t a = 0; a < p.size(); ++a) {
            lo[a] = std::min(lo[a], p[a]);
            hi[a] = std::max(hi[a], p[a]);
        }
    return distance(lo, hi);
}

NormalizeResult normalize(const Instance& inst) {
    inst.validate();
    std::vector<Point> all = inst.clients;
    all.insert(all.end(), inst.candidates.begin(), inst.candidates.end());
    double min_dist;
    try {
        min_dist = min_pairwise_distance(all);
    } catch (const domain_error&) {
        throw domain_error("normalize: all points identical");
    }
    const double scale = 1.0 / min_dist;

    const int d = inst.dimension;
    Point lo = all[0], hi = all[0];
    for (const Point& p : all)
        for (int a = 0; a < d; ++a) {
            lo[a] = std::min(lo[a], p[a]);
            hi[a] = std::max(hi[a], p[a]);
        }
    Point center(d);
    for (int a = 0; a < d; ++a) center[a] = 0.5 * (lo[a] + hi[a]);

    auto transform = [&](const Point& p) {
        Point q(d);
        for (int a = 0; a < d; ++a) q[a] = (p[a] - center[a]) * scale;
        return q;
    };

    NormalizeResult out;
    out.instance = inst;
    for (auto& p : out.instance.clients) p = transform(p);
    for (auto& p : out.instance.candidates) p = transform(p);
    out.scale = scale;

    std::vector<Point> scaled = out.instance.clients;
    scaled.insert(scaled.end(), out.instance.candidates.begin(),
                  out.instance.candidates.end());
    out.diameter = diameter(scaled);
    return out;
}

std::vector<Point> generate_candidates(const std::vector<Point>& clients,
                                       double eps) {
    if (!(eps > 0.0 && eps < 1.0))
        throw parameter_error("generate_candidates: eps must be in (0,1)");
    if (clients.empty()) return {};
    const int d = static_cast<int>(clients[0].size());
    const double sqrt_d = std::sqrt(static_cast<double>(d));

    Point anchor = clients[0];
    for (const Point& p : clients)
        for (int a = 0; a < d; ++a) anchor[a] = std::min(anchor[a], p[a]);

    double diam = diameter(clients);
    int max_j = diam > 1.0 ? static_cast<int>(std::ceil(std::log2(diam))) : 0;

    std::vector<Point> out = clients;
    // lattice indices already emitted, keyed by scale
    std::map<std::pair<int, std::vector<std::int64_t>>, bool> seen;

    for (int j = 0; j <= max_j; ++j) {
        const double radius = std::pow(2.0, j);
        const double spacing = eps * radius / sqrt_d;
        for (const Point& p : clients) {
            std::vector<std::int64_t> lo(d), hi(d), idx(d);
            for (int a = 0; a < d; ++a) {
                lo[a] = static_cast<std::int64_t>(
                    std::ceil((p[a] - radius - anchor[a]) / spacing));
                hi[a] = static_cast<std::int64_t>(
                    std::floor((p[a] + radius - anchor[a]) / spacing));
            }
            idx = lo;
            while (true) {
                Point q(d);
                for (int a = 0; a < d; ++a)
                    q[a] = anchor[a] + static_cast<double>(idx[a]) * spacing;
                if (squared_distance(p, q) <= radius * radius) {
                    auto key = std::make_pair(j, idx);
                    if (seen.emplace(key, true).second) out.push_back(q);
                }
                int a = 0;
                while (a < d && idx[a] == hi[a]) idx[a] = lo[a], ++a;
                if (a == d) break;
                ++idx[a];
            }
        }
    }
    return out;
}

}  // namespace kcluster
