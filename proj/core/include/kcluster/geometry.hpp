#pragma once

#include <optional>
#include <vector>

namespace kcluster {

using Point = std::vector<double>;

// Discrete clustering instance: clients P, candidate centers C, k centers to
// open, objective exponent z (1 = k-median, 2 = k-means).
struct Instance {
    int dimension = 0;
    std::vector<Point> clients;
    std::vector<Point> candidates;
    int k = 0;
    int objective_z = 2;

    // Throws structural_error / parameter_error on violated invariants.
    void validate() const;
};

// A solution is a subset of candidate indices (ascending, |S| <= k) with an
// optional client -> center assignment.
struct Solution {
    std::vector<int> center_indices;
    std::optional<std::vector<int>> assignment;
};

// Per-client relocation target (p itself, or the baseline center serving p).
struct Relocation {
    std::vector<Point> targets;  // indexed by client
};

Relocation identity_relocation(const Instance& inst);

double squared_distance(const Point& p, const Point& q);
double distance(const Point& p, const Point& q);

// Index into `points` of the nearest point to p; ties broken by lowest index.
int nearest_index(const Point& p, const std::vector<Point>& points,
                  const std::vector<int>& subset);
double distance_to_set(const Point& p, const std::vector<Point>& points,
                       const std::vector<int>& subset);

// Compensated (Kahan) accumulator; clustering costs sum up to 1e6 squared
// terms and plain summation loses digits.
class KahanSum {
public:
    void add(double x) {
        double y = x - c_;
        double t = s_ + y;
        c_ = (t - s_) - y;
        s_ = t;
    }
    double value() const { return s_; }

private:
    double s_ = 0.0;
    double c_ = 0.0;
};

// Sum over clients of dist(p, S)^z with the nearest-center rule (ties to the
// lowest candidate index). Any provided assignment is ignored.
double cost(const Instance& inst, const Solution& sol);

// Sum over clients of (dist(p, p~) + dist(p~, S))^z where p~ is the client's
// relocation target and the center is the one nearest to p~.
double tilde_cost(const Instance& inst, const Relocation& relocation,
                  const Solution& sol);

struct NormalizeResult {
    Instance instance;  // scaled and recentered copy
    double scale;       // 1 / min pairwise distance of the input
    double diameter;    // diameter of the scaled instance
};

// Rescale so the minimum pairwise distance among distinct points of
// clients + candidates is exactly 1, and recenter the bounding box at the
// origin. Costs transform by scale^z. Throws domain_error when all points
// coincide.
NormalizeResult normalize(const Instance& inst);

// Minimum pairwise distance among distinct points (0 excluded); throws
// domain_error if there are no two distinct points.
double min_pairwise_distance(const std::vector<Point>& points);

double diameter(const std::vector<Point>& points);

// Discrete candidate set for a continuous instance: each client plus
// axis-aligned lattices of spacing eps*2^j/sqrt(d) clipped to B(client, 2^j)
// for j = 0..ceil(log2 diam). Lattices are anchored at the bounding-box
// corner so overlapping grids deduplicate. Deterministic.
std::vector<Point> generate_candidates(const std::vector<Point>& clients,
                                       double eps);

}  // namespace kcluster
