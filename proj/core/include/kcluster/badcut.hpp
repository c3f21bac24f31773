#pragma once

#include <vector>

#include "kcluster/geometry.hpp"
#include "kcluster/quadtree.hpp"

namespace kcluster {

// eps-derived parameters shared by classification, budgets, and the portal
// machinery.
struct CutParams {
    double eps = 0.0;
    int d = 0;
    double tau = 0.0;  // log2(d) + log2(1/eps)
    double rho = 0.0;  // eps / log2(1/eps), clamped below 1

    static CutParams make(double eps, int d);
};

// log2(d) + log2(1/eps); throws parameter_error outside eps in (0,1), d >= 1.
double tau(double eps, int d);

// A ball B(x,r) is badly cut when its cut level is at least
// log2(3r) + tau. r = 0 is never badly cut. Real-valued comparison.
bool classify_badly_cut(const ShiftedQuadtree& tree, const Point& x, double r,
                        const CutParams& params);

struct BadCutReport {
    // per client: whether B(p, 3 * dist(p, baseline)) is badly cut
    std::vector<char> point_flags;
    // per baseline center l: whether B(l, 3 * dist(l, reference)) is badly
    // cut; empty when no reference solution was supplied
    std::vector<char> center_flags;
};

// reference may be null (solver path: only point flags are needed).
BadCutReport classify_all(const ShiftedQuadtree& tree, const Instance& inst,
                          const Solution& baseline, const Solution* reference,
                          const CutParams& params);

// p~ = baseline(p) for flagged clients, p itself otherwise.
Relocation relocate(const Instance& inst, const Solution& baseline,
                    const BadCutReport& report);

// Detour granted to a ball cut at level l:
//   z=2: eps*2^l*r + eps^2*2^(2l),  z=1: eps*2^l,  l = not-cut: 0.
double detour_from_level(int level, double r, const CutParams& params, int z);
double detour(const ShiftedQuadtree& tree, const Point& x, double r,
              const CutParams& params, int z);

struct BudgetBreakdown {
    double b1 = 0.0, b2 = 0.0, b3 = 0.0;
    double total = 0.0;
    int objective_z = 2;
};

// Pure branch evaluation from prescribed cut levels; the level conditions are
// level <= log2(radius) + tau per branch, with the b2 fallback
// 36*d*A_p^2 + 16*d*S_p^2 (z=2) or 3*A_p + 2*S_p (z=1).
//   l1 = level(p, 3*A_p), l2 = level(p, 3*(A_p+S_p)), l3 = level(a, 3*S_a)
// where a is the baseline center of p, A_p = dist(p, baseline),
// S_p = dist(p, reference), S_a = dist(a, reference).
BudgetBreakdown budget_from_levels(int l1, int l2, int l3, double A_p,
                                   double S_p, double S_a,
                                   const CutParams& params, int z);

// Budget of a single client against baseline and reference solutions.
BudgetBreakdown budget(const ShiftedQuadtree& tree, const Instance& inst,
                       int client, const Solution& baseline,
                       const Solution& reference, const CutParams& params);

}  // namespace kcluster
