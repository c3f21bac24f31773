#include "kcluster/badcut.hpp"

#include <algorithm>
#include <cmath>

#include "kcluster/errors.hpp"

namespace kcluster {

double tau(double eps, int d) {
    if (!(eps > 0.0 && eps < 1.0))
        throw parameter_error("tau: eps must be in (0,1)");
    if (d < 1) throw parameter_error("tau: d must be >= 1");
    return std::log2(static_cast<double>(d)) + std::log2(1.0 / eps);
}

CutParams CutParams::make(double eps, int d) {
    CutParams p;
    p.tau = kcluster::tau(eps, d);  // validates eps and d
    p.eps = eps;
    p.d = d;
    const double l = std::log2(1.0 / eps);
    p.rho = l > 0.0 ? std::min(eps / l, 0.999) : 0.999;
    return p;
}

bool classify_badly_cut(const ShiftedQuadtree& tree, const Point& x, double r,
                        const CutParams& params) {
    if (r < 0.0) throw parameter_error("classify_badly_cut: negative radius");
    if (r == 0.0) return false;
    const int level = tree.cut_level_ball(x, r);
    if (level == ShiftedQuadtree::kNotCut) return false;
    return static_cast<double>(level) >= std::log2(3.0 * r) + params.tau;
}

BadCutReport classify_all(const ShiftedQuadtree& tree, const Instance& inst,
                          const Solution& baseline, const Solution* reference,
                          const CutParams& params) {
    if (baseline.center_indices.empty())
        throw domain_error("classify_all: empty baseline");
    BadCutReport rep;
    rep.point_flags.resize(inst.clients.size());
    for (std::size_t p = 0; p < inst.clients.size(); ++p) {
        const double A_p = distance_to_set(inst.clients[p], inst.candidates,
                                           baseline.center_indices);
        rep.point_flags[p] =
            classify_badly_cut(tree, inst.clients[p], 3.0 * A_p, params);
    }
    if (reference) {
        if (reference->center_indices.empty())
            throw domain_error("classify_all: empty reference");
        rep.center_flags.resize(baseline.center_indices.size());
        for (std::size_t j = 0; j < baseline.center_indices.size(); ++j) {
            const Point& l = inst.candidates[baseline.center_indices[j]];
            const double S_l =
                distance_to_set(l, inst.candidates,
                                reference->center_indices);
            rep.center_flags[j] =
                classify_badly_cut(tree, l, 3.0 * S_l, params);
        }
    }
    return rep;
}

Relocation relocate(const Instance& inst, const Solution& baseline,
                    const BadCutReport& report) {
    if (report.point_flags.size() != inst.clients.size())
        throw structural_error("relocate: report does not match instance");
    Relocation out;
    out.targets.resize(inst.clients.size());
    for (std::size_t p = 0; p < inst.clients.size(); ++p) {
        if (report.point_flags[p]) {
            const int a = nearest_index(inst.clients[p], inst.candidates,
                                        baseline.center_indices);
            out.targets[p] = inst.candidates[a];
        } else {
            out.targets[p] = inst.clients[p];
        }
    }
    return out;
}

double detour_from_level(int level, double r, const CutParams& params, int z) {
    if (level == ShiftedQuadtree::kNotCut) return 0.0;
    const double scale = std::ldexp(1.0, level);
    if (z == 1) return params.eps * scale;
    return params.eps * scale * r + params.eps * params.eps * scale * scale;
}

double detour(const ShiftedQuadtree& tree, const Point& x, double r,
              const CutParams& params, int z) {
    return detour_from_level(tree.cut_level_ball(x, r), r, params, z);
}

namespace {

// branch condition: level(x, R) <= log2(R) + tau, with the not-cut sentinel
// always passing (no detour, no fallback)
bool level_ok(int level, double radius, const CutParams& params) {
    if (level == ShiftedQuadtree::kNotCut) return true;
    if (radius <= 0.0) return false;  // cut ball of radius 0 cannot occur
    return static_cast<double>(level) <= std::log2(radius) + params.tau;
}

}  // namespace

BudgetBreakdown budget_from_levels(int l1, int l2, int l3, double A_p,
                                   double S_p, double S_a,
                                   const CutParams& params, int z) {
    if (z != 1 && z != 2) throw parameter_error("budget: z must be 1 or 2");
    BudgetBreakdown b;
    b.objective_z = z;

    const double r1 = 3.0 * A_p;
    b.b1 = level_ok(l1, r1, params) ? detour_from_level(l1, r1, params, z)
                                    : 0.0;

    const double r2 = 3.0 * (A_p + S_p);
    if (level_ok(l2, r2, params)) {
        b.b2 = detour_from_level(l2, r2, params, z);
    } else {
        b.b2 = z == 2 ? 36.0 * params.d * A_p * A_p +
                            16.0 * params.d * S_p * S_p
                      : 3.0 * A_p + 2.0 * S_p;
    }

    const double r3 = 3.0 * S_a;
    b.b3 = level_ok(l3, r3, params) ? detour_from_level(l3, r3, params, z)
                                    : 0.0;

    b.total = b.b1 + b.b2 + b.b3;
    return b;
}

BudgetBreakdown budget(const ShiftedQuadtree& tree, const Instance& inst,
                       int client, const Solution& baseline,
                       const Solution& reference, const CutParams& params) {
    if (baseline.center_indices.empty() || reference.center_indices.empty())
        throw domain_error("budget: empty solution");
    const Point& p = inst.clients[client];
    const int ai = nearest_index(p, inst.candidates, baseline.center_indices);
    const Point& a = inst.candidates[ai];
    const double A_p = distance(p, a);
    const double S_p =
        distance_to_set(p, inst.candidates, reference.center_indices);
    const double S_a =
        distance_to_set(a, inst.candidates, reference.center_indices);

    const int l1 = tree.cut_level_ball(p, 3.0 * A_p);
    const int l2 = tree.cut_level_ball(p, 3.0 * (A_p + S_p));
    const int l3 = tree.cut_level_ball(a, 3.0 * S_a);
    return budget_from_levels(l1, l2, l3, A_p, S_p, S_a, params,
                              inst.objective_z);
}

}  // namespace kcluster
