#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "kcluster/badcut.hpp"
#include "kcluster/geometry.hpp"
#include "kcluster/quadtree.hpp"

namespace kcluster {

// Mapping between a baseline solution and a reference optimum, both padded to
// equal size k by duplicating their last center. Everything is slot-indexed;
// slot positions are candidate points of the instance.
struct CenterMapping {
    std::vector<int> baseline;  // candidate index per baseline slot
    std::vector<int> opt;       // candidate index per optimum slot
    std::vector<std::vector<int>> psi;  // per baseline slot: optimum slots
                                        // whose nearest baseline slot it is
    std::vector<int> a_class;  // per baseline slot: min(|psi|, 2)
    std::vector<int> f_ell;    // per baseline slot: closest slot of psi, -1
    std::vector<int> opt1;     // optimum slots with |psi(owner)| == 1
    std::vector<int> opt_ge2;  // optimum slots with |psi(owner)| >= 2
};

CenterMapping build_mapping(const Instance& inst, const Solution& baseline,
                            const Solution& opt);

struct OptPrimeResult {
    std::vector<int> slots;     // surviving optimum slots
    Solution solution;          // deduplicated candidate indices
    std::vector<int> removed;   // removed optimum slots (the set H)
    double cost = 0.0;          // cost(P, OPT')
};

// Removes floor(eps*|opt_ge2|/2) centers of opt_ge2, never a closest-in-psi
// center, chosen greedily by least cost increase.
OptPrimeResult build_optprime(const CenterMapping& mapping,
                              const Instance& inst, double eps);

struct SStarResult {
    Solution solution;       // deduplicated candidate indices
    int size = 0;            // |S*| counted with the replaced/added slots
    std::vector<char> b_d;   // per baseline slot: badly cut w.r.t. OPT'
    int step1_swaps = 0;
    int step2_added = 0;
};

// Step 1: for badly-cut baseline centers with nonempty psi, replace the
// closest mapped optimum center by the baseline center. Step 2: add
// badly-cut baseline centers with empty psi.
SStarResult build_sstar(const CenterMapping& mapping,
                        const OptPrimeResult& optprime, const Instance& inst,
                        const ShiftedQuadtree& tree, const CutParams& params);

struct SmallDistortionReport {
    double budget_total = 0.0;
    double budget_bound = 0.0;
    bool prop1_pass = false;

    double sstar_tilde_cost = 0.0;
    double sstar_bound = 0.0;
    bool prop2_pass = false;

    int prop3_failures = 0;        // clients with no witness at all
    int prop3_fallback_hits = 0;   // witnesses found only by full search
    bool prop3_pass = false;

    int sstar_size = 0;
    bool size_ok = false;  // |S*| <= k (probabilistic, reported separately)

    // deterministic construction facts; expected to hold on every seed
    bool facts_pass = false;

    bool pass = false;  // prop1 && prop2 && prop3
};

// Empirically fitted slack constants for the hidden O(eps) factors; frozen
// after calibration on the diagnostics corpus and asserted stable across eps.
struct DistortionConstants {
    double budget_slack = 48.0;   // property 1: C * eps * (costOPT + costA)
    double cost_slack = 48.0;     // property 2: (1 + C*eps), C*eps terms
    double detour_slack = 2.0;    // property 3 budget multiplier
};

// opt must be the exact optimum so the budget reference is the true one;
// the instance must be normalized (min pairwise distance 1).
SmallDistortionReport check_small_distortion(
    const Instance& inst, const ShiftedQuadtree& tree,
    const Solution& baseline, const Solution& opt, double eps, int z,
    const DistortionConstants& consts = {});

struct MonteCarloResult {
    double frequency = 0.0;
    double sigma = 0.0;  // binomial sqrt(p(1-p)/N)
    std::vector<char> outcomes;
};

// Shared sampling engine: probe(i) observes the event on the i-th derived
// seed; at least 100 seeds.
MonteCarloResult monte_carlo(int seeds,
                             const std::function<bool(int)>& probe);

}  // namespace kcluster
