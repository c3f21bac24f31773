#pragma once

#include <cstdint>
#include <utility>

#include "kcluster/binary_tree.hpp"
#include "kcluster/geometry.hpp"
#include "kcluster/quadtree.hpp"

namespace kcluster {

// Constant-factor baseline: d^z-sampling seeding followed by single-swap
// local search. The solver only needs some O(1)-approximation; quality beyond
// that comes from the portal-respecting dynamic program.
struct BaselineParams {
    int seeding_rounds = 2;
    int max_iterations = 0;  // 0 = 200 * k
    double improvement_threshold = 1e-6;

    void validate() const;
};

// Feasible solution with exactly min(k, m) centers; deterministic per seed.
Solution baseline_solve(const Instance& inst, const BaselineParams& params,
                        std::uint64_t rng_seed);

// Exact optimum by exhaustive enumeration of all k-subsets in lexicographic
// order (ties keep the lexicographically smallest index set). Throws
// size_error when C(m,k) exceeds the cap.
std::pair<Solution, double> brute_force_opt(const Instance& inst,
                                            long long cap = 1000000);

// Exhaustive portal-respecting oracle: enumerates all k-subsets and routes
// every relocated client to its best center along globally shortest
// portal-respecting paths of the binarized decomposition. Returns the
// minimizer of sum_p (dist(p, p~) + pr_dist(p~, S))^z.
std::pair<Solution, double> exhaustive_portal_opt(const Instance& inst,
                                                  const ShiftedQuadtree& tree,
                                                  const Relocation& relocation,
                                                  int k,
                                                  long long cap = 1000000);

}  // namespace kcluster
