#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kcluster/binary_tree.hpp"
#include "kcluster/geometry.hpp"

namespace kcluster {

// Nearest-multiple quantization with ties rounding up, clamped to
// [0, ceil(cap/epsD)].
int quantize(double value, double epsD, double cap);

// Geometric cost grid from baseline_cost/n to (1+eps)*baseline_cost with
// ratio (1 + eps/log2 n), inclusive endpoints.
std::vector<double> cost_buckets(double baseline_cost, double eps, int n);

// Resource limits for the dynamic program. Defaults favour exactness and are
// intended for small instances; the solver scales them down with n.
struct DPLimits {
    std::size_t max_entries_per_node = 200000;
    std::size_t max_pairs_per_node = 1u << 22;
    std::size_t max_backptrs_per_entry = 100000;
    // total portal-distance evaluations in the top-down phase before
    // degrading to greedy single-choice descent
    std::size_t work_budget = 1ull << 31;
    int rescore_top = 8;          // root states re-scored exactly
    int rescore_max_clients = 512;  // exact re-scoring only below this n
    // distinct center sets enumerated per re-scored root state; quantization
    // error at coarse levels is absolute, so ranking inside an entry's pair
    // list is unreliable and several sets must be priced exactly
    std::size_t max_rescore_sets = 64;
    int far_cutoff = 64;  // co-located far-case shortcut above this size
    bool enable_trace = false;
};

struct DPResult {
    Solution solution;
    // exact portal-respecting tilde-cost of the returned centers when the
    // instance is small enough to re-score, otherwise the DP's estimate
    double tilde_cost_pr = 0.0;
    int cost_bucket = -1;  // index into cost_buckets(baseline_cost, eps, n)
    bool budget_exhausted = false;
    std::vector<std::size_t> table_sizes;  // per binary node
    std::string trace;
};

// Best portal-respecting solution under tilde-cost, computed over the
// binarized decomposition. Bottom-up pass enumerates reachable
// (centers-inside, quantized portal->inside-center distance profile) states;
// top-down pass prices states against outside-center promises derived from
// parent and sibling profiles, then the best root states are re-scored with
// exact portal-respecting routing.
DPResult solve_dp(const BinarySplitTree& btree,
                  const std::vector<Point>& clients,
                  const Relocation& relocation,
                  const std::vector<Point>& candidates, int k, double eps,
                  int z, double baseline_cost, const DPLimits& limits = {});

}  // namespace kcluster
