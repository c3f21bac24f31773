#pragma once

#include <cstdint>
#include <vector>

#include "kcluster/baseline.hpp"
#include "kcluster/dp.hpp"
#include "kcluster/geometry.hpp"

namespace kcluster {

struct SolverParams {
    double eps = 0.3;
    int trials = 7;
    std::uint64_t rng_seed = 0;
    int objective_z = 0;  // 0 = take from the instance; else must match
    BaselineParams baseline;
    // threads <= 0: take KCLUSTER_THREADS from the environment, default 1
    int threads = 0;

    void validate() const;
};

struct TrialReport {
    double cost = 0.0;  // straight-line cost on the original instance
    double tilde_cost_pr = 0.0;
    long long badly_cut = 0;
    double wall_ms = 0.0;
    bool dp_exhausted = false;
};

struct SolveReport {
    Solution solution;
    double cost = 0.0;
    double baseline_cost = 0.0;
    int winner = -1;  // trial index, or -1 when the baseline won
    double scale = 1.0;
    std::vector<TrialReport> trials;
};

// Full pipeline: normalize, baseline, then per trial: shifted decomposition,
// badly-cut classification, relocation, binarization, dynamic program. The
// returned solution is the straight-line cost minimizer across all trials
// and the baseline.
SolveReport solve(const Instance& inst, const SolverParams& params);

// Straight-line scoring, re-exported for reporting.
double evaluate(const Instance& inst, const Solution& sol);

}  // namespace kcluster
