#include "kcluster/solver.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <thread>

#include "kcluster/badcut.hpp"
#include "kcluster/binary_tree.hpp"
#include "kcluster/errors.hpp"
#include "kcluster/quadtree.hpp"
#include "kcluster/rng.hpp"

namespace kcluster {

void SolverParams::validate() const {
    if (!(eps > 0.0 && eps < 1.0))
        throw parameter_error("solver: eps must be in (0,1)");
    if (trials < 1) throw parameter_error("solver: trials must be >= 1");
    baseline.validate();
}

double evaluate(const Instance& inst, const Solution& sol) {
    return cost(inst, sol);
}

namespace {

int thread_count(const SolverParams& params) {
    if (params.threads > 0) return params.threads;
    if (const char* env = std::getenv("KCLUSTER_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    return 1;
}

DPLimits limits_for(std::size_t n, int k) {
    DPLimits lim;
    if (n > 400) {
        lim.max_entries_per_node = 4 * static_cast<std::size_t>(k + 1);
        lim.max_pairs_per_node = 64;
        lim.max_backptrs_per_entry = 4;
        lim.work_budget = 200000000;
        lim.rescore_top = 1;
    }
    return lim;
}

}  // namespace

SolveReport solve(const Instance& inst, const SolverParams& params) {
    inst.validate();
    params.validate();
    if (params.objective_z != 0 && params.objective_z != inst.objective_z)
        throw parameter_error("solver: objective mismatch with instance");

    SolveReport rep;
    NormalizeResult norm = normalize(inst);
    const Instance& ni = norm.instance;
    rep.scale = norm.scale;

    Solution baseline = baseline_solve(
        ni, params.baseline, derive_seed(params.rng_seed, 0xbadd));
    const double base_scaled = cost(ni, baseline);
    rep.baseline_cost = cost(inst, baseline);

    rep.solution = baseline;
    rep.cost = rep.baseline_cost;
    rep.winner = -1;
    if (base_scaled == 0.0) return rep;  // baseline is already perfect

    const CutParams cp = CutParams::make(params.eps, inst.dimension);
    std::vector<Point> tree_points = ni.clients;
    tree_points.insert(tree_points.end(), ni.candidates.begin(),
                       ni.candidates.end());
    const DPLimits limits = limits_for(ni.clients.size(), ni.k);

    rep.trials.resize(params.trials);
    std::vector<Solution> trial_solutions(params.trials);
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int t = next.fetch_add(1); t < params.trials;
             t = next.fetch_add(1)) {
            const auto t0 = std::chrono::steady_clock::now();
            TrialReport& tr = rep.trials[t];
            ShiftedQuadtree tree = ShiftedQuadtree::build(
                tree_points, cp.rho,
                derive_seed(params.rng_seed, 0x7255, t));
            BadCutReport bc =
                classify_all(tree, ni, baseline, nullptr, cp);
            for (char f : bc.point_flags) tr.badly_cut += f ? 1 : 0;
            Relocation rel = relocate(ni, baseline, bc);
            BinarySplitTree bt =
                BinarySplitTree::build(tree, rel.targets, ni.candidates);
            DPResult dp =
                solve_dp(bt, ni.clients, rel, ni.candidates, ni.k,
                         params.eps, ni.objective_z, base_scaled, limits);
            trial_solutions[t] = dp.solution;
            tr.tilde_cost_pr = dp.tilde_cost_pr;
            tr.dp_exhausted = dp.budget_exhausted;
            tr.cost = cost(inst, dp.solution);
            tr.wall_ms = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - t0)
                             .count();
        }
    };
    const int n_threads =
        std::min(thread_count(params), params.trials);
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    for (int t = 0; t < params.trials; ++t) {
        if (rep.trials[t].cost < rep.cost) {
            rep.cost = rep.trials[t].cost;
            rep.solution = trial_solutions[t];
            rep.winner = t;
        }
    }
    return rep;
}

}  // namespace kcluster
