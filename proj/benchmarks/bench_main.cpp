#include <benchmark/benchmark.h>

#include "kcluster/baseline.hpp"
#include "kcluster/io.hpp"
#include "kcluster/quadtree.hpp"
#include "kcluster/solver.hpp"

namespace {

kcluster::Instance make_instance(int n) {
    kcluster::GenParams gp;
    gp.n = n;
    gp.m = 50;
    gp.k = 5;
    gp.d = 2;
    gp.z = 2;
    gp.seed = 11;
    return kcluster::generate_instance(gp);
}

void BM_tree_build(benchmark::State& state) {
    auto inst = make_instance(static_cast<int>(state.range(0)));
    std::vector<kcluster::Point> pts = inst.clients;
    pts.insert(pts.end(), inst.candidates.begin(), inst.candidates.end());
    std::uint64_t seed = 0;
    for (auto _ : state) {
        auto tree = kcluster::ShiftedQuadtree::build(pts, 0.25, seed++);
        benchmark::DoNotOptimize(tree);
    }
}
BENCHMARK(BM_tree_build)->Arg(1000)->Arg(10000)->Arg(100000);

void BM_cost_eval(benchmark::State& state) {
    auto inst = make_instance(static_cast<int>(state.range(0)));
    kcluster::Solution sol{{0, 1, 2, 3, 4}, {}};
    for (auto _ : state) {
        benchmark::DoNotOptimize(kcluster::cost(inst, sol));
    }
}
BENCHMARK(BM_cost_eval)->Arg(1000)->Arg(10000)->Arg(100000);

void BM_baseline(benchmark::State& state) {
    auto inst = make_instance(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(kcluster::baseline_solve(inst, {}, 3));
    }
}
BENCHMARK(BM_baseline)->Arg(1000)->Arg(10000);

void BM_solve(benchmark::State& state) {
    auto inst = make_instance(static_cast<int>(state.range(0)));
    kcluster::SolverParams sp;
    sp.eps = 0.3;
    sp.trials = 1;
    std::uint64_t seed = 0;
    for (auto _ : state) {
        sp.rng_seed = seed++;
        benchmark::DoNotOptimize(kcluster::solve(inst, sp));
    }
}
BENCHMARK(BM_solve)->Arg(1000)->Arg(10000)->Arg(20000)
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
