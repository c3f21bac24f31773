#include <cmath>

#include "doctest.h"
#include "kcluster/badcut.hpp"
#include "kcluster/baseline.hpp"
#include "kcluster/dp.hpp"
#include "kcluster/errors.hpp"
#include "kcluster/io.hpp"
#include "kcluster/rng.hpp"

using namespace kcluster;

namespace {

struct Prepared {
    Instance ni;
    ShiftedQuadtree tree;
    Relocation rel;
    BinarySplitTree bt;
    double base_cost;

    static Prepared make(const GenParams& gp, double eps,
                         std::uint64_t seed) {
        Instance ni = normalize(generate_instance(gp)).instance;
        const CutParams cp = CutParams::make(eps, gp.d);
        std::vector<Point> pts = ni.clients;
        pts.insert(pts.end(), ni.candidates.begin(), ni.candidates.end());
        ShiftedQuadtree tree =
            ShiftedQuadtree::build(pts, cp.rho, derive_seed(seed, 0x7255));
        Solution base = baseline_solve(ni, {}, derive_seed(seed, 2));
        BadCutReport bc = classify_all(tree, ni, base, nullptr, cp);
        Relocation rel = relocate(ni, base, bc);
        BinarySplitTree bt =
            BinarySplitTree::build(tree, rel.targets, ni.candidates);
        return {std::move(ni), std::move(tree), std::move(rel),
                std::move(bt), cost(ni, base)};
    }
};

}  // namespace

TEST_CASE("quantize rounds to the nearest step, ties up, saturating") {
    CHECK(quantize(0.37, 0.1, 10.0) == 4);
    CHECK(quantize(0.0, 0.1, 10.0) == 0);
    CHECK(quantize(1.25, 0.5, 10.0) == 3);  // exact tie goes up
    CHECK(quantize(99.0, 0.1, 10.0) == 100);  // saturation at ceil(cap/step)
    CHECK_THROWS_AS(quantize(1.0, 0.0, 10.0), parameter_error);
}

TEST_CASE("cost buckets span baseline/n to (1+eps)*baseline") {
    const auto b = cost_buckets(100.0, 0.3, 10);
    REQUIRE(!b.empty());
    CHECK(b.front() == doctest::Approx(10.0));
    CHECK(b.back() == doctest::Approx(130.0));
    const double ratio = 1.0 + 0.3 / std::log2(10.0);
    for (std::size_t i = 2; i + 1 < b.size(); ++i)
        CHECK(b[i] / b[i - 1] == doctest::Approx(ratio));
}

TEST_CASE("dp value never increases with k") {
    GenParams gp;
    gp.n = 7;
    gp.m = 5;
    gp.k = 1;
    gp.seed = 1200;
    Prepared pr = Prepared::make(gp, 0.3, 12);
    double prev = -1.0;
    for (int k = 1; k <= 4; ++k) {
        DPResult dp = solve_dp(pr.bt, pr.ni.clients, pr.rel,
                               pr.ni.candidates, k, 0.3, pr.ni.objective_z,
                               pr.base_cost);
        if (prev >= 0.0) CHECK(dp.tilde_cost_pr <= prev + 1e-9);
        prev = dp.tilde_cost_pr;
        CHECK(static_cast<int>(dp.solution.center_indices.size()) <= k);
    }
}

TEST_CASE("dp matches the exhaustive portal oracle on small instances") {
    for (int i = 0; i < 6; ++i) {
        GenParams gp;
        gp.n = 4 + i;
        gp.m = 3 + i % 3;
        gp.k = 1 + i % 3;
        gp.z = 1 + i % 2;
        gp.seed = 1500 + i;
        gp.dist = i % 2 ? "clustered" : "uniform";
        if (gp.k > gp.m) gp.k = gp.m;
        Prepared pr = Prepared::make(gp, 0.3, 20 + i);
        auto [osol, oval] =
            exhaustive_portal_opt(pr.ni, pr.tree, pr.rel, gp.k);
        DPResult dp = solve_dp(pr.bt, pr.ni.clients, pr.rel,
                               pr.ni.candidates, gp.k, 0.3,
                               pr.ni.objective_z, pr.base_cost);
        CHECK(dp.tilde_cost_pr >= oval - 1e-9);
        CHECK(dp.tilde_cost_pr <= (1.0 + 0.3) * oval + 1e-9);
    }
}

TEST_CASE("coincident clients and candidates give zero cost") {
    Instance inst;
    inst.dimension = 2;
    inst.clients = {{0, 0}, {6, 0}, {0, 7}};
    inst.candidates = {{0, 0}, {6, 0}, {0, 7}};
    inst.k = 3;
    inst.objective_z = 2;
    Instance ni = normalize(inst).instance;
    const CutParams cp = CutParams::make(0.3, 2);
    std::vector<Point> pts = ni.clients;
    pts.insert(pts.end(), ni.candidates.begin(), ni.candidates.end());
    auto tree = ShiftedQuadtree::build(pts, cp.rho, 5);
    Relocation rel = identity_relocation(ni);
    auto bt = BinarySplitTree::build(tree, rel.targets, ni.candidates);
    DPResult dp = solve_dp(bt, ni.clients, rel, ni.candidates, 3, 0.3, 2,
                           cost(ni, {{0}, {}}));
    CHECK(dp.tilde_cost_pr == doctest::Approx(0.0));
    CHECK(dp.solution.center_indices.size() == 3);
}

TEST_CASE("table sizes are reported for every node") {
    GenParams gp;
    gp.n = 6;
    gp.m = 4;
    gp.k = 2;
    gp.seed = 1800;
    Prepared pr = Prepared::make(gp, 0.3, 30);
    DPResult dp = solve_dp(pr.bt, pr.ni.clients, pr.rel, pr.ni.candidates, 2,
                           0.3, pr.ni.objective_z, pr.base_cost);
    CHECK(dp.table_sizes.size() == pr.bt.nodes().size());
    for (auto s : dp.table_sizes) CHECK(s >= 1);
}
