#include <cmath>

#include "doctest.h"
#include "kcluster/badcut.hpp"
#include "kcluster/baseline.hpp"
#include "kcluster/errors.hpp"
#include "kcluster/io.hpp"
#include "kcluster/rng.hpp"

using namespace kcluster;

TEST_CASE("tau values") {
    CHECK(tau(0.125, 4) == doctest::Approx(5.0));
    CHECK(tau(0.5, 1) == doctest::Approx(1.0));
    CHECK(tau(0.25, 2) == doctest::Approx(3.0));
    CHECK_THROWS_AS(tau(1.0, 1), parameter_error);
    CHECK_THROWS_AS(tau(0.5, 0), parameter_error);
}

TEST_CASE("rho is eps over log2(1/eps), clamped below one") {
    CHECK(CutParams::make(0.25, 2).rho == doctest::Approx(0.125));
    CHECK(CutParams::make(0.9, 2).rho < 1.0);
}

TEST_CASE("detour formula") {
    const CutParams cp = CutParams::make(0.25, 2);
    CHECK(detour_from_level(2, 3.0, cp, 2) == doctest::Approx(4.0));
    CHECK(detour_from_level(2, 3.0, cp, 1) == doctest::Approx(1.0));
    CHECK(detour_from_level(ShiftedQuadtree::kNotCut, 3.0, cp, 2) == 0.0);
}

TEST_CASE("badly cut threshold is log2(3r) + tau") {
    // cut level 5, r=1, d=2, eps=1/4: threshold log2(3) + 3 ~ 4.585
    const CutParams cp = CutParams::make(0.25, 2);
    CHECK(5.0 >= std::log2(3.0) + cp.tau);
    CHECK(!(4.0 >= std::log2(3.0) + cp.tau));
    // radius zero is never badly cut
    auto t = ShiftedQuadtree::build({{0, 0}, {5, 5}}, 0.4, 1);
    CHECK(!classify_badly_cut(t, {0, 0}, 0.0, cp));
}

TEST_CASE("budget branch arithmetic from prescribed levels") {
    const CutParams cp = CutParams::make(0.25, 2);
    SUBCASE("all radii zero: zero budget") {
        auto b = budget_from_levels(ShiftedQuadtree::kNotCut,
                                    ShiftedQuadtree::kNotCut,
                                    ShiftedQuadtree::kNotCut, 0, 0, 0, cp, 2);
        CHECK(b.total == 0.0);
    }
    SUBCASE("b2 fallback when the level condition fails") {
        // A_p = S_p = 1, d = 2: fallback 36*2*1 + 16*2*1 = 104
        auto b = budget_from_levels(ShiftedQuadtree::kNotCut, 100,
                                    ShiftedQuadtree::kNotCut, 1, 1, 0, cp, 2);
        CHECK(b.b1 == 0.0);
        CHECK(b.b2 == doctest::Approx(104.0));
        CHECK(b.b3 == 0.0);
        CHECK(b.total == doctest::Approx(104.0));
    }
    SUBCASE("z=1 fallback is 3*A + 2*S") {
        auto b = budget_from_levels(ShiftedQuadtree::kNotCut, 100,
                                    ShiftedQuadtree::kNotCut, 1, 1, 0, cp, 1);
        CHECK(b.b2 == doctest::Approx(5.0));
    }
    SUBCASE("granted detours when levels are low enough") {
        // r1 = 3, level 2 <= log2(3)+3: detour eps*4*3 + eps^2*16 = 4
        auto b = budget_from_levels(2, ShiftedQuadtree::kNotCut,
                                    ShiftedQuadtree::kNotCut, 1, 0, 0, cp, 2);
        CHECK(b.b1 == doctest::Approx(4.0));
    }
}

TEST_CASE("relocation moves exactly the flagged clients") {
    Instance inst;
    inst.dimension = 2;
    inst.clients = {{0, 0}, {10, 0}, {4, 3}};
    inst.candidates = {{0, 0}, {10, 0}};
    inst.k = 2;
    inst.objective_z = 2;
    Solution base{{0, 1}, {}};

    BadCutReport none;
    none.point_flags = {0, 0, 0};
    CHECK(relocate(inst, base, none).targets == inst.clients);

    BadCutReport all;
    all.point_flags = {1, 1, 1};
    auto rel = relocate(inst, base, all);
    CHECK(rel.targets[0] == inst.candidates[0]);
    CHECK(rel.targets[1] == inst.candidates[1]);
    CHECK(rel.targets[2] == inst.candidates[0]);  // nearest baseline center

    BadCutReport mixed;
    mixed.point_flags = {0, 0, 1};
    auto relm = relocate(inst, base, mixed);
    double moved = 0.0;
    for (std::size_t p = 0; p < inst.clients.size(); ++p)
        moved += squared_distance(inst.clients[p], relm.targets[p]);
    CHECK(moved == doctest::Approx(25.0));  // only client 2, A_p = 5
}

TEST_CASE("per-point badly cut frequency stays below eps") {
    GenParams gp;
    gp.n = 8;
    gp.m = 5;
    gp.k = 2;
    gp.seed = 31;
    gp.dist = "clustered";
    Instance ni = normalize(generate_instance(gp)).instance;
    std::vector<Point> pts = ni.clients;
    pts.insert(pts.end(), ni.candidates.begin(), ni.candidates.end());
    Solution base = baseline_solve(ni, {}, 3);

    const double eps = 0.25;
    const CutParams cp = CutParams::make(eps, 2);
    const int seeds = 1500;
    std::vector<int> hits(ni.clients.size(), 0);
    for (int s = 0; s < seeds; ++s) {
        auto t = ShiftedQuadtree::build(pts, cp.rho, derive_seed(6, 88, s));
        auto rep = classify_all(t, ni, base, nullptr, cp);
        for (std::size_t p = 0; p < hits.size(); ++p)
            hits[p] += rep.point_flags[p];
    }
    for (std::size_t p = 0; p < hits.size(); ++p) {
        const double f = static_cast<double>(hits[p]) / seeds;
        const double sigma = std::sqrt(f * (1.0 - f) / seeds);
        CHECK(f <= eps + 3.0 * sigma);
    }
}
