#include <cmath>
#include <set>

#include "doctest.h"
#include "kcluster/binary_tree.hpp"
#include "kcluster/rng.hpp"

using namespace kcluster;

namespace {

struct Fixture {
    std::vector<Point> locations;
    std::vector<Point> candidates;
    ShiftedQuadtree tree;
    BinarySplitTree bt;

    explicit Fixture(std::uint64_t seed, int n = 8, int m = 5)
        : locations(), candidates(),
          tree(make_tree(seed, n, m, locations, candidates)),
          bt(BinarySplitTree::build(tree, locations, candidates)) {}

    static ShiftedQuadtree make_tree(std::uint64_t seed, int n, int m,
                                     std::vector<Point>& locs,
                                     std::vector<Point>& cands) {
        SplitMix64 rng(seed);
        for (int i = 0; i < n; ++i)
            locs.push_back({30.0 * rng.next_double(),
                            30.0 * rng.next_double()});
        for (int i = 0; i < m; ++i)
            cands.push_back({30.0 * rng.next_double(),
                             30.0 * rng.next_double()});
        std::vector<Point> all = locs;
        all.insert(all.end(), cands.begin(), cands.end());
        return ShiftedQuadtree::build(all, 0.4, derive_seed(seed, 0x17));
    }
};

}  // namespace

TEST_CASE("binary nodes form a proper tree with two children each") {
    Fixture f(5);
    const auto& nodes = f.bt.nodes();
    REQUIRE(!nodes.empty());
    CHECK(nodes[0].parent == -1);
    for (std::size_t u = 0; u < nodes.size(); ++u) {
        if (nodes[u].leaf) {
            CHECK(nodes[u].left == -1);
            CHECK(nodes[u].right == -1);
        } else {
            REQUIRE(nodes[u].left > 0);
            REQUIRE(nodes[u].right > 0);
            CHECK(nodes[nodes[u].left].parent == static_cast<int>(u));
            CHECK(nodes[nodes[u].right].parent == static_cast<int>(u));
        }
    }
}

TEST_CASE("leaves hold at most one distinct location") {
    Fixture f(7);
    for (const BinaryNode& nd : f.bt.nodes()) {
        if (!nd.leaf) continue;
        std::set<Point> distinct;
        for (int id : nd.location_ids) distinct.insert(f.locations[id]);
        for (int id : nd.candidate_ids) distinct.insert(f.candidates[id]);
        CHECK(distinct.size() <= 1);
    }
}

TEST_CASE("children partition the parent client and candidate sets") {
    Fixture f(9);
    const auto& nodes = f.bt.nodes();
    for (const BinaryNode& nd : nodes) {
        if (nd.leaf) continue;
        const auto& l = nodes[nd.left];
        const auto& r = nodes[nd.right];
        CHECK(l.location_ids.size() + r.location_ids.size() ==
              nd.location_ids.size());
        CHECK(l.candidate_ids.size() + r.candidate_ids.size() ==
              nd.candidate_ids.size());
    }
}

TEST_CASE("every occupied node has portals except possibly the root") {
    Fixture f(11);
    const auto& nodes = f.bt.nodes();
    for (std::size_t u = 1; u < nodes.size(); ++u)
        if (!nodes[u].empty) CHECK(!nodes[u].portals.empty());
}

TEST_CASE("portal keys are canonically comparable across levels") {
    Fixture f(13);
    const auto& nodes = f.bt.nodes();
    // a child's portals that lie on the parent boundary appear among the
    // parent portals under the canonical rescaling
    for (std::size_t u = 1; u < nodes.size(); ++u) {
        if (nodes[u].empty) continue;  // empty boxes carry no portals
        const int parent = nodes[u].parent;
        std::set<std::vector<std::int64_t>> parent_keys;
        for (std::size_t j = 0; j < nodes[parent].portals.size(); ++j)
            parent_keys.insert(f.bt.canonical_key(parent, j));
        std::size_t shared = 0;
        for (std::size_t j = 0; j < nodes[u].portals.size(); ++j)
            if (parent_keys.count(
                    f.bt.canonical_key(static_cast<int>(u), j)))
                ++shared;
        CHECK(shared > 0);  // the shared boundary carries common portals
    }
}

TEST_CASE("pr_dist: identity, symmetry, lower bound") {
    Fixture f(15);
    const int n = static_cast<int>(f.locations.size());
    const int m = static_cast<int>(f.candidates.size());
    for (int p = 0; p < n; ++p) {
        const int lp = f.bt.leaf_of_location(p);
        CHECK(f.bt.pr_dist(f.locations[p], lp, f.locations[p], lp) ==
              doctest::Approx(0.0));
        for (int c = 0; c < m; ++c) {
            const int lc = f.bt.leaf_of_candidate(c);
            const double d1 =
                f.bt.pr_dist(f.locations[p], lp, f.candidates[c], lc);
            const double d2 =
                f.bt.pr_dist(f.candidates[c], lc, f.locations[p], lp);
            CHECK(d1 == doctest::Approx(d2));
            CHECK(d1 >= distance(f.locations[p], f.candidates[c]) - 1e-9);
        }
    }
}

TEST_CASE("pr_dist detour is bounded by the portal spacing guarantee") {
    Fixture f(17);
    const auto& tree = f.bt.decomposition();
    for (std::size_t p = 0; p < f.locations.size(); ++p)
        for (std::size_t c = 0; c < f.candidates.size(); ++c) {
            const int i = tree.cut_level_pair(f.locations[p],
                                             f.candidates[c]);
            // the binarized tree inserts interior split planes, so routes
            // cross one extra layer of boundaries per level
            const double allowance =
                i == ShiftedQuadtree::kNotCut
                    ? 1e-9
                    : tree.rho() * std::ldexp(1.0, i + 3) + 1e-9;
            const double d = f.bt.pr_dist(
                f.locations[p], f.bt.leaf_of_location(static_cast<int>(p)),
                f.candidates[c],
                f.bt.leaf_of_candidate(static_cast<int>(c)));
            CHECK(d <= distance(f.locations[p], f.candidates[c]) + allowance);
        }
}
