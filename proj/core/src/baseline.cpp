#include "kcluster/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "kcluster/errors.hpp"
#include "kcluster/rng.hpp"

namespace kcluster {

namespace {

double pow_z(double d, int z) { return z == 1 ? d : d * d; }

// nearest and second-nearest open-center distances per client
struct NearestPair {
    int idx = -1;       // index into the open-center list
    double d1 = 0.0;    // nearest distance
    double d2 = 0.0;    // second nearest (inf when only one center)
};

std::vector<NearestPair> nearest_pairs(const Instance& inst,
                                       const std::vector<int>& centers) {
    std::vector<NearestPair> out(inst.clients.size());
    for (std::size_t p = 0; p < inst.clients.size(); ++p) {
        NearestPair np;
        np.d1 = np.d2 = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < centers.size(); ++j) {
            const double dd =
                distance(inst.clients[p], inst.candidates[centers[j]]);
            if (dd < np.d1) {
                np.d2 = np.d1;
                np.d1 = dd;
                np.idx = static_cast<int>(j);
            } else if (dd < np.d2) {
                np.d2 = dd;
            }
        }
        out[p] = np;
    }
    return out;
}

std::vector<int> seed_centers(const Instance& inst, int kk, SplitMix64& rng) {
    const int m = static_cast<int>(inst.candidates.size());
    std::vector<char> open(m, 0);
    std::vector<int> centers;
    centers.push_back(static_cast<int>(rng.next_below(m)));
    open[centers[0]] = 1;

    std::vector<double> dist_z(inst.clients.size());
    while (static_cast<int>(centers.size()) < kk) {
        double total = 0.0;
        for (std::size_t p = 0; p < inst.clients.size(); ++p) {
            double best = std::numeric_limits<double>::infinity();
            for (int c : centers)
                best = std::min(best,
                                distance(inst.clients[p], inst.candidates[c]));
            dist_z[p] = pow_z(best, inst.objective_z);
            total += dist_z[p];
        }
        int pick_client = 0;
        if (total > 0.0) {
            double target = rng.next_double() * total, acc = 0.0;
            for (std::size_t p = 0; p < inst.clients.size(); ++p) {
                acc += dist_z[p];
                if (acc >= target) {
                    pick_client = static_cast<int>(p);
                    break;
                }
            }
        } else {
            pick_client = static_cast<int>(
                rng.next_below(inst.clients.size()));
        }
        // open the nearest still-closed candidate to the sampled client
        int pick = -1;
        double best = std::numeric_limits<double>::infinity();
        for (int c = 0; c < m; ++c) {
            if (open[c]) continue;
            const double dd =
                distance(inst.clients[pick_client], inst.candidates[c]);
            if (dd < best) {
                best = dd;
                pick = c;
            }
        }
        open[pick] = 1;
        centers.push_back(pick);
    }
    return centers;
}

double solution_cost(const Instance& inst, const std::vector<int>& centers) {
    KahanSum sum;
    for (const Point& p : inst.clients)
        sum.add(pow_z(distance_to_set(p, inst.candidates, centers),
                      inst.objective_z));
    return sum.value();
}

// one full single-swap pass; returns true if a swap was applied
bool local_search_pass(const Instance& inst, std::vector<int>& centers,
                       double& cur_cost, double threshold) {
    const int z = inst.objective_z;
    const int m = static_cast<int>(inst.candidates.size());
    const int kk = static_cast<int>(centers.size());
    auto np = nearest_pairs(inst, centers);

    double best_delta = 0.0;
    int best_out = -1, best_in = -1;
    std::vector<char> open(m, 0);
    for (int c : centers) open[c] = 1;
    std::vector<double> delta(kk);

    for (int c = 0; c < m; ++c) {
        if (open[c]) continue;
        // delta(s) = cost change of swapping center slot s for candidate c;
        // split into an s-independent part plus a correction on the slot
        // that currently serves each client
        double base = 0.0;
        std::fill(delta.begin(), delta.end(), 0.0);
        for (std::size_t p = 0; p < inst.clients.size(); ++p) {
            const double dpc = distance(inst.clients[p], inst.candidates[c]);
            const double with_c = pow_z(std::min(np[p].d1, dpc), z);
            base += with_c - pow_z(np[p].d1, z);
            delta[np[p].idx] +=
                pow_z(std::min(np[p].d2, dpc), z) - with_c;
        }
        for (int s = 0; s < kk; ++s) {
            const double v = base + delta[s];
            if (v < best_delta) {
                best_delta = v;
                best_out = s;
                best_in = c;
            }
        }
    }
    if (best_in < 0 || -best_delta <= threshold * std::max(cur_cost, 1e-300))
        return false;
    centers[best_out] = best_in;
    cur_cost = solution_cost(inst, centers);
    return true;
}

}  // namespace

void BaselineParams::validate() const {
    if (seeding_rounds < 1)
        throw parameter_error("baseline: seeding_rounds must be >= 1");
    if (max_iterations < 0)
        throw parameter_error("baseline: max_iterations must be >= 0");
    if (!(improvement_threshold > 0.0))
        throw parameter_error("baseline: improvement threshold must be > 0");
}

Solution baseline_solve(const Instance& inst, const BaselineParams& params,
                        std::uint64_t rng_seed) {
    inst.validate();
    params.validate();
    const int m = static_cast<int>(inst.candidates.size());
    const int kk = std::min(inst.k, m);
    const int cap =
        params.max_iterations > 0 ? params.max_iterations : 200 * kk;

    std::vector<int> best;
    double best_cost = std::numeric_limits<double>::infinity();
    for (int round = 0; round < params.seeding_rounds; ++round) {
        SplitMix64 rng(derive_seed(rng_seed, 0xba5e, round));
        std::vector<int> centers =
            kk == m ? [&] {
                std::vector<int> all(m);
                for (int i = 0; i < m; ++i) all[i] = i;
                return all;
            }()
                    : seed_centers(inst, kk, rng);
        double cur = solution_cost(inst, centers);
        if (kk < m)
            for (int it = 0; it < cap; ++it)
                if (!local_search_pass(inst, centers, cur,
                                       params.improvement_threshold))
                    break;
        if (cur < best_cost) {
            best_cost = cur;
            best = centers;
        }
    }
    std::sort(best.begin(), best.end());
    Solution sol;
    sol.center_indices = std::move(best);
    return sol;
}

namespace {

long long binomial_capped(int m, int k, long long cap) {
    long long v = 1;
    for (int i = 1; i <= k; ++i) {
        v = v * (m - k + i) / i;
        if (v > 4 * cap) return v;  // early out, avoids overflow
    }
    return v;
}

template <typename F>
void for_each_subset(int m, int k, F&& f) {
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    while (true) {
        f(idx);
        int i = k - 1;
        while (i >= 0 && idx[i] == m - k + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

}  // namespace

std::pair<Solution, double> brute_force_opt(const Instance& inst,
                                            long long cap) {
    inst.validate();
    const int m = static_cast<int>(inst.candidates.size());
    const int kk = std::min(inst.k, m);
    if (binomial_capped(m, kk, cap) > cap)
        throw size_error("brute_force_opt: C(m,k) exceeds cap of " +
                         std::to_string(cap));
    Solution best;
    double best_cost = std::numeric_limits<double>::infinity();
    for_each_subset(m, kk, [&](const std::vector<int>& subset) {
        const double c = solution_cost(inst, subset);
        if (c < best_cost) {
            best_cost = c;
            best.center_indices = subset;
        }
    });
    return {best, best_cost};
}

std::pair<Solution, double> exhaustive_portal_opt(const Instance& inst,
                                                  const ShiftedQuadtree& tree,
                                                  const Relocation& relocation,
                                                  int k, long long cap) {
    inst.validate();
    if (relocation.targets.size() != inst.clients.size())
        throw structural_error("exhaustive_portal_opt: bad relocation");
    const int n = static_cast<int>(inst.clients.size());
    const int m = static_cast<int>(inst.candidates.size());
    const int kk = std::min(k, m);
    if (n > 10)
        throw size_error("exhaustive_portal_opt: n must be <= 10");
    if (binomial_capped(m, kk, cap) > cap)
        throw size_error("exhaustive_portal_opt: C(m,k) exceeds cap");

    BinarySplitTree bt =
        BinarySplitTree::build(tree, relocation.targets, inst.candidates);
    std::vector<std::vector<double>> prd(n, std::vector<double>(m));
    for (int p = 0; p < n; ++p)
        for (int c = 0; c < m; ++c)
            prd[p][c] = bt.pr_dist(relocation.targets[p],
                                   bt.leaf_of_location(p),
                                   inst.candidates[c], bt.leaf_of_candidate(c));

    Solution best;
    double best_cost = std::numeric_limits<double>::infinity();
    for_each_subset(m, kk, [&](const std::vector<int>& subset) {
        KahanSum sum;
        for (int p = 0; p < n; ++p) {
            double route = std::numeric_limits<double>::infinity();
            for (int c : subset) route = std::min(route, prd[p][c]);
            const double leg =
                distance(inst.clients[p], relocation.targets[p]);
            sum.add(pow_z(leg + route, inst.objective_z));
        }
        if (sum.value() < best_cost) {
            best_cost = sum.value();
            best.center_indices = subset;
        }
    });
    return {best, best_cost};
}

}  // namespace kcluster
