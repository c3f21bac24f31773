#include "kcluster/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kcluster/errors.hpp"

namespace kcluster {

namespace {

double pow_z(double v, int z) { return z == 1 ? v : v * v; }

std::vector<int> padded(const std::vector<int>& v, std::size_t k) {
    std::vector<int> out = v;
    while (out.size() < k) out.push_back(v.back());
    return out;
}

Solution dedup_solution(std::vector<int> idx) {
    std::sort(idx.begin(), idx.end());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    Solution s;
    s.center_indices = std::move(idx);
    return s;
}

// nearest slot of `slots` (positions are candidate points) to p
int nearest_slot(const Point& p, const Instance& inst,
                 const std::vector<int>& slots) {
    int best = -1;
    double best_sq = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < slots.size(); ++j) {
        const double sq = squared_distance(p, inst.candidates[slots[j]]);
        if (sq < best_sq) {
            best_sq = sq;
            best = static_cast<int>(j);
        }
    }
    return best;
}

}  // namespace

CenterMapping build_mapping(const Instance& inst, const Solution& baseline,
                            const Solution& opt) {
    if (baseline.center_indices.empty() || opt.center_indices.empty())
        throw domain_error("build_mapping: empty solution");
    const std::size_t k =
        std::max(baseline.center_indices.size(), opt.center_indices.size());
    CenterMapping m;
    m.baseline = padded(baseline.center_indices, k);
    m.opt = padded(opt.center_indices, k);
    m.psi.resize(k);
    for (std::size_t f = 0; f < k; ++f) {
        const int owner =
            nearest_slot(inst.candidates[m.opt[f]], inst, m.baseline);
        m.psi[owner].push_back(static_cast<int>(f));
    }
    m.a_class.resize(k);
    m.f_ell.assign(k, -1);
    for (std::size_t l = 0; l < k; ++l) {
        m.a_class[l] = static_cast<int>(std::min<std::size_t>(m.psi[l].size(), 2));
        if (!m.psi[l].empty()) {
            int best = m.psi[l][0];
            double best_sq = std::numeric_limits<double>::infinity();
            for (int f : m.psi[l]) {
                const double sq =
                    squared_distance(inst.candidates[m.baseline[l]],
                                     inst.candidates[m.opt[f]]);
                if (sq < best_sq) {
                    best_sq = sq;
                    best = f;
                }
            }
            m.f_ell[l] = best;
        }
        for (int f : m.psi[l]) {
            if (m.psi[l].size() == 1)
                m.opt1.push_back(f);
            else if (m.psi[l].size() >= 2)
                m.opt_ge2.push_back(f);
        }
    }
    std::sort(m.opt1.begin(), m.opt1.end());
    std::sort(m.opt_ge2.begin(), m.opt_ge2.end());
    return m;
}

OptPrimeResult build_optprime(const CenterMapping& mapping,
                              const Instance& inst, double eps) {
    if (!(eps > 0.0 && eps < 1.0))
        throw parameter_error("build_optprime: eps must be in (0,1)");
    const std::size_t k = mapping.opt.size();
    std::vector<char> present(k, 1);
    std::vector<char> protected_slot(k, 0);
    for (int f : mapping.f_ell)
        if (f >= 0) protected_slot[f] = 1;

    std::size_t target = static_cast<std::size_t>(
        std::floor(eps * static_cast<double>(mapping.opt_ge2.size()) / 2.0));

    OptPrimeResult out;
    auto current_solution = [&] {
        std::vector<int> idx;
        for (std::size_t f = 0; f < k; ++f)
            if (present[f]) idx.push_back(mapping.opt[f]);
        return dedup_solution(std::move(idx));
    };
    for (std::size_t step = 0; step < target; ++step) {
        int pick = -1;
        double pick_cost = std::numeric_limits<double>::infinity();
        for (int f : mapping.opt_ge2) {
            if (!present[f] || protected_slot[f]) continue;
            present[f] = 0;
            Solution s = current_solution();
            present[f] = 1;
            if (s.center_indices.empty()) continue;
            const double c = cost(inst, s);
            if (c < pick_cost) {
                pick_cost = c;
                pick = f;
            }
        }
        if (pick < 0) break;  // duplicates exhausted the removable pool
        present[pick] = 0;
        out.removed.push_back(pick);
    }
    for (std::size_t f = 0; f < k; ++f)
        if (present[f]) out.slots.push_back(static_cast<int>(f));
    out.solution = current_solution();
    out.cost = cost(inst, out.solution);
    return out;
}

SStarResult build_sstar(const CenterMapping& mapping,
                        const OptPrimeResult& optprime, const Instance& inst,
                        const ShiftedQuadtree& tree, const CutParams& params) {
    const std::size_t k = mapping.baseline.size();
    SStarResult out;
    out.b_d.resize(k);
    for (std::size_t l = 0; l < k; ++l) {
        const Point& pos = inst.candidates[mapping.baseline[l]];
        const double r = distance_to_set(pos, inst.candidates,
                                         optprime.solution.center_indices);
        out.b_d[l] = classify_badly_cut(tree, pos, 3.0 * r, params);
    }

    // working set: candidate index per surviving optimum slot
    std::vector<int> members;
    std::vector<int> member_slot;  // originating optimum slot, -1 for added
    for (int f : optprime.slots) {
        members.push_back(mapping.opt[f]);
        member_slot.push_back(f);
    }
    for (std::size_t l = 0; l < k; ++l) {
        if (!out.b_d[l]) continue;
        if (!mapping.psi[l].empty()) {
            const int f = mapping.f_ell[l];
            for (std::size_t j = 0; j < members.size(); ++j) {
                if (member_slot[j] == f) {
                    members[j] = mapping.baseline[l];
                    member_slot[j] = -1;
                    ++out.step1_swaps;
                    break;
                }
            }
        } else {
            members.push_back(mapping.baseline[l]);
            member_slot.push_back(-1);
            ++out.step2_added;
        }
    }
    out.size = static_cast<int>(members.size());
    out.solution = dedup_solution(std::move(members));
    return out;
}

SmallDistortionReport check_small_distortion(
    const Instance& inst_in, const ShiftedQuadtree& tree,
    const Solution& baseline, const Solution& opt, double eps, int z,
    const DistortionConstants& consts) {
    Instance inst = inst_in;
    inst.objective_z = z;
    const CutParams cp = CutParams::make(eps, inst.dimension);

    const CenterMapping mapping = build_mapping(inst, baseline, opt);
    const OptPrimeResult optprime = build_optprime(mapping, inst, eps);
    const SStarResult sstar =
        build_sstar(mapping, optprime, inst, tree, cp);

    const double cost_a = cost(inst, baseline);
    const double cost_opt = cost(inst, opt);

    SmallDistortionReport rep;
    rep.sstar_size = sstar.size;
    rep.size_ok = sstar.size <= inst.k;

    for (std::size_t p = 0; p < inst.clients.size(); ++p)
        rep.budget_total +=
            budget(tree, inst, static_cast<int>(p), baseline,
                   optprime.solution, cp)
                .total;
    rep.budget_bound = consts.budget_slack * eps * (cost_opt + cost_a);
    rep.prop1_pass = rep.budget_total <= rep.budget_bound;

    const BadCutReport bc = classify_all(tree, inst, baseline, nullptr, cp);
    const Relocation rel = relocate(inst, baseline, bc);

    const auto& sstar_idx = sstar.solution.center_indices;
    KahanSum tilde_sum;
    for (std::size_t p = 0; p < inst.clients.size(); ++p) {
        const double leg = distance(inst.clients[p], rel.targets[p]);
        const double ds =
            distance_to_set(rel.targets[p], inst.candidates, sstar_idx);
        tilde_sum.add(pow_z(leg + ds, z));
    }
    rep.sstar_tilde_cost = tilde_sum.value();
    rep.sstar_bound = (1.0 + consts.cost_slack * eps) * cost_opt +
                      consts.cost_slack * eps * cost_a;
    rep.prop2_pass = rep.sstar_tilde_cost <= rep.sstar_bound;

    bool facts_ok = true;
    const auto& optp_idx = optprime.solution.center_indices;
    const double tol = 1e-9;
    for (std::size_t l = 0; l < mapping.baseline.size(); ++l) {
        const Point& pos = inst.candidates[mapping.baseline[l]];
        if (distance_to_set(pos, inst.candidates, sstar_idx) >
            2.0 * distance_to_set(pos, inst.candidates, optp_idx) + tol)
            facts_ok = false;
    }

    for (std::size_t p = 0; p < inst.clients.size(); ++p) {
        const Point& pt = inst.clients[p];
        const double A_p =
            distance_to_set(pt, inst.candidates, baseline.center_indices);
        const double optp_p = distance_to_set(pt, inst.candidates, optp_idx);
        const double d_sstar = distance_to_set(pt, inst.candidates, sstar_idx);
        if (d_sstar > 2.0 * optp_p + A_p + tol) facts_ok = false;

        const double leg = distance(pt, rel.targets[p]);
        const double ds =
            distance_to_set(rel.targets[p], inst.candidates, sstar_idx);
        if (leg + ds > 3.0 * A_p + 2.0 * optp_p + tol) facts_ok = false;

        // property 3: witness from the proof's case analysis, then the
        // exhaustive fallback to distinguish tight constants from bugs
        const double b_p = consts.detour_slack *
                           budget(tree, inst, static_cast<int>(p), baseline,
                                  optprime.solution, cp)
                               .total;
        const double rhs = pow_z(leg + ds, z) + b_p;
        const int a_idx =
            nearest_index(pt, inst.candidates, baseline.center_indices);
        auto witness_ok = [&](const Point& s_pos) {
            const int i = tree.cut_level_pair(rel.targets[p], s_pos);
            const double pen =
                i == ShiftedQuadtree::kNotCut ? 0.0 : eps * std::ldexp(1.0, i);
            const double lhs =
                pow_z(leg + distance(rel.targets[p], s_pos) + pen, z);
            return lhs <= rhs + tol * std::max(1.0, rhs);
        };
        const int w1 = nearest_index(pt, inst.candidates, sstar_idx);
        const int w2 =
            nearest_index(inst.candidates[a_idx], inst.candidates, sstar_idx);
        bool found = witness_ok(inst.candidates[w1]) ||
                     witness_ok(inst.candidates[w2]) ||
                     (std::binary_search(sstar_idx.begin(), sstar_idx.end(),
                                         a_idx) &&
                      witness_ok(inst.candidates[a_idx]));
        if (!found) {
            for (int s : sstar_idx)
                if (witness_ok(inst.candidates[s])) {
                    found = true;
                    break;
                }
            if (found)
                ++rep.prop3_fallback_hits;
            else
                ++rep.prop3_failures;
        }
    }
    rep.prop3_pass = rep.prop3_failures == 0;
    rep.facts_pass = facts_ok;
    rep.pass = rep.prop1_pass && rep.prop2_pass && rep.prop3_pass;
    return rep;
}

MonteCarloResult monte_carlo(int seeds,
                             const std::function<bool(int)>& probe) {
    if (seeds < 100)
        throw parameter_error("monte_carlo: need at least 100 seeds");
    MonteCarloResult out;
    out.outcomes.resize(seeds);
    long long hits = 0;
    for (int i = 0; i < seeds; ++i) {
        out.outcomes[i] = probe(i) ? 1 : 0;
        hits += out.outcomes[i];
    }
    out.frequency = static_cast<double>(hits) / seeds;
    out.sigma =
        std::sqrt(out.frequency * (1.0 - out.frequency) / seeds);
    return out;
}

}  // namespace kcluster
