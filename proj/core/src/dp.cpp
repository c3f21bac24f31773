#include "kcluster/dp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iterator>
#include <limits>
#include <map>
#include <set>
#include <utility>

#include "kcluster/errors.hpp"

namespace kcluster {

int quantize(double value, double epsD, double cap) {
    if (!(epsD > 0.0)) throw parameter_error("quantize: epsD must be > 0");
    if (value < 0.0) value = 0.0;
    const int max_idx = static_cast<int>(std::ceil(cap / epsD));
    const int idx = static_cast<int>(std::floor(value / epsD + 0.5));
    return std::clamp(idx, 0, max_idx);
}

std::vector<double> cost_buckets(double baseline_cost, double eps, int n) {
    if (!(baseline_cost > 0.0))
        throw parameter_error("cost_buckets: baseline cost must be > 0");
    if (!(eps > 0.0 && eps < 1.0))
        throw parameter_error("cost_buckets: eps must be in (0,1)");
    const double log_n = std::log2(static_cast<double>(std::max(n, 2)));
    const double ratio = 1.0 + eps / log_n;
    const double last = (1.0 + eps) * baseline_cost;
    std::vector<double> out;
    double v = baseline_cost / n;
    while (v < last) {
        out.push_back(v);
        v *= ratio;
    }
    out.push_back(last);
    return out;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::int32_t kFarIdx = std::numeric_limits<std::int32_t>::max();

double pow_z(double v, int z) { return z == 1 ? v : v * v; }

using Profile = std::vector<std::uint16_t>;  // quantized-down l per portal

struct Entry {
    int t = 0;  // centers opened inside
    Profile prof;
    // internal nodes: (left entry, right entry) pairs producing this state
    std::vector<std::pair<int, int>> pairs;
};

struct NodeTable {
    std::vector<Entry> entries;
    double epsD = 0.0;
    double sat_value = 0.0;  // D/eps + 1; l-profile saturation threshold
    int sat_index = 0;
    long long n_clients = 0;
    double sum_leg = 0.0, sum_leg2 = 0.0;
};

struct MemoVal {
    double cost = kInf;
    int pair_idx = -1;
};

class DPEngine {
public:
    DPEngine(const BinarySplitTree& bt, const std::vector<Point>& clients,
             const Relocation& rel, const std::vector<Point>& candidates,
             int k, double eps, int z, const DPLimits& limits)
        : bt_(bt),
          nodes_(bt.nodes()),
          clients_(clients),
          rel_(rel),
          cands_(candidates),
          k_(k),
          eps_(eps),
          z_(z),
          lim_(limits) {
        legs_.resize(clients.size());
        for (std::size_t i = 0; i < clients.size(); ++i)
            legs_[i] = distance(clients[i], rel.targets[i]);
        tables_.resize(nodes_.size());
        memo_.resize(nodes_.size());
    }

    void run_bottom_up();
    // (cost, root entry index) sorted ascending, only feasible t in [1, k]
    std::vector<std::pair<double, int>> root_ranking();
    std::vector<int> backtrack(int root_entry);
    // distinct center sets reachable from a root entry, capped; the cap keeps
    // the product over pair choices from exploding on large tables
    std::vector<std::vector<int>> center_sets(int root_entry, std::size_t cap);
    const NodeTable& table(int u) const { return tables_[u]; }
    bool exhausted() const { return exhausted_; }

private:
    const BinarySplitTree& bt_;
    const std::vector<BinaryNode>& nodes_;
    const std::vector<Point>& clients_;
    const Relocation& rel_;
    const std::vector<Point>& cands_;
    int k_;
    double eps_;
    int z_;
    DPLimits lim_;

    std::vector<double> legs_;
    std::vector<NodeTable> tables_;
    std::vector<std::map<std::vector<std::int32_t>, MemoVal>> memo_;
    std::size_t work_ = 0;
    bool exhausted_ = false;

    double lval(const NodeTable& t, int idx) const {
        return static_cast<double>(idx) * t.epsD;
    }
    double sval(const NodeTable& t, std::int32_t idx) const {
        return idx == kFarIdx ? kInf : static_cast<double>(idx) * t.epsD;
    }
    int qdown(const NodeTable& t, double v) const {
        const double q = std::floor(v / t.epsD);
        if (q >= static_cast<double>(t.sat_index)) return t.sat_index;
        return static_cast<int>(q);
    }
    std::int32_t qup(const NodeTable& t, double v) const {
        if (v == kInf) return kFarIdx;
        const double q = std::ceil(v / t.epsD);
        if (q >= 2e9) return 2000000000;
        return static_cast<std::int32_t>(q);
    }

    void build_leaf(int u);
    void build_internal(int u);
    std::vector<std::int32_t> derive_child_s(
        int u, int child, int sibling, const Entry& sib_entry,
        const std::vector<std::int32_t>& s_u);
    MemoVal cost_of(int u, int entry, const std::vector<std::int32_t>& s);
    void backtrack_rec(int u, int entry, const std::vector<std::int32_t>& s,
                       std::vector<int>& out);
};

void DPEngine::run_bottom_up() {
    for (int u = static_cast<int>(nodes_.size()) - 1; u >= 0; --u) {
        NodeTable& t = tables_[u];
        const double D = bt_.node_diameter(u);
        t.epsD = eps_ * D;
        t.sat_value = D / eps_ + 1.0;
        t.sat_index = static_cast<int>(std::floor(t.sat_value / t.epsD)) + 1;
        t.sat_index = std::min(t.sat_index, 65534);
        t.n_clients = static_cast<long long>(nodes_[u].location_ids.size());
        for (int id : nodes_[u].location_ids) {
            t.sum_leg += legs_[id];
            t.sum_leg2 += legs_[id] * legs_[id];
        }
        if (nodes_[u].leaf)
            build_leaf(u);
        else
            build_internal(u);
    }
}

void DPEngine::build_leaf(int u) {
    NodeTable& t = tables_[u];
    const BinaryNode& nd = nodes_[u];
    Entry closed;
    closed.t = 0;
    closed.prof.assign(nd.portals.size(),
                       static_cast<std::uint16_t>(t.sat_index));
    t.entries.push_back(std::move(closed));
    if (!nd.candidate_ids.empty()) {
        const Point& x = cands_[nd.candidate_ids.front()];
        Entry open;
        open.t = 1;
        open.prof.resize(nd.portals.size());
        for (std::size_t j = 0; j < nd.portals.size(); ++j)
            open.prof[j] = static_cast<std::uint16_t>(
                qdown(t, distance(x, nd.portals[j])));
        t.entries.push_back(std::move(open));
    }
}

void DPEngine::build_internal(int u) {
    NodeTable& t = tables_[u];
    const BinaryNode& nd = nodes_[u];
    const int l = nd.left, r = nd.right;
    const NodeTable& tl = tables_[l];
    const NodeTable& tr = tables_[r];

    // precompute portal-to-portal options from both children
    const auto& pu = nodes_[u].portals;
    std::vector<std::vector<double>> dl(pu.size()), dr(pu.size());
    for (std::size_t j = 0; j < pu.size(); ++j) {
        dl[j].resize(nodes_[l].portals.size());
        for (std::size_t i = 0; i < nodes_[l].portals.size(); ++i)
            dl[j][i] = distance(pu[j], nodes_[l].portals[i]);
        dr[j].resize(nodes_[r].portals.size());
        for (std::size_t i = 0; i < nodes_[r].portals.size(); ++i)
            dr[j][i] = distance(pu[j], nodes_[r].portals[i]);
    }

    // entries are sorted by t; iterate per (t_left, t_right) combination with
    // a shared budget so truncation never starves any total-center count
    auto ranges_of = [&](const NodeTable& tb) {
        std::vector<std::pair<int, int>> rg(k_ + 1, {0, 0});
        int i = 0;
        for (int tv = 0; tv <= k_; ++tv) {
            rg[tv].first = i;
            while (i < static_cast<int>(tb.entries.size()) &&
                   tb.entries[i].t == tv)
                ++i;
            rg[tv].second = i;
        }
        return rg;
    };
    const auto rl = ranges_of(tl);
    const auto rr = ranges_of(tr);
    std::vector<std::pair<int, int>> combos;
    for (int a = 0; a <= k_; ++a)
        for (int b = 0; a + b <= k_; ++b)
            if (rl[a].first < rl[a].second && rr[b].first < rr[b].second)
                combos.emplace_back(a, b);
    const std::size_t combo_budget = std::max<std::size_t>(
        1, lim_.max_pairs_per_node / std::max<std::size_t>(1, combos.size()));

    std::map<std::pair<int, Profile>, std::vector<std::pair<int, int>>> acc;
    for (auto [ta, tb] : combos) {
        std::size_t pairs_done = 0;
        for (int el = rl[ta].first; el < rl[ta].second; ++el) {
        for (int er = rr[tb].first; er < rr[tb].second; ++er) {
            const int tt = ta + tb;
            if (++pairs_done > combo_budget) {
                exhausted_ = true;
                goto next_combo;
            }
            Profile prof(pu.size());
            for (std::size_t j = 0; j < pu.size(); ++j) {
                double best = kInf;
                // a child with no centers inside contributes nothing; its
                // all-saturated profile is not a center promise
                if (tl.entries[el].t > 0) {
                    const Profile& fl = tl.entries[el].prof;
                    for (std::size_t i = 0; i < fl.size(); ++i)
                        best = std::min(best, dl[j][i] + lval(tl, fl[i]));
                }
                if (tr.entries[er].t > 0) {
                    const Profile& fr = tr.entries[er].prof;
                    for (std::size_t i = 0; i < fr.size(); ++i)
                        best = std::min(best, dr[j][i] + lval(tr, fr[i]));
                }
                prof[j] = static_cast<std::uint16_t>(
                    best == kInf ? t.sat_index : qdown(t, best));
            }
            auto& lst = acc[{tt, std::move(prof)}];
            if (lst.size() < lim_.max_backptrs_per_entry)
                lst.emplace_back(el, er);
            else
                exhausted_ = true;
        }
        }
    next_combo:;
    }
    for (auto& [key, lst] : acc) {
        Entry e;
        e.t = key.first;
        e.prof = key.second;
        e.pairs = std::move(lst);
        t.entries.push_back(std::move(e));
    }
    if (t.entries.size() > lim_.max_entries_per_node) {
        exhausted_ = true;
        // keep a per-t quota in deterministic (t, profile) order
        const std::size_t quota =
            std::max<std::size_t>(1, lim_.max_entries_per_node / (k_ + 1));
        std::vector<Entry> kept;
        std::size_t in_t = 0;
        int cur_t = -1;
        for (auto& e : t.entries) {
            if (e.t != cur_t) {
                cur_t = e.t;
                in_t = 0;
            }
            if (in_t++ < quota) kept.push_back(std::move(e));
        }
        t.entries = std::move(kept);
    }
}

std::vector<std::int32_t> DPEngine::derive_child_s(
    int u, int child, int sibling, const Entry& sib_entry,
    const std::vector<std::int32_t>& s_u) {
    const NodeTable& tu = tables_[u];
    const NodeTable& tc = tables_[child];
    const NodeTable& ts = tables_[sibling];
    const auto& pc = nodes_[child].portals;
    const auto& pu = nodes_[u].portals;
    const auto& ps = nodes_[sibling].portals;
    work_ += pc.size() * (pu.size() + ps.size());
    if (work_ > lim_.work_budget) exhausted_ = true;

    std::vector<std::int32_t> out(pc.size());
    for (std::size_t i = 0; i < pc.size(); ++i) {
        double best = kInf;
        for (std::size_t j = 0; j < pu.size(); ++j) {
            const double sv = sval(tu, s_u[j]);
            if (sv < kInf)
                best = std::min(best, distance(pc[i], pu[j]) + sv);
        }
        if (sib_entry.t > 0) {
            // sibling profile underestimates its inside distances; the
            // derived promise is repaired by the exact root re-scoring
            for (std::size_t j = 0; j < ps.size(); ++j)
                best = std::min(best, distance(pc[i], ps[j]) +
                                          lval(ts, sib_entry.prof[j]));
        }
        out[i] = qup(tc, best);
    }
    return out;
}

MemoVal DPEngine::cost_of(int u, int entry,
                          const std::vector<std::int32_t>& s) {
    std::vector<std::int32_t> key;
    key.reserve(s.size() + 1);
    key.push_back(entry);
    key.insert(key.end(), s.begin(), s.end());
    auto it = memo_[u].find(key);
    if (it != memo_[u].end()) return it->second;

    const NodeTable& t = tables_[u];
    const BinaryNode& nd = nodes_[u];
    const Entry& e = t.entries[entry];
    MemoVal val;

    if (nd.leaf) {
        if (nd.location_ids.empty()) {
            val.cost = 0.0;
        } else if (e.t == 1) {
            KahanSum sum;
            for (int id : nd.location_ids) sum.add(pow_z(legs_[id], z_));
            val.cost = sum.value();
        } else {
            const Point& x = rel_.targets[nd.location_ids.front()];
            double route = kInf;
            for (std::size_t j = 0; j < nd.portals.size(); ++j) {
                const double sv = sval(t, s[j]);
                if (sv < kInf)
                    route = std::min(route, distance(x, nd.portals[j]) + sv);
            }
            if (route == kInf) {
                val.cost = kInf;
            } else {
                KahanSum sum;
                for (int id : nd.location_ids)
                    sum.add(pow_z(legs_[id] + route, z_));
                val.cost = sum.value();
            }
        }
    } else if (e.t == 0 && t.n_clients > lim_.far_cutoff) {
        // far case: no center inside and a big subtree; price every client
        // as if relocated to the node center
        Point center = bt_.node_corner(u);
        for (int a = 0; a < static_cast<int>(center.size()); ++a)
            center[a] += 0.5 * bt_.node_side(u, a);
        double route = kInf;
        for (std::size_t j = 0; j < nd.portals.size(); ++j) {
            const double sv = sval(t, s[j]);
            if (sv < kInf)
                route = std::min(route, distance(center, nd.portals[j]) + sv);
        }
        if (route == kInf) {
            val.cost = kInf;
        } else if (z_ == 1) {
            val.cost = t.sum_leg + route * t.n_clients;
        } else {
            val.cost = t.sum_leg2 + 2.0 * route * t.sum_leg +
                       route * route * t.n_clients;
        }
    } else {
        const int l = nd.left, r = nd.right;
        const std::size_t n_pairs =
            exhausted_ ? std::min<std::size_t>(1, e.pairs.size())
                       : e.pairs.size();
        for (std::size_t pi = 0; pi < n_pairs; ++pi) {
            const auto [el, er] = e.pairs[pi];
            auto s_l = derive_child_s(u, l, r, tables_[r].entries[er], s);
            auto s_r = derive_child_s(u, r, l, tables_[l].entries[el], s);
            const MemoVal cl = cost_of(l, el, s_l);
            if (cl.cost >= val.cost) continue;
            const MemoVal cr = cost_of(r, er, s_r);
            if (cl.cost + cr.cost < val.cost) {
                val.cost = cl.cost + cr.cost;
                val.pair_idx = static_cast<int>(pi);
            }
        }
    }
    memo_[u].emplace(std::move(key), val);
    return val;
}

std::vector<std::pair<double, int>> DPEngine::root_ranking() {
    const NodeTable& t = tables_[0];
    std::vector<std::int32_t> s_inf(nodes_[0].portals.size(), kFarIdx);
    std::vector<std::pair<double, int>> out;
    for (int e = 0; e < static_cast<int>(t.entries.size()); ++e) {
        if (t.entries[e].t < 1 || t.entries[e].t > k_) continue;
        const MemoVal v = cost_of(0, e, s_inf);
        if (v.cost < kInf) out.emplace_back(v.cost, e);
    }
    std::sort(out.begin(), out.end());
    return out;
}

void DPEngine::backtrack_rec(int u, int entry,
                             const std::vector<std::int32_t>& s,
                             std::vector<int>& out) {
    const NodeTable& t = tables_[u];
    const BinaryNode& nd = nodes_[u];
    const Entry& e = t.entries[entry];
    if (nd.leaf) {
        if (e.t == 1) out.push_back(nd.candidate_ids.front());
        return;
    }
    if (e.t == 0 && t.n_clients > lim_.far_cutoff) return;
    const MemoVal v = cost_of(u, entry, s);
    if (v.pair_idx < 0) {
        if (e.t != 0) throw internal_error("dp: lost backtracking pair");
        return;
    }
    const auto [el, er] = e.pairs[v.pair_idx];
    const int l = nd.left, r = nd.right;
    auto s_l = derive_child_s(u, l, r, tables_[r].entries[er], s);
    auto s_r = derive_child_s(u, r, l, tables_[l].entries[el], s);
    backtrack_rec(l, el, s_l, out);
    backtrack_rec(r, er, s_r, out);
}

std::vector<int> DPEngine::backtrack(int root_entry) {
    std::vector<std::int32_t> s_inf(nodes_[0].portals.size(), kFarIdx);
    std::vector<int> out;
    backtrack_rec(0, root_entry, s_inf, out);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<std::vector<int>> DPEngine::center_sets(int root_entry,
                                                    std::size_t cap) {
    // the set of opened centers depends only on the pair choices, not on the
    // portal promises, so this is a plain product over the backpointer lists
    std::map<std::pair<int, int>, std::vector<std::vector<int>>> memo;
    auto rec = [&](auto&& self, int u, int entry)
        -> const std::vector<std::vector<int>>& {
        const auto key = std::make_pair(u, entry);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        const NodeTable& t = tables_[u];
        const BinaryNode& nd = nodes_[u];
        const Entry& e = t.entries[entry];
        std::vector<std::vector<int>> out;
        if (nd.leaf) {
            out.push_back(e.t == 1
                              ? std::vector<int>{nd.candidate_ids.front()}
                              : std::vector<int>{});
        } else if (e.t == 0) {
            out.push_back({});
        } else {
            std::set<std::vector<int>> seen;
            for (const auto& [el, er] : e.pairs) {
                const auto& ls = self(self, nodes_[u].left, el);
                const auto& rs = self(self, nodes_[u].right, er);
                for (const auto& a : ls) {
                    for (const auto& b : rs) {
                        std::vector<int> merged;
                        merged.reserve(a.size() + b.size());
                        std::merge(a.begin(), a.end(), b.begin(), b.end(),
                                   std::back_inserter(merged));
                        merged.erase(
                            std::unique(merged.begin(), merged.end()),
                            merged.end());
                        seen.insert(std::move(merged));
                        if (seen.size() >= cap) break;
                    }
                    if (seen.size() >= cap) break;
                }
                if (seen.size() >= cap) break;
            }
            out.assign(seen.begin(), seen.end());
        }
        return memo.emplace(key, std::move(out)).first->second;
    };
    return rec(rec, 0, root_entry);
}

}  // namespace

DPResult solve_dp(const BinarySplitTree& btree,
                  const std::vector<Point>& clients,
                  const Relocation& relocation,
                  const std::vector<Point>& candidates, int k, double eps,
                  int z, double baseline_cost, const DPLimits& limits) {
    if (!(eps > 0.0 && eps < 1.0))
        throw parameter_error("solve_dp: eps must be in (0,1)");
    if (z != 1 && z != 2) throw parameter_error("solve_dp: z must be 1 or 2");
    if (k < 1) throw parameter_error("solve_dp: k must be >= 1");
    if (clients.size() != relocation.targets.size() ||
        btree.locations().size() != relocation.targets.size() ||
        btree.candidates().size() != candidates.size())
        throw structural_error("solve_dp: inconsistent inputs");

    DPEngine eng(btree, clients, relocation, candidates, k, eps, z, limits);
    eng.run_bottom_up();
    auto ranking = eng.root_ranking();
    if (ranking.empty())
        throw internal_error("solve_dp: no feasible root state");

    const int n = static_cast<int>(clients.size());
    const bool rescore = n <= limits.rescore_max_clients;
    const int top = rescore ? std::min<int>(limits.rescore_top,
                                            static_cast<int>(ranking.size()))
                            : 1;

    DPResult res;
    double best_cost = kInf;
    auto exact_cost = [&](const std::vector<int>& centers) {
        KahanSum sum;
        for (int p = 0; p < n; ++p) {
            double route = kInf;
            for (int cd : centers)
                route = std::min(
                    route,
                    btree.pr_dist(relocation.targets[p],
                                  btree.leaf_of_location(p), candidates[cd],
                                  btree.leaf_of_candidate(cd)));
            if (route == kInf) return kInf;
            sum.add(pow_z(
                distance(clients[p], relocation.targets[p]) + route, z));
        }
        return sum.value();
    };
    if (rescore) {
        // quantization error is absolute (~eps * top-level diameter), so the
        // ranking inside a root entry's pair list is unreliable; price every
        // enumerated center set exactly and keep the cheapest
        std::set<std::vector<int>> seen;
        for (int i = 0; i < top; ++i)
            for (auto& centers :
                 eng.center_sets(ranking[i].second, limits.max_rescore_sets))
                if (!centers.empty()) seen.insert(std::move(centers));
        for (const auto& centers : seen) {
            const double c = exact_cost(centers);
            if (c < best_cost) {
                best_cost = c;
                res.solution.center_indices = centers;
            }
        }
    } else {
        for (int i = 0; i < top; ++i) {
            std::vector<int> centers = eng.backtrack(ranking[i].second);
            if (centers.empty()) continue;
            if (ranking[i].first < best_cost) {
                best_cost = ranking[i].first;
                res.solution.center_indices = std::move(centers);
            }
        }
    }
    if (res.solution.center_indices.empty())
        throw internal_error("solve_dp: backtracking produced no centers");
    res.tilde_cost_pr = best_cost;
    res.budget_exhausted = eng.exhausted();

    if (baseline_cost > 0.0) {
        const auto buckets = cost_buckets(baseline_cost, eps, std::max(n, 1));
        for (std::size_t b = 0; b < buckets.size(); ++b)
            if (buckets[b] >= best_cost) {
                res.cost_bucket = static_cast<int>(b);
                break;
            }
    }
    res.table_sizes.resize(btree.nodes().size());
    for (std::size_t u = 0; u < btree.nodes().size(); ++u)
        res.table_sizes[u] = eng.table(static_cast<int>(u)).entries.size();
    if (limits.enable_trace) {
        char buf[96];
        for (std::size_t u = 0; u < res.table_sizes.size(); ++u) {
            std::snprintf(buf, sizeof buf, "node %zu table %zu\n", u,
                          res.table_sizes[u]);
            res.trace += buf;
        }
        std::snprintf(buf, sizeof buf, "root bucket %d\n", res.cost_bucket);
        res.trace += buf;
    }
    return res;
}

}  // namespace kcluster
