// Acceptance gate: one line per criterion, PASS/FAIL plus the measured
// numbers. Exits nonzero when any criterion fails. argv[1] must point at the
// command-line binary (used by the determinism criterion).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "kcluster/badcut.hpp"
#include "kcluster/baseline.hpp"
#include "kcluster/binary_tree.hpp"
#include "kcluster/diagnostics.hpp"
#include "kcluster/dp.hpp"
#include "kcluster/io.hpp"
#include "kcluster/quadtree.hpp"
#include "kcluster/rng.hpp"
#include "kcluster/solver.hpp"

using namespace kcluster;

namespace {

int failures = 0;

double now_ms() {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

void report(int idx, const char* name, bool pass, const std::string& detail,
            double ms) {
    std::printf("criterion %d (%s): %s (%s, %.1fs)\n", idx, name,
                pass ? "PASS" : "FAIL", detail.c_str(), ms / 1000.0);
    std::fflush(stdout);
    if (!pass) ++failures;
}

Instance fixed_instance(int z) {
    GenParams gp;
    gp.n = 10;
    gp.m = 6;
    gp.k = 2;
    gp.d = 2;
    gp.z = z;
    gp.seed = 7;
    gp.dist = "clustered";
    return normalize(generate_instance(gp)).instance;
}

std::vector<Point> tree_points(const Instance& ni) {
    std::vector<Point> pts = ni.clients;
    pts.insert(pts.end(), ni.candidates.begin(), ni.candidates.end());
    return pts;
}

// 1: approximation ratio against the exact oracle
void criterion_ratio() {
    const double t0 = now_ms();
    std::vector<double> ratios;
    int within = 0;
    for (int i = 0; i < 50; ++i) {
        GenParams gp;
        gp.n = 5 + i % 8;
        gp.m = 4 + i % 5;
        gp.k = 1 + i % 3;
        gp.d = 2;
        gp.z = 1 + i % 2;
        gp.seed = 500 + i;
        gp.dist = i % 2 ? "clustered" : "uniform";
        Instance inst = generate_instance(gp);
        const double oval = brute_force_opt(inst).second;
        SolverParams sp;
        sp.eps = 0.3;
        sp.trials = 7;
        sp.rng_seed = 1;
        const double got = solve(inst, sp).cost;
        const double ratio = oval > 0.0 ? got / oval : 1.0;
        ratios.push_back(ratio);
        if (ratio <= 1.0 + 5.0 * 0.3 + 1e-9) ++within;
    }
    std::sort(ratios.begin(), ratios.end());
    const double median = ratios[ratios.size() / 2];
    const double ms = now_ms() - t0;
    char buf[128];
    std::snprintf(buf, sizeof buf, "within bound %d/50, median ratio %.4f",
                  within, median);
    report(1, "approximation ratio vs exact oracle",
           within >= 48 && median <= 1.05 && ms <= 60000.0, buf, ms);
}

// 2: dp value sandwiched by the exhaustive portal oracle
void criterion_sandwich() {
    const double t0 = now_ms();
    int ok = 0;
    double worst = 1.0;
    for (int i = 0; i < 30; ++i) {
        GenParams gp;
        gp.n = 4 + i % 5;
        gp.m = 3 + i % 4;
        gp.k = 1 + i % 3;
        gp.d = 2;
        gp.z = 1 + i % 2;
        gp.seed = 100 + i;
        gp.dist = i % 2 ? "clustered" : "uniform";
        if (gp.k > gp.m) gp.k = gp.m;
        Instance ni = normalize(generate_instance(gp)).instance;
        const double eps = 0.3;
        const CutParams cp = CutParams::make(eps, 2);
        auto pts = tree_points(ni);
        auto tree = ShiftedQuadtree::build(pts, cp.rho,
                                           derive_seed(9, 0x7255, i));
        Solution base = baseline_solve(ni, {}, derive_seed(9, 2));
        BadCutReport bc = classify_all(tree, ni, base, nullptr, cp);
        Relocation rel = relocate(ni, base, bc);
        const double oval =
            exhaustive_portal_opt(ni, tree, rel, ni.k).second;
        auto bt = BinarySplitTree::build(tree, rel.targets, ni.candidates);
        DPResult dp = solve_dp(bt, ni.clients, rel, ni.candidates, ni.k, eps,
                               ni.objective_z, cost(ni, base));
        const bool good = oval <= dp.tilde_cost_pr + 1e-9 &&
                          dp.tilde_cost_pr <= (1.0 + eps) * oval + 1e-9;
        if (good) ++ok;
        if (oval > 0.0) worst = std::max(worst, dp.tilde_cost_pr / oval);
    }
    const double ms = now_ms() - t0;
    char buf[128];
    std::snprintf(buf, sizeof buf, "sandwiched %d/30, worst ratio %.4f", ok,
                  worst);
    report(2, "dp vs exhaustive portal oracle sandwich",
           ok == 30 && ms <= 120000.0, buf, ms);
}

// 3: per-level cut probability of a ball
void criterion_cutprob() {
    const double t0 = now_ms();
    Instance ni = fixed_instance(2);
    const CutParams cp = CutParams::make(0.25, 2);
    auto pts = tree_points(ni);
    auto probe_tree = ShiftedQuadtree::build(pts, cp.rho, derive_seed(0, 1));
    const int seeds = 10000;
    bool all = true;
    double worst_margin = 1e9;
    for (int j = 0; j < 5; ++j) {
        const int lvl = std::max(probe_tree.bottom_level() + 1,
                                 probe_tree.top_level() - 2 - j);
        const Point& p = ni.clients[j % ni.clients.size()];
        const double r = 0.1 * std::ldexp(1.0, lvl);
        auto mc = monte_carlo(seeds, [&](int s) {
            auto t = ShiftedQuadtree::build(pts, cp.rho,
                                            derive_seed(0, 0xc1, s));
            return t.cut_level_ball(p, r) == lvl;
        });
        const double bound = 2.0 * r / std::ldexp(1.0, lvl);
        const double margin = bound + 3.0 * mc.sigma - mc.frequency;
        worst_margin = std::min(worst_margin, margin);
        all = all && margin >= 0.0;
    }
    const double ms = now_ms() - t0;
    char buf[128];
    std::snprintf(buf, sizeof buf, "5 probes x %d seeds, worst margin %.4f",
                  seeds, worst_margin);
    report(3, "cut probability bound", all && ms <= 60000.0, buf, ms);
}

// 4: badly-cut frequency per point
void criterion_badcut() {
    const double t0 = now_ms();
    Instance ni = fixed_instance(2);
    auto pts = tree_points(ni);
    Solution base = baseline_solve(ni, {}, derive_seed(0, 2));
    const int seeds = 10000;
    bool all = true;
    double worst_margin = 1e9;
    for (double eps : {0.25, 0.125}) {
        const CutParams cp = CutParams::make(eps, 2);
        std::vector<long long> hits(ni.clients.size(), 0);
        for (int s = 0; s < seeds; ++s) {
            auto t = ShiftedQuadtree::build(pts, cp.rho,
                                            derive_seed(0, 0xbc, s));
            auto rep = classify_all(t, ni, base, nullptr, cp);
            for (std::size_t p = 0; p < hits.size(); ++p)
                hits[p] += rep.point_flags[p];
        }
        for (std::size_t p = 0; p < hits.size(); ++p) {
            const double f = static_cast<double>(hits[p]) / seeds;
            const double sigma = std::sqrt(f * (1.0 - f) / seeds);
            const double margin = eps + 3.0 * sigma - f;
            worst_margin = std::min(worst_margin, margin);
            all = all && margin >= 0.0;
        }
    }
    const double ms = now_ms() - t0;
    char buf[128];
    std::snprintf(buf, sizeof buf,
                  "eps {1/4,1/8} x %d seeds, worst margin %.4f", seeds,
                  worst_margin);
    report(4, "badly-cut frequency bound", all, buf, ms);
}

// 5: portal path detour inequality
void criterion_detour() {
    const double t0 = now_ms();
    Instance ni = fixed_instance(2);
    const CutParams cp = CutParams::make(0.25, 2);
    auto pts = tree_points(ni);
    Point lo = pts[0], hi = pts[0];
    for (const Point& p : pts)
        for (int a = 0; a < 2; ++a) {
            lo[a] = std::min(lo[a], p[a]);
            hi[a] = std::max(hi[a], p[a]);
        }
    bool all = true;
    double worst = -1e9;
    for (int t = 0; t < 20; ++t) {
        auto tree =
            ShiftedQuadtree::build(pts, cp.rho, derive_seed(0, 0xde, t));
        SplitMix64 rng(derive_seed(0, 0xdf, t));
        for (int j = 0; j < 1000; ++j) {
            Point p(2), q(2);
            for (int a = 0; a < 2; ++a) {
                p[a] = lo[a] + (hi[a] - lo[a]) * rng.next_double();
                q[a] = lo[a] + (hi[a] - lo[a]) * rng.next_double();
            }
            const int i = tree.cut_level_pair(p, q);
            const double allowance =
                i == ShiftedQuadtree::kNotCut
                    ? 0.0
                    : cp.rho * std::ldexp(1.0, i + 2);
            const double excess = tree.portal_path(p, q).length -
                                  (distance(p, q) + allowance);
            worst = std::max(worst, excess);
            all = all && excess <= 1e-9;
        }
    }
    const double ms = now_ms() - t0;
    char buf[128];
    std::snprintf(buf, sizeof buf,
                  "20 trees x 1000 pairs, worst excess %.3g", worst);
    report(5, "portal detour inequality", all, buf, ms);
}

// 6: budget scales linearly-ish with eps
void criterion_budget_scaling() {
    const double t0 = now_ms();
    const int seeds = 10000;
    bool all = true;
    std::string detail;
    for (int z : {2, 1}) {
        Instance ni = fixed_instance(z);
        auto pts = tree_points(ni);
        Solution base = baseline_solve(ni, {}, derive_seed(0, 2));
        Solution opt = brute_force_opt(ni).first;
        double mean[2] = {0.0, 0.0};
        const double eps_at[2] = {0.25, 0.125};
        for (int e = 0; e < 2; ++e) {
            const CutParams cp = CutParams::make(eps_at[e], 2);
            KahanSum total;
            for (int s = 0; s < seeds; ++s) {
                auto t = ShiftedQuadtree::build(pts, cp.rho,
                                                derive_seed(0, 0xb6, s));
                for (std::size_t p = 0; p < ni.clients.size(); ++p)
                    total.add(budget(t, ni, static_cast<int>(p), base, opt,
                                     cp)
                                  .total);
            }
            mean[e] = total.value() / seeds;
        }
        const double factor = mean[0] / mean[1];
        char buf[64];
        std::snprintf(buf, sizeof buf, " z=%d factor %.3f", z, factor);
        detail += buf;
        all = all && factor >= 1.5 && factor <= 3.0;
    }
    const double ms = now_ms() - t0;
    report(6, "budget eps-scaling", all, "eps vs eps/2:" + detail, ms);
}

// 7: structure theorem frequency plus per-seed fact checks
void criterion_structure() {
    const double t0 = now_ms();
    const int seeds = 10000;
    bool all = true;
    std::string detail;
    for (int z : {2, 1}) {
        Instance ni = fixed_instance(z);
        auto pts = tree_points(ni);
        Solution base = baseline_solve(ni, {}, derive_seed(0, 2));
        Solution opt = brute_force_opt(ni).first;
        const double eps = 0.25;
        const CutParams cp = CutParams::make(eps, 2);
        long long pass = 0, facts = 0;
        for (int s = 0; s < seeds; ++s) {
            auto t = ShiftedQuadtree::build(pts, cp.rho,
                                            derive_seed(0, 0x5d, s));
            auto rep = check_small_distortion(ni, t, base, opt, eps, z);
            pass += rep.pass;
            facts += rep.facts_pass;
        }
        const double freq = static_cast<double>(pass) / seeds;
        const double sigma = std::sqrt(freq * (1.0 - freq) / seeds);
        char buf[96];
        std::snprintf(buf, sizeof buf, " z=%d pass %.3f facts %lld/%d", z,
                      freq, facts, seeds);
        detail += buf;
        all = all && freq >= 2.0 / 3.0 - 3.0 * sigma && facts == seeds;
    }
    const double ms = now_ms() - t0;
    report(7, "structure theorem frequency", all, "rates:" + detail, ms);
}

// 8: near-linear scaling from n = 1e4 to 2e4
void criterion_scaling() {
    const double t0 = now_ms();
    double med[2] = {0.0, 0.0};
    const long long sizes[2] = {10000, 20000};
    for (int i = 0; i < 2; ++i) {
        GenParams gp;
        gp.n = static_cast<int>(sizes[i]);
        gp.m = 50;
        gp.k = 5;
        gp.d = 2;
        gp.z = 2;
        gp.seed = 11;
        Instance inst = generate_instance(gp);
        std::vector<double> walls;
        for (int r = 0; r < 5; ++r) {
            SolverParams sp;
            sp.eps = 0.3;
            sp.trials = 1;
            sp.rng_seed = r;
            const double w0 = now_ms();
            solve(inst, sp);
            walls.push_back(now_ms() - w0);
        }
        std::sort(walls.begin(), walls.end());
        med[i] = walls[2];
    }
    const double factor = med[1] / med[0];
    const double ms = now_ms() - t0;
    char buf[128];
    std::snprintf(buf, sizeof buf,
                  "median wall %.0fms -> %.0fms, factor %.2f", med[0],
                  med[1], factor);
    report(8, "near-linear scaling", factor <= 2.5, buf, ms);
}

// 9: byte determinism of the CLI and instance-file round trips
void criterion_determinism(const char* cli) {
    const double t0 = now_ms();
    bool pass = true;
    std::string detail;

    // 100-file round-trip corpus
    int rt_ok = 0;
    for (int i = 0; i < 100; ++i) {
        GenParams gp;
        gp.n = 3 + i % 20;
        gp.m = 2 + i % 7;
        gp.k = 1 + i % 2;
        gp.d = 1 + i % 3;
        gp.z = 1 + i % 2;
        gp.seed = 6000 + i;
        gp.dist = i % 2 ? "clustered" : "uniform";
        Instance inst = generate_instance(gp);
        const std::string text = render_instance(inst);
        Instance back = parse_instance(text);
        if (render_instance(back) == text && back.clients == inst.clients &&
            back.candidates == inst.candidates)
            ++rt_ok;
    }
    pass = pass && rt_ok == 100;

    // CLI byte determinism on a fixed instance
    bool cli_same = false;
    if (cli != nullptr) {
        GenParams gp;
        gp.n = 15;
        gp.m = 8;
        gp.k = 3;
        gp.seed = 99;
        gp.dist = "clustered";
        save_instance("acc_inst.txt", generate_instance(gp));
        const std::string cmd1 = std::string(cli) +
                                 " solve acc_inst.txt --eps 0.3 --trials 7 "
                                 "--seed 1 --out acc_out1.txt";
        const std::string cmd2 = std::string(cli) +
                                 " solve acc_inst.txt --eps 0.3 --trials 7 "
                                 "--seed 1 --out acc_out2.txt";
        const int rc1 = std::system(cmd1.c_str());
        const int rc2 = std::system(cmd2.c_str());
        auto slurp = [](const char* path) {
            std::ifstream in(path, std::ios::binary);
            std::ostringstream buf;
            buf << in.rdbuf();
            return buf.str();
        };
        const std::string o1 = slurp("acc_out1.txt");
        const std::string o2 = slurp("acc_out2.txt");
        cli_same = rc1 == 0 && rc2 == 0 && !o1.empty() && o1 == o2;
    }
    pass = pass && cli_same;

    const double ms = now_ms() - t0;
    char buf[128];
    std::snprintf(buf, sizeof buf, "round trips %d/100, cli identical %s",
                  rt_ok, cli_same ? "yes" : "no");
    report(9, "determinism and round-trip", pass, buf, ms);
}

}  // namespace

int main(int argc, char** argv) {
    criterion_ratio();
    criterion_sandwich();
    criterion_cutprob();
    criterion_badcut();
    criterion_detour();
    criterion_budget_scaling();
    criterion_structure();
    criterion_scaling();
    criterion_determinism(argc > 1 ? argv[1] : nullptr);
    if (failures > 0) {
        std::printf("%d criterion(s) failed\n", failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
