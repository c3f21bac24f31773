// Command-line surface: solve / exact / baseline / diagnose / gen / bench.
// All outputs are byte-deterministic for fixed inputs and flags, except the
// timing columns of `bench`.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <limits>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "kcluster/badcut.hpp"
#include "kcluster/baseline.hpp"
#include "kcluster/diagnostics.hpp"
#include "kcluster/errors.hpp"
#include "kcluster/io.hpp"
#include "kcluster/quadtree.hpp"
#include "kcluster/rng.hpp"
#include "kcluster/solver.hpp"

namespace kc = kcluster;

namespace {

void write_output(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out)
        throw kc::parameter_error("cannot write output file: " + out_path);
    out << text;
}

std::string csv(double v) { return kc::format_short(v); }

// The fixed desk-scale instance the diagnostics default to; small enough for
// the exact reference optimum, large enough for non-trivial structure.
kc::Instance default_diag_instance(int z) {
    kc::GenParams gp;
    gp.n = 10;
    gp.m = 6;
    gp.k = 2;
    gp.d = 2;
    gp.z = z;
    gp.seed = 7;
    gp.dist = "clustered";
    return kc::generate_instance(gp);
}

struct DiagnoseArgs {
    std::string file;
    std::string check;
    int seeds = 1000;
    double eps = 0.25;
    int z = 2;
    std::uint64_t seed = 0;
    int trees = 20;
    int pairs = 1000;
    std::string out;
};

std::vector<kc::Point> tree_points_of(const kc::Instance& inst) {
    std::vector<kc::Point> pts = inst.clients;
    pts.insert(pts.end(), inst.candidates.begin(), inst.candidates.end());
    return pts;
}

std::string diagnose_cutprob(const kc::Instance& ni, const DiagnoseArgs& a) {
    const kc::CutParams cp = kc::CutParams::make(a.eps, ni.dimension);
    const auto pts = tree_points_of(ni);
    const kc::ShiftedQuadtree probe_tree =
        kc::ShiftedQuadtree::build(pts, cp.rho, kc::derive_seed(a.seed, 1));

    struct Probe {
        kc::Point p;
        double r;
        int level;
    };
    std::vector<Probe> probes;
    for (int j = 0; j < 5; ++j) {
        // stay two levels below the root: the top cell has no sibling planes,
        // so frequencies right under it concentrate above the generic bound
        const int lvl =
            std::max(probe_tree.bottom_level() + 1, probe_tree.top_level() - 2 - j);
        probes.push_back({ni.clients[j % ni.clients.size()],
                          0.1 * std::ldexp(1.0, lvl), lvl});
    }

    std::ostringstream out;
    out << "probe,r,level,seeds,frequency,bound,sigma,pass\n";
    for (std::size_t j = 0; j < probes.size(); ++j) {
        const Probe& pr = probes[j];
        const kc::MonteCarloResult mc = kc::monte_carlo(a.seeds, [&](int s) {
            const kc::ShiftedQuadtree t = kc::ShiftedQuadtree::build(
                pts, cp.rho, kc::derive_seed(a.seed, 0xc1, s));
            return t.cut_level_ball(pr.p, pr.r) == pr.level;
        });
        const double bound =
            ni.dimension * pr.r / std::ldexp(1.0, pr.level);
        const bool pass = mc.frequency <= bound + 3.0 * mc.sigma;
        out << j << ',' << csv(pr.r) << ',' << pr.level << ',' << a.seeds
            << ',' << csv(mc.frequency) << ',' << csv(bound) << ','
            << csv(mc.sigma) << ',' << (pass ? 1 : 0) << '\n';
    }
    return out.str();
}

std::string diagnose_badcut(const kc::Instance& ni, const DiagnoseArgs& a) {
    const auto pts = tree_points_of(ni);
    const kc::Solution baseline =
        kc::baseline_solve(ni, {}, kc::derive_seed(a.seed, 2));

    std::ostringstream out;
    out << "eps,point,seeds,frequency,bound,sigma,pass\n";
    for (double eps : {0.25, 0.125}) {
        const kc::CutParams cp = kc::CutParams::make(eps, ni.dimension);
        std::vector<long long> hits(ni.clients.size(), 0);
        for (int s = 0; s < a.seeds; ++s) {
            const kc::ShiftedQuadtree t = kc::ShiftedQuadtree::build(
                pts, cp.rho, kc::derive_seed(a.seed, 0xbc, s));
            const kc::BadCutReport bc =
                kc::classify_all(t, ni, baseline, nullptr, cp);
            for (std::size_t p = 0; p < hits.size(); ++p)
                hits[p] += bc.point_flags[p] ? 1 : 0;
        }
        for (std::size_t p = 0; p < hits.size(); ++p) {
            const double freq = static_cast<double>(hits[p]) / a.seeds;
            const double sigma = std::sqrt(freq * (1.0 - freq) / a.seeds);
            const bool pass = freq <= eps + 3.0 * sigma;
            out << csv(eps) << ',' << p << ',' << a.seeds << ',' << csv(freq)
                << ',' << csv(eps) << ',' << csv(sigma) << ','
                << (pass ? 1 : 0) << '\n';
        }
    }
    return out.str();
}

std::string diagnose_budget(const kc::Instance& ni, const DiagnoseArgs& a) {
    const kc::CutParams cp = kc::CutParams::make(a.eps, ni.dimension);
    const auto pts = tree_points_of(ni);
    const kc::Solution baseline =
        kc::baseline_solve(ni, {}, kc::derive_seed(a.seed, 2));
    const kc::Solution opt = kc::brute_force_opt(ni).first;

    std::ostringstream out;
    out << "seed,client,b1,b2,b3,flagged\n";
    for (int s = 0; s < a.seeds; ++s) {
        const kc::ShiftedQuadtree t = kc::ShiftedQuadtree::build(
            pts, cp.rho, kc::derive_seed(a.seed, 0xb6, s));
        const kc::BadCutReport bc =
            kc::classify_all(t, ni, baseline, nullptr, cp);
        for (std::size_t p = 0; p < ni.clients.size(); ++p) {
            const kc::BudgetBreakdown b = kc::budget(
                t, ni, static_cast<int>(p), baseline, opt, cp);
            out << s << ',' << p << ',' << csv(b.b1) << ',' << csv(b.b2)
                << ',' << csv(b.b3) << ',' << (bc.point_flags[p] ? 1 : 0)
                << '\n';
        }
    }
    return out.str();
}

std::string diagnose_detour(const kc::Instance& ni, const DiagnoseArgs& a) {
    const kc::CutParams cp = kc::CutParams::make(a.eps, ni.dimension);
    const auto pts = tree_points_of(ni);
    kc::Point lo = pts[0], hi = pts[0];
    for (const kc::Point& p : pts)
        for (int c = 0; c < ni.dimension; ++c) {
            lo[c] = std::min(lo[c], p[c]);
            hi[c] = std::max(hi[c], p[c]);
        }

    std::ostringstream out;
    out << "tree,pairs,max_excess,pass\n";
    for (int t = 0; t < a.trees; ++t) {
        const kc::ShiftedQuadtree tree = kc::ShiftedQuadtree::build(
            pts, cp.rho, kc::derive_seed(a.seed, 0xde, t));
        kc::SplitMix64 rng(kc::derive_seed(a.seed, 0xdf, t));
        double max_excess = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < a.pairs; ++j) {
            kc::Point p(ni.dimension), q(ni.dimension);
            for (int c = 0; c < ni.dimension; ++c) {
                p[c] = lo[c] + (hi[c] - lo[c]) * rng.next_double();
                q[c] = lo[c] + (hi[c] - lo[c]) * rng.next_double();
            }
            const int i = tree.cut_level_pair(p, q);
            const double allowance =
                i == kc::ShiftedQuadtree::kNotCut
                    ? 0.0
                    : cp.rho * std::ldexp(1.0, i + 2);
            const double len = tree.portal_path(p, q).length;
            max_excess = std::max(
                max_excess, len - (kc::distance(p, q) + allowance));
        }
        const bool pass = max_excess <= 1e-9;
        out << t << ',' << a.pairs << ',' << csv(max_excess) << ','
            << (pass ? 1 : 0) << '\n';
    }
    return out.str();
}

std::string diagnose_smalldist(const kc::Instance& ni, const DiagnoseArgs& a) {
    const kc::CutParams cp = kc::CutParams::make(a.eps, ni.dimension);
    const auto pts = tree_points_of(ni);
    const kc::Solution baseline =
        kc::baseline_solve(ni, {}, kc::derive_seed(a.seed, 2));
    const kc::Solution opt = kc::brute_force_opt(ni).first;

    long long pass = 0, p1 = 0, p2 = 0, p3 = 0, facts = 0, size_ok = 0;
    for (int s = 0; s < a.seeds; ++s) {
        const kc::ShiftedQuadtree t = kc::ShiftedQuadtree::build(
            pts, cp.rho, kc::derive_seed(a.seed, 0x5d, s));
        const kc::SmallDistortionReport rep = kc::check_small_distortion(
            ni, t, baseline, opt, a.eps, a.z);
        pass += rep.pass;
        p1 += rep.prop1_pass;
        p2 += rep.prop2_pass;
        p3 += rep.prop3_pass;
        facts += rep.facts_pass;
        size_ok += rep.size_ok;
    }
    const double freq = static_cast<double>(pass) / a.seeds;
    const double sigma = std::sqrt(freq * (1.0 - freq) / a.seeds);
    std::ostringstream out;
    out << "z,eps,seeds,pass_rate,sigma,prop1_rate,prop2_rate,prop3_rate,"
           "facts_rate,size_rate\n";
    out << a.z << ',' << csv(a.eps) << ',' << a.seeds << ',' << csv(freq)
        << ',' << csv(sigma) << ','
        << csv(static_cast<double>(p1) / a.seeds) << ','
        << csv(static_cast<double>(p2) / a.seeds) << ','
        << csv(static_cast<double>(p3) / a.seeds) << ','
        << csv(static_cast<double>(facts) / a.seeds) << ','
        << csv(static_cast<double>(size_ok) / a.seeds) << '\n';
    return out.str();
}

int dispatch(const std::function<void()>& body) {
    try {
        body();
        return 0;
    } catch (const kc::parameter_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const kc::parse_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const kc::size_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const kc::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 3;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"discrete k-median / k-means solver and diagnostics"};
    app.require_subcommand(1);

    // solve
    auto* solve_cmd =
        app.add_subcommand("solve", "approximate solve of an instance file");
    std::string solve_file, solve_out;
    kc::SolverParams sp;
    solve_cmd->add_option("file", solve_file, "instance file")->required();
    solve_cmd->add_option("--eps", sp.eps, "approximation parameter");
    solve_cmd->add_option("--trials", sp.trials, "decomposition trials");
    solve_cmd->add_option("--seed", sp.rng_seed, "random seed");
    solve_cmd->add_option("--out", solve_out, "output file (default stdout)");

    // exact
    auto* exact_cmd =
        app.add_subcommand("exact", "brute-force optimum (small instances)");
    std::string exact_file, exact_out;
    long long exact_cap = 1000000;
    exact_cmd->add_option("file", exact_file, "instance file")->required();
    exact_cmd->add_option("--cap", exact_cap, "max k-subsets to enumerate");
    exact_cmd->add_option("--out", exact_out, "output file (default stdout)");

    // baseline
    auto* base_cmd =
        app.add_subcommand("baseline", "constant-factor baseline only");
    std::string base_file, base_out;
    std::uint64_t base_seed = 0;
    base_cmd->add_option("file", base_file, "instance file")->required();
    base_cmd->add_option("--seed", base_seed, "random seed");
    base_cmd->add_option("--out", base_out, "output file (default stdout)");

    // diagnose
    auto* diag_cmd = app.add_subcommand(
        "diagnose", "Monte-Carlo checks of the decomposition properties");
    DiagnoseArgs da;
    diag_cmd->add_option("file", da.file,
                         "instance file (default: built-in 10-point)");
    diag_cmd
        ->add_option("--check", da.check,
                     "cutprob | badcut | budget | detour | smalldist")
        ->required();
    diag_cmd->add_option("--seeds", da.seeds, "Monte-Carlo seeds");
    diag_cmd->add_option("--eps", da.eps, "approximation parameter");
    diag_cmd->add_option("--z", da.z, "objective exponent (1 or 2)");
    diag_cmd->add_option("--seed", da.seed, "base random seed");
    diag_cmd->add_option("--trees", da.trees, "trees for the detour check");
    diag_cmd->add_option("--pairs", da.pairs, "pairs per tree (detour)");
    diag_cmd->add_option("--out", da.out, "output file (default stdout)");

    // gen
    auto* gen_cmd = app.add_subcommand("gen", "random instance generator");
    kc::GenParams gp;
    std::string gen_out;
    gen_cmd->add_option("--n", gp.n, "clients");
    gen_cmd->add_option("--m", gp.m, "candidate centers");
    gen_cmd->add_option("--k", gp.k, "centers to open");
    gen_cmd->add_option("--d", gp.d, "dimension");
    gen_cmd->add_option("--z", gp.z, "objective exponent (1 or 2)");
    gen_cmd->add_option("--seed", gp.seed, "random seed");
    gen_cmd->add_option("--dist", gp.dist, "uniform | clustered");
    gen_cmd->add_option("--out", gen_out, "output file (default stdout)");

    // bench
    auto* bench_cmd =
        app.add_subcommand("bench", "timing CSV over generated instances");
    std::vector<long long> bench_sizes{10000, 20000};
    int bench_runs = 5;
    double bench_eps = 0.3;
    bench_cmd->add_option("--sizes", bench_sizes, "client counts");
    bench_cmd->add_option("--runs", bench_runs, "repetitions per size");
    bench_cmd->add_option("--eps", bench_eps, "approximation parameter");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (solve_cmd->parsed()) {
        return dispatch([&] {
            const kc::Instance inst = kc::load_instance(solve_file);
            const kc::SolveReport rep = kc::solve(inst, sp);
            write_output(solve_out,
                         kc::render_solution({rep.cost, rep.solution}));
        });
    }
    if (exact_cmd->parsed()) {
        return dispatch([&] {
            const kc::Instance inst = kc::load_instance(exact_file);
            const auto [sol, val] = kc::brute_force_opt(inst, exact_cap);
            write_output(exact_out, kc::render_solution({val, sol}));
        });
    }
    if (base_cmd->parsed()) {
        return dispatch([&] {
            const kc::Instance inst = kc::load_instance(base_file);
            const kc::Solution sol = kc::baseline_solve(
                inst, {}, kc::derive_seed(base_seed, 0xbadd));
            write_output(base_out,
                         kc::render_solution({kc::cost(inst, sol), sol}));
        });
    }
    if (diag_cmd->parsed()) {
        return dispatch([&] {
            kc::Instance inst = da.file.empty()
                                    ? default_diag_instance(da.z)
                                    : kc::load_instance(da.file);
            if (da.z != 1 && da.z != 2)
                throw kc::parameter_error("diagnose: z must be 1 or 2");
            inst.objective_z = da.z;
            const kc::Instance ni = kc::normalize(inst).instance;
            std::string table;
            if (da.check == "cutprob")
                table = diagnose_cutprob(ni, da);
            else if (da.check == "badcut")
                table = diagnose_badcut(ni, da);
            else if (da.check == "budget")
                table = diagnose_budget(ni, da);
            else if (da.check == "detour")
                table = diagnose_detour(ni, da);
            else if (da.check == "smalldist")
                table = diagnose_smalldist(ni, da);
            else
                throw kc::parameter_error("unknown --check: " + da.check);
            write_output(da.out, table);
        });
    }
    if (gen_cmd->parsed()) {
        return dispatch([&] {
            write_output(gen_out,
                         kc::render_instance(kc::generate_instance(gp)));
        });
    }
    if (bench_cmd->parsed()) {
        return dispatch([&] {
            std::cout << "n,run,wall_ms,cost,baseline_cost\n";
            for (long long n : bench_sizes) {
                kc::GenParams g;
                g.n = static_cast<int>(n);
                g.m = 50;
                g.k = 5;
                g.d = 2;
                g.z = 2;
                g.seed = 11;
                const kc::Instance inst = kc::generate_instance(g);
                for (int r = 0; r < bench_runs; ++r) {
                    kc::SolverParams p;
                    p.eps = bench_eps;
                    p.trials = 1;
                    p.rng_seed = r;
                    const auto t0 = std::chrono::steady_clock::now();
                    const kc::SolveReport rep = kc::solve(inst, p);
                    const double ms =
                        std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - t0)
                            .count();
                    std::cout << n << ',' << r << ',' << csv(ms) << ','
                              << csv(rep.cost) << ','
                              << csv(rep.baseline_cost) << '\n';
                }
            }
        });
    }
    return 0;
}
