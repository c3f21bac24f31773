#pragma once

#include <cstdint>
#include <string>

#include "kcluster/geometry.hpp"

namespace kcluster {

// Instance files are line-oriented text. Lines starting with '#' are
// comments. The first data line is the header "d n m k z"; it is followed by
// n client lines and m candidate lines, each with d coordinates. Coordinates
// are written with 17 significant digits so parse(render(x)) == x.
Instance parse_instance(const std::string& text);
std::string render_instance(const Instance& inst);

Instance load_instance(const std::string& path);
void save_instance(const std::string& path, const Instance& inst);

struct SolutionRecord {
    double cost = 0.0;
    Solution solution;
};

// "cost <9 significant digits>" then "centers <ascending 0-based indices>".
SolutionRecord parse_solution(const std::string& text);
std::string render_solution(const SolutionRecord& rec);

// printf-style shortest-exact and fixed-significance formatting used by all
// text output paths; never locale-dependent.
std::string format_exact(double v);        // 17 significant digits
std::string format_short(double v);        // 9 significant digits

struct GenParams {
    int n = 100;
    int m = 20;
    int k = 3;
    int d = 2;
    int z = 2;
    std::uint64_t seed = 0;
    // "uniform": clients and candidates uniform in a box.
    // "clustered": k ground-truth centers uniform in the box, clients
    // Gaussian around them; ground-truth centers are included as candidates.
    std::string dist = "uniform";
};

Instance generate_instance(const GenParams& params);

}  // namespace kcluster
