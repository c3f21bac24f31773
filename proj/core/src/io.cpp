#include "kcluster/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "kcluster/errors.hpp"
#include "kcluster/rng.hpp"

namespace kcluster {

namespace {

// Lines of `text` with their 1-based numbers, comments and blanks dropped.
struct LineCursor {
    std::vector<std::pair<int, std::string>> lines;
    std::size_t pos = 0;

    explicit LineCursor(const std::string& text) {
        std::istringstream in(text);
        std::string line;
        int no = 0;
        while (std::getline(in, line)) {
            ++no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            const auto first = line.find_first_not_of(" \t");
            if (first == std::string::npos) continue;
            if (line[first] == '#') continue;
            lines.emplace_back(no, line);
        }
    }

    bool done() const { return pos >= lines.size(); }
    int line_number() const {
        return done() ? (lines.empty() ? 1 : lines.back().first + 1)
                      : lines[pos].first;
    }
    const std::string& take() { return lines[pos++].second; }
};

Point parse_point(const std::string& line, int d, int line_no,
                  const char* what) {
    std::istringstream in(line);
    Point p(d);
    for (int a = 0; a < d; ++a) {
        if (!(in >> p[a]))
            throw parse_error(std::string("expected ") + std::to_string(d) +
                                  " coordinates in " + what + " line",
                              line_no);
        if (!std::isfinite(p[a]))
            throw parse_error(std::string("non-finite coordinate in ") + what +
                                  " line",
                              line_no);
    }
    std::string rest;
    if (in >> rest)
        throw parse_error(std::string("trailing data in ") + what + " line",
                          line_no);
    return p;
}

}  // namespace

Instance parse_instance(const std::string& text) {
    LineCursor cur(text);
    if (cur.done()) throw parse_error("missing header line", cur.line_number());
    const int header_no = cur.line_number();
    Instance inst;
    long long n = 0, m = 0;
    {
        std::istringstream in(cur.take());
        std::string rest;
        if (!(in >> inst.dimension >> n >> m >> inst.k >> inst.objective_z) ||
            (in >> rest))
            throw parse_error("header must be five integers \"d n m k z\"",
                              header_no);
    }
    if (inst.dimension < 1)
        throw parse_error("dimension must be >= 1", header_no);
    if (n < 1 || m < 1)
        throw parse_error("counts must be n >= 1, m >= 1", header_no);
    if (inst.objective_z != 1 && inst.objective_z != 2)
        throw parse_error("objective z must be 1 or 2", header_no);
    inst.clients.reserve(n);
    for (long long i = 0; i < n; ++i) {
        if (cur.done())
            throw parse_error("fewer client lines than declared",
                              cur.line_number());
        const int no = cur.line_number();
        inst.clients.push_back(
            parse_point(cur.take(), inst.dimension, no, "client"));
    }
    inst.candidates.reserve(m);
    for (long long i = 0; i < m; ++i) {
        if (cur.done())
            throw parse_error("fewer candidate lines than declared",
                              cur.line_number());
        const int no = cur.line_number();
        inst.candidates.push_back(
            parse_point(cur.take(), inst.dimension, no, "candidate"));
    }
    if (!cur.done())
        throw parse_error("trailing non-comment data after candidates",
                          cur.line_number());
    try {
        inst.validate();
    } catch (const std::exception& e) {
        throw parse_error(e.what(), header_no);
    }
    return inst;
}

std::string format_exact(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_short(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::string render_instance(const Instance& inst) {
    std::string out;
    out += std::to_string(inst.dimension) + ' ' +
           std::to_string(inst.clients.size()) + ' ' +
           std::to_string(inst.candidates.size()) + ' ' +
           std::to_string(inst.k) + ' ' + std::to_string(inst.objective_z) +
           '\n';
    auto emit = [&](const std::vector<Point>& pts) {
        for (const Point& p : pts) {
            for (int a = 0; a < inst.dimension; ++a) {
                if (a) out += ' ';
                out += format_exact(p[a]);
            }
            out += '\n';
        }
    };
    emit(inst.clients);
    emit(inst.candidates);
    return out;
}

Instance load_instance(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw parameter_error("cannot open instance file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_instance(buf.str());
}

void save_instance(const std::string& path, const Instance& inst) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw parameter_error("cannot write instance file: " + path);
    out << render_instance(inst);
}

SolutionRecord parse_solution(const std::string& text) {
    LineCursor cur(text);
    SolutionRecord rec;
    if (cur.done()) throw parse_error("missing cost line", cur.line_number());
    {
        const int no = cur.line_number();
        std::istringstream in(cur.take());
        std::string tag;
        if (!(in >> tag >> rec.cost) || tag != "cost" ||
            !std::isfinite(rec.cost))
            throw parse_error("expected \"cost <value>\"", no);
    }
    if (cur.done())
        throw parse_error("missing centers line", cur.line_number());
    {
        const int no = cur.line_number();
        std::istringstream in(cur.take());
        std::string tag;
        if (!(in >> tag) || tag != "centers")
            throw parse_error("expected \"centers <indices>\"", no);
        int idx;
        while (in >> idx) {
            if (idx < 0) throw parse_error("negative center index", no);
            if (!rec.solution.center_indices.empty() &&
                idx <= rec.solution.center_indices.back())
                throw parse_error("center indices must be strictly ascending",
                                  no);
            rec.solution.center_indices.push_back(idx);
        }
        if (rec.solution.center_indices.empty())
            throw parse_error("no center indices", no);
    }
    return rec;
}

std::string render_solution(const SolutionRecord& rec) {
    std::string out = "cost " + format_short(rec.cost) + "\ncenters";
    for (int idx : rec.solution.center_indices)
        out += ' ' + std::to_string(idx);
    out += '\n';
    return out;
}

namespace {

double gaussian(SplitMix64& rng) {
    // Box-Muller; u1 bounded away from 0
    const double u1 = (static_cast<double>(rng.next() >> 11) + 1.0) *
                      0x1p-53;
    const double u2 = rng.next_double();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
}

}  // namespace

Instance generate_instance(const GenParams& params) {
    if (params.n < 1 || params.m < 1 || params.k < 1 || params.d < 1)
        throw parameter_error("generator: n, m, k, d must be positive");
    if (params.z != 1 && params.z != 2)
        throw parameter_error("generator: z must be 1 or 2");
    if (params.k > params.m)
        throw parameter_error("generator: k must be <= m");
    if (params.dist != "uniform" && params.dist != "clustered")
        throw parameter_error("generator: dist must be uniform or clustered");

    const double box = 100.0;
    Instance inst;
    inst.dimension = params.d;
    inst.k = params.k;
    inst.objective_z = params.z;
    SplitMix64 rng(derive_seed(params.seed, 0x9e17));

    auto uniform_point = [&] {
        Point p(params.d);
        for (int a = 0; a < params.d; ++a) p[a] = box * rng.next_double();
        return p;
    };

    if (params.dist == "uniform") {
        for (int i = 0; i < params.n; ++i)
            inst.clients.push_back(uniform_point());
        for (int i = 0; i < params.m; ++i)
            inst.candidates.push_back(uniform_point());
    } else {
        std::vector<Point> truth;
        for (int i = 0; i < params.k; ++i) truth.push_back(uniform_point());
        const double sigma =
            box / (4.0 * std::pow(static_cast<double>(params.k),
                                  1.0 / params.d));
        for (int i = 0; i < params.n; ++i) {
            const Point& c = truth[rng.next_below(params.k)];
            Point p(params.d);
            for (int a = 0; a < params.d; ++a)
                p[a] = c[a] + sigma * gaussian(rng);
            inst.clients.push_back(std::move(p));
        }
        inst.candidates = truth;
        for (int i = params.k; i < params.m; ++i)
            inst.candidates.push_back(uniform_point());
    }
    inst.validate();
    return inst;
}

}  // namespace kcluster
