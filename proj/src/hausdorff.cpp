#include "hausdorff.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <set>
#include <unordered_map>

namespace prlab {

std::vector<PointSet> singular_set(const PsiField& psi, double delta, const std::vector<double>& r_list) {
    require(delta > 0.0, Status::invalid_argument, "delta must be positive");
    const Grid& g = psi.grid;
    const std::size_t S = g.spatial();
    std::vector<double> val(g.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 0; i < psi.nodes.size(); ++i) val[psi.nodes[i]] = psi.value[i];
    std::vector<PointSet> out;
    for (double r : r_list) {
        require(r > 0.0 && r < 1.0 / 20.0, Status::invalid_argument, "radius must lie in (0, 1/20)");
        const double thr = delta / r;
        const int ri = int(std::ceil(r / g.dx()));
        const int rn = int(std::ceil(r * r / g.dt()));
        PointSet E;
        for (std::size_t k : psi.nodes) {
            const int n = int(k / S);
            const auto ij = g.split(k % S);
            const Point c = g.node(k);
            const Cylinder q{c, r};
            bool all = true;
            for (int m = std::max(0, n - rn); m <= n && all; ++m)
                for (int a = ij[0] - ri; a <= ij[0] + ri && all; ++a)
                    for (int b = (g.d == 2 ? ij[1] - ri : 0); b <= (g.d == 2 ? ij[1] + ri : 0) && all; ++b) {
                        if (a < 0 || a >= g.nx || b < 0 || b >= g.nx) continue;
                        const std::size_t j = m * S + g.join(a, b);
                        if (!cylinder_contains(q, g.node(j))) continue;
                        // NaN (outside the field) fails the comparison
                        if (!(val[j] > thr)) all = false;
                    }
            if (all) E.push_back(c);
        }
        out.push_back(std::move(E));
    }
    return out;
}

long box_count(const PointSet& E, double r) {
    require(r > 0.0, Status::invalid_argument, "box size must be positive");
    std::set<std::array<long long, 4>> boxes;
    for (const Point& p : E) {
        std::array<long long, 4> key{0, 0, 0, 0};
        for (int i = 0; i < p.d; ++i) key[i] = (long long)std::floor(p.x[i] / r);
        key[3] = (long long)std::floor(p.t / (r * r));
        boxes.insert(key);
    }
    return long(boxes.size());
}

std::pair<double, double> classical_band(double h_par, int d) { return {h_par - 1.0, 0.5 * (h_par + d)}; }

CoverReport box_dimension(const PointSet& E, const std::vector<double>& r_list) {
    require(!E.empty(), Status::invalid_argument, "point set is empty");
    require(r_list.size() >= 3, Status::invalid_argument, "need at least 3 radii");
    CoverReport c;
    for (double r : r_list) c.rows.push_back({r, box_count(E, r)});
    auto sorted = c.rows;
    std::sort(sorted.begin(), sorted.end(), [](const CoverRow& a, const CoverRow& b) { return a.r < b.r; });
    for (std::size_t i = 1; i < sorted.size(); ++i)
        if (sorted[i].count > sorted[i - 1].count) c.monotone = false;
    c.degenerate = std::all_of(c.rows.begin(), c.rows.end(), [&](const CoverRow& w) { return w.count == c.rows[0].count; });
    double mx = 0, my = 0;
    const double n = double(c.rows.size());
    for (const auto& w : c.rows) {
        mx += std::log(1.0 / w.r);
        my += std::log(double(w.count));
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (const auto& w : c.rows) {
        const double x = std::log(1.0 / w.r) - mx;
        sxx += x * x;
        sxy += x * (std::log(double(w.count)) - my);
    }
    c.dimension = sxx > 0.0 ? sxy / sxx : 0.0;
    std::tie(c.band_lo, c.band_hi) = classical_band(c.dimension, E.front().d);
    return c;
}

nlohmann::json to_json(const CoverReport& c) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& w : c.rows) rows.push_back({{"r", w.r}, {"N", w.count}});
    return {{"rows", rows},
            {"estimate", "parabolic box-counting dimension"},
            {"dimension", c.dimension},
            {"monotone", c.monotone},
            {"degenerate", c.degenerate},
            {"classical_band", {c.band_lo, c.band_hi}}};
}

void write_cover_csv(const CoverReport& c, const std::string& path) {
    std::ofstream out(path);
    require(out.good(), Status::io, "cannot open '" + path + "' for writing");
    out << std::setprecision(17) << "r,N\n";
    for (const auto& w : c.rows) out << w.r << ',' << w.count << '\n';
}

}  // namespace prlab
