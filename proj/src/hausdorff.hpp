#pragma once

#include "regularity.hpp"

#include <json.hpp>
#include <vector>

namespace prlab {

using PointSet = std::vector<Point>;

/// Nodes of `psi` whose whole cylinder Q_r(y,s0) has Psi > delta/r (nodes outside the field never qualify).
/// One set per radius; radii must lie in (0, 1/20).
std::vector<PointSet> singular_set(const PsiField& psi, double delta, const std::vector<double>& r_list);

struct CoverRow {
    double r = 0.0;
    long count = 0;
};

struct CoverReport {
    std::vector<CoverRow> rows;
    bool monotone = true;     // N(r) nonincreasing in r
    bool degenerate = false;  // all counts equal
    double dimension = 0.0;   // slope of log N against log(1/r)
    double band_lo = 0.0, band_hi = 0.0;  // classical dimension range [H-1, (H+d)/2]
};

/// Grid-aligned boxes of side r in space and r^2 in time.
long box_count(const PointSet& E, double r);
CoverReport box_dimension(const PointSet& E, const std::vector<double>& r_list);
/// [H - 1, (H + d)/2].
std::pair<double, double> classical_band(double h_par, int d);

nlohmann::json to_json(const CoverReport& c);
void write_cover_csv(const CoverReport& c, const std::string& path);

}  // namespace prlab
