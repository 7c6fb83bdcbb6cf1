#include "grid.hpp"

#include <bit>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace prlab {

static_assert(std::endian::native == std::endian::little, "binary grid format assumes a little-endian host");

void Grid::validate() const {
    require(d == 1 || d == 2, Status::invalid_argument, "grid dimension must be 1 or 2");
    require(nx >= 5, Status::invalid_argument, "grid needs Nx >= 5");
    require(nt >= 2, Status::invalid_argument, "grid needs Nt >= 2");
    require(rho > 0.0 && std::isfinite(rho) && std::isfinite(t0), Status::invalid_argument,
            "grid radius must be positive and finite");
}

Grid Grid::with_dt(int d, int nx, double rho, double t0, double dt_max) {
    require(dt_max > 0.0, Status::invalid_argument, "dt_max must be positive");
    Grid g{d, nx, 2, rho, t0};
    const double steps = std::ceil(rho * rho / dt_max * (1.0 - 1e-12));
    require(steps < 5e8, Status::invalid_argument, "time step too small for the memory budget");
    g.nt = static_cast<int>(steps) + 1;
    g.validate();
    return g;
}

Point Grid::node(int n, std::size_t s) const {
    Point p;
    p.d = d;
    const auto ij = split(s);
    p.x[0] = x(ij[0]);
    if (d == 2) p.x[1] = x(ij[1]);
    p.t = t(n);
    return p;
}

Point Grid::node(std::size_t idx) const { return node(int(idx / spatial()), idx % spatial()); }

bool Grid::on_lateral(std::size_t s) const {
    const auto ij = split(s);
    if (ij[0] == 0 || ij[0] == nx - 1) return true;
    return d == 2 && (ij[1] == 0 || ij[1] == nx - 1);
}

double GridFunction::sup_abs() const {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

GridFunction sample(const Grid& g, const std::function<double(const Point&)>& f) {
    g.validate();
    GridFunction u(g);
    for (std::size_t k = 0; k < u.v.size(); ++k) u.v[k] = f(g.node(k));
    return u;
}

GridFunction negate(const GridFunction& u) {
    GridFunction r = u;
    for (double& x : r.v) x = -x;
    return r;
}

void write_binary(const GridFunction& u, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    require(out.good(), Status::io, "cannot open '" + path + "' for writing");
    const std::int64_t hdr_i[3] = {u.grid.d, u.grid.nx, u.grid.nt};
    const double hdr_f[4] = {u.grid.rho, u.grid.t0, u.grid.dx(), u.grid.dt()};
    out.write(reinterpret_cast<const char*>(hdr_i), sizeof hdr_i);
    out.write(reinterpret_cast<const char*>(hdr_f), sizeof hdr_f);
    out.write(reinterpret_cast<const char*>(u.v.data()), std::streamsize(u.v.size() * sizeof(double)));
    require(out.good(), Status::io, "write failed for '" + path + "'");
}

GridFunction read_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), Status::io, "cannot open '" + path + "'");
    std::int64_t hdr_i[3];
    double hdr_f[4];
    in.read(reinterpret_cast<char*>(hdr_i), sizeof hdr_i);
    in.read(reinterpret_cast<char*>(hdr_f), sizeof hdr_f);
    require(in.good(), Status::io, "truncated grid header in '" + path + "'");
    Grid g{int(hdr_i[0]), int(hdr_i[1]), int(hdr_i[2]), hdr_f[0], hdr_f[1]};
    g.validate();
    require(std::abs(g.dx() - hdr_f[2]) <= 1e-12 * g.dx() && std::abs(g.dt() - hdr_f[3]) <= 1e-12 * g.dt(),
            Status::io, "grid header spacing is inconsistent");
    GridFunction u(g);
    in.read(reinterpret_cast<char*>(u.v.data()), std::streamsize(u.v.size() * sizeof(double)));
    require(in.gcount() == std::streamsize(u.v.size() * sizeof(double)), Status::io,
            "truncated value block in '" + path + "'");
    return u;
}

void write_csv(const GridFunction& u, const std::string& path) {
    std::ofstream out(path);
    require(out.good(), Status::io, "cannot open '" + path + "' for writing");
    out << (u.grid.d == 1 ? "x,t,u\n" : "x0,x1,t,u\n");
    out << std::setprecision(17);
    for (std::size_t k = 0; k < u.v.size(); ++k) {
        const Point p = u.grid.node(k);
        for (int i = 0; i < u.grid.d; ++i) out << p.x[i] << ',';
        out << p.t << ',' << u.v[k] << '\n';
    }
}

std::vector<std::size_t> nodes_in(const Grid& g, const Cylinder& q) {
    std::vector<std::size_t> out;
    const double eps = 1e-12 * std::max(1.0, g.rho);
    for (int n = 0; n < g.nt; ++n) {
        const double t = g.t(n);
        const double rho2 = q.radius * q.radius;
        if (!(t > q.center.t - rho2 + eps && t <= q.center.t + eps)) continue;
        for (std::size_t s = 0; s < g.spatial(); ++s) {
            const Point p = g.node(n, s);
            if (dist2(p.x, q.center.x, g.d) < rho2 - eps) out.push_back(n * g.spatial() + s);
        }
    }
    return out;
}

std::size_t nearest_node(const Grid& g, const Point& p) {
    auto idx = [&](double c, double h, double lo, int count) {
        const double f = (c - lo) / h;
        const long k = std::lround(f);
        require(k >= 0 && k < count && std::abs(f - k) <= 0.5 + 1e-9, Status::invalid_argument,
                "point is off the grid");
        return int(k);
    };
    const int n = idx(p.t, g.dt(), g.t0 - g.rho * g.rho, g.nt);
    const int i0 = idx(p.x[0], g.dx(), -g.rho, g.nx);
    const int i1 = g.d == 2 ? idx(p.x[1], g.dx(), -g.rho, g.nx) : 0;
    return n * g.spatial() + g.join(i0, i1);
}

}  // namespace prlab
