#pragma once

#include "common.hpp"
#include "geometry.hpp"

#include <functional>
#include <string>
#include <vector>

namespace prlab {

/// Uniform lattice over [-rho, rho]^d x [t0 - rho^2, t0]; node index = n * spatial() + s,
/// with s = i0 (d=1) or i0 * nx + i1 (d=2).
struct Grid {
    int d = 1;
    int nx = 5;
    int nt = 2;
    double rho = 1.0;
    double t0 = 0.0;

    double dx() const { return 2.0 * rho / (nx - 1); }
    double dt() const { return rho * rho / (nt - 1); }
    std::size_t spatial() const { return d == 1 ? std::size_t(nx) : std::size_t(nx) * nx; }
    std::size_t size() const { return spatial() * nt; }
    double x(int i) const { return -rho + i * dx(); }
    double t(int n) const { return t0 - rho * rho + n * dt(); }

    void validate() const;
    /// Smallest nt with dt <= dt_max.
    static Grid with_dt(int d, int nx, double rho, double t0, double dt_max);

    Point node(std::size_t idx) const;
    Point node(int n, std::size_t s) const;
    /// Spatial multi-index of s.
    std::array<int, 2> split(std::size_t s) const {
        return d == 1 ? std::array<int, 2>{int(s), 0} : std::array<int, 2>{int(s / nx), int(s % nx)};
    }
    std::size_t join(int i0, int i1) const { return d == 1 ? std::size_t(i0) : std::size_t(i0) * nx + i1; }
    bool on_lateral(std::size_t s) const;
    double cell_volume() const { return std::pow(dx(), d) * dt(); }
};

struct GridFunction {
    Grid grid;
    std::vector<double> v;

    GridFunction() = default;
    explicit GridFunction(const Grid& g, double fill = 0.0) : grid(g), v(g.size(), fill) {}

    double& at(int n, std::size_t s) { return v[n * grid.spatial() + s]; }
    double at(int n, std::size_t s) const { return v[n * grid.spatial() + s]; }
    double sup_abs() const;
};

GridFunction sample(const Grid& g, const std::function<double(const Point&)>& f);
GridFunction negate(const GridFunction& u);

void write_binary(const GridFunction& u, const std::string& path);
GridFunction read_binary(const std::string& path);
/// Columns x..., t, u.
void write_csv(const GridFunction& u, const std::string& path);

/// Node indices of the grid lying in the cylinder (open, top slice included).
std::vector<std::size_t> nodes_in(const Grid& g, const Cylinder& q);

/// Nearest grid node to p (clamped); throws if p is off the grid by more than half a cell.
std::size_t nearest_node(const Grid& g, const Point& p);

}  // namespace prlab
