#pragma once

#include "grid.hpp"
#include "operators.hpp"

#include <json.hpp>

namespace prlab {

using Field = std::function<double(const Point&)>;

struct ProblemSpec {
    OperatorSpec F;
    Field g;         // right-hand side g(x,t)
    Field initial;   // data on the bottom face t0 - rho^2
    Field boundary;  // lateral Dirichlet data
};

struct SolveOptions {
    int directions = 4;  // 2D Hessian direction set: 4 or 8
    int threads = 1;
};

/// dx^2 / (2 Lambda d S); S = 1 for 1D and the 4-direction stencil, 2 for 8 directions.
double cfl_dt(const OperatorSpec& F, int d, double dx, int directions = 4);

/// Projected Hessian estimate at an interior node of time level n.
SymMat discrete_hessian(const GridFunction& u, int n, std::size_t s, int directions = 4);

/// Forward Euler: u^{n+1} = u^n - dt (F(D_h^2 u^n) - g(., t_n)).
GridFunction solve(const ProblemSpec& p, const Grid& grid, const SolveOptions& opt = {});

/// (u^n - u^{n-1})/dt + F(D_h^2 u^{n-1}) - g(., t_{n-1}) at interior nodes, 0 elsewhere.
GridFunction residual(const GridFunction& u, const ProblemSpec& p, const SolveOptions& opt = {});

/// Interior nodes: n >= 1 and not on the lateral boundary.
bool is_interior(const Grid& g, std::size_t idx);

/// Closed-form test battery.
struct ExactSolution {
    std::string name;
    Field u;
    Field g;               // u solves (or bounds) dt u + F(D^2 u) = g
    std::string relation;  // which (in)equality holds and how
    double L = 0.0;        // supersolution constant: dt u + P+(D^2 u) >= -L
};

/// names: heat_mode, quadratic, cusp_space, time_ramp.
ExactSolution exact_solution(const std::string& name, const nlohmann::json& params, const OperatorSpec& F,
                             int d, double rho, double t0);

/// Problem whose data (and g) come from the closed form.
ProblemSpec problem_from_exact(const ExactSolution& e, const OperatorSpec& F);

}  // namespace prlab
