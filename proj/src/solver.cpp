#include "solver.hpp"

#include "parallel.hpp"

#include <sstream>

namespace prlab {

double cfl_dt(const OperatorSpec& F, int d, double dx, int directions) {
    const double S = (d == 2 && directions == 8) ? 2.0 : 1.0;
    return dx * dx / (2.0 * F.ell.Lambda * d * S);
}

namespace {

struct Dir {
    int a, b;
};
constexpr Dir kDirs8[8] = {{1, 0}, {0, 1}, {1, 1}, {1, -1}, {1, 2}, {2, 1}, {1, -2}, {2, -1}};

// rows (v0^2, 2 v0 v1, v1^2) of the 8-direction system, solved by normal equations
struct LeastSquares8 {
    double P[3][8];
    LeastSquares8() {
        double R[8][3];
        for (int k = 0; k < 8; ++k) {
            R[k][0] = kDirs8[k].a * kDirs8[k].a;
            R[k][1] = 2.0 * kDirs8[k].a * kDirs8[k].b;
            R[k][2] = kDirs8[k].b * kDirs8[k].b;
        }
        double N[3][3] = {};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 8; ++k) N[i][j] += R[k][i] * R[k][j];
        const double det = N[0][0] * (N[1][1] * N[2][2] - N[1][2] * N[2][1]) -
                           N[0][1] * (N[1][0] * N[2][2] - N[1][2] * N[2][0]) +
                           N[0][2] * (N[1][0] * N[2][1] - N[1][1] * N[2][0]);
        double I[3][3];
        I[0][0] = (N[1][1] * N[2][2] - N[1][2] * N[2][1]) / det;
        I[0][1] = (N[0][2] * N[2][1] - N[0][1] * N[2][2]) / det;
        I[0][2] = (N[0][1] * N[1][2] - N[0][2] * N[1][1]) / det;
        I[1][0] = (N[1][2] * N[2][0] - N[1][0] * N[2][2]) / det;
        I[1][1] = (N[0][0] * N[2][2] - N[0][2] * N[2][0]) / det;
        I[1][2] = (N[0][2] * N[1][0] - N[0][0] * N[1][2]) / det;
        I[2][0] = (N[1][0] * N[2][1] - N[1][1] * N[2][0]) / det;
        I[2][1] = (N[0][1] * N[2][0] - N[0][0] * N[2][1]) / det;
        I[2][2] = (N[0][0] * N[1][1] - N[0][1] * N[1][0]) / det;
        for (int i = 0; i < 3; ++i)
            for (int k = 0; k < 8; ++k) {
                P[i][k] = 0.0;
                for (int j = 0; j < 3; ++j) P[i][k] += I[i][j] * R[k][j];
            }
    }
};

const LeastSquares8& ls8() {
    static const LeastSquares8 ls;
    return ls;
}

}  // namespace

SymMat discrete_hessian(const GridFunction& u, int n, std::size_t s, int directions) {
    const Grid& g = u.grid;
    const double h2 = g.dx() * g.dx();
    const auto ij = g.split(s);
    if (g.d == 1) {
        SymMat H(1);
        H(0, 0) = (u.at(n, s + 1) - 2.0 * u.at(n, s) + u.at(n, s - 1)) / h2;
        return H;
    }
    const int i = ij[0], j = ij[1];
    auto val = [&](int a, int b) { return u.at(n, g.join(i + a, j + b)); };
    const double c = val(0, 0);
    auto second = [&](const Dir& v) { return (val(v.a, v.b) + val(-v.a, -v.b) - 2.0 * c) / h2; };
    SymMat H(2);
    const bool wide = directions == 8 && i >= 2 && j >= 2 && i <= g.nx - 3 && j <= g.nx - 3;
    if (!wide) {
        H(0, 0) = second(kDirs8[0]);
        H(1, 1) = second(kDirs8[1]);
        H.set(0, 1, (second(kDirs8[2]) - second(kDirs8[3])) / 4.0);
        return H;
    }
    double D[8];
    for (int k = 0; k < 8; ++k) D[k] = second(kDirs8[k]);
    double x[3] = {};
    for (int r = 0; r < 3; ++r)
        for (int k = 0; k < 8; ++k) x[r] += ls8().P[r][k] * D[k];
    H(0, 0) = x[0];
    H.set(0, 1, x[1]);
    H(1, 1) = x[2];
    return H;
}

bool is_interior(const Grid& g, std::size_t idx) {
    return idx >= g.spatial() && !g.on_lateral(idx % g.spatial());
}

GridFunction solve(const ProblemSpec& p, const Grid& grid, const SolveOptions& opt) {
    grid.validate();
    require(opt.directions == 4 || opt.directions == 8, Status::invalid_argument, "directions must be 4 or 8");
    require(p.g && p.initial && p.boundary, Status::invalid_argument, "problem data callbacks missing");
    const double dt_max = cfl_dt(p.F, grid.d, grid.dx(), opt.directions);
    if (grid.dt() > dt_max * (1.0 + 1e-12)) {
        std::ostringstream os;
        os.precision(17);
        os << "CFL violated: dt=" << grid.dt() << " exceeds " << dt_max << "; suggested Nt >= "
           << static_cast<long>(std::ceil(grid.rho * grid.rho / dt_max)) + 1;
        fail(Status::cfl, os.str());
    }
    GridFunction u(grid);
    const std::size_t S = grid.spatial();
    for (std::size_t s = 0; s < S; ++s) {
        const Point q = grid.node(0, s);
        u.at(0, s) = p.initial(q);
        if (grid.on_lateral(s)) {
            const double b = p.boundary(q);
            require(std::abs(b - u.at(0, s)) <= 1e-9 * std::max(1.0, std::abs(b)), Status::invalid_argument,
                    "initial and lateral data disagree on the bottom edge");
        }
    }
    const double dt = grid.dt();
    for (int n = 0; n + 1 < grid.nt; ++n) {
        parallel_for(S, opt.threads, [&](std::size_t s) {
            const Point q = grid.node(n, s);
            if (grid.on_lateral(s)) {
                u.at(n + 1, s) = p.boundary(grid.node(n + 1, s));
                return;
            }
            const SymMat H = discrete_hessian(u, n, s, opt.directions);
            u.at(n + 1, s) = u.at(n, s) - dt * (eval_operator(p.F, H) - p.g(q));
        });
    }
    return u;
}

GridFunction residual(const GridFunction& u, const ProblemSpec& p, const SolveOptions& opt) {
    const Grid& grid = u.grid;
    GridFunction r(grid);
    const std::size_t S = grid.spatial();
    const double dt = grid.dt();
    for (int n = 1; n < grid.nt; ++n) {
        parallel_for(S, opt.threads, [&](std::size_t s) {
            if (grid.on_lateral(s)) return;
            const SymMat H = discrete_hessian(u, n - 1, s, opt.directions);
            r.at(n, s) = (u.at(n, s) - u.at(n - 1, s)) / dt + eval_operator(p.F, H) - p.g(grid.node(n - 1, s));
        });
    }
    return r;
}

ExactSolution exact_solution(const std::string& name, const nlohmann::json& params, const OperatorSpec& F,
                             int d, double rho, double t0) {
    check_dim(d, 2);
    ExactSolution e;
    e.name = name;
    if (name == "heat_mode") {
        const double A = params.value("amplitude", 1.0);
        const double k = kPi / rho;
        e.u = [=](const Point& p) {
            double v = A * std::exp(-d * k * k * (p.t - t0 + rho * rho));
            for (int i = 0; i < d; ++i) v *= std::sin(k * p.x[i]);
            return v;
        };
        e.g = [](const Point&) { return 0.0; };
        e.relation = "dt u - Laplace u = 0 exactly; zero lateral data";
    } else if (name == "quadratic") {
        SymMat M(d);
        if (params.contains("M")) {
            const auto& rows = params.at("M");
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) M(i, j) = rows.at(i).at(j).get<double>();
            require(M.is_symmetric(), Status::invalid_argument, "quadratic M must be symmetric");
        } else {
            M = SymMat::identity(d, params.value("m", 1.0));
        }
        Vec pv{};
        if (params.contains("p"))
            for (int i = 0; i < d; ++i) pv[i] = params.at("p").at(i).get<double>();
        const double c = params.value("c", 0.0);
        const double FM = eval_operator(F, M);
        double b, g0;
        if (params.contains("g0")) {
            g0 = params.at("g0").get<double>();
            b = g0 - FM;
        } else {
            b = params.value("b", 0.0);
            g0 = b + FM;
        }
        e.u = [=](const Point& p) { return c + dot(pv, p.x, d) + 0.5 * quad_form(M, p.x) + b * p.t; };
        e.g = [=](const Point&) { return g0; };
        e.relation = "dt u + F(D^2 u) = b + F(M) exactly";
    } else if (name == "cusp_space") {
        const double gamma = params.value("gamma", 0.5);
        const double A = params.value("amplitude", 1.0);
        const double sign = params.value("sign", -1.0);
        require(gamma > 0.0 && gamma < 1.0, Status::invalid_argument, "cusp exponent gamma must lie in (0,1)");
        e.u = [=](const Point& p) { return sign * A * std::pow(std::sqrt(norm2(p.x, d)), 1.0 + gamma); };
        e.g = [](const Point&) { return 0.0; };
        e.relation = sign < 0 ? "dt u + P+(D^2 u) >= 0 away from x=0 (concave cusp, L=0)"
                              : "dt u + P-(D^2 u) <= 0 away from x=0 (convex cusp)";
        e.L = 0.0;
    } else if (name == "time_ramp") {
        const double c = params.value("slope", 1.0);
        const double F0 = eval_operator(F, SymMat(d));
        e.u = [=](const Point& p) { return c * p.t; };
        e.g = [=](const Point&) { return c + F0; };
        e.relation = "dt u + F(0) = slope + F(0) exactly";
        e.L = std::max(0.0, -c);
    } else {
        fail(Status::invalid_argument, "unknown exact solution '" + name + "'");
    }
    return e;
}

ProblemSpec problem_from_exact(const ExactSolution& e, const OperatorSpec& F) {
    return ProblemSpec{F, e.g, e.u, e.u};
}

}  // namespace prlab
