#include "support.hpp"

#include "grid.hpp"
#include "solver.hpp"

#include <cstdio>
#include <filesystem>

using namespace prlab;

namespace {

double max_error(const GridFunction& u, const Field& exact) {
    double e = 0.0;
    for (std::size_t i = 0; i < u.v.size(); ++i) e = std::max(e, std::abs(u.v[i] - exact(u.grid.node(i))));
    return e;
}

GridFunction solve_exact(const std::string& name, const nlohmann::json& params, const OperatorSpec& F, int d, int nx,
                         Field* exact = nullptr) {
    const double dx = 2.0 / (nx - 1);
    const Grid g = Grid::with_dt(d, nx, 1.0, 0.0, cfl_dt(F, d, dx));
    const ExactSolution ex = exact_solution(name, params, F, d, 1.0, 0.0);
    if (exact) *exact = ex.u;
    return solve(problem_from_exact(ex, F), g);
}

}  // namespace

TEST_CASE("grid geometry") {
    const Grid g{1, 5, 3, 1.0, 0.0};
    CHECK(g.dx() == doctest::Approx(0.5));
    CHECK(g.dt() == doctest::Approx(0.5));
    CHECK(g.x(0) == -1.0);
    CHECK(g.t(0) == -1.0);
    CHECK(g.t(2) == doctest::Approx(0.0));
    const Grid h = Grid::with_dt(1, 33, 1.0, 0.0, 1e-3);
    CHECK(h.dt() <= 1e-3);
    CHECK(h.nt == 1001);
}

TEST_CASE("binary grid round trip") {
    const Grid g{2, 7, 4, 0.5, 0.25};
    const GridFunction u = sample(g, [](const Point& p) { return p.x[0] - 2.0 * p.x[1] + p.t; });
    const auto path = std::filesystem::temp_directory_path() / "prlab_unit_grid.bin";
    write_binary(u, path.string());
    const GridFunction v = read_binary(path.string());
    std::filesystem::remove(path);
    CHECK(v.grid.d == 2);
    CHECK(v.grid.nx == 7);
    CHECK(v.grid.nt == 4);
    CHECK(v.grid.rho == 0.5);
    CHECK(v.grid.t0 == 0.25);
    CHECK(v.v == u.v);
    CHECK(status_of([] { read_binary("/nonexistent/prlab.bin"); }) == Status::io);
}

TEST_CASE("cfl step for the heat equation") {
    CHECK(cfl_dt(OperatorSpec::heat(1), 1, 0.1) == doctest::Approx(0.01 / 2.0));
    CHECK(cfl_dt(OperatorSpec::heat(2), 2, 0.1) == doctest::Approx(0.01 / 4.0));
    CHECK(cfl_dt(OperatorSpec::heat(2), 2, 0.1, 8) == doctest::Approx(0.01 / 8.0));
}

TEST_CASE("quadratic data is reproduced to round-off") {
    for (int d = 1; d <= 2; ++d) {
        Field ex;
        const GridFunction u = solve_exact("quadratic", {{"m", 0.5}}, OperatorSpec::pucci_plus({1.0, 2.0}), d, 17, &ex);
        CHECK(max_error(u, ex) < 1e-11);
    }
}

TEST_CASE("heat mode converges at second order") {
    Field ex;
    const GridFunction a = solve_exact("heat_mode", nlohmann::json::object(), OperatorSpec::heat(1), 1, 17, &ex);
    const GridFunction b = solve_exact("heat_mode", nlohmann::json::object(), OperatorSpec::heat(1), 1, 33, &ex);
    const double ea = max_error(a, ex), eb = max_error(b, ex);
    CHECK(eb < 1e-2);
    CHECK(ea / eb > 3.5);
    CHECK(ea / eb < 4.5);
}

TEST_CASE("a step above the stability bound is refused") {
    const OperatorSpec F = OperatorSpec::heat(1);
    const ExactSolution ex = exact_solution("heat_mode", nlohmann::json::object(), F, 1, 1.0, 0.0);
    const Grid g{1, 33, 50, 1.0, 0.0};
    CHECK(status_of([&] { solve(problem_from_exact(ex, F), g); }) == Status::cfl);
}

TEST_CASE("thread count does not change the result") {
    const OperatorSpec F = OperatorSpec::pucci_minus({1.0, 2.0});
    const ExactSolution ex = exact_solution("heat_mode", nlohmann::json::object(), F, 2, 1.0, 0.0);
    const Grid g = Grid::with_dt(2, 17, 1.0, 0.0, cfl_dt(F, 2, 2.0 / 16));
    const GridFunction a = solve(problem_from_exact(ex, F), g, {4, 1});
    const GridFunction b = solve(problem_from_exact(ex, F), g, {4, 3});
    CHECK(a.v == b.v);
}
