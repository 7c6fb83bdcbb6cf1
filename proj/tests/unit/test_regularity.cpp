#include "support.hpp"

#include "regularity.hpp"
#include "solver.hpp"

using namespace prlab;

namespace {

Grid grid1(int nx) { return Grid::with_dt(1, nx, 1.0, 0.0, 0.25 * std::pow(2.0 / (nx - 1), 2)); }

}  // namespace

TEST_CASE("theta of a concave paraboloid equals its opening") {
    // u = -k|x|^2/2 + k t: every difference quotient equals k
    const Grid g = grid1(17);
    const Cylinder Q{make_point(0.0, 0.0), 1.0};
    for (double k : {1.0, 3.0}) {
        const GridFunction u = sample(g, [k](const Point& p) { return -0.5 * k * p.x[0] * p.x[0] + k * p.t; });
        CHECK(theta_lower(u, Q, make_point(0.0, 0.0)).value == doctest::Approx(k).epsilon(1e-10));
        CHECK(theta_lower(u, Q, make_point(0.25, -0.5)).value == doctest::Approx(k).epsilon(1e-10));
        CHECK(theta_upper(u, Q, make_point(0.0, 0.0)).value == 0.0);
    }
}

TEST_CASE("gradient and lattice theta agree on a smooth field") {
    const Grid g = grid1(17);
    const Cylinder Q{make_point(0.0, 0.0), 1.0};
    const GridFunction u = sample(g, [](const Point& p) { return std::sin(2.0 * p.x[0]) * std::exp(p.t); });
    const double a = theta_lower(u, Q, make_point(0.0, 0.0), ThetaMode::Gradient).value;
    const double b = theta_lower(u, Q, make_point(0.0, 0.0), ThetaMode::Lattice).value;
    CHECK(b <= a + 1e-12);
    CHECK(b >= 0.0);
}

TEST_CASE("psi vanishes on quadratics") {
    const Grid g = grid1(17);
    const Cylinder Q{make_point(0.0, 0.0), 1.0};
    const GridFunction u =
        sample(g, [](const Point& p) { return 0.3 * p.x[0] * p.x[0] - 0.7 * p.x[0] + 2.0 * p.t + 1.0; });
    CHECK(psi(u, Q, make_point(0.0, 0.0)).value < 1e-8);
    CHECK(psi(u, Q, make_point(0.25, -0.5)).value < 1e-8);
}

TEST_CASE("survival fit recovers a halving law") {
    // count above 2^k is 1024 / 2^k
    std::vector<double> v;
    double level = 1.5;
    for (int n = 512; n >= 1; n /= 2, level *= 2.0) v.insert(v.end(), n, level);
    v.push_back(level);
    const SurvivalFit f = survival_and_fit(v, 0.01, 1.0, 6, 1.0);
    REQUIRE(f.fitted);
    CHECK(f.eps_hat == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f.table.at(0).count == 1024);
    CHECK(f.table.at(0).measure == doctest::Approx(10.24));
}

TEST_CASE("survival fit refuses empty tails") {
    const std::vector<double> v(100, 0.5);
    const SurvivalFit f = survival_and_fit(v, 1.0, 1.0, 5, 1.0);
    CHECK_FALSE(f.fitted);
    CHECK_FALSE(f.reason.empty());
}

TEST_CASE("inf-convolution matches the brute force and stays below u") {
    const Grid g{1, 17, 9, 1.0, 0.0};
    const GridFunction u = sample(g, [](const Point& p) { return std::abs(p.x[0]) + std::cos(3.0 * p.t); });
    for (double eps : {0.05, 0.5}) {
        const GridFunction a = inf_convolution(u, eps), b = inf_convolution_brute(u, eps);
        for (std::size_t i = 0; i < u.v.size(); ++i) {
            CHECK(a.v[i] == doctest::Approx(b.v[i]).epsilon(1e-12));
            CHECK(a.v[i] <= u.v[i] + 1e-15);
        }
    }
}

TEST_CASE("A_kappa sets grow with kappa") {
    const Grid g = grid1(33);
    const GridFunction u = sample(g, [](const Point& p) { return -std::pow(std::abs(p.x[0]), 0.5) + 0.2 * p.t; });
    const std::vector<double> ks{1, 2, 4, 8, 16};
    const KappaChecks c = check_a_kappa(u, ks, KappaMode::Exact, 0.0, 200, 1e-8);
    CHECK(c.monotone_violations == 0);
    CHECK(c.containment_violations == 0);
    CHECK(a_kappa_set(u, 1.0).count() <= a_kappa_set(u, 16.0).count());
}

TEST_CASE("directional derivatives of a heat solution obey the Pucci bounds") {
    const OperatorSpec F = OperatorSpec::heat(1);
    const ExactSolution ex = exact_solution("heat_mode", nlohmann::json::object(), F, 1, 1.0, 0.0);
    const Grid g = grid1(33);
    const GridFunction u = sample(g, ex.u);
    const DirectionalCheck c = directional_derivative_check(u, {1.0, 0.0, 0.0}, 0.0, {1.0, 1.0});
    CHECK(c.checked > 0);
    CHECK(c.violations == 0);
}
