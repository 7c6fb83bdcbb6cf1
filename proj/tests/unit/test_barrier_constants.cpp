#include "support.hpp"

#include "barrier.hpp"
#include "constants.hpp"

using namespace prlab;

TEST_CASE("barrier certificate at the reference parameters") {
    const BarrierParams p = barrier_params(1, 1.0, 1.0, 0.75, 1.0);
    CHECK(p.b == doctest::Approx(std::max(p.b_first, p.b_second)));
    CHECK(p.side_weak);
    const BarrierReport r = verify_barrier(p, 2000, 3);
    CHECK(r.passed);
    CHECK(r.margin_i >= 0.0);
    CHECK(barrier_fd_check(p, 200, 3) <= 1e-5);
}

TEST_CASE("rho0 gap closed form") {
    for (double th : {0.75, 1.0, 2.0})
        for (int d : {1, 2}) {
            const BarrierParams p = barrier_params(d, 1.0, 2.0, th, 1.0);
            const double gap = (std::log((4.0 * p.a * p.lambda - 1.0) / p.b) - (0.5 - p.a / th)) / p.a;
            CHECK(p.rho0_gap == doctest::Approx(gap).epsilon(1e-9));
            CHECK(p.rho0_gap <= 1e-12);
        }
}

TEST_CASE("shrinking b breaks the supersolution property") {
    const BarrierParams p = barrier_params(1, 1.0, 1.0, 0.75, 1.0);
    CHECK_FALSE(verify_barrier(with_b(p, p.b / 10.0), 4000, 5).passed);
}

TEST_CASE("barrier preconditions") {
    CHECK(status_of([] { barrier_params(1, 1.0, 1.0, 0.5, 1.0); }) == Status::precondition);
    CHECK(status_of([] { barrier_params(1, 1.0, 1.0, 0.5, 1.0, false); }) == Status::ok);
    CHECK(status_of([] { barrier_params(1, 2.0, 1.0, 1.0, 1.0); }) == Status::invalid_argument);
    CHECK(status_of([] { barrier_params(1, 1.0, 1.0, 1.0, 0.0); }) == Status::invalid_argument);
}

TEST_CASE("golden constant chain") {
    // 50-digit reference values computed independently
    const ConstantChain c = compute_constants(ConstantInputs{});
    CHECK(c.epsilon == doctest::Approx(7.2692009301798635e-9).epsilon(1e-10));
    CHECK(c.kappa0 == doctest::Approx(88888.888888888889).epsilon(1e-12));
    CHECK(c.C_w2 == doctest::Approx(7.6806055908257488).epsilon(1e-12));
    CHECK(c.C1 == doctest::Approx(3841.1666666666667).epsilon(1e-12));
}

TEST_CASE("derived volume constant and default radius") {
    const double nu = 4.0 / (std::sqrt(2.0) - 1.0);
    CHECK(derived_c_vol(1) == doctest::Approx(std::sqrt(2.0) / (64.0 * nu * nu * nu)));
    CHECK(derived_c_vol(1) == doctest::Approx(2.4537e-5).epsilon(1e-4));
    CHECK(default_R(2, 1.0) == doctest::Approx(0.9 / (18.0 * std::sqrt(2.0))));
    const VolumeEstimate v = c_vol_monte_carlo(1, 0.75, 400000, 1);
    CHECK(std::abs(v.mean - derived_c_vol(1)) <= 4.0 * v.stderr_ + 1e-3 * derived_c_vol(1));
}

TEST_CASE("constant chain refusals") {
    ConstantInputs in;
    in.R = 0.5;
    CHECK(status_of([&] { compute_constants(in); }) == Status::precondition);
    in = ConstantInputs{};
    in.theta = 0.5;
    CHECK(status_of([&] { compute_constants(in); }) == Status::precondition);
    in = ConstantInputs{};
    in.lambda = 3.0;
    CHECK(status_of([&] { compute_constants(in); }) == Status::invalid_argument);
}

TEST_CASE("decay bound") {
    const ConstantChain c = compute_constants(ConstantInputs{});
    CHECK(decay_bound(c, c.kappa0) == doctest::Approx(c.C_w2));
    CHECK(decay_bound(c, 2.0 * c.kappa0) < c.C_w2);
    CHECK(decay_bound(c, 2.0 * c.kappa0) == doctest::Approx(c.C_w2 * std::pow(2.0, -c.epsilon)));
}

TEST_CASE("constants json carries every link") {
    const nlohmann::json j = to_json(compute_constants(ConstantInputs{}));
    CHECK(j.at("chain").size() >= 10);
    for (const auto& e : j.at("chain")) {
        CHECK(e.contains("name"));
        CHECK(e.contains("log10"));
    }
    CHECK(j.at("side_conditions").at("rho0_weak").get<bool>());
}
