#include "support.hpp"

#include "linalg.hpp"
#include "operators.hpp"

#include <algorithm>

using namespace prlab;

TEST_CASE("jacobi on a 2x2 with known spectrum") {
    SymMat M(2);
    M(0, 0) = 2;
    M(1, 1) = 2;
    M.set(0, 1, 1);
    Eigen e = jacobi_eigen(M);
    std::array<double, 2> v{e.values[0], e.values[1]};
    std::sort(v.begin(), v.end());
    CHECK(v[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(v[1] == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("jacobi reassembles random 3x3 matrices") {
    std::mt19937_64 rng(7);
    for (int k = 0; k < 50; ++k) {
        const SymMat M = random_sym(3, rng, 5.0);
        const Eigen e = jacobi_eigen(M);
        const SymMat R = from_eigen(3, e.values, e.vectors);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) CHECK(std::abs(R(i, j) - M(i, j)) < 1e-12);
        CHECK(e.values[0] + e.values[1] + e.values[2] == doctest::Approx(M.trace()).epsilon(1e-12));
    }
}

TEST_CASE("pucci values on a diagonal matrix") {
    // eigenvalues 2 and -3, lambda = 1, Lambda = 2
    const SymMat M = SymMat::diag(2, {2.0, -3.0, 0.0});
    const Ellipticity e{1.0, 2.0};
    CHECK(pucci_plus(e, M) == doctest::Approx(-1.0 * 2.0 + 2.0 * 3.0));
    CHECK(pucci_minus(e, M) == doctest::Approx(-2.0 * 2.0 + 1.0 * 3.0));
}

TEST_CASE("heat operator is minus the trace") {
    std::mt19937_64 rng(3);
    const OperatorSpec F = OperatorSpec::heat(2);
    for (int k = 0; k < 20; ++k) {
        const SymMat M = random_sym(2, rng);
        CHECK(eval_operator(F, M) == doctest::Approx(-M.trace()));
    }
}

TEST_CASE("linear operators sit between the pucci extremes") {
    std::mt19937_64 rng(11);
    const Ellipticity e{0.5, 3.0};
    SymMat A = SymMat::diag(2, {0.5, 3.0, 0.0});
    const OperatorSpec F = OperatorSpec::linear(A, e);
    for (int k = 0; k < 200; ++k) {
        const SymMat M = random_sym(2, rng, 4.0);
        CHECK(pucci_minus(e, M) <= eval_operator(F, M) + 1e-12);
        CHECK(eval_operator(F, M) <= pucci_plus(e, M) + 1e-12);
    }
    CHECK(verify_ellipticity(F, 2, 500, 1).passed);
    CHECK(verify_ellipticity(OperatorSpec::pucci_minus(e), 3, 500, 2).passed);
}

TEST_CASE("ellipticity input validation") {
    CHECK(status_of([] { check_ellipticity({2.0, 1.0}); }) == Status::invalid_argument);
    CHECK(status_of([] { check_ellipticity({0.0, 1.0}); }) == Status::invalid_argument);
    CHECK(status_of([] { check_ellipticity({1.0, 1.0}); }) == Status::ok);
}

TEST_CASE("operator json round trip") {
    const OperatorSpec F = OperatorSpec::pucci_plus({1.0, 2.0});
    const OperatorSpec G = operator_from_json(operator_to_json(F), 2);
    std::mt19937_64 rng(5);
    for (int k = 0; k < 10; ++k) {
        const SymMat M = random_sym(2, rng);
        CHECK(eval_operator(G, M) == eval_operator(F, M));
    }
}
