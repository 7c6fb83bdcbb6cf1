#include "support.hpp"

#include "hausdorff.hpp"

using namespace prlab;

TEST_CASE("box counts of simple sets") {
    CHECK(box_count({make_point(0.3, -0.2)}, 0.1) == 1);
    // two points in one space box but different time boxes
    CHECK(box_count({make_point(0.01, -0.001), make_point(0.02, -0.5)}, 0.1) == 2);
    CHECK(status_of([] { box_count({make_point(0.0, 0.0)}, 0.0); }) == Status::invalid_argument);
}

TEST_CASE("a time segment has parabolic dimension 2") {
    PointSet E;
    for (int i = 0; i < 65536; ++i) E.push_back(make_point(0.0, -1.0 + (i + 0.5) / 65536.0));
    const CoverReport c = box_dimension(E, {1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64});
    CHECK(c.monotone);
    CHECK_FALSE(c.degenerate);
    CHECK(c.dimension == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("a spatial slice has dimension d") {
    PointSet E;
    for (int i = 0; i < 4096; ++i) E.push_back(make_point(-1.0 + (i + 0.5) * 2.0 / 4096, -1e-9));
    const CoverReport c = box_dimension(E, {1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64});
    CHECK(c.dimension == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("classical band") {
    const auto b = classical_band(2.0, 1);
    CHECK(b.first == 1.0);
    CHECK(b.second == 1.5);
}

TEST_CASE("estimator input validation") {
    CHECK(status_of([] { box_dimension({}, {0.1, 0.05, 0.025}); }) == Status::invalid_argument);
    CHECK(status_of([] { box_dimension({make_point(0.0, 0.0)}, {0.1, 0.05}); }) == Status::invalid_argument);
    PsiField f;
    CHECK(status_of([&] { singular_set(f, 0.05, {0.1}); }) == Status::invalid_argument);
}
