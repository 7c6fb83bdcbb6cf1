#include "support.hpp"

#include "geometry.hpp"

using namespace prlab;

TEST_CASE("parabolic ball volume matches direct integration") {
    // d=1: 2 * int_0^sqrt(h/theta) (h - theta x^2) dx = (4/3) h^{3/2} theta^{-1/2}
    CHECK(pball_volume(1, 0.75, 2.0) == doctest::Approx(4.0 / 3.0 * std::pow(2.0, 1.5) / std::sqrt(0.75)));
    // d=2: int_0^h pi s / theta ds
    CHECK(pball_volume(2, 2.0, 0.5) == doctest::Approx(kPi * 0.25 / (2.0 * 2.0)));
}

TEST_CASE("parabolic ball volume by Monte Carlo") {
    std::mt19937_64 rng(42);
    for (int d = 1; d <= 3; ++d) {
        ParabolicBall g{Point{d, {0.1, -0.2, 0.3}, 0.5}, 1.5, 0.8, Orientation::Upward};
        const VolumeEstimate v = monte_carlo_volume(g, 200000, rng);
        CHECK(std::abs(v.mean - pball_volume(g)) < 4.0 * v.stderr_);
    }
}

TEST_CASE("membership and orientation") {
    ParabolicBall up{make_point(0.0, 0.0), 1.0, 1.0, Orientation::Upward};
    CHECK(pball_contains(up, make_point(0.5, 0.5)));
    CHECK_FALSE(pball_contains(up, make_point(0.8, 0.5)));
    CHECK_FALSE(pball_contains(up, make_point(0.0, -0.1)));
    ParabolicBall down = up;
    down.orientation = Orientation::Downward;
    CHECK(pball_contains(down, make_point(0.5, -0.5)));
    CHECK_FALSE(pball_contains(down, make_point(0.5, 0.5)));
}

TEST_CASE("cylinder volume and membership") {
    Cylinder q{make_point(0.0, 0.0), 0.5};
    CHECK(cylinder_volume(q) == doctest::Approx(2.0 * 0.5 * 0.25));
    CHECK(cylinder_contains(q, make_point(0.2, -0.1)));
    CHECK(cylinder_contains(q, make_point(0.2, 0.0)));
    CHECK_FALSE(cylinder_contains(q, make_point(0.2, -0.25)));
    CHECK(cylinder_contains(q, make_point(0.2, -0.25), true));
}

TEST_CASE("hat ratio and nu closed forms") {
    CHECK(hat_ratio(1) == doctest::Approx(1.0 / (8.0 * (std::sqrt(2.0) + 1.0))));
    CHECK(hat_ratio(2) == doctest::Approx(1.0 / (16.0 * std::pow(std::sqrt(2.0) + 1.0, 2))));
    CHECK(nu_constant() == doctest::Approx(4.0 * (std::sqrt(2.0) + 1.0)));
    for (int d = 1; d <= 3; ++d) {
        ParabolicBall g{Point{d, {}, 0.0}, 0.9, 0.6, Orientation::Upward};
        CHECK(pball_volume(g) / pball_volume(hat_ball(g)) == doctest::Approx(hat_ratio(d)).epsilon(1e-12));
    }
}

TEST_CASE("intersection test agrees with sampling") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    int agree = 0;
    for (int k = 0; k < 200; ++k) {
        ParabolicBall a{make_point(U(rng), U(rng)), 1.0, 0.5, Orientation::Upward};
        ParabolicBall b{make_point(U(rng), U(rng)), 1.0, 0.5, Orientation::Upward};
        bool hit = false;
        for (int s = 0; s < 4000 && !hit; ++s) hit = pball_contains(b, sample_pball(a, rng));
        // sampling can only miss thin overlaps, never invent one
        if (hit) CHECK(pballs_intersect(a, b));
        agree += hit == pballs_intersect(a, b);
    }
    CHECK(agree >= 190);
}

TEST_CASE("interior cylinder satisfies the inclusion and volume properties") {
    std::mt19937_64 rng(1);
    const double theta = 0.75, h = 0.4;
    const ParabolicBall outer{make_point(0.0, 0.0), theta, 1.0, Orientation::Downward};
    const Point xt = make_point(0.1, -0.6);
    const InteriorCylinderResult c = interior_cylinder(xt, h, theta, outer);
    CHECK(c.cyl.radius > 0.0);
    CHECK(check_p1(c, xt, h, theta, outer, 20000, rng).passed);
    CHECK(check_p2(c, h, theta).passed);
}

TEST_CASE("vitali selection is disjoint") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::vector<Point> E;
    std::vector<double> h;
    for (int k = 0; k < 60; ++k) {
        E.push_back(make_point(U(rng), U(rng)));
        h.push_back(0.05 + 0.1 * (U(rng) + 1.0));
    }
    const CoverSelection s = vitali_select(E, h, 1.0);
    for (std::size_t i = 0; i < s.selected.size(); ++i)
        for (std::size_t j = i + 1; j < s.selected.size(); ++j) CHECK_FALSE(pballs_intersect(s.selected[i], s.selected[j]));
    for (const Point& p : E) {
        bool covered = false;
        for (const auto& g : s.hatted) covered = covered || pball_contains(g, p);
        CHECK(covered);
    }
}
