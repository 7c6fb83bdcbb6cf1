#pragma once

#include "common.hpp"

#include <random>
#include <vector>

namespace prlab {

/// Q_rho(x,t) = B_rho(x) x (t - rho^2, t]; `center` is the top-center.
struct Cylinder {
    Point center;
    double radius = 1.0;
};

enum class Orientation { Upward, Downward };

/// Upward: G_{theta,h}(x,t) = {theta|y-x|^2 <= s-t <= h}; Downward mirrors time.
struct ParabolicBall {
    Point vertex;
    double opening = 1.0;
    double height = 0.0;
    Orientation orientation = Orientation::Upward;
};

/// `closed` also admits the lateral wall and the bottom slice.
bool cylinder_contains(const Cylinder& q, const Point& p, bool closed = false);
double cylinder_volume(const Cylinder& q);

double pball_volume(int d, double theta, double h);
double pball_volume(const ParabolicBall& g);
bool pball_contains(const ParabolicBall& g, const Point& p);

ParabolicBall hat_ball(const ParabolicBall& g);
/// Closed form 4^{-(1+d/2)} (sqrt2+1)^{-d}.
double hat_ratio(int d);

/// nu = 4/(sqrt2 - 1).
double nu_constant();
/// eta_0 = (d+2)/(2^{d+3} omega_d) ((sqrt2-1)/4)^{d+2} / theta.
double eta0_constant(int d, double theta);

struct InteriorCylinderResult {
    Cylinder cyl;
    double zeta = 0.0;
    double radius_bound = 0.0;  // (1/nu) sqrt(h/theta)
};

/// Search over x2 = x + zeta(x0 - x), t2 = t + h/2, largest admissible r (P1).
InteriorCylinderResult interior_cylinder(const Point& xt, double h, double theta, const ParabolicBall& outer);

struct PropertyCheck {
    bool passed = true;
    long samples = 0;
    long violations = 0;
    double worst = 0.0;  // largest normalized excess observed
    Point witness;
};

/// P1: closure of Q_r(x2,t2) inside G_{theta,h}(x,t), outer, and the slab t+h/4 <= s <= t+h/2.
PropertyCheck check_p1(const InteriorCylinderResult& c, const Point& xt, double h, double theta,
                       const ParabolicBall& outer, int samples, std::mt19937_64& rng);
/// P2: |Q_r| / |G_{theta,h}| >= eta_0, with |Q_r| = r^{d+2}.
PropertyCheck check_p2(const InteriorCylinderResult& c, double h, double theta);
/// P3: nested-ball inclusion by uniform three-level sampling.
PropertyCheck check_p3(const InteriorCylinderResult& c, int samples, std::mt19937_64& rng);
/// Supremum over the P3 configuration of |w - x2| / r (analytic).
double p3_worst_reach();

struct CoverSelection {
    std::vector<ParabolicBall> selected;
    std::vector<ParabolicBall> hatted;
    std::vector<int> order;  // indices into E of the selected vertices
};

/// Greedy Vitali selection on G_{theta,h(p)}(p), p in E.
CoverSelection vitali_select(const std::vector<Point>& E, const std::vector<double>& h, double theta);

/// Exact intersection test for two upward balls with the same opening.
bool pballs_intersect(const ParabolicBall& a, const ParabolicBall& b);

double parabolic_boundary_distance(const Cylinder& q, const Point& p);

/// Uniform sample in a parabolic ball by rejection from its bounding box.
Point sample_pball(const ParabolicBall& g, std::mt19937_64& rng);
Point sample_cylinder(const Cylinder& q, std::mt19937_64& rng);

struct VolumeEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
};
VolumeEstimate monte_carlo_volume(const ParabolicBall& g, long samples, std::mt19937_64& rng);

}  // namespace prlab
