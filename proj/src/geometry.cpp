#include "geometry.hpp"

#include <algorithm>
#include <numeric>

namespace prlab {

bool cylinder_contains(const Cylinder& q, const Point& p, bool closed) {
    const int d = q.center.d;
    const double r2 = dist2(p.x, q.center.x, d);
    const double rho2 = q.radius * q.radius;
    const double t_lo = q.center.t - rho2;
    if (closed) return r2 <= rho2 && p.t >= t_lo && p.t <= q.center.t;
    return r2 < rho2 && p.t > t_lo && p.t <= q.center.t;
}

double cylinder_volume(const Cylinder& q) {
    const int d = q.center.d;
    return unit_ball_volume(d) * std::pow(q.radius, d) * q.radius * q.radius;
}

double pball_volume(int d, double theta, double h) {
    check_dim(d);
    require(theta > 0.0, Status::invalid_argument, "opening must be positive");
    require(h >= 0.0, Status::invalid_argument, "height must be nonnegative");
    const double hd = 0.5 * d;
    return 2.0 * unit_ball_volume(d) / (d + 2) * std::pow(h, 1.0 + hd) * std::pow(theta, -hd);
}

double pball_volume(const ParabolicBall& g) { return pball_volume(g.vertex.d, g.opening, g.height); }

bool pball_contains(const ParabolicBall& g, const Point& p) {
    const double lhs = g.opening * dist2(p.x, g.vertex.x, g.vertex.d);
    const double dt = g.orientation == Orientation::Upward ? p.t - g.vertex.t : g.vertex.t - p.t;
    return lhs <= dt && dt <= g.height;
}

ParabolicBall hat_ball(const ParabolicBall& g) {
    require(g.orientation == Orientation::Upward, Status::invalid_argument,
            "hat ball is defined for upward balls only");
    const double s = kSqrt2 + 1.0;
    ParabolicBall h = g;
    h.opening = g.opening / (s * s);
    h.height = 4.0 * g.height;
    h.vertex.t = g.vertex.t - 3.0 * g.height;
    return h;
}

double hat_ratio(int d) {
    check_dim(d);
    return std::pow(4.0, -(1.0 + 0.5 * d)) * std::pow(kSqrt2 + 1.0, -d);
}

double nu_constant() { return 4.0 / (kSqrt2 - 1.0); }

double eta0_constant(int d, double theta) {
    check_dim(d);
    return (d + 2) / (std::pow(2.0, d + 3) * unit_ball_volume(d)) *
           std::pow((kSqrt2 - 1.0) / 4.0, d + 2) / theta;
}

namespace {

Vec lerp(const Vec& a, const Vec& b, double z, int d) {
    Vec r{};
    for (int i = 0; i < d; ++i) r[i] = a[i] + z * (b[i] - a[i]);
    return r;
}

// Largest r for which the closed cylinder satisfies the P1 inclusions.
double admissible_radius(double D, double zeta, double h, double theta, double gap, double h0) {
    double r = std::sqrt(h / 4.0);
    // theta(zeta D + r)^2 + r^2 <= h/2
    {
        const double A = theta + 1.0, B = 2.0 * theta * zeta * D, C = theta * zeta * zeta * D * D - h / 2.0;
        const double disc = B * B - 4.0 * A * C;
        if (disc < 0.0) return -1.0;
        r = std::min(r, (-B + std::sqrt(disc)) / (2.0 * A));
    }
    // theta((1-zeta)D + r)^2 <= t0 - t - h/2
    {
        const double room = gap - h / 2.0;
        if (room < 0.0) return -1.0;
        r = std::min(r, std::sqrt(room / theta) - (1.0 - zeta) * D);
    }
    // t0 - (t2 - r^2) <= h0
    {
        const double room = h0 - gap + h / 2.0;
        if (room < 0.0) return -1.0;
        r = std::min(r, std::sqrt(room));
    }
    return r;
}

}  // namespace

InteriorCylinderResult interior_cylinder(const Point& xt, double h, double theta, const ParabolicBall& outer) {
    const int d = xt.d;
    check_dim(d);
    require(outer.orientation == Orientation::Downward, Status::invalid_argument,
            "outer ball must be downward (G^-)");
    require(theta >= 0.75, Status::invalid_argument, "interior cylinder requires theta >= 3/4");
    require(std::abs(outer.opening - theta) <= 1e-12 * theta, Status::invalid_argument,
            "outer ball opening must equal theta");
    require(pball_contains(outer, xt), Status::precondition, "(x,t) is not in the outer ball");
    const double gap = outer.vertex.t - xt.t;
    require(h > 0.0 && h <= gap * (1.0 + 1e-14), Status::precondition, "need 0 < h <= t0 - t");
    const double D = std::sqrt(dist2(xt.x, outer.vertex.x, d));

    double best_r = -1.0, best_z = 0.0;
    for (int k = 0; k <= 1000; ++k) {
        const double z = k * 1e-3;
        const double r = admissible_radius(D, z, h, theta, gap, outer.height);
        if (r > best_r) {
            best_r = r;
            best_z = z;
        }
    }
    InteriorCylinderResult res;
    res.radius_bound = std::sqrt(h / theta) / nu_constant();
    require(best_r >= res.radius_bound * (1.0 - 1e-12), Status::internal,
            "interior cylinder search fell below the lemma's radius bound");
    res.zeta = best_z;
    res.cyl.center.d = d;
    res.cyl.center.x = lerp(xt.x, outer.vertex.x, best_z, d);
    res.cyl.center.t = xt.t + h / 2.0;
    res.cyl.radius = best_r;
    return res;
}

namespace {

Vec random_in_ball(int d, double radius, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (;;) {
        Vec v{};
        for (int i = 0; i < d; ++i) v[i] = U(rng);
        if (norm2(v, d) <= 1.0) {
            for (int i = 0; i < d; ++i) v[i] *= radius;
            return v;
        }
    }
}

Vec random_on_sphere(int d, std::mt19937_64& rng) {
    std::normal_distribution<double> N(0.0, 1.0);
    for (;;) {
        Vec v{};
        for (int i = 0; i < d; ++i) v[i] = N(rng);
        const double n = std::sqrt(norm2(v, d));
        if (n > 1e-12) {
            for (int i = 0; i < d; ++i) v[i] /= n;
            return v;
        }
    }
}

}  // namespace

Point sample_cylinder(const Cylinder& q, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const int d = q.center.d;
    Point p;
    p.d = d;
    const Vec off = random_in_ball(d, q.radius, rng);
    for (int i = 0; i < d; ++i) p.x[i] = q.center.x[i] + off[i];
    p.t = q.center.t - q.radius * q.radius * U(rng);
    return p;
}

Point sample_pball(const ParabolicBall& g, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const int d = g.vertex.d;
    const double R = std::sqrt(g.height / g.opening);
    for (;;) {
        Point p;
        p.d = d;
        const Vec off = random_in_ball(d, R, rng);
        for (int i = 0; i < d; ++i) p.x[i] = g.vertex.x[i] + off[i];
        const double s = g.height * U(rng);
        p.t = g.orientation == Orientation::Upward ? g.vertex.t + s : g.vertex.t - s;
        if (pball_contains(g, p)) return p;
    }
}

PropertyCheck check_p1(const InteriorCylinderResult& c, const Point& xt, double h, double theta,
                       const ParabolicBall& outer, int samples, std::mt19937_64& rng) {
    const int d = xt.d;
    ParabolicBall G{xt, theta, h, Orientation::Upward};
    std::uniform_real_distribution<double> U(0.0, 1.0);
    PropertyCheck pc;
    const double r = c.cyl.radius;
    const double scale = std::max(h, 1e-300);
    for (int k = 0; k < samples; ++k) {
        Point p;
        p.d = d;
        // mix interior samples with closure samples on the lateral wall and the two caps
        const int mode = k % 4;
        Vec off = mode == 0 ? random_on_sphere(d, rng) : random_in_ball(d, 1.0, rng);
        for (int i = 0; i < d; ++i) p.x[i] = c.cyl.center.x[i] + r * off[i];
        p.t = mode == 1 ? c.cyl.center.t - r * r
            : mode == 2 ? c.cyl.center.t
                        : c.cyl.center.t - r * r * U(rng);
        ++pc.samples;
        // violations are measured as excess in time units relative to h
        double excess = 0.0;
        auto up = [&](const ParabolicBall& g) {
            const double lhs = g.opening * dist2(p.x, g.vertex.x, d);
            const double dt = g.orientation == Orientation::Upward ? p.t - g.vertex.t : g.vertex.t - p.t;
            excess = std::max({excess, lhs - dt, dt - g.height});
        };
        up(G);
        up(outer);
        excess = std::max({excess, xt.t + h / 4.0 - p.t, p.t - (xt.t + h / 2.0)});
        excess /= scale;
        if (excess > pc.worst) {
            pc.worst = excess;
            pc.witness = p;
        }
        if (excess > 1e-12) ++pc.violations;
    }
    pc.passed = pc.violations == 0;
    return pc;
}

PropertyCheck check_p2(const InteriorCylinderResult& c, double h, double theta) {
    const int d = c.cyl.center.d;
    PropertyCheck pc;
    pc.samples = 1;
    const double ratio = std::pow(c.cyl.radius, d + 2) / pball_volume(d, theta, h);
    const double eta0 = eta0_constant(d, theta);
    pc.worst = eta0 / ratio;
    pc.passed = ratio >= eta0 * (1.0 - 1e-12);
    pc.violations = pc.passed ? 0 : 1;
    return pc;
}

PropertyCheck check_p3(const InteriorCylinderResult& c, int samples, std::mt19937_64& rng) {
    const int d = c.cyl.center.d;
    const double r = c.cyl.radius;
    const Cylinder inner{c.cyl.center, r / 4.0};
    PropertyCheck pc;
    for (int k = 0; k < samples; ++k) {
        const Point z = sample_cylinder(inner, rng);
        ParabolicBall Gm{z, 0.5, r * r / 16.0, Orientation::Downward};
        Gm.vertex.t = z.t - r * r / 16.0;
        const Point ys = sample_pball(Gm, rng);
        const double height = z.t - ys.t;
        const ParabolicBall Gu{ys, 0.5, height, Orientation::Upward};
        const Point w = sample_pball(Gu, rng);
        ++pc.samples;
        const double reach = std::sqrt(dist2(w.x, c.cyl.center.x, d)) / r;
        const bool inside = cylinder_contains(c.cyl, w, false);
        if (reach > pc.worst) {
            pc.worst = reach;
            pc.witness = w;
        }
        if (!inside) ++pc.violations;
    }
    pc.passed = pc.violations == 0;
    return pc;
}

double p3_worst_reach() { return 0.25 + 1.0 / (2.0 * kSqrt2) + 0.5; }

bool pballs_intersect(const ParabolicBall& a, const ParabolicBall& b) {
    const int d = a.vertex.d;
    const double s_lo = std::max(a.vertex.t, b.vertex.t);
    const double s_hi = std::min(a.vertex.t + a.height, b.vertex.t + b.height);
    if (s_lo > s_hi) return false;
    // spatial radii grow with s, so the top common slice is the best witness
    const double ra = std::sqrt(std::max(0.0, s_hi - a.vertex.t) / a.opening);
    const double rb = std::sqrt(std::max(0.0, s_hi - b.vertex.t) / b.opening);
    const double dd = std::sqrt(dist2(a.vertex.x, b.vertex.x, d));
    return dd <= ra + rb;
}

CoverSelection vitali_select(const std::vector<Point>& E, const std::vector<double>& h, double theta) {
    require(E.size() == h.size(), Status::invalid_argument, "height map size mismatch");
    require(theta > 0.0, Status::invalid_argument, "opening must be positive");
    CoverSelection cs;
    if (E.empty()) return cs;
    for (double v : h) require(v > 0.0 && std::isfinite(v), Status::invalid_argument, "heights must be positive");
    std::vector<int> idx(E.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int i, int j) {
        if (h[i] != h[j]) return h[i] > h[j];
        const int d = E[i].d;
        for (int k = 0; k < d; ++k)
            if (E[i].x[k] != E[j].x[k]) return E[i].x[k] < E[j].x[k];
        if (E[i].t != E[j].t) return E[i].t < E[j].t;
        return i < j;
    });
    for (int i : idx) {
        const ParabolicBall g{E[i], theta, h[i], Orientation::Upward};
        bool disjoint = true;
        for (const auto& s : cs.selected)
            if (pballs_intersect(g, s)) {
                disjoint = false;
                break;
            }
        if (disjoint) {
            cs.selected.push_back(g);
            cs.hatted.push_back(hat_ball(g));
            cs.order.push_back(i);
        }
    }
    return cs;
}

double parabolic_boundary_distance(const Cylinder& q, const Point& p) {
    require(cylinder_contains(q, p, true), Status::precondition, "point is outside the closed cylinder");
    const int d = q.center.d;
    const double lateral = q.radius - std::sqrt(dist2(p.x, q.center.x, d));
    const double bottom = std::sqrt(std::max(0.0, p.t - (q.center.t - q.radius * q.radius)));
    return std::max(0.0, std::min(lateral, bottom));
}

VolumeEstimate monte_carlo_volume(const ParabolicBall& g, long samples, std::mt19937_64& rng) {
    const int d = g.vertex.d;
    const double R = std::sqrt(g.height / g.opening);
    std::uniform_real_distribution<double> U(-1.0, 1.0), T(0.0, 1.0);
    long hits = 0;
    for (long k = 0; k < samples; ++k) {
        Point p;
        p.d = d;
        for (int i = 0; i < d; ++i) p.x[i] = g.vertex.x[i] + R * U(rng);
        const double s = g.height * T(rng);
        p.t = g.orientation == Orientation::Upward ? g.vertex.t + s : g.vertex.t - s;
        if (pball_contains(g, p)) ++hits;
    }
    const double box = std::pow(2.0 * R, d) * g.height;
    const double f = static_cast<double>(hits) / samples;
    return {box * f, box * std::sqrt(f * (1.0 - f) / samples)};
}

}  // namespace prlab
