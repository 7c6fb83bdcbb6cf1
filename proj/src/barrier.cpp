#include "barrier.hpp"

#include "operators.hpp"

#include <algorithm>
#include <random>

namespace prlab {

namespace {

void fill_derived(BarrierParams& p) {
    const double ln1t = std::log1p(p.tau);
    p.log_c = std::log(2.0) + (p.b + 1.0) * ln1t + p.a / p.theta;
    p.log_beta = std::log(2.0) + (p.b + 1.0) * ln1t - p.b * std::log(p.tau) + std::log(std::expm1(p.a / p.theta));
    p.rho0 = std::log((4.0 * p.a * p.lambda - 1.0) / p.b) / p.a + 1.0 / p.theta;
    p.rho0_gap = p.rho0 - 1.0 / (2.0 * p.a);
    p.side_strict = p.rho0_gap < 0.0;
    p.side_weak = p.rho0_gap <= 1e-12 * (1.0 / p.a);
}

Vec random_direction(int d, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Vec v{};
    double r2 = 0.0;
    while (r2 < 1e-20) {
        for (int i = 0; i < d; ++i) v[i] = n(rng);
        r2 = norm2(v, d);
    }
    const double r = std::sqrt(r2);
    for (int i = 0; i < d; ++i) v[i] /= r;
    return v;
}

// Local coordinates (X,T) of the reference barrier and the map to (y,s) = (x2 + sqrt(L) X, t2 + L T).
struct Scaling {
    double L = 1.0;
    Point origin;
    double log_slice_bound = 0.0;

    Point to_outer(const Point& q) const {
        Point r = q;
        const double sl = std::sqrt(L);
        for (int i = 0; i < q.d; ++i) r.x[i] = origin.x[i] + sl * q.x[i];
        r.t = origin.t + L * q.t;
        return r;
    }
    Point to_inner(const Point& q) const {
        Point r = q;
        const double sl = std::sqrt(L);
        for (int i = 0; i < q.d; ++i) r.x[i] = (q.x[i] - origin.x[i]) / sl;
        r.t = (q.t - origin.t) / L;
        return r;
    }
};

Point at_rho(const BarrierParams& p, double rho, double t, std::mt19937_64& rng) {
    const Vec e = random_direction(p.d, rng);
    const double r = std::sqrt(std::max(rho, 0.0) * (t + p.tau));
    Point q;
    q.d = p.d;
    for (int i = 0; i < p.d; ++i) q.x[i] = r * e[i];
    q.t = t;
    return q;
}

void note(PropertyResult& r, bool bad, double excess, const Point& where) {
    ++r.checked;
    if (bad) {
        ++r.violations;
        r.passed = false;
    }
    if (r.checked == 1 || excess > r.worst) {
        r.worst = excess;
        r.witness = where;
    }
}

// (dt phi + P+(D^2 phi)) / psi
double bracket(const BarrierParams& p, const BarrierValue& v) {
    SymMat H(p.d);
    for (int i = 0; i < p.d; ++i)
        for (int j = 0; j < p.d; ++j) H(i, j) = v.hess_over_psi[i * 3 + j];
    return v.dt_over_psi + pucci_plus({p.lambda, p.Lambda}, H);
}

BarrierReport verify_impl(const BarrierParams& p, long samples, std::uint64_t seed, const Scaling& sc) {
    require(samples >= 1, Status::invalid_argument, "need at least one sample");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const double inv_theta = 1.0 / p.theta;
    const double knee = 1.0 / (2.0 * p.a);

    BarrierReport rep;
    rep.params = p;
    PropertyResult pi{"(i) dt phi + P+(D^2 phi) <= -1 on s > 0"};
    PropertyResult pii{"(ii) phi = 0 on the lateral boundary"};
    PropertyResult piii{"(iii) phi > 0 inside"};
    PropertyResult piv{"(iv) 0 <= phi <= beta on s = 0"};

    // round trip through outer coordinates so the scaling itself is exercised
    auto eval_outer = [&](const Point& inner, Point& outer) {
        outer = sc.to_outer(inner);
        return barrier_eval(p, sc.to_inner(outer));
    };

    // relative error in rho picked up by the coordinate round trip, times a
    auto roundoff = [&](const Point& inner, const Point& outer, double rho) {
        constexpr double eps = std::numeric_limits<double>::epsilon();
        double err_t = 0.0, err_x = 0.0;
        if (sc.origin.t != 0.0 || sc.L != 1.0) err_t = eps * (std::abs(sc.origin.t) + std::abs(outer.t)) / sc.L;
        const double xn = std::sqrt(norm2(inner.x, p.d));
        if (xn > 0.0)
            for (int i = 0; i < p.d; ++i)
                if (sc.origin.x[i] != 0.0 || sc.L != 1.0)
                    err_x = std::max(err_x, eps * (std::abs(sc.origin.x[i]) + std::abs(outer.x[i])) /
                                                (std::sqrt(sc.L) * xn));
        return 4.0 * p.a * rho * (2.0 * err_x + err_t / (inner.t + p.tau));
    };

    double min_mag = std::numeric_limits<double>::infinity();
    for (long k = 0; k < samples; ++k) {
        double rho;
        const long bucket = k % 4;
        if (bucket < 2)
            rho = U(rng) * inv_theta;
        else if (bucket == 2)
            rho = std::clamp(knee + (U(rng) - 0.5) * 0.1 * inv_theta, 0.0, inv_theta);
        else
            rho = inv_theta * (1.0 - 0.05 * U(rng));
        if (k == 0) rho = 0.0;
        if (k == 1) rho = knee;
        if (k == 2) rho = inv_theta;
        if (k == 3 && p.rho0 >= 0.0 && p.rho0 <= inv_theta) rho = p.rho0;
        double t = 1.0 - U(rng);
        if (k % 97 == 5) t = 1.0;
        if (k % 97 == 6) t = 1e-9;
        Point outer;
        const BarrierValue v = eval_outer(at_rho(p, rho, t, rng), outer);
        const double br = bracket(p, v);
        // psi * |bracket| >= 1 - 1e-8, compared in logs
        double mag = 0.0;
        if (br < 0.0) mag = std::exp(std::min(v.log_psi + std::log(-br), 700.0));
        min_mag = std::min(min_mag, mag);
        const bool bad = !(br < 0.0) || mag < 1.0 - 1e-8;
        note(pi, bad, br < 0.0 ? 1.0 - mag : 1.0 + br, outer);
    }
    rep.margin_i = min_mag;

    std::uniform_real_distribution<double> Tall(-p.tau, 1.0);
    for (long k = 0; k < samples; ++k) {
        double t = Tall(rng);
        if (t <= -p.tau) t = 1.0;
        Point outer;
        const Point inner = at_rho(p, inv_theta, t, rng);
        const BarrierValue v = eval_outer(inner, outer);
        // phi / (psi s), exactly zero in exact arithmetic
        const double rel = std::abs(v.phi_over_psi) / (t + p.tau);
        note(pii, rel > 1e-12 + roundoff(inner, outer, v.rho), rel, outer);
    }

    for (long k = 0; k < samples; ++k) {
        double t = Tall(rng);
        if (t <= -p.tau) t = 1.0;
        const double rho = U(rng) * (1.0 - 1e-6) * inv_theta;
        Point outer;
        const BarrierValue v = eval_outer(at_rho(p, rho, t, rng), outer);
        note(piii, !(v.phi_over_psi > 0.0), -v.phi_over_psi, outer);
    }

    for (long k = 0; k < samples; ++k) {
        const double rho = (k == 0) ? 0.0 : U(rng) * inv_theta;
        Point outer;
        const BarrierValue v = eval_outer(at_rho(p, rho, 0.0, rng), outer);
        const double log_w = std::log(sc.L) + v.log_psi + std::log(std::max(v.phi_over_psi, 1e-300));
        const double excess = log_w - sc.log_slice_bound;
        const bool bad = v.phi_over_psi < -1e-12 * p.tau ||
                         excess > 1e-12 * std::max(1.0, std::abs(sc.log_slice_bound));
        note(piv, bad, excess, outer);
    }

    rep.properties = {pi, pii, piii, piv};
    rep.passed = std::all_of(rep.properties.begin(), rep.properties.end(),
                             [](const PropertyResult& r) { return r.passed; });
    return rep;
}

}  // namespace

BarrierParams barrier_params(int d, double lambda, double Lambda, double theta, double tau, bool enforce_opening) {
    check_dim(d);
    require(lambda > 0.0 && lambda <= Lambda && std::isfinite(Lambda), Status::invalid_argument,
            "need 0 < lambda <= Lambda");
    require(tau > 0.0 && std::isfinite(tau), Status::invalid_argument, "tau must be positive");
    require(theta > 0.0 && std::isfinite(theta), Status::invalid_argument, "theta must be positive");
    if (enforce_opening) require(theta >= 0.75, Status::precondition, "barrier needs theta >= 3/4");
    BarrierParams p;
    p.d = d;
    p.lambda = lambda;
    p.Lambda = Lambda;
    p.theta = theta;
    p.tau = tau;
    p.a = std::max((1.0 + d * Lambda * theta) / (2.0 * lambda), theta);
    const double e = std::exp(0.5 - p.a / theta);
    require(1.0 - e > 0.0, Status::internal, "barrier denominator 1 - e^{1/2 - a/theta} is not positive");
    p.b_first = (2.0 * d * Lambda * p.a + 1.0) / (1.0 - e);
    p.b_second = (4.0 * lambda * p.a - 1.0) / e;
    p.b = std::max(p.b_first, p.b_second);
    fill_derived(p);
    require(std::isfinite(p.log_c) && std::isfinite(p.log_beta), Status::internal, "barrier constants not finite");
    return p;
}

BarrierParams with_b(const BarrierParams& p, double b) {
    require(b > 0.0, Status::invalid_argument, "b must be positive");
    BarrierParams q = p;
    q.b = b;
    fill_derived(q);
    return q;
}

bool barrier_domain_contains(const BarrierParams& p, const Point& xt, double slack) {
    const double s = xt.t + p.tau;
    if (!(s > 0.0) || xt.t > 1.0 + slack) return false;
    return p.theta * norm2(xt.x, p.d) <= s * (1.0 + slack) + slack;
}

BarrierValue barrier_eval(const BarrierParams& p, const Point& xt) {
    require(xt.d == p.d, Status::invalid_argument, "point dimension does not match the barrier");
    require(barrier_domain_contains(p, xt, 1e-9), Status::invalid_argument, "point outside the barrier domain");
    BarrierValue v;
    const double s = xt.t + p.tau;
    v.rho = norm2(xt.x, p.d) / s;
    v.log_psi = p.log_c - (p.b + 1.0) * std::log(s) - p.a * v.rho;
    const double gap = -std::expm1(p.a * (v.rho - 1.0 / p.theta));  // 1 - e^{a(rho - 1/theta)}
    v.phi_over_psi = s * gap;
    v.dt_over_psi = -p.b * gap + p.a * v.rho;
    v.eig_radial = 2.0 * p.a * (-1.0 + 2.0 * p.a * v.rho);
    v.eig_tangential = -2.0 * p.a;
    for (int i = 0; i < p.d; ++i)
        for (int j = 0; j < p.d; ++j)
            v.hess_over_psi[i * 3 + j] = 4.0 * p.a * p.a * xt.x[i] * xt.x[j] / s - (i == j ? 2.0 * p.a : 0.0);
    return v;
}

double barrier_phi(const BarrierParams& p, const Point& xt) {
    const double s = xt.t + p.tau;
    const double rho = norm2(xt.x, p.d) / s;
    return std::exp(p.log_c - p.b * std::log(s)) * (std::exp(-p.a * rho) - std::exp(-p.a / p.theta));
}

BarrierReport verify_barrier(const BarrierParams& p, long samples, std::uint64_t seed) {
    Scaling sc;
    sc.origin.d = p.d;
    sc.log_slice_bound = p.log_beta;
    return verify_impl(p, samples, seed, sc);
}

double barrier_fd_check(const BarrierParams& p, long samples, std::uint64_t seed, Point* witness) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double worst = 0.0;
    for (long k = 0; k < samples; ++k) {
        // stay a step away from the lateral wall and the bottom
        const double t = -p.tau + 0.05 * (1.0 + p.tau) + U(rng) * 0.9 * (1.0 + p.tau);
        const double rho = U(rng) * 0.9 / p.theta;
        const Point q = at_rho(p, rho, std::min(t, 0.999), rng);
        const BarrierValue v = barrier_eval(p, q);
        const double psi = std::exp(v.log_psi);
        // steps follow the local scales of phi: s/(b+1) in time, sqrt(s/a) in space
        const double s = q.t + p.tau;
        const double ht = 1e-4 * s / (p.b + 1.0);
        const double h = 1e-4 * std::sqrt(s / p.a);
        auto shifted = [&](int i, double di, int j, double dj, double dt) {
            Point r = q;
            if (i >= 0) r.x[i] += di;
            if (j >= 0) r.x[j] += dj;
            r.t += dt;
            return barrier_phi(p, r);
        };
        const double f0 = barrier_phi(p, q);
        const double scale = std::max(psi, std::abs(f0));
        double err = std::abs((shifted(-1, 0, -1, 0, ht) - shifted(-1, 0, -1, 0, -ht)) / (2 * ht) - v.dt_over_psi * psi);
        for (int i = 0; i < p.d; ++i)
            for (int j = 0; j < p.d; ++j) {
                double fd;
                if (i == j)
                    fd = (shifted(i, h, -1, 0, 0) - 2.0 * f0 + shifted(i, -h, -1, 0, 0)) / (h * h);
                else
                    fd = (shifted(i, h, j, h, 0) - shifted(i, h, j, -h, 0) - shifted(i, -h, j, h, 0) +
                          shifted(i, -h, j, -h, 0)) /
                         (4 * h * h);
                err = std::max(err, std::abs(fd - v.hess_over_psi[i * 3 + j] * psi));
            }
        if (err / scale > worst) {
            worst = err / scale;
            if (witness) *witness = q;
        }
    }
    return worst;
}

BarrierReport verify_rescaled_barrier(int d, double lambda, double Lambda, double alpha, double delta, double h,
                                      const Point& vertex, long samples, std::uint64_t seed) {
    require(h > 0.0 && delta > 0.0 && alpha > 0.0, Status::invalid_argument, "h, delta and alpha must be positive");
    const BarrierParams p = barrier_params(d, lambda, Lambda, alpha, 2.0 * delta, false);
    Scaling sc;
    sc.L = h / 2.0;
    sc.origin = vertex;
    sc.origin.d = d;
    sc.log_slice_bound = p.log_beta + std::log(h);
    return verify_impl(p, samples, seed, sc);
}

nlohmann::json to_json(const BarrierParams& p) {
    return {{"d", p.d},
            {"lambda", p.lambda},
            {"Lambda", p.Lambda},
            {"theta", p.theta},
            {"tau", p.tau},
            {"a", p.a},
            {"b", p.b},
            {"b_first", p.b_first},
            {"b_second", p.b_second},
            {"log_c", p.log_c},
            {"log_beta", p.log_beta},
            {"beta", std::isfinite(p.beta()) ? nlohmann::json(p.beta()) : nlohmann::json(nullptr)},
            {"rho0", p.rho0},
            {"rho0_minus_knee", p.rho0_gap},
            {"rho0_below_knee_strict", p.side_strict},
            {"rho0_below_knee_weak", p.side_weak}};
}

namespace {
nlohmann::json point_json(const Point& q) {
    nlohmann::json x = nlohmann::json::array();
    for (int i = 0; i < q.d; ++i) x.push_back(q.x[i]);
    return {{"x", x}, {"t", q.t}};
}
}  // namespace

nlohmann::json to_json(const BarrierReport& r) {
    nlohmann::json props = nlohmann::json::array();
    for (const auto& pr : r.properties)
        props.push_back({{"name", pr.name},
                         {"passed", pr.passed},
                         {"checked", pr.checked},
                         {"violations", pr.violations},
                         {"worst", pr.worst},
                         {"witness", point_json(pr.witness)}});
    return {{"params", to_json(r.params)}, {"properties", props}, {"margin_i", r.margin_i}, {"passed", r.passed}};
}

}  // namespace prlab
