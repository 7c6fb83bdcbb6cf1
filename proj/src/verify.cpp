#include "verify.hpp"

#include "barrier.hpp"
#include "constants.hpp"
#include "geometry.hpp"
#include "hausdorff.hpp"
#include "operators.hpp"
#include "regularity.hpp"
#include "solver.hpp"

#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>

namespace prlab {

bool Ledger::passed() const { return failures() == 0; }

long Ledger::failures() const {
    return long(std::count_if(checks.begin(), checks.end(), [](const Check& c) { return !c.passed; }));
}

bool Criterion::passed() const {
    return !checks.empty() &&
           std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string strf(const char* f, ...) {
    char buf[1024];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

struct Sink {
    std::vector<Check>& out;
    std::string module;

    void add(const std::string& op, const std::string& name, bool ok, const std::string& detail) {
        out.push_back({module, op, name, ok, detail});
    }
    // wraps a check body so that a thrown error becomes a failed entry
    void guarded(const std::string& op, const std::string& name, const std::function<void()>& body) {
        try {
            body();
        } catch (const std::exception& e) {
            add(op, name, false, std::string("error: ") + e.what());
        }
    }
};

void runtime_check(Sink& s, Clock::time_point t0, double budget) {
    const double el = since(t0);
    s.add("runtime", "budget", el < budget, strf("%.2f s (budget %.0f s)", el, budget));
}

// ---------------- operators ----------------

double aligned_extreme(const SymMat& M, const Ellipticity& e, bool sup) {
    const int d = M.d;
    const Eigen ev = jacobi_eigen(M);
    double best = sup ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
    for (int mask = 0; mask < (1 << d); ++mask) {
        SymMat A(d);
        for (int k = 0; k < d; ++k) {
            const double a = (mask >> k) & 1 ? e.Lambda : e.lambda;
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) A(i, j) += a * ev.vectors[k][i] * ev.vectors[k][j];
        }
        const double v = -trace_product(A, M);
        best = sup ? std::max(best, v) : std::min(best, v);
    }
    return best;
}

void operators_checks(std::vector<Check>& out, std::uint64_t seed) {
    Sink s{out, "operators"};
    const auto t0 = Clock::now();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);

    for (int d = 1; d <= 3; ++d) {
        double worst = 0.0, worst_free = -1.0;
        for (int k = 0; k < 100; ++k) {
            const double lam = 0.2 + 0.8 * U(rng);
            const Ellipticity el{lam, lam * (1.0 + 4.0 * U(rng))};
            const SymMat M = random_sym(d, rng, std::pow(10.0, -1.0 + 2.0 * U(rng)));
            const double sp = aligned_extreme(M, el, true), sm = aligned_extreme(M, el, false);
            const double scale = std::max(1.0, M.max_abs_entry());
            worst = std::max({worst, std::abs(pucci_plus(el, M) - sp) / scale,
                              std::abs(pucci_minus(el, M) - sm) / scale});
            // a rotated admissible A stays inside the extremes
            const auto R = random_rotation(d, rng);
            Vec a{};
            for (int i = 0; i < d; ++i) a[i] = el.lambda + (el.Lambda - el.lambda) * U(rng);
            const double v = -trace_product(from_eigen(d, a, R), M);
            worst_free = std::max({worst_free, (v - pucci_plus(el, M)) / scale, (pucci_minus(el, M) - v) / scale});
        }
        s.add("pucci_plus/pucci_minus", strf("eigenvalue formula vs aligned brute force, d=%d", d), worst <= 1e-9,
              strf("100 matrices, max scaled error %.3g (tol 1e-9)", worst));
        s.add("pucci_plus/pucci_minus", strf("rotated admissible A inside [P-,P+], d=%d", d), worst_free <= 1e-9,
              strf("max scaled excess %.3g", worst_free));
    }

    long bad = 0;
    double worst = -1.0;
    for (int k = 0; k < 1000; ++k) {
        const int d = 1 + int(U(rng) * 3) % 3;
        const double lam = 0.2 + 0.8 * U(rng);
        const Ellipticity e{lam, lam * (1.0 + 4.0 * U(rng))};
        const SymMat M = random_sym(d, rng, 2.0), N = random_sym(d, rng, 2.0);
        const double c[5] = {pucci_minus(e, M) + pucci_minus(e, N), pucci_minus(e, M + N),
                             pucci_minus(e, M) + pucci_plus(e, N), pucci_plus(e, M + N),
                             pucci_plus(e, M) + pucci_plus(e, N)};
        for (int i = 0; i < 4; ++i) {
            const double ex = c[i] - c[i + 1];
            worst = std::max(worst, ex);
            if (ex > 1e-9) ++bad;
        }
    }
    s.add("pucci_plus/pucci_minus", "five-term subadditivity chain", bad == 0,
          strf("1000 random pairs, %ld violations, max excess %.3g", bad, worst));
    runtime_check(s, t0, 5.0);
}

void operators_extra(std::vector<Check>& out, std::uint64_t seed) {
    Sink s{out, "operators"};
    const Ellipticity e{1.0, 3.0};
    for (int d = 1; d <= 3; ++d) {
        SymMat A = SymMat::identity(d, 2.0);
        if (d > 1) A.set(0, 1, 0.5);
        std::vector<OperatorSpec> ops = {OperatorSpec::pucci_plus(e), OperatorSpec::pucci_minus(e),
                                         OperatorSpec::linear(A, e),
                                         OperatorSpec::bellman_min({OperatorSpec::linear(A, e),
                                                                    OperatorSpec::pucci_plus(e)},
                                                                   e)};
        for (const auto& F : ops) {
            const auto r = verify_ellipticity(F, d, 500, seed + d);
            s.add("verify_ellipticity", strf("%s d=%d", kind_name(F.kind).c_str(), d), r.passed,
                  strf("worst margin %.3g", r.worst_margin));
        }
        OperatorSpec F = OperatorSpec::pucci_plus(e);
        F.offset = 0.7;
        const Normalization n = normalize_problem(F, d, 0.0);
        const double resid = eval_operator(n.spec, SymMat(d));
        s.add("normalize_problem", strf("F(aI)=0 after shift, d=%d", d), std::abs(resid) <= 1e-12,
              strf("a=%.6g |F^(0)|=%.3g bound=%.6g", n.a, std::abs(resid), n.bound));
    }
}

// ---------------- geometry ----------------

void geometry_checks(std::vector<Check>& out, std::uint64_t seed) {
    Sink s{out, "geometry"};
    const auto t0 = Clock::now();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);

    {
        long bad = 0;
        double worst = 0.0;
        for (int k = 0; k < 10; ++k) {
            const int d = 1 + k % 3;
            const double th = 0.75 + 4.25 * U(rng), h = 0.1 + 1.9 * U(rng);
            const ParabolicBall g{Point{d, {U(rng), U(rng), U(rng)}, -U(rng)}, th, h, Orientation::Upward};
            const VolumeEstimate v = monte_carlo_volume(g, 1000000, rng);
            const double z = std::abs(v.mean - pball_volume(g)) / v.stderr_;
            worst = std::max(worst, z);
            if (z > 3.0) ++bad;
        }
        s.add("pball_volume", "closed form vs 1e6-sample Monte Carlo", bad == 0,
              strf("10 balls, %ld beyond 3 SE, worst %.2f SE", bad, worst));
    }
    {
        double worst = 0.0;
        for (int k = 0; k < 30; ++k) {
            const int d = 1 + k % 3;
            const ParabolicBall g{Point{d, {U(rng), U(rng), U(rng)}, U(rng)}, 0.75 + 4.25 * U(rng), 0.01 + U(rng),
                                  Orientation::Upward};
            const double eta = std::pow(4.0, -(1.0 + d / 2.0)) * std::pow(std::sqrt(2.0) + 1.0, -d);
            const double r = pball_volume(g) / pball_volume(hat_ball(g));
            worst = std::max({worst, std::abs(r - eta) / eta, std::abs(hat_ratio(d) - eta) / eta});
        }
        s.add("hat_ball", "volume ratio equals eta", worst <= 1e-12, strf("max relative error %.3g", worst));
    }
    {
        long bad_disjoint = 0, bad_cover = 0, bad_inside = 0, tested = 0;
        for (int k = 0; k < 100; ++k) {
            const int d = 1 + k % 3;
            const double th = 0.75 + 1.25 * U(rng);
            std::vector<Point> E;
            std::vector<double> h;
            const int n = 10 + int(U(rng) * 30);
            for (int i = 0; i < n; ++i) {
                Point p{d, {}, -U(rng)};
                for (int a = 0; a < d; ++a) p.x[a] = 2.0 * U(rng) - 1.0;
                E.push_back(p);
                h.push_back(0.01 + 0.5 * U(rng));
            }
            const CoverSelection cs = vitali_select(E, h, th);
            for (std::size_t i = 0; i < cs.selected.size(); ++i)
                for (std::size_t j = i + 1; j < cs.selected.size(); ++j)
                    if (pballs_intersect(cs.selected[i], cs.selected[j])) ++bad_disjoint;
            for (int i = 0; i < n; ++i) {
                ++tested;
                const bool in = std::any_of(cs.hatted.begin(), cs.hatted.end(),
                                            [&](const ParabolicBall& b) { return pball_contains(b, E[i]); });
                if (!in) ++bad_cover;
            }
            // each selected ball sits inside its own hatted ball
            for (std::size_t i = 0; i < cs.selected.size(); ++i)
                for (int m = 0; m < 50; ++m)
                    if (!pball_contains(cs.hatted[i], sample_pball(cs.selected[i], rng))) ++bad_inside;
        }
        s.add("vitali_select", "selected balls pairwise disjoint", bad_disjoint == 0,
              strf("100 instances, %ld intersecting pairs", bad_disjoint));
        s.add("vitali_select", "hatted balls cover E", bad_cover == 0,
              strf("%ld points of E, %ld uncovered", tested, bad_cover));
        s.add("hat_ball", "G inside its hatted ball", bad_inside == 0, strf("%ld sampled points outside", bad_inside));
    }
    {
        long f1 = 0, f2 = 0, f3 = 0, v3 = 0, errs = 0;
        double w1 = 0.0, w3 = 0.0;
        std::string first_err;
        for (int k = 0; k < 100; ++k) {
            const int d = 1 + k % 3;
            const double th = 0.75 + 4.25 * U(rng);
            const ParabolicBall outer{Point{d, {}, 0.0}, th, 1.0, Orientation::Downward};
            const Point xt = sample_pball(outer, rng);
            const double h = (0.05 + 0.95 * U(rng)) * (outer.vertex.t - xt.t);
            try {
                const InteriorCylinderResult c = interior_cylinder(xt, h, th, outer);
                const PropertyCheck p1 = check_p1(c, xt, h, th, outer, 10000, rng);
                const PropertyCheck p2 = check_p2(c, h, th);
                const PropertyCheck p3 = check_p3(c, 10000, rng);
                f1 += !p1.passed;
                f2 += !p2.passed;
                f3 += !p3.passed;
                v3 += p3.violations;
                w1 = std::max(w1, p1.worst);
                w3 = std::max(w3, p3.worst);
            } catch (const std::exception& e) {
                if (first_err.empty()) first_err = e.what();
                ++errs;
            }
        }
        s.add("interior_cylinder", "draws accepted", errs == 0,
              errs ? strf("%ld draws raised: %s", errs, first_err.c_str()) : "100 draws");
        s.add("interior_cylinder", "P1 inclusions", f1 == 0, strf("%ld/100 draws failed, worst excess %.3g", f1, w1));
        s.add("interior_cylinder", "P2 volume ratio >= eta0", f2 == 0, strf("%ld/100 draws failed", f2));
        s.add("interior_cylinder", "P3 nested-ball inclusion", f3 == 0,
              strf("%ld/100 draws failed, %ld violating samples of 1e6, worst reach %.4f r (analytic sup %.4f r)", f3,
                   v3, w3, p3_worst_reach()));
    }
    runtime_check(s, t0, 60.0);
}

// ---------------- barrier ----------------

void barrier_checks(std::vector<Check>& out, std::uint64_t seed) {
    Sink s{out, "barrier"};
    const auto t0 = Clock::now();
    long tuples = 0, failed = 0;
    double min_margin = std::numeric_limits<double>::infinity();
    std::string first;
    for (double th : {0.75, 1.0, 2.0, 5.0})
        for (double L : {1.0, 2.0, 5.0})
            for (int d : {1, 2})
                for (double tau : {0.5, 1.0}) {
                    ++tuples;
                    const BarrierParams p = barrier_params(d, 1.0, L, th, tau);
                    const BarrierReport r = verify_barrier(p, 10000, seed + tuples);
                    min_margin = std::min(min_margin, r.margin_i);
                    const bool ok = r.passed && r.margin_i >= 1.0 - 1e-8;
                    if (!ok) {
                        ++failed;
                        if (first.empty()) {
                            first = strf(" first: theta=%g Lambda=%g d=%d tau=%g", th, L, d, tau);
                            for (const auto& q : r.properties)
                                first += strf(" [%s %ld]", q.name.c_str(), q.violations);
                        }
                    }
                }
    s.add("verify_barrier", "four properties on the parameter sweep", failed == 0,
          strf("%ld tuples, %ld failed, min property-(i) margin %.6g (need >= 1-1e-8)%s", tuples, failed, min_margin,
               first.c_str()));
    const BarrierParams p = barrier_params(1, 1.0, 1.0, 0.75, 1.0);
    const BarrierReport sab = verify_barrier(with_b(p, p.b / 10.0), 10000, seed);
    s.add("verify_barrier", "sabotaged b = b/10 is rejected", !sab.passed,
          strf("property (i) violations %ld of %ld", sab.properties[0].violations, sab.properties[0].checked));
    runtime_check(s, t0, 60.0);
}

void barrier_extra(std::vector<Check>& out, std::uint64_t seed) {
    Sink s{out, "barrier"};
    const BarrierParams p1 = barrier_params(1, 1.0, 1.0, 0.75, 1.0), p2 = barrier_params(2, 1.0, 2.0, 1.0, 0.5);
    const double e1 = barrier_fd_check(p1, 1000, seed), e2 = barrier_fd_check(p2, 1000, seed);
    s.add("barrier_eval", "derivatives vs central differences", std::max(e1, e2) <= 1e-5,
          strf("worst relative error %.3g (d=1), %.3g (d=2)", e1, e2));
    const double beta = 2.0 * std::pow(2.0, p1.b + 1.0) * (std::exp(p1.a * 4.0 / 3.0) - 1.0);
    s.add("barrier_params", "beta closed form at d=1, theta=3/4, tau=1",
          std::abs(std::log(beta) - p1.log_beta) <= 1e-12 * p1.log_beta,
          strf("ln beta %.17g vs %.17g", p1.log_beta, std::log(beta)));
    const ConstantChain c = compute_constants(ConstantInputs{});
    const BarrierReport r =
        verify_rescaled_barrier(1, 1.0, 1.0, c.alpha, c.delta, 0.01, make_point(0.1, -0.3), 10000, seed);
    s.add("verify_rescaled_barrier", "scaled barrier on G_{alpha,h(1/2+delta)}", r.passed,
          strf("margin %.6g", r.margin_i));
}

// ---------------- solver ----------------

double max_error(const GridFunction& u, const Field& f) {
    double e = 0.0;
    for (std::size_t k = 0; k < u.v.size(); ++k) e = std::max(e, std::abs(u.v[k] - f(u.grid.node(k))));
    return e;
}

void solver_checks(std::vector<Check>& out, std::uint64_t seed, int threads) {
    Sink s{out, "solver"};
    const auto t0 = Clock::now();
    s.guarded("solve", "heat-mode convergence order", [&] {
        const OperatorSpec H = OperatorSpec::heat(1);
        const ExactSolution ex = exact_solution("heat_mode", {{"amplitude", 1.0}}, H, 1, 1.0, 0.0);
        double err[2];
        int i = 0;
        for (int nx : {65, 129}) {
            const Grid g = Grid::with_dt(1, nx, 1.0, 0.0, cfl_dt(H, 1, 2.0 / (nx - 1)));
            err[i++] = max_error(solve(problem_from_exact(ex, H), g, {4, threads}), ex.u);
        }
        const double ratio = err[0] / err[1];
        s.add("solve", "heat-mode error ratio dx -> dx/2 in [3.5, 4.5]", ratio >= 3.5 && ratio <= 4.5,
              strf("Linf %.4g (Nx=65), %.4g (Nx=129), ratio %.4f", err[0], err[1], ratio));
    });
    s.guarded("solve", "quadratic battery", [&] {
        double worst = 0.0;
        const Ellipticity e{1.0, 2.0};
        for (int d : {1, 2}) {
            for (const OperatorSpec& F : {OperatorSpec::pucci_plus(e), OperatorSpec::pucci_minus(e), OperatorSpec::heat(d)}) {
                nlohmann::json q = {{"c", 0.25}, {"b", -0.5}, {"p", {0.5, -0.25}}};
                q["M"] = d == 1 ? nlohmann::json{{1.5}} : nlohmann::json{{1.5, 0.25}, {0.25, -0.75}};
                const ExactSolution ex = exact_solution("quadratic", q, F, d, 1.0, 0.0);
                const int nx = d == 1 ? 33 : 17;
                const Grid g = Grid::with_dt(d, nx, 1.0, 0.0, cfl_dt(F, d, 2.0 / (nx - 1)));
                const GridFunction u = solve(problem_from_exact(ex, F), g, {4, threads});
                worst = std::max(worst, max_error(u, ex.u));
            }
        }
        s.add("solve", "quadratic battery reproduced to 1e-12", worst <= 1e-12,
              strf("max nodal error %.3g over Pucci+/Pucci-/heat, d=1,2", worst));
    });
    s.guarded("solve", "discrete comparison principle", [&] {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> U(-1.0, 1.0);
        long bad = 0;
        double worst = 0.0;
        for (int k = 0; k < 20; ++k) {
            const double lam = 0.5 + 0.5 * std::abs(U(rng));
            const Ellipticity e{lam, lam * (1.0 + 2.0 * std::abs(U(rng)))};
            const OperatorSpec F = k % 2 ? OperatorSpec::pucci_plus(e)
                                         : OperatorSpec::bellman_min({OperatorSpec::pucci_minus(e),
                                                                      OperatorSpec::linear(SymMat::identity(1, lam), e)},
                                                                     e);
            const double a1 = U(rng), a2 = U(rng), a3 = U(rng), g0 = U(rng);
            const double c0 = 0.05 + std::abs(U(rng)), c1 = 0.5 * std::abs(U(rng)), w = 1.0 + 3.0 * std::abs(U(rng));
            const Field base = [=](const Point& p) {
                return a1 * std::sin(3.0 * p.x[0]) + a2 * std::abs(p.x[0] - 0.3) + a3 * p.t * p.x[0];
            };
            // v - u >= 0 on the parabolic boundary
            const Field gap = [=](const Point& p) { return c0 * (k % 4 == 0 ? 0.0 : 1.0) + c1 * std::pow(std::cos(w * p.x[0]), 2); };
            const Field gf = [=](const Point&) { return g0; };
            const ProblemSpec P1{F, gf, base, base};
            const Field upper = [=](const Point& p) { return base(p) + gap(p); };
            const ProblemSpec P2{F, gf, upper, upper};
            const Grid g = Grid::with_dt(1, 33, 1.0, 0.0, cfl_dt(F, 1, 2.0 / 32));
            const GridFunction u = solve(P1, g, {4, threads}), v = solve(P2, g, {4, threads});
            for (std::size_t i = 0; i < u.v.size(); ++i) {
                worst = std::max(worst, u.v[i] - v.v[i]);
                if (u.v[i] > v.v[i]) ++bad;
            }
        }
        s.add("solve", "ordered data give ordered solutions", bad == 0,
              strf("20 pairs, %ld inverted nodes, max u-v %.3g", bad, worst));
    });
    runtime_check(s, t0, 120.0);
}

void solver_extra(std::vector<Check>& out, int threads) {
    Sink s{out, "solver"};
    s.guarded("residual", "quadratic residual vanishes", [&] {
        const OperatorSpec F = OperatorSpec::pucci_plus({1.0, 2.0});
        const ExactSolution ex = exact_solution("quadratic", {{"M", {{1.0, 0.5}, {0.5, -1.0}}}, {"b", 0.25}}, F, 2, 1.0, 0.0);
        const Grid g = Grid::with_dt(2, 17, 1.0, 0.0, cfl_dt(F, 2, 0.125));
        const ProblemSpec P = problem_from_exact(ex, F);
        const GridFunction r = residual(sample(g, ex.u), P, {4, threads});
        s.add("residual", "exact quadratic has zero residual", r.sup_abs() <= 1e-12, strf("sup %.3g", r.sup_abs()));
    });
    s.guarded("solve", "thread partition independence", [&] {
        const OperatorSpec F = OperatorSpec::pucci_minus({1.0, 3.0});
        const ExactSolution ex = exact_solution("cusp_space", {{"gamma", 0.5}}, F, 2, 1.0, 0.0);
        const Grid g = Grid::with_dt(2, 17, 1.0, 0.0, cfl_dt(F, 2, 0.125));
        const GridFunction a = solve(problem_from_exact(ex, F), g, {4, 1});
        const GridFunction b = solve(problem_from_exact(ex, F), g, {4, std::max(2, threads)});
        const bool same = std::memcmp(a.v.data(), b.v.data(), a.v.size() * sizeof(double)) == 0;
        s.add("solve", "bitwise identical for 1 and several threads", same, same ? "identical" : "differs");
    });
    s.guarded("cfl_dt", "CFL refusal", [&] {
        const OperatorSpec F = OperatorSpec::heat(1);
        Grid g{1, 33, 3, 1.0, 0.0};
        bool refused = false;
        try {
            solve(problem_from_exact(exact_solution("heat_mode", {}, F, 1, 1.0, 0.0), F), g);
        } catch (const Error& e) {
            refused = e.code() == Status::cfl;
        }
        s.add("cfl_dt", "too large a step is refused", refused, refused ? "refused" : "accepted");
    });
}

// ---------------- regularity ----------------

Grid grid129() {
    Grid g{1, 129, 2, 1.0, 0.0};
    g.nt = int(std::lround(1.0 / (g.dx() * g.dx() / 4.0))) + 1;
    return g;
}

GridFunction solved_pucci(const Grid& g, int threads) {
    const Ellipticity e{1.0, 2.0};
    const OperatorSpec F = OperatorSpec::pucci_plus(e);
    const Field data = [](const Point& p) { return -std::pow(std::abs(p.x[0]), 1.5) + 0.25 * std::sin(2.0 * p.x[0]); };
    const ProblemSpec P{F, [](const Point&) { return 0.0; }, data, data};
    return solve(P, g, {4, threads});
}

void regularity_values(std::vector<Check>& out, std::uint64_t seed, int threads) {
    Sink s{out, "regularity"};
    const auto t0 = Clock::now();
    const Grid g = grid129();
    const double dx = g.dx(), tol = 5.0 * dx;
    const Cylinder D{make_point(0.0, 0.0), 1.0};
    const Point o = make_point(0.0, 0.0);
    const double a = 1.5;

    auto near = [&](const std::string& op, const std::string& name, double v, double want) {
        s.add(op, name, std::abs(v - want) <= tol, strf("%.6g vs %g (tol 5 dx = %.4g)", v, want, tol));
    };
    s.guarded("theta_lower", "analytic examples", [&] {
        const GridFunction neg = sample(g, [&](const Point& p) { return -0.5 * a * p.x[0] * p.x[0]; });
        const GridFunction pos = sample(g, [&](const Point& p) { return 0.5 * a * p.x[0] * p.x[0]; });
        const GridFunction ts = sample(g, [](const Point& p) { return p.t; });
        const GridFunction aff = sample(g, [](const Point& p) { return 0.75 * p.x[0] - 0.25 + 0.5 * p.t; });
        near("theta_lower", "-(a/2)|y|^2 at origin -> a", theta_lower(neg, D, o).value, a);
        near("theta_lower", "(a/2)|y|^2 at origin -> 0", theta_lower(pos, D, o).value, 0.0);
        near("theta_upper", "(a/2)|y|^2 at origin -> a", theta_upper(pos, D, o).value, a);
        near("theta_lower", "u = s at (1/4, 0) -> 1", theta_lower(ts, D, make_point(0.25, 0.0)).value, 1.0);
        near("theta_upper", "affine -> 0", theta_upper(aff, D, o).value, 0.0);
    });
    s.guarded("psi", "analytic examples", [&] {
        const GridFunction cube = sample(g, [](const Point& p) { return std::pow(std::abs(p.x[0]), 3); });
        const GridFunction root = sample(g, [](const Point& p) { return std::pow(std::abs(p.t), 1.5); });
        const PsiResult c = psi(cube, D, o, PsiMode::Certificate);
        const PsiResult b = psi(cube, D, o, PsiMode::BruteForce);
        s.add("psi", "|y|^3 at origin -> 6", std::abs(c.value - 6.0) <= tol,
              strf("certificate %.6g, brute force %.6g vs 6 (tol 5 dx = %.4g)", c.value, b.value, tol));
        near("psi", "|s|^{3/2} at origin -> 6", psi(root, D, o).value, 6.0);
    });
    s.guarded("psi", "quadratics", [&] {
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<int> I(-8, 8);
        double worst = 0.0;
        int bases = 0;
        for (int k = 0; k < 6; ++k) {
            const double b = I(rng) / 8.0, p = I(rng) / 8.0, m = I(rng) / 4.0, c = I(rng) / 8.0;
            const GridFunction u = sample(g, [=](const Point& q) { return c + b * q.t + p * q.x[0] + 0.5 * m * q.x[0] * q.x[0]; });
            for (const Point& base : {o, make_point(0.3125, -0.1875), make_point(-0.5, -0.5)}) {
                worst = std::max(worst, psi(u, D, base).value);
                ++bases;
            }
        }
        s.add("psi", "quadratic -> 0", worst <= 1e-12, strf("%d base points, max Psi %.3g", bases, worst));
    });
    s.guarded("theta_upper", "mirror identity", [&] {
        std::mt19937_64 rng(seed + 1);
        std::uniform_real_distribution<double> U(-1.0, 1.0);
        Grid small{1, 17, 9, 1.0, 0.0};
        const NodeSet all = all_nodes(small);
        long mism = 0, total = 0;
        for (int k = 0; k < 50; ++k) {
            GridFunction u(small);
            for (double& v : u.v) v = U(rng);
            const GridFunction m = negate(u);
            for (int j = 0; j < 5; ++j) {
                const int n = 1 + int(rng() % (small.nt - 1)), i = 1 + int(rng() % (small.nx - 2));
                const std::size_t base = n * small.spatial() + small.join(i, 0);
                const ThetaResult up = theta_upper(u, all, base), lo = theta_lower(m, all, base);
                ++total;
                if (up.value != lo.value) ++mism;
            }
        }
        s.add("theta_upper", "Theta-upper(u) == Theta-lower(-u) bitwise", mism == 0,
              strf("50 random grid functions, %ld/%ld mismatches", mism, total));
    });
    s.guarded("a_kappa_set", "battery", [&] {
        const OperatorSpec F = OperatorSpec::pucci_plus({1.0, 2.0});
        std::vector<std::pair<std::string, GridFunction>> fields;
        fields.emplace_back("zero", GridFunction(g));
        for (const auto& [name, params] : std::vector<std::pair<std::string, nlohmann::json>>{
                 {"heat_mode", {{"amplitude", 0.5}}},
                 {"quadratic", {{"m", -1.0}, {"p", {0.25}}, {"b", 0.5}}},
                 {"cusp_space", {{"gamma", 0.5}}},
                 {"cusp_space", {{"gamma", 0.5}, {"sign", 1.0}}},
                 {"time_ramp", {{"slope", 1.0}}}}) {
            const ExactSolution ex = exact_solution(name, params, F, 1, 1.0, 0.0);
            fields.emplace_back(name + params.dump(), sample(g, ex.u));
        }
        Grid gs = g;
        gs.nt = int(std::lround(1.0 / cfl_dt(F, 1, g.dx()) * 2.0)) + 1;
        fields.emplace_back("solved pucci_plus", solved_pucci(gs, threads));
        for (const auto& [name, u] : fields) {
            const KappaChecks kc = check_a_kappa(u, {1, 2, 4, 8, 16}, KappaMode::Exact, 0.0, 100, 1e-8);
            s.add("a_kappa_set", "monotone in kappa: " + name, kc.monotone_violations == 0,
                  strf("%ld violations over kappa in {1,2,4,8,16}", kc.monotone_violations));
            s.add("a_kappa_set", "inside {Theta-lower <= kappa(1+tol)}: " + name, kc.containment_violations == 0,
                  strf("%ld/%ld members violate, worst Theta/kappa %.12g", kc.containment_violations,
                       kc.containment_checked, kc.containment_worst));
        }
        const KappaSetField z = a_kappa_set(fields[0].second, 2.0);
        long bad = 0;
        for (std::size_t k = 0; k < g.size(); ++k) {
            const Point p = g.node(k);
            if (std::abs(p.x[0]) < 1.0 - 1e-12 && (!z.member[k] || std::abs(z.vertex[k][0] - p.x[0]) > 1e-12)) ++bad;
        }
        s.add("a_kappa_set", "u = 0: every node is a member with vertex y = x", bad == 0, strf("%ld exceptions", bad));
    });
    runtime_check(s, t0, 600.0);
}

void abp_checks(std::vector<Check>& out, int threads) {
    (void)threads;
    Sink s{out, "regularity"};
    const Ellipticity e{1.0, 1.0};
    Grid g{1, 65, 2, 1.0, 0.0};
    g.nt = int(std::lround(1.0 / (g.dx() * g.dx() / 2.0))) + 1;
    const std::vector<std::pair<std::string, Field>> battery = {
        {"zero", [](const Point&) { return 0.0; }},
        {"-0.4x^2+0.2t", [](const Point& p) { return -0.4 * p.x[0] * p.x[0] + 0.2 * p.t; }},
        {"0.2cos(2x)e^t", [](const Point& p) { return 0.2 * std::cos(2.0 * p.x[0]) * std::exp(p.t); }},
        {"-0.15sqrt(0.04+x^2)", [](const Point& p) { return -0.15 * std::sqrt(0.04 + p.x[0] * p.x[0]); }},
    };
    for (const auto& [name, f] : battery) {
        s.guarded("abp_check", name, [&] {
            const GridFunction u = sample(g, f);
            const double L = std::max(0.0, -supersolution_residual_min(u, e));
            double prev = std::numeric_limits<double>::infinity();
            bool mono = true;
            std::string rows;
            bool all = true;
            long jac = 0;
            for (double a : {1.0, 2.0, 4.0}) {
                VertexLattice V;
                V.h_y = g.dx() / 2.0;
                V.y_lo = -15.5 * V.h_y;
                const AbpReport r = abp_check(u, a, L, e, V);
                const JacobianCheck jc = vertex_jacobian_check(u, a, L, e, r.contacts, 1e-6);
                jac += jc.violations;
                all = all && r.holds && r.valid > 0;
                mono = mono && (L > 0.0 ? r.constant < prev : r.constant <= prev);
                prev = r.constant;
                rows += strf(" a=%g: |V|/|W|=%.3g C=%.4g valid %ld/%ld;", a, r.ratio, r.constant, r.valid, r.vertices);
            }
            s.add("abp_check", "|V| <= C|W| with valid vertices, d=1, " + name, all, strf("L=%.3g", L) + rows);
            s.add("abp_check", "constant nonincreasing in a (strict when L > 0), d=1, " + name, mono, "a in {1,2,4}");
            s.add("vertex_map", "Jacobian bound at contacts, d=1, " + name, jac == 0, strf("%ld violations", jac));
        });
    }
    s.guarded("abp_check", "d=2", [&] {
        Grid g2{2, 33, 2, 1.0, 0.0};
        g2.nt = int(std::lround(1.0 / (g2.dx() * g2.dx() / 4.0))) + 1;
        const GridFunction u = sample(g2, [](const Point& p) {
            return 0.2 * std::cos(p.x[0]) * std::cos(2.0 * p.x[1]) * std::exp(0.5 * p.t);
        });
        const double L = std::max(0.0, -supersolution_residual_min(u, e));
        bool all = true, mono = true;
        double prev = std::numeric_limits<double>::infinity();
        std::string rows;
        for (double a : {1.0, 2.0, 4.0}) {
            VertexLattice V;
            V.ny = 10;
            V.ns = 10;
            V.h_y = g2.dx() / 2.0;
            V.y_lo = -4.5 * V.h_y;
            const AbpReport r = abp_check(u, a, L, e, V);
            all = all && r.holds && r.valid > 0;
            mono = mono && (L > 0.0 ? r.constant < prev : r.constant <= prev);
            prev = r.constant;
            rows += strf(" a=%g: |V|/|W|=%.3g C=%.4g valid %ld/%ld;", a, r.ratio, r.constant, r.valid, r.vertices);
        }
        s.add("abp_check", "|V| <= C|W| with valid vertices, d=2, 0.2cos(x)cos(2y)e^{t/2}", all, strf("L=%.3g", L) + rows);
        s.add("abp_check", "constant nonincreasing in a (strict when L > 0), d=2", mono, "a in {1,2,4}");
    });
}

struct DecayField {
    std::string name;
    std::vector<double> values;
    double cell = 0.0;
};

void decay_checks(std::vector<Check>& out, int threads) {
    Sink s{out, "regularity"};
    ConstantInputs in;
    const ConstantChain cc = compute_constants(in);
    Grid g{1, 33, 2, 1.0, 0.0};
    g.nt = int(std::lround(1.0 / (g.dx() * g.dx() / 4.0))) + 1;
    const Cylinder D{make_point(0.0, 0.0), 1.0}, region{make_point(0.0, -0.25), 0.5};
    const OperatorSpec F = OperatorSpec::pucci_plus({1.0, 2.0});

    std::vector<std::pair<std::string, GridFunction>> fields;
    for (double gam : {0.25, 0.5}) {
        const ExactSolution ex = exact_solution("cusp_space", {{"gamma", gam}}, F, 1, 1.0, 0.0);
        fields.emplace_back(strf("cusp gamma=%g", gam), sample(g, ex.u));
    }
    fields.emplace_back("solved pucci_plus", solved_pucci(g, threads));

    for (const auto& [name, u] : fields) {
        s.guarded("survival_and_fit", name, [&] {
            const double supu = u.sup_abs();
            const double L = std::max(0.0, -supersolution_residual_min(u, F.ell));
            const ThetaField tf = theta_field(u, D, region, ThetaMode::Gradient, threads);
            const PsiField pf = psi_field(u, D, region, threads);
            const double nt = supu + L, np = supu + std::abs(eval_operator(F, SymMat(1)));
            std::vector<double> tv, pv;
            for (double v : tf.lower) tv.push_back(v / nt);
            for (double v : pf.value) pv.push_back(v / np);
            const double cell = g.cell_volume();
            for (int which = 0; which < 2; ++which) {
                const auto& vals = which == 0 ? tv : pv;
                const std::string q = which == 0 ? "Theta-lower" : "Psi";
                const SurvivalFit f = survival_and_fit(vals, cell, cc.kappa0, 10, cc.kappa0);
                // Psi bound: {Psi > k} lies in {Theta(u_x) > k / (C1 (1+|g|))}
                const double scale = which == 0 ? 1.0 : cc.C1 * (1.0 + in.g_norm);
                long dominated = 0;
                double worst = 0.0, vmax = 0.0;
                for (double v : vals) vmax = std::max(vmax, v);
                for (const auto& row : f.table) {
                    const double bound = decay_bound(cc, row.kappa, scale);
                    if (row.measure <= bound) ++dominated;
                    worst = std::max(worst, row.measure / bound);
                }
                s.add("survival_and_fit", q + " survival dominated by C(k/k0)^-eps: " + name,
                      dominated == long(f.table.size()),
                      strf("%ld/%zu dyadic kappa in [k0, 2^10 k0], worst ratio %.3g, k0=%.6g, max normalized value %.4g",
                           dominated, f.table.size(), worst, cc.kappa0, vmax));
                const SurvivalFit diag = survival_and_fit(vals, cell, 1.0, 16, 1.0);
                std::string dstr = diag.fitted ? strf("diagnostic fit from kappa=1: eps-hat %.4g on %d points", diag.eps_hat, diag.points)
                                               : "diagnostic fit from kappa=1 refused";
                s.add("survival_and_fit", q + " fitted eps-hat > 0 over kappa >= k0: " + name, f.fitted && f.eps_hat > 0.0,
                      (f.fitted ? strf("eps-hat %.4g", f.eps_hat) : "fit refused: " + f.reason) + "; " + dstr);
            }
        });
    }
}

void bridge_checks(std::vector<Check>& out, int threads) {
    (void)threads;
    Sink s{out, "regularity"};
    const Ellipticity e{1.0, 2.0};
    ConstantInputs in;
    const ConstantChain cc = compute_constants(in);
    const int nx = 65;
    for (int which = 0; which < 2; ++which) {
        const OperatorSpec F = which == 0 ? OperatorSpec::heat(1) : OperatorSpec::pucci_plus(e);
        const std::string name = which == 0 ? "heat, g=0" : "pucci_plus (1,2), g=0.5 sin x";
        s.guarded("assemble_expansion", name, [&] {
            const ExactSolution ex = exact_solution("heat_mode", {{"amplitude", 1.0}}, OperatorSpec::heat(1), 1, 1.0, 0.0);
            ProblemSpec P = problem_from_exact(ex, F);
            double gnorm = 0.0;
            if (which == 1) {
                P.g = [](const Point& p) { return 0.5 * std::sin(p.x[0]); };
                gnorm = 1.0;  // sup|g| + Lip(g)
            }
            const Grid g = Grid::with_dt(1, nx, 1.0, 0.0, cfl_dt(F, 1, 2.0 / (nx - 1)));
            const GridFunction u = solve(P, g);
            const Cylinder D{make_point(0.0, 0.0), 0.75}, region{make_point(0.0, -0.25), 0.5};
            const NodeSet Dn = domain_nodes(g, D);
            const auto ux = spatial_derivatives(u);
            long ok = 0, tot = 0;
            double worst = 0.0, bmax = 0.0;
            const auto bases = nodes_in(g, region);
            for (std::size_t i = 0; i < bases.size(); i += 7) {
                const std::size_t k = bases[i];
                if (!is_interior(g, k)) continue;
                const ThetaResult lo = theta_lower(ux[0], Dn, k), up = theta_upper(ux[0], Dn, k);
                const double kap = std::max(lo.value, up.value);
                const QuadraticExpansion E = assemble_expansion(u, k, {lo.p}, F, P.g);
                const PsiResult ps = psi_given(u, Dn, k, E);
                const double bound = cc.C1 * (1.0 + gnorm) * kap;
                ++tot;
                if (ps.value <= bound) ++ok;
                worst = std::max(worst, ps.value / std::max(bound, 1e-300));
                const double bb = std::abs(E.b) - (e.Lambda * E.M.spectral_norm() + 0.5);
                bmax = std::max(bmax, bb);
            }
            const double frac = tot ? double(ok) / tot : 0.0;
            s.add("assemble_expansion", "Psi <= C1(1+|g|)|kappa| at >= 95% of bases: " + name, frac >= 0.95,
                  strf("%ld/%ld bases (%.1f%%), worst Psi/bound %.3g, C1=%.6g", ok, tot, 100.0 * frac, worst, cc.C1));
            const DirectionalCheck dc = directional_derivative_check(u, Vec{1.0, 0.0, 0.0}, gnorm, e);
            s.add("directional_derivative_check", "u_x inequalities: " + name, dc.violations == 0,
                  strf("%ld/%ld violations, tol %.3g", dc.violations, dc.checked, dc.tol));
        });
    }
}

void regularity_extra(std::vector<Check>& out, int threads) {
    Sink s{out, "regularity"};
    s.guarded("inf_convolution", "|x| closed form and oracle", [&] {
        Grid g{1, 65, 3, 1.0, 0.0};
        const GridFunction u = sample(g, [](const Point& p) { return std::abs(p.x[0]); });
        const double eps = 8.0 * g.dx();
        const GridFunction fast = inf_convolution(u, eps), brute = inf_convolution_brute(u, eps);
        double e1 = 0.0, e2 = 0.0, above = 0.0;
        for (std::size_t k = 0; k < g.size(); ++k) {
            const double x = std::abs(g.node(k).x[0]);
            const double ex = x >= eps / 4.0 ? x - eps / 8.0 : 2.0 * x * x / eps;
            e1 = std::max(e1, std::abs(fast.v[k] - ex));
            e2 = std::max(e2, std::abs(fast.v[k] - brute.v[k]));
            above = std::max(above, fast.v[k] - u.v[k]);
        }
        s.add("inf_convolution", "closed form for |x|", e1 <= 1e-12, strf("max error %.3g", e1));
        s.add("inf_convolution", "separable passes match brute force", e2 <= 1e-12, strf("max difference %.3g", e2));
        s.add("inf_convolution", "u_eps <= u", above <= 0.0, strf("max excess %.3g", above));
    });
    s.guarded("theta_lower", "fast vs lattice oracle", [&] {
        Grid g{1, 33, 2, 1.0, 0.0};
        g.nt = int(std::lround(1.0 / (g.dx() * g.dx() / 4.0))) + 1;
        const Cylinder D{make_point(0.0, 0.0), 1.0};
        const GridFunction u = sample(g, [](const Point& p) { return std::cos(1.5 * p.x[0]) * std::exp(0.5 * p.t); });
        double gap = 0.0;
        bool order = true;
        for (const Point& b : {make_point(0.0, 0.0), make_point(0.25, -0.25), make_point(-0.5, -0.125)}) {
            const double f = theta_lower(u, D, b, ThetaMode::Gradient).value, l = theta_lower(u, D, b, ThetaMode::Lattice).value;
            order = order && f >= l && l >= 0.0;
            gap = std::max(gap, (f - l) / std::max(f, 1e-300));
        }
        s.add("theta_lower", "gradient >= lattice >= 0, gap <= 5%", order && gap <= 0.05, strf("max relative gap %.3g", gap));
    });
    (void)threads;
}

// ---------------- constants ----------------

void constants_checks(std::vector<Check>& out) {
    Sink s{out, "constants"};
    long tuples = 0, nonpos = 0, eps_bad = 0, t1 = 0, s0 = 0, strict = 0, weak = 0, spread = 0, repro = 0;
    std::string strict_list;
    for (double th : {0.75, 1.0, 2.0, 5.0})
        for (int d : {1, 2, 3})
            for (double L : {1.0, 2.0, 5.0}) {
                ConstantInputs in;
                in.d = d;
                in.Lambda = L;
                in.theta = th;
                in.R = default_R(d, th);
                const ConstantChain c = compute_constants(in);
                ++tuples;
                for (const ChainEntry& e : c.entries()) {
                    const bool pos = std::isfinite(e.log_value) || (e.value > 0.0 && std::isfinite(e.value));
                    if (!pos || (std::isfinite(e.value) && e.value <= 0.0)) ++nonpos;
                }
                if (!(c.epsilon > 0.0 && c.epsilon < 1.0) || !(c.sigma * c.eta > 0.0 && c.sigma * c.eta < 1.0)) ++eps_bad;
                t1 += !c.side.t1_h1_ok;
                s0 += !c.side.s0_ok;
                spread += !c.side.spread_ok;
                weak += !c.side.rho0_weak;
                if (!c.side.rho0_strict) {
                    ++strict;
                    if (strict <= 4) strict_list += strf(" (theta=%g,d=%d,Lambda=%g gap %.3g)", th, d, L, c.side.rho0_gap);
                }
                const std::string j1 = to_json(c).dump(), j2 = to_json(compute_constants(in)).dump();
                if (j1 != j2) ++repro;
            }
    s.add("compute_constants", "all links positive and finite (log form)", nonpos == 0,
          strf("%ld tuples, %ld bad links", tuples, nonpos));
    s.add("compute_constants", "epsilon and sigma*eta in (0,1)", eps_bad == 0, strf("%ld tuples out of range", eps_bad));
    s.add("compute_constants", "T1 + H1 < 0", t1 == 0, strf("%ld/%ld tuples fail", t1, tuples));
    s.add("compute_constants", "s0 > -1", s0 == 0, strf("%ld/%ld tuples fail", s0, tuples));
    s.add("compute_constants", "spread dR^2/theta <= 1/6", spread == 0, strf("%ld/%ld tuples fail", spread, tuples));
    s.add("compute_constants", "rho0 < 1/(2a) strict", strict == 0,
          strf("%ld/%ld tuples have rho0 = 1/(2a) (weak form fails on %ld)%s", strict, tuples, weak, strict_list.c_str()));
    s.add("compute_constants", "chain output bit-reproducible", repro == 0, strf("%ld tuples differ", repro));
}

void constants_extra(std::vector<Check>& out, std::uint64_t seed) {
    Sink s{out, "constants"};
    const ConstantChain c = compute_constants(ConstantInputs{});
    auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(b); };
    s.add("compute_constants", "golden values d=1, theta=3/4, R=0.06",
          rel(c.epsilon, 7.2692009301798635e-9) <= 1e-12 && rel(c.C_w2, 7.6806055908257488) <= 1e-12 &&
              rel(c.C1, 3841.1666666666667) <= 1e-15 && rel(c.kappa0, 88888.888888888889) <= 1e-15,
          strf("eps %.17g C_w2 %.17g C1 %.17g kappa0 %.17g", c.epsilon, c.C_w2, c.C1, c.kappa0));
    const VolumeEstimate mc = c_vol_monte_carlo(1, 0.75, 2000000, seed);
    s.add("c_vol_monte_carlo", "derived c_vol vs Monte Carlo (1e-3 relative)", rel(mc.mean, c.c_vol) <= 1e-3,
          strf("MC %.6g +- %.2g, derived %.6g", mc.mean, mc.stderr_, c.c_vol));
    ConstantInputs a, b;
    a.Lambda = 1.0;
    b.Lambda = 2.0;
    const ConstantChain ca = compute_constants(a), cb = compute_constants(b);
    s.add("compute_constants", "sigma and epsilon decrease in Lambda", cb.sigma < ca.sigma && cb.epsilon < ca.epsilon,
          strf("eps %.4g -> %.4g", ca.epsilon, cb.epsilon));
    bool refused = false;
    try {
        ConstantInputs bad;
        bad.R = 0.2;
        compute_constants(bad);
    } catch (const Error& e) {
        refused = e.code() == Status::precondition;
    }
    s.add("compute_constants", "R bound violation refused", refused, refused ? "refused" : "accepted");
}

// ---------------- hausdorff ----------------

void hausdorff_checks(std::vector<Check>& out) {
    Sink s{out, "hausdorff"};
    const std::vector<double> radii = {1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64};
    auto within = [&](const std::string& name, const PointSet& E, double want, const std::vector<double>& r, int d) {
        const CoverReport c = box_dimension(E, r);
        const auto band = classical_band(c.dimension, d);
        s.add("box_dimension", name, std::abs(c.dimension - want) <= 0.2 && c.monotone && !c.degenerate,
              strf("dimension %.4f vs %g (counts %ld..%ld), band [%.4f, %.4f]", c.dimension, want, c.rows.front().count,
                   c.rows.back().count, band.first, band.second));
        s.add("classical_band", name + " band exact", band.first == c.dimension - 1.0 && band.second == 0.5 * (c.dimension + d),
              "[H-1, (H+d)/2]");
    };
    {
        PointSet E;
        const int n = 1 << 16;
        for (int i = 0; i < n; ++i) E.push_back(make_point(0.0, -1.0 + (i + 0.5) / n));
        within("time segment {0}x[-1,0], d=1 -> 2", E, 2.0, radii, 1);
    }
    {
        PointSet E;
        const int n = 512;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const Point p = make_point(-1.0 + (i + 0.5) * 2.0 / n, -1.0 + (j + 0.5) * 2.0 / n, -1e-9);
                if (norm2(p.x, 2) < 1.0) E.push_back(p);
            }
        within("spatial slice B_1 x {0}, d=2 -> 2", E, 2.0, radii, 2);
    }
    {
        PointSet E;
        const int nx = 256, nt = 4096 * 2;
        for (int i = 0; i < nx; ++i)
            for (int n = 0; n < nt; ++n) E.push_back(make_point(-1.0 + (i + 0.5) * 2.0 / nx, -1.0 + (n + 0.5) / nt));
        within("full cylinder, d=1 -> 3", E, 3.0, {1.0 / 4, 1.0 / 8, 1.0 / 16, 1.0 / 32}, 1);
    }
    {
        PointSet E;
        const double r = 1.0 / 16;
        const int nx = 2 * 32, nt = 2 * 256;
        for (int i = 0; i < nx; ++i)
            for (int j = 0; j < nx; ++j)
                for (int n = 0; n < nt; ++n) {
                    const Point p = make_point(-1.0 + (i + 0.5) * r / 2, -1.0 + (j + 0.5) * r / 2, -1.0 + (n + 0.5) * r * r / 2);
                    if (norm2(p.x, 2) < 1.0) E.push_back(p);
                }
        within("full cylinder, d=2 -> 4", E, 4.0, {1.0 / 2, 1.0 / 4, 1.0 / 8, 1.0 / 16}, 2);
    }
}

void hausdorff_extra(std::vector<Check>& out) {
    Sink s{out, "hausdorff"};
    Grid g{1, 65, 2, 1.0, 0.0};
    g.nt = int(std::lround(1.0 / (g.dx() * g.dx() / 2.0))) + 1;
    PsiField f;
    f.grid = g;
    for (std::size_t k = 0; k < g.size(); ++k) {
        f.nodes.push_back(k);
        f.value.push_back(0.0);
    }
    const std::vector<double> radii = {0.04, 0.03, 0.02};
    const auto flat = singular_set(f, 1e-3, radii);
    s.add("singular_set", "Psi = 0 -> empty at every r",
          std::all_of(flat.begin(), flat.end(), [](const PointSet& E) { return E.empty(); }), "3 radii");
    for (std::size_t i = 0; i < f.nodes.size(); ++i)
        f.value[i] = std::abs(g.node(f.nodes[i]).x[0]) < 1e-12 ? 1e30 : 0.0;
    const auto spike = singular_set(f, 1e-3, {0.02, 0.01});
    bool column = true;
    for (const auto& E : spike)
        for (const Point& p : E) column = column && std::abs(p.x[0]) < 1e-12;
    s.add("singular_set", "spike column -> that column only", column, strf("%zu / %zu nodes", spike[0].size(), spike[1].size()));
    for (std::size_t i = 0; i < f.nodes.size(); ++i) f.value[i] = 1.0 / (1e-3 + std::abs(g.node(f.nodes[i]).x[0]));
    const auto lo = singular_set(f, 1e-2, {0.03}), hi = singular_set(f, 4e-2, {0.03});
    s.add("singular_set", "larger delta gives a smaller set", hi[0].size() <= lo[0].size(),
          strf("%zu <= %zu", hi[0].size(), lo[0].size()));
    bool rejected = false;
    try {
        singular_set(f, 1e-3, {0.05});
    } catch (const Error& e) {
        rejected = e.code() == Status::invalid_argument;
    }
    s.add("singular_set", "r >= 1/20 rejected", rejected, rejected ? "rejected" : "accepted");
}

const char* kTitles[kCriteria] = {
    "Pucci correctness",
    "Geometry exactness",
    "Barrier certification",
    "Solver order",
    "Regularity quantities",
    "ABP inequality",
    "Constant chain",
    "Decay estimates",
    "Dimension estimator",
    "Expansion bridge",
};

}  // namespace

Criterion run_criterion(int id, std::uint64_t seed, int threads) {
    require(id >= 1 && id <= kCriteria, Status::invalid_argument, "criterion id must lie in 1..10");
    Criterion c;
    c.id = id;
    c.title = kTitles[id - 1];
    const auto t0 = Clock::now();
    try {
        switch (id) {
        case 1: operators_checks(c.checks, seed); c.budget = 5; break;
        case 2: geometry_checks(c.checks, seed); c.budget = 60; break;
        case 3: barrier_checks(c.checks, seed); c.budget = 60; break;
        case 4: solver_checks(c.checks, seed, threads); c.budget = 120; break;
        case 5: regularity_values(c.checks, seed, threads); c.budget = 600; break;
        case 6: abp_checks(c.checks, threads); break;
        case 7: constants_checks(c.checks); break;
        case 8: decay_checks(c.checks, threads); break;
        case 9: hausdorff_checks(c.checks); break;
        case 10: bridge_checks(c.checks, threads); break;
        }
    } catch (const std::exception& e) {
        c.checks.push_back({"verify", "run_criterion", "criterion raised", false, e.what()});
    }
    c.seconds = since(t0);
    return c;
}

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = {"geometry", "operators", "solver", "regularity",
                                                   "barrier", "constants", "hausdorff", "all"};
    return names;
}

Ledger verify_suite(const std::string& suite, std::uint64_t seed, int threads) {
    const auto& names = suite_names();
    require(std::find(names.begin(), names.end(), suite) != names.end(), Status::invalid_argument,
            "unknown suite '" + suite + "'");
    Ledger l;
    l.suite = suite;
    l.seed = seed;
    const auto t0 = Clock::now();
    auto want = [&](const char* m) { return suite == "all" || suite == m; };
    auto guard = [&](const char* m, const std::function<void()>& f) {
        try {
            f();
        } catch (const std::exception& e) {
            l.checks.push_back({m, "verify_suite", "suite raised", false, e.what()});
        }
    };
    if (want("operators")) guard("operators", [&] {
        operators_checks(l.checks, seed);
        operators_extra(l.checks, seed);
    });
    if (want("geometry")) guard("geometry", [&] { geometry_checks(l.checks, seed); });
    if (want("solver")) guard("solver", [&] {
        solver_checks(l.checks, seed, threads);
        solver_extra(l.checks, threads);
    });
    if (want("barrier")) guard("barrier", [&] {
        barrier_checks(l.checks, seed);
        barrier_extra(l.checks, seed);
    });
    if (want("constants")) guard("constants", [&] {
        constants_checks(l.checks);
        constants_extra(l.checks, seed);
    });
    if (want("regularity")) guard("regularity", [&] {
        regularity_values(l.checks, seed, threads);
        abp_checks(l.checks, threads);
        decay_checks(l.checks, threads);
        bridge_checks(l.checks, threads);
        regularity_extra(l.checks, threads);
    });
    if (want("hausdorff")) guard("hausdorff", [&] {
        hausdorff_checks(l.checks);
        hausdorff_extra(l.checks);
    });
    l.seconds = since(t0);
    return l;
}

nlohmann::json to_json(const Check& c) {
    return {{"module", c.module}, {"op", c.op}, {"check", c.name}, {"passed", c.passed}, {"detail", c.detail}};
}

nlohmann::json to_json(const Ledger& l) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& c : l.checks) a.push_back(to_json(c));
    return {{"suite", l.suite}, {"seed", l.seed}, {"passed", l.passed()}, {"failures", l.failures()},
            {"checks", a}, {"seconds", l.seconds}};
}

nlohmann::json to_json(const Criterion& c) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& k : c.checks) a.push_back(to_json(k));
    return {{"criterion", c.id}, {"title", c.title}, {"passed", c.passed()}, {"checks", a}, {"seconds", c.seconds}};
}

}  // namespace prlab
