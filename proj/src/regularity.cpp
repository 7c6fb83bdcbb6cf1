#include "regularity.hpp"

#include "parallel.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>

namespace prlab {

double QuadraticExpansion::operator()(const Point& q) const {
    const int d = base.d;
    Vec dx{};
    for (int i = 0; i < d; ++i) dx[i] = q.x[i] - base.x[i];
    return c + b * (q.t - base.t) + dot(p, dx, d) + 0.5 * quad_form(M, dx);
}

double Paraboloid::operator()(const Point& q) const {
    const double v =
        -0.5 * opening * dist2(q.x, vertex.x, vertex.d) + opening * (q.t - vertex.t);
    return sign == ParaboloidSign::Concave ? v : -v;
}

NodeSet domain_nodes(const Grid& g, const Cylinder& q) { return NodeSet{nodes_in(g, q)}; }

NodeSet all_nodes(const Grid& g) {
    NodeSet s;
    s.idx.resize(g.size());
    for (std::size_t k = 0; k < s.idx.size(); ++k) s.idx[k] = k;
    return s;
}

std::size_t node_at(const Grid& g, const Point& p) {
    const std::size_t k = nearest_node(g, p);
    const Point q = g.node(k);
    bool exact = std::abs(q.t - p.t) <= 1e-9 * g.dt();
    for (int i = 0; i < g.d; ++i) exact = exact && std::abs(q.x[i] - p.x[i]) <= 1e-9 * g.dx();
    require(exact, Status::invalid_argument, "base point is not a grid node");
    return k;
}

Vec centered_gradient(const GridFunction& u, std::size_t idx) {
    const Grid& g = u.grid;
    const std::size_t S = g.spatial();
    const std::size_t s = idx % S;
    require(!g.on_lateral(s), Status::precondition, "gradient stencil leaves the grid");
    const std::size_t stride[2] = {g.d == 1 ? 1u : std::size_t(g.nx), 1u};
    Vec p{};
    for (int i = 0; i < g.d; ++i) p[i] = (u.v[idx + stride[i]] - u.v[idx - stride[i]]) / (2.0 * g.dx());
    return p;
}

namespace {

bool in_set(const NodeSet& D, std::size_t k) { return std::binary_search(D.idx.begin(), D.idx.end(), k); }

// Domain nodes with time level <= that of base.
std::size_t past_end(const Grid& g, const NodeSet& D, std::size_t base) {
    const std::size_t S = g.spatial();
    const std::size_t last = (base / S + 1) * S;
    return std::size_t(std::lower_bound(D.idx.begin(), D.idx.end(), last) - D.idx.begin());
}

std::pair<double, std::size_t> theta_fixed_p(const GridFunction& u, double sign, const NodeSet& D,
                                             std::size_t base, const Vec& p) {
    const Grid& g = u.grid;
    const int d = g.d;
    const Point xb = g.node(base);
    const double ub = sign * u.v[base];
    const std::size_t end = past_end(g, D, base);
    double best = 0.0;
    std::size_t arg = base;
    for (std::size_t m = 0; m < end; ++m) {
        const std::size_t k = D.idx[m];
        if (k == base) continue;
        const Point q = g.node(k);
        double lin = 0.0;
        for (int i = 0; i < d; ++i) lin += p[i] * (q.x[i] - xb.x[i]);
        const double den = 0.5 * dist2(q.x, xb.x, d) + (xb.t - q.t);
        const double r = (ub + lin - sign * u.v[k]) / den;
        if (r > best) {
            best = r;
            arg = k;
        }
    }
    return {best, arg};
}

ThetaResult theta_impl(const GridFunction& u, double sign, const NodeSet& D, std::size_t base, ThetaMode mode,
                       const Vec* given) {
    require(in_set(D, base), Status::precondition, "base node is outside the domain");
    ThetaResult r;
    if (mode == ThetaMode::GivenP) {
        require(given != nullptr, Status::invalid_argument, "GivenP mode needs p");
        r.p = *given;
    } else {
        r.p = centered_gradient(u, base);
        for (int i = 0; i < u.grid.d; ++i) r.p[i] *= sign;
    }
    auto [v, w] = theta_fixed_p(u, sign, D, base, r.p);
    r.value = v;
    r.witness = w;
    if (mode != ThetaMode::Lattice) return r;
    const int d = u.grid.d;
    const double h = std::max(v, 1.0) * u.grid.dx() / 2.0;
    const Vec pc = r.p;
    int total = 1;
    for (int i = 0; i < d; ++i) total *= 11;
    for (int code = 0; code < total; ++code) {
        Vec p = pc;
        int c = code;
        for (int i = 0; i < d; ++i) {
            p[i] += (c % 11 - 5) * h;
            c /= 11;
        }
        auto [vv, ww] = theta_fixed_p(u, sign, D, base, p);
        if (vv < r.value) {
            r.value = vv;
            r.witness = ww;
            r.p = p;
        }
    }
    return r;
}

}  // namespace

ThetaResult theta_lower(const GridFunction& u, const NodeSet& domain, std::size_t base, ThetaMode mode,
                        const Vec* given_p) {
    return theta_impl(u, 1.0, domain, base, mode, given_p);
}

ThetaResult theta_lower(const GridFunction& u, const Cylinder& domain, const Point& base, ThetaMode mode) {
    require(mode != ThetaMode::GivenP, Status::invalid_argument, "GivenP needs the node-set overload");
    return theta_lower(u, domain_nodes(u.grid, domain), node_at(u.grid, base), mode);
}

ThetaResult theta_upper(const GridFunction& u, const NodeSet& domain, std::size_t base, ThetaMode mode) {
    require(mode != ThetaMode::GivenP, Status::invalid_argument, "upper opening takes no given p");
    return theta_impl(u, -1.0, domain, base, mode, nullptr);
}

ThetaResult theta_upper(const GridFunction& u, const Cylinder& domain, const Point& base, ThetaMode mode) {
    return theta_upper(u, domain_nodes(u.grid, domain), node_at(u.grid, base), mode);
}

namespace {
std::vector<std::size_t> field_bases(const Grid& g, const NodeSet& D, const Cylinder& region, bool need_past) {
    std::vector<std::size_t> out;
    const std::size_t S = g.spatial();
    for (std::size_t k : nodes_in(g, region)) {
        if (g.on_lateral(k % S) || !in_set(D, k)) continue;
        if (need_past && k < S) continue;
        out.push_back(k);
    }
    return out;
}
}  // namespace

ThetaField theta_field(const GridFunction& u, const Cylinder& domain, const Cylinder& region, ThetaMode mode,
                       int threads) {
    const NodeSet D = domain_nodes(u.grid, domain);
    ThetaField f;
    f.grid = u.grid;
    f.nodes = field_bases(u.grid, D, region, false);
    const std::size_t n = f.nodes.size();
    f.lower.resize(n);
    f.upper.resize(n);
    f.theta.resize(n);
    f.p_lower.resize(n);
    parallel_for(n, threads, [&](std::size_t i) {
        const ThetaResult lo = theta_lower(u, D, f.nodes[i], mode);
        const ThetaResult up = theta_upper(u, D, f.nodes[i], mode);
        f.lower[i] = lo.value;
        f.upper[i] = up.value;
        f.theta[i] = std::max(lo.value, up.value);
        f.p_lower[i] = lo.p;
    });
    return f;
}

// ---- Psi ----

QuadraticExpansion derivative_expansion(const GridFunction& u, std::size_t base, int directions) {
    const Grid& g = u.grid;
    const std::size_t S = g.spatial();
    require(base >= S, Status::precondition, "Psi base needs a previous time level");
    QuadraticExpansion e;
    e.base = g.node(base);
    e.c = u.v[base];
    e.p = centered_gradient(u, base);
    e.M = discrete_hessian(u, int(base / S), base % S, directions);
    e.b = (u.v[base] - u.v[base - S]) / g.dt();
    return e;
}

PsiResult psi_given(const GridFunction& u, const NodeSet& D, std::size_t base, const QuadraticExpansion& e) {
    require(in_set(D, base), Status::precondition, "base node is outside the domain");
    const Grid& g = u.grid;
    const int d = g.d;
    const Point xb = g.node(base);
    const std::size_t end = past_end(g, D, base);
    PsiResult r;
    r.cert = e;
    r.witness = base;
    for (std::size_t m = 0; m < end; ++m) {
        const std::size_t k = D.idx[m];
        if (k == base) continue;
        const Point q = g.node(k);
        const double dx = std::sqrt(dist2(q.x, xb.x, d));
        const double den = dx * dx * dx + std::pow(xb.t - q.t, 1.5);
        const double ratio = std::abs(u.v[k] - e(q)) / den;
        if (ratio > r.raw) {
            r.raw = ratio;
            r.witness = k;
        }
    }
    r.value = 6.0 * r.raw;
    return r;
}

PsiResult psi(const GridFunction& u, const NodeSet& D, std::size_t base, PsiMode mode, double floor) {
    const QuadraticExpansion e0 = derivative_expansion(u, base);
    PsiResult best = psi_given(u, D, base, e0);
    if (mode == PsiMode::Certificate) return best;
    const int d = u.grid.d;
    require(d <= 2, Status::invalid_argument, "brute-force Psi supports d <= 2");
    if (floor <= 0.0) floor = u.grid.dx();
    const int K = d == 1 ? 2 : 1;
    // scalars: b, p_i, M_ij (i <= j)
    std::vector<double> base_vals{e0.b};
    for (int i = 0; i < d; ++i) base_vals.push_back(e0.p[i]);
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) base_vals.push_back(e0.M(i, j));
    const int n = int(base_vals.size());
    const int span = 2 * K + 1;
    long total = 1;
    for (int k = 0; k < n; ++k) total *= span;
    for (long code = 0; code < total; ++code) {
        long c = code;
        std::vector<double> v(n);
        for (int k = 0; k < n; ++k) {
            const int step = int(c % span) - K;
            c /= span;
            v[k] = base_vals[k] + step * std::max(std::abs(base_vals[k]), floor) / K;
        }
        QuadraticExpansion e = e0;
        int k = 0;
        e.b = v[k++];
        for (int i = 0; i < d; ++i) e.p[i] = v[k++];
        for (int i = 0; i < d; ++i)
            for (int j = i; j < d; ++j) e.M.set(i, j, v[k++]);
        const PsiResult r = psi_given(u, D, base, e);
        if (r.raw < best.raw) best = r;
    }
    return best;
}

PsiResult psi(const GridFunction& u, const Cylinder& domain, const Point& base, PsiMode mode) {
    const NodeSet D = domain_nodes(u.grid, domain);
    const std::size_t k = node_at(u.grid, base);
    require(parabolic_boundary_distance(domain, base) > 0.0, Status::precondition,
            "Psi base lies on the parabolic boundary");
    return psi(u, D, k, mode);
}

PsiField psi_field(const GridFunction& u, const Cylinder& domain, const Cylinder& region, int threads) {
    const NodeSet D = domain_nodes(u.grid, domain);
    PsiField f;
    f.grid = u.grid;
    f.nodes = field_bases(u.grid, D, region, true);
    f.value.resize(f.nodes.size());
    f.cert.resize(f.nodes.size());
    parallel_for(f.nodes.size(), threads, [&](std::size_t i) {
        const PsiResult r = psi(u, D, f.nodes[i], PsiMode::Certificate);
        f.value[i] = r.value;
        f.cert[i] = r.cert;
    });
    return f;
}

double psi_certificate_defect(const GridFunction& u, const NodeSet& D, std::size_t base, const PsiResult& r) {
    const Grid& g = u.grid;
    const Point xb = g.node(base);
    const std::size_t end = past_end(g, D, base);
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < end; ++m) {
        const std::size_t k = D.idx[m];
        if (k == base) continue;
        const Point q = g.node(k);
        const double dx = std::sqrt(dist2(q.x, xb.x, g.d));
        const double den = dx * dx * dx + std::pow(xb.t - q.t, 1.5);
        worst = std::max(worst, std::abs(u.v[k] - r.cert(q)) - r.raw * den);
    }
    return worst;
}

// ---- A_kappa ----

std::size_t KappaSetField::count() const { return std::size_t(std::count(member.begin(), member.end(), 1)); }

namespace {

KappaSetField a_kappa_exact(const GridFunction& u, double kappa) {
    const Grid& g = u.grid;
    require(g.d == 1, Status::invalid_argument, "exact A_kappa is one-dimensional; use lattice mode");
    const int nx = g.nx;
    KappaSetField f;
    f.kappa = kappa;
    f.mode = KappaMode::Exact;
    f.member.assign(g.size(), 0);
    f.vertex.assign(g.size(), Vec{});
    std::vector<double> V(nx, std::numeric_limits<double>::infinity());
    std::vector<double> xs(nx);
    for (int i = 0; i < nx; ++i) xs[i] = g.x(i);
    double scale = 1.0;
    for (double x : u.v) scale = std::max(scale, std::abs(x));
    scale += kappa * (1.0 + g.rho * g.rho + std::abs(g.t0));
    f.tol = 1e-13 * scale;
    std::vector<int> hull;
    std::vector<unsigned char> attains(nx);
    for (int n = 0; n < g.nt; ++n) {
        const double t = g.t(n);
        for (int i = 0; i < nx; ++i) {
            const double v = u.at(n, i) + kappa * (0.5 * xs[i] * xs[i] - t);
            attains[i] = v <= V[i];
            V[i] = std::min(V[i], v);
        }
        hull.clear();
        for (int i = 0; i < nx; ++i) {
            while (hull.size() >= 2) {
                const int a = hull[hull.size() - 2], b = hull.back();
                const double cross = (xs[b] - xs[a]) * (V[i] - V[a]) - (V[b] - V[a]) * (xs[i] - xs[a]);
                if (cross <= 0.0)
                    hull.pop_back();
                else
                    break;
            }
            hull.push_back(i);
        }
        auto slope = [&](int a, int b) { return (V[b] - V[a]) / (xs[b] - xs[a]); };
        std::size_t h = 0;
        for (int i = 0; i < nx; ++i) {
            if (!attains[i]) continue;
            while (h + 1 < hull.size() && hull[h + 1] <= i) ++h;
            double lo, hi;
            if (hull[h] == i) {
                lo = h == 0 ? -std::numeric_limits<double>::infinity() : slope(hull[h - 1], i);
                hi = h + 1 == hull.size() ? std::numeric_limits<double>::infinity() : slope(i, hull[h + 1]);
            } else {
                const int a = hull[h], b = hull[h + 1];
                const double s = slope(a, b);
                if (V[i] > V[a] + s * (xs[i] - xs[a]) + f.tol) continue;
                lo = hi = s;
            }
            lo = std::max(lo, -kappa);
            hi = std::min(hi, kappa);
            if (lo > hi || (lo == hi && std::abs(lo) >= kappa)) continue;
            double q = std::clamp(kappa * xs[i], lo, hi);
            if (std::abs(q) >= kappa) q = 0.5 * (lo + hi);
            const std::size_t k = std::size_t(n) * nx + i;
            f.member[k] = 1;
            f.vertex[k][0] = q / kappa;
        }
    }
    return f;
}

KappaSetField a_kappa_lattice(const GridFunction& u, double kappa, double vertex_h) {
    const Grid& g = u.grid;
    const int d = g.d;
    if (vertex_h <= 0.0) vertex_h = g.dx();
    KappaSetField f;
    f.kappa = kappa;
    f.mode = KappaMode::Lattice;
    f.tol = kappa * g.dx() * g.dx();
    f.member.assign(g.size(), 0);
    f.vertex.assign(g.size(), Vec{});
    const double infu = *std::min_element(u.v.begin(), u.v.end());
    const int m = int(std::floor(1.0 / vertex_h));
    std::vector<Vec> verts;
    for (int i = -m; i <= m; ++i)
        for (int j = (d == 2 ? -m : 0); j <= (d == 2 ? m : 0); ++j) {
            Vec y{i * vertex_h, j * vertex_h, 0.0};
            if (norm2(y, d) < 1.0) verts.push_back(y);
        }
    const std::size_t S = g.spatial();
    std::vector<double> w(S);
    for (const Vec& y : verts) {
        double run = std::numeric_limits<double>::infinity();
        for (int n = 0; n < g.nt; ++n) {
            const double t = g.t(n);
            for (std::size_t s = 0; s < S; ++s) {
                const Point q = g.node(n, s);
                w[s] = u.at(n, s) - infu + kappa * (0.5 * dist2(q.x, y, d) - t);
                run = std::min(run, w[s]);
            }
            for (std::size_t s = 0; s < S; ++s)
                if (w[s] <= run + f.tol) {
                    const std::size_t k = n * S + s;
                    if (!f.member[k]) {
                        f.member[k] = 1;
                        f.vertex[k] = y;
                    }
                }
        }
    }
    return f;
}

}  // namespace

KappaSetField a_kappa_set(const GridFunction& u, double kappa, KappaMode mode, double vertex_h) {
    require(kappa > 0.0 && std::isfinite(kappa), Status::invalid_argument, "kappa must be positive");
    return mode == KappaMode::Exact ? a_kappa_exact(u, kappa) : a_kappa_lattice(u, kappa, vertex_h);
}

KappaChecks check_a_kappa(const GridFunction& u, const std::vector<double>& kappas, KappaMode mode, double vertex_h,
                          long max_containment, double tol) {
    std::vector<double> ks = kappas;
    std::sort(ks.begin(), ks.end());
    KappaChecks c;
    const NodeSet all = all_nodes(u.grid);
    KappaSetField prev;
    for (std::size_t j = 0; j < ks.size(); ++j) {
        KappaSetField cur = a_kappa_set(u, ks[j], mode, vertex_h);
        if (j > 0)
            for (std::size_t k = 0; k < cur.member.size(); ++k)
                if (prev.member[k] && !cur.member[k]) ++c.monotone_violations;
        std::vector<std::size_t> mem;
        for (std::size_t k = 0; k < cur.member.size(); ++k)
            if (cur.member[k]) mem.push_back(k);
        const std::size_t stride = std::max<std::size_t>(1, mem.size() / std::max<long>(1, max_containment));
        for (std::size_t i = 0; i < mem.size(); i += stride) {
            const std::size_t k = mem[i];
            const Point x = u.grid.node(k);
            Vec p{};
            for (int a = 0; a < u.grid.d; ++a) p[a] = cur.kappa * (cur.vertex[k][a] - x.x[a]);
            const ThetaResult r = theta_lower(u, all, k, ThetaMode::GivenP, &p);
            ++c.containment_checked;
            c.containment_worst = std::max(c.containment_worst, r.value / cur.kappa);
            if (r.value > cur.kappa * (1.0 + tol)) ++c.containment_violations;
        }
        prev = std::move(cur);
    }
    return c;
}

// ---- inf-convolution ----

namespace {

// out[i] = min_j f[j] + w (i-j)^2, lower envelope of parabolas.
void envelope(std::vector<double>& f, double w) {
    const int n = int(f.size());
    std::vector<int> v(n);
    std::vector<double> z(n + 1);
    int k = 0;
    v[0] = 0;
    z[0] = -std::numeric_limits<double>::infinity();
    z[1] = std::numeric_limits<double>::infinity();
    auto cross = [&](int q, int p) { return ((f[q] + w * q * q) - (f[p] + w * p * p)) / (2.0 * w * (q - p)); };
    for (int q = 1; q < n; ++q) {
        double s = cross(q, v[k]);
        while (s <= z[k]) {
            --k;
            s = cross(q, v[k]);
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = std::numeric_limits<double>::infinity();
    }
    std::vector<double> out(n);
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[k + 1] < q) ++k;
        const double dq = q - v[k];
        out[q] = f[v[k]] + w * dq * dq;
    }
    f.swap(out);
}

}  // namespace

GridFunction inf_convolution(const GridFunction& u, double eps) {
    require(eps > 0.0 && std::isfinite(eps), Status::invalid_argument, "eps must be positive");
    const Grid& g = u.grid;
    const double c = 2.0 / eps;
    GridFunction r = u;
    const std::size_t S = g.spatial();
    std::vector<double> line;
    // time axis
    line.resize(g.nt);
    for (std::size_t s = 0; s < S; ++s) {
        for (int n = 0; n < g.nt; ++n) line[n] = r.at(n, s);
        envelope(line, c * g.dt() * g.dt());
        for (int n = 0; n < g.nt; ++n) r.at(n, s) = line[n];
    }
    // spatial axes
    line.resize(g.nx);
    const double ws = c * g.dx() * g.dx();
    for (int n = 0; n < g.nt; ++n) {
        if (g.d == 1) {
            for (int i = 0; i < g.nx; ++i) line[i] = r.at(n, i);
            envelope(line, ws);
            for (int i = 0; i < g.nx; ++i) r.at(n, i) = line[i];
            continue;
        }
        for (int axis = 0; axis < 2; ++axis)
            for (int a = 0; a < g.nx; ++a) {
                auto at = [&](int b) -> double& {
                    return axis == 0 ? r.at(n, g.join(b, a)) : r.at(n, g.join(a, b));
                };
                for (int b = 0; b < g.nx; ++b) line[b] = at(b);
                envelope(line, ws);
                for (int b = 0; b < g.nx; ++b) at(b) = line[b];
            }
    }
    return r;
}

GridFunction inf_convolution_brute(const GridFunction& u, double eps) {
    require(eps > 0.0, Status::invalid_argument, "eps must be positive");
    const Grid& g = u.grid;
    const double c = 2.0 / eps;
    GridFunction r(g);
    for (std::size_t k = 0; k < g.size(); ++k) {
        const Point x = g.node(k);
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < g.size(); ++j) {
            const Point z = g.node(j);
            const double dt = z.t - x.t;
            best = std::min(best, u.v[j] + c * (dist2(z.x, x.x, g.d) + dt * dt));
        }
        r.v[k] = best;
    }
    return r;
}

// ---- ABP ----

std::vector<Point> vertex_map(const GridFunction& u, double a, const std::vector<std::size_t>& contacts) {
    require(a > 0.0, Status::invalid_argument, "opening a must be positive");
    const Grid& g = u.grid;
    std::vector<Point> out;
    out.reserve(contacts.size());
    for (std::size_t k : contacts) {
        const Point z = g.node(k);
        const Vec Du = centered_gradient(u, k);
        Point y = z;
        for (int i = 0; i < g.d; ++i) y.x[i] = z.x[i] + Du[i] / a;
        y.t = z.t - u.v[k] / a - 0.5 * dist2(z.x, y.x, g.d);
        out.push_back(y);
    }
    return out;
}

JacobianCheck vertex_jacobian_check(const GridFunction& u, double a, double L, const Ellipticity& e,
                                    const std::vector<std::size_t>& contacts, double tol) {
    const Grid& g = u.grid;
    const std::size_t S = g.spatial();
    JacobianCheck c;
    c.bound = (1.0 + L / a + e.Lambda * g.d) / e.lambda;
    for (std::size_t k : contacts) {
        if (g.on_lateral(k % S)) continue;
        const SymMat H = discrete_hessian(u, int(k / S), k % S);
        const SymMat J = SymMat::identity(g.d) + (1.0 / a) * H;
        const Eigen eg = jacobi_eigen(J);
        double lo = eg.values[0], hi = eg.values[0];
        for (int i = 1; i < g.d; ++i) {
            lo = std::min(lo, eg.values[i]);
            hi = std::max(hi, eg.values[i]);
        }
        ++c.checked;
        c.worst_low = std::min(c.worst_low, lo);
        c.worst_high = std::max(c.worst_high, hi - c.bound);
        if (lo < -tol || hi > c.bound + tol) ++c.violations;
    }
    return c;
}

double supersolution_residual_min(const GridFunction& u, const Ellipticity& e) {
    const Grid& g = u.grid;
    const std::size_t S = g.spatial();
    double m = std::numeric_limits<double>::infinity();
    for (int n = 1; n < g.nt; ++n)
        for (std::size_t s = 0; s < S; ++s) {
            if (g.on_lateral(s)) continue;
            const double r = (u.at(n, s) - u.at(n - 1, s)) / g.dt() + pucci_plus(e, discrete_hessian(u, n - 1, s));
            m = std::min(m, r);
        }
    return m;
}

AbpReport abp_check(const GridFunction& u, double a, double L, const Ellipticity& e, const VertexLattice& V,
                    double residual_tol) {
    require(a > 0.0 && L >= 0.0, Status::invalid_argument, "need a > 0 and L >= 0");
    check_ellipticity(e);
    const Grid& g = u.grid;
    const int d = g.d;
    AbpReport rep;
    rep.a = a;
    rep.L = L;
    rep.residual_min = supersolution_residual_min(u, e);
    require(rep.residual_min >= -L - residual_tol, Status::precondition,
            "supersolution residual check failed: dt u + P+(D^2 u) < -L somewhere");
    const std::size_t S = g.spatial();

    // running min of min_z [u + (a/2)|z-y|^2] - a t per level, with its argmin
    auto sweep = [&](const Vec& y, std::vector<double>& run, std::vector<std::size_t>& arg) {
        run.assign(g.nt, 0.0);
        arg.assign(g.nt, 0);
        double best = std::numeric_limits<double>::infinity();
        for (int n = 0; n < g.nt; ++n) {
            double lm = std::numeric_limits<double>::infinity();
            std::size_t am = 0;
            for (std::size_t s = 0; s < S; ++s) {
                const Point q = g.node(n, s);
                const double w = u.at(n, s) + 0.5 * a * dist2(q.x, y, d) - a * q.t;
                if (w < lm) {
                    lm = w;
                    am = n * S + s;
                }
            }
            best = std::min(best, lm);
            run[n] = best;
            arg[n] = am;
        }
    };

    std::vector<Vec> ys;
    for (int i = 0; i < V.ny; ++i)
        for (int j = 0; j < (d == 2 ? V.ny : 1); ++j) ys.push_back(Vec{V.y_lo + i * V.h_y, V.y_lo + j * V.h_y, 0.0});

    double s_lo = V.s_lo, h_s = V.h_s;
    std::vector<double> run;
    std::vector<std::size_t> arg;
    if (h_s <= 0.0) {
        // centre the s-window on the touching time of the middle vertex at the middle level
        Vec mid{};
        for (int i = 0; i < d; ++i) mid[i] = V.y_lo + 0.5 * (V.ny - 1) * V.h_y;
        sweep(mid, run, arg);
        h_s = g.dt() / 2.0;
        s_lo = -run[g.nt / 2] / a - 0.5 * V.ns * h_s;
    }

    std::set<std::size_t> W;
    for (const Vec& y : ys) {
        sweep(y, run, arg);
        for (int j = 0; j < V.ns; ++j) {
            const double s = s_lo + j * h_s;
            ++rep.vertices;
            // first level with run[n] <= -a s
            const auto it = std::find_if(run.begin(), run.end(), [&](double m) { return m <= -a * s; });
            if (it == run.end()) {
                ++rep.invalid_never;
                continue;
            }
            const int n = int(it - run.begin());
            if (n == 0) {
                ++rep.invalid_bottom;
                continue;
            }
            // the crossing level's own minimum is the running minimum there
            const std::size_t k = arg[n];
            if (g.on_lateral(k % S)) {
                ++rep.invalid_lateral;
                continue;
            }
            ++rep.valid;
            W.insert(k);
        }
    }
    rep.contacts.assign(W.begin(), W.end());
    rep.contact_nodes = long(W.size());
    rep.measure_V = rep.valid * std::pow(V.h_y, d) * h_s;
    rep.measure_W = rep.contact_nodes * g.cell_volume();
    rep.constant = std::pow(e.lambda, -d) * std::pow(1.0 + L / a + e.Lambda * d, d + 1);
    rep.ratio = rep.measure_W > 0.0 ? rep.measure_V / rep.measure_W : std::numeric_limits<double>::infinity();
    rep.holds = rep.measure_V <= rep.constant * rep.measure_W;
    return rep;
}

// ---- expansion bridge ----

std::vector<GridFunction> spatial_derivatives(const GridFunction& u) {
    const Grid& g = u.grid;
    const std::size_t S = g.spatial();
    std::vector<GridFunction> out;
    for (int axis = 0; axis < g.d; ++axis) {
        GridFunction r(g);
        const std::size_t stride = (g.d == 2 && axis == 0) ? std::size_t(g.nx) : 1u;
        for (int n = 0; n < g.nt; ++n)
            for (std::size_t s = 0; s < S; ++s) {
                const int i = g.split(s)[axis];
                const std::size_t k = n * S + s;
                if (i == 0)
                    r.v[k] = (u.v[k + stride] - u.v[k]) / g.dx();
                else if (i == g.nx - 1)
                    r.v[k] = (u.v[k] - u.v[k - stride]) / g.dx();
                else
                    r.v[k] = (u.v[k + stride] - u.v[k - stride]) / (2.0 * g.dx());
            }
        out.push_back(std::move(r));
    }
    return out;
}

QuadraticExpansion assemble_expansion(const GridFunction& u, std::size_t base, const std::vector<Vec>& p_certificates,
                                      const OperatorSpec& F, const Field& g) {
    const int d = u.grid.d;
    require(int(p_certificates.size()) == d, Status::invalid_argument, "need one certificate per partial derivative");
    QuadraticExpansion e;
    e.base = u.grid.node(base);
    e.c = u.v[base];
    e.p = centered_gradient(u, base);
    e.M = SymMat(d);
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) e.M.set(i, j, 0.5 * (p_certificates[i][j] + p_certificates[j][i]));
    e.b = -eval_operator(F, e.M) + g(e.base);
    return e;
}

DirectionalCheck directional_derivative_check(const GridFunction& u, const Vec& e, double g_norm,
                                              const Ellipticity& ell, double C) {
    const Grid& g = u.grid;
    require(std::abs(norm2(e, g.d) - 1.0) <= 1e-12, Status::invalid_argument, "direction must be a unit vector");
    const auto D = spatial_derivatives(u);
    GridFunction ue(g);
    for (std::size_t k = 0; k < g.size(); ++k)
        for (int i = 0; i < g.d; ++i) ue.v[k] += e[i] * D[i].v[k];
    DirectionalCheck c;
    c.tol = C * (g.dx() + g.dt());
    const std::size_t S = g.spatial();
    for (int n = 1; n < g.nt; ++n)
        for (std::size_t s = 0; s < S; ++s) {
            const auto ij = g.split(s);
            bool deep = ij[0] >= 2 && ij[0] <= g.nx - 3;
            if (g.d == 2) deep = deep && ij[1] >= 2 && ij[1] <= g.nx - 3;
            if (!deep) continue;
            const double dt = (ue.at(n, s) - ue.at(n - 1, s)) / g.dt();
            const SymMat H = discrete_hessian(ue, n - 1, s);
            const double up = dt + pucci_minus(ell, H) - g_norm;
            const double lo = dt + pucci_plus(ell, H) + g_norm;
            ++c.checked;
            c.worst_upper = std::max(c.worst_upper, up);
            c.worst_lower = std::min(c.worst_lower, lo);
            if (up > c.tol || lo < -c.tol) ++c.violations;
        }
    return c;
}

double rescaled_sup(const GridFunction& u, const NodeSet& D, std::size_t base, const QuadraticExpansion& q,
                    double r) {
    require(r > 0.0, Status::invalid_argument, "r must be positive");
    const Grid& g = u.grid;
    const Point z = g.node(base);
    const std::size_t end = past_end(g, D, base);
    double sup = 0.0;
    for (std::size_t m = 0; m < end; ++m) {
        const Point y = g.node(D.idx[m]);
        if (dist2(y.x, z.x, g.d) > 16.0 * r * r || y.t < z.t - 16.0 * r * r) continue;
        sup = std::max(sup, std::abs(u.v[D.idx[m]] - q(y)) / (16.0 * r * r));
    }
    return sup;
}

// ---- survival ----

SurvivalFit survival_and_fit(const std::vector<double>& values, double cell_volume, double kappa_min, int levels,
                             double kappa_fit) {
    require(kappa_min > 0.0 && levels >= 0, Status::invalid_argument, "need kappa_min > 0 and levels >= 0");
    SurvivalFit f;
    std::vector<double> xs, ys;
    std::set<double> distinct;
    for (int k = 0; k <= levels; ++k) {
        SurvivalRow row;
        row.kappa = std::ldexp(kappa_min, k);
        row.count = long(std::count_if(values.begin(), values.end(), [&](double v) { return v > row.kappa; }));
        row.measure = row.count * cell_volume;
        f.table.push_back(row);
        if (row.kappa >= kappa_fit * (1.0 - 1e-12) && row.count > 0) {
            xs.push_back(std::log(row.kappa));
            ys.push_back(std::log(row.measure));
            distinct.insert(row.measure);
        }
    }
    f.points = int(xs.size());
    if (xs.size() < 3 || distinct.size() < 3) {
        f.reason = "fewer than 3 distinct nonzero survival values at kappa >= " + std::to_string(kappa_fit);
        return f;
    }
    const double n = double(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    const double slope = sxy / sxx;
    f.fitted = true;
    f.eps_hat = -slope;
    f.intercept = my - slope * mx;
    return f;
}

nlohmann::json to_json(const QuadraticExpansion& e) {
    const int d = e.base.d;
    nlohmann::json x = nlohmann::json::array(), p = nlohmann::json::array(), M = nlohmann::json::array();
    for (int i = 0; i < d; ++i) {
        x.push_back(e.base.x[i]);
        p.push_back(e.p[i]);
        nlohmann::json row = nlohmann::json::array();
        for (int j = 0; j < d; ++j) row.push_back(e.M(i, j));
        M.push_back(row);
    }
    return {{"base", {{"x", x}, {"t", e.base.t}}}, {"c", e.c}, {"b", e.b}, {"p", p}, {"M", M}};
}

nlohmann::json to_json(const SurvivalFit& f) {
    nlohmann::json t = nlohmann::json::array();
    for (const auto& r : f.table) t.push_back({{"kappa", r.kappa}, {"count", r.count}, {"measure", r.measure}});
    nlohmann::json j = {{"table", t}, {"fitted", f.fitted}, {"points", f.points}};
    if (f.fitted) {
        j["eps_hat"] = f.eps_hat;
        j["intercept"] = f.intercept;
    } else {
        j["reason"] = f.reason;
    }
    return j;
}

namespace {
void coords(std::ostream& out, const Grid& g, std::size_t k) {
    const Point p = g.node(k);
    for (int i = 0; i < g.d; ++i) out << p.x[i] << ',';
    out << p.t;
}
std::string coord_header(int d) { return d == 1 ? "x,t" : "x0,x1,t"; }
}  // namespace

void write_theta_csv(const ThetaField& f, const std::string& path) {
    std::ofstream out(path);
    require(out.good(), Status::io, "cannot open '" + path + "' for writing");
    out << std::setprecision(17) << coord_header(f.grid.d) << ",theta_lower,theta_upper,theta";
    for (int i = 0; i < f.grid.d; ++i) out << ",p" << i;
    out << '\n';
    for (std::size_t i = 0; i < f.nodes.size(); ++i) {
        coords(out, f.grid, f.nodes[i]);
        out << ',' << f.lower[i] << ',' << f.upper[i] << ',' << f.theta[i];
        for (int a = 0; a < f.grid.d; ++a) out << ',' << f.p_lower[i][a];
        out << '\n';
    }
}

void write_psi_csv(const PsiField& f, const std::string& path) {
    std::ofstream out(path);
    require(out.good(), Status::io, "cannot open '" + path + "' for writing");
    const int d = f.grid.d;
    out << std::setprecision(17) << coord_header(d) << ",psi,psi_raw,b";
    for (int i = 0; i < d; ++i) out << ",p" << i;
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) out << ",M" << i << j;
    out << '\n';
    for (std::size_t i = 0; i < f.nodes.size(); ++i) {
        coords(out, f.grid, f.nodes[i]);
        const auto& e = f.cert[i];
        out << ',' << f.value[i] << ',' << f.value[i] / 6.0 << ',' << e.b;
        for (int a = 0; a < d; ++a) out << ',' << e.p[a];
        for (int a = 0; a < d; ++a)
            for (int b = a; b < d; ++b) out << ',' << e.M(a, b);
        out << '\n';
    }
}

}  // namespace prlab
