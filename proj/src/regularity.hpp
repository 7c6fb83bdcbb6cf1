#pragma once

#include "grid.hpp"
#include "operators.hpp"
#include "solver.hpp"

#include <json.hpp>
#include <optional>
#include <vector>

namespace prlab {

/// u(x,t) + b(s-t) + p.(y-x) + (1/2)(y-x).M(y-x) around base (x,t).
struct QuadraticExpansion {
    Point base;
    double c = 0.0;
    double b = 0.0;
    Vec p{};
    SymMat M;

    double operator()(const Point& q) const;
};

enum class ParaboloidSign { Concave, Convex };

/// Concave: -(k/2)|z-y|^2 + k(tau-s); convex is the negative.
struct Paraboloid {
    Point vertex;
    double opening = 1.0;
    ParaboloidSign sign = ParaboloidSign::Concave;

    double operator()(const Point& q) const;
};

/// Grid nodes of an analysis domain, sorted by index (hence by time level).
struct NodeSet {
    std::vector<std::size_t> idx;
};

NodeSet domain_nodes(const Grid& g, const Cylinder& q);
NodeSet all_nodes(const Grid& g);

/// Index of the grid node at p; throws unless p is a node (to 1e-9 of a cell).
std::size_t node_at(const Grid& g, const Point& p);

/// Centered spatial gradient at an interior node.
Vec centered_gradient(const GridFunction& u, std::size_t idx);

// ---- Theta ----

enum class ThetaMode { Gradient, Lattice, GivenP };

struct ThetaResult {
    double value = 0.0;
    Vec p{};
    std::size_t witness = 0;  // node attaining the max (the base itself when the value is 0)
};

/// Lower opening: max over past domain nodes of [u(x,t)+p.(y-x)-u(y,s)] / (|x-y|^2/2 + t-s), clamped at 0.
ThetaResult theta_lower(const GridFunction& u, const NodeSet& domain, std::size_t base,
                        ThetaMode mode = ThetaMode::Gradient, const Vec* given_p = nullptr);
ThetaResult theta_lower(const GridFunction& u, const Cylinder& domain, const Point& base,
                        ThetaMode mode = ThetaMode::Gradient);
/// theta_lower of -u.
ThetaResult theta_upper(const GridFunction& u, const NodeSet& domain, std::size_t base,
                        ThetaMode mode = ThetaMode::Gradient);
ThetaResult theta_upper(const GridFunction& u, const Cylinder& domain, const Point& base,
                        ThetaMode mode = ThetaMode::Gradient);

struct ThetaField {
    Grid grid;
    std::vector<std::size_t> nodes;
    std::vector<double> lower, upper, theta;
    std::vector<Vec> p_lower;
};

ThetaField theta_field(const GridFunction& u, const Cylinder& domain, const Cylinder& region,
                       ThetaMode mode = ThetaMode::Gradient, int threads = 1);

// ---- Psi ----

enum class PsiMode { Certificate, BruteForce };

struct PsiResult {
    double value = 0.0;  // 6 * max ratio
    double raw = 0.0;    // max ratio
    QuadraticExpansion cert;
    std::size_t witness = 0;
};

/// Certificate expansion from discrete derivatives at base (needs time level >= 1 and interior space).
QuadraticExpansion derivative_expansion(const GridFunction& u, std::size_t base, int directions = 4);
PsiResult psi_given(const GridFunction& u, const NodeSet& domain, std::size_t base, const QuadraticExpansion& e);
PsiResult psi(const GridFunction& u, const NodeSet& domain, std::size_t base, PsiMode mode = PsiMode::Certificate,
              double floor = 0.0);
PsiResult psi(const GridFunction& u, const Cylinder& domain, const Point& base, PsiMode mode = PsiMode::Certificate);

struct PsiField {
    Grid grid;
    std::vector<std::size_t> nodes;
    std::vector<double> value;
    std::vector<QuadraticExpansion> cert;
};

PsiField psi_field(const GridFunction& u, const Cylinder& domain, const Cylinder& region, int threads = 1);

/// Certificate tolerance 10 dx: max over the past domain of |u - cert| - (value/6)(|dx|^3+|dt|^{3/2}).
double psi_certificate_defect(const GridFunction& u, const NodeSet& domain, std::size_t base, const PsiResult& r);

// ---- A_kappa ----

enum class KappaMode { Exact, Lattice };

struct KappaSetField {
    double kappa = 0.0;
    KappaMode mode = KappaMode::Exact;
    double tol = 0.0;
    std::vector<unsigned char> member;  // per grid node
    std::vector<Vec> vertex;            // witness y per node (valid where member)
    std::size_t count() const;
};

/// Exact (d = 1): running-min lower hull with subgradient in (-kappa, kappa).
/// Lattice (any d): vertices on a lattice of spacing vertex_h over B_1, tol = kappa dx^2.
KappaSetField a_kappa_set(const GridFunction& u, double kappa, KappaMode mode = KappaMode::Exact,
                          double vertex_h = 0.0);

struct KappaChecks {
    long monotone_violations = 0;
    long containment_checked = 0;
    long containment_violations = 0;
    double containment_worst = 0.0;  // max Theta / kappa over checked members
};

/// A_{k1} subset A_{k2} for consecutive kappas, and A_k inside {Theta_lower <= k(1+tol)} via the witness p.
KappaChecks check_a_kappa(const GridFunction& u, const std::vector<double>& kappas, KappaMode mode,
                          double vertex_h, long max_containment, double tol);

// ---- inf-convolution ----

/// u_eps(x,t) = min over nodes of u(z,tau) + (2/eps)(|z-x|^2 + (tau-t)^2), separable lower envelopes.
GridFunction inf_convolution(const GridFunction& u, double eps);
GridFunction inf_convolution_brute(const GridFunction& u, double eps);

// ---- ABP ----

/// (z + Du/a, t - u/a - |z - ybar|^2/2) at the given nodes.
std::vector<Point> vertex_map(const GridFunction& u, double a, const std::vector<std::size_t>& contacts);

struct JacobianCheck {
    long checked = 0;
    long violations = 0;
    double worst_low = 0.0;   // most negative eigenvalue of I + D^2u/a
    double worst_high = 0.0;  // largest eigenvalue minus the upper bound
    double bound = 0.0;
};

JacobianCheck vertex_jacobian_check(const GridFunction& u, double a, double L, const Ellipticity& e,
                                    const std::vector<std::size_t>& contacts, double tol);

/// min over interior nodes of (u^n - u^{n-1})/dt + P+(D^2 u^{n-1}).
double supersolution_residual_min(const GridFunction& u, const Ellipticity& e);

struct VertexLattice {
    int ny = 32;       // per spatial axis
    int ns = 32;
    double y_lo = -0.5, h_y = 0.01;
    double s_lo = 0.0, h_s = 0.0;  // h_s <= 0: fit the range where touching happens inside the grid
};

struct AbpReport {
    double a = 0.0, L = 0.0;
    long vertices = 0, valid = 0, invalid_bottom = 0, invalid_never = 0, invalid_lateral = 0;
    long contact_nodes = 0;
    double measure_V = 0.0, measure_W = 0.0;
    double constant = 0.0;  // lambda^{-d} (1 + L/a + Lambda d)^{d+1}
    double ratio = 0.0;     // |V| / |W|
    bool holds = false;
    double residual_min = 0.0;
    std::vector<std::size_t> contacts;
};

AbpReport abp_check(const GridFunction& u, double a, double L, const Ellipticity& e, const VertexLattice& V,
                    double residual_tol = 1e-9);

// ---- expansion bridge ----

/// d fields of centered differences u_{x_i} (one-sided at the lateral boundary).
std::vector<GridFunction> spatial_derivatives(const GridFunction& u);

/// M = sym(p^i_j), b = -F(M) + g(base), p = centered gradient.
QuadraticExpansion assemble_expansion(const GridFunction& u, std::size_t base, const std::vector<Vec>& p_certificates,
                                      const OperatorSpec& F, const Field& g);

struct DirectionalCheck {
    long checked = 0;
    long violations = 0;
    double worst_upper = -std::numeric_limits<double>::infinity();  // max dt u_e + P-(D^2 u_e) - ||g||
    double worst_lower = std::numeric_limits<double>::infinity();   // min dt u_e + P+(D^2 u_e) + ||g||
    double tol = 0.0;
};

DirectionalCheck directional_derivative_check(const GridFunction& u, const Vec& e, double g_norm,
                                              const Ellipticity& ell, double C = 10.0);

/// v(x,tau) = [u(z+4rx, s+16r^2 tau) - q(...)]/(16 r^2) on nodes of the scaled cylinder; returns sup|v|.
double rescaled_sup(const GridFunction& u, const NodeSet& domain, std::size_t base, const QuadraticExpansion& q,
                    double r);

// ---- survival ----

struct SurvivalRow {
    double kappa = 0.0;
    double measure = 0.0;
    long count = 0;
};

struct SurvivalFit {
    std::vector<SurvivalRow> table;
    bool fitted = false;
    std::string reason;
    double eps_hat = 0.0;
    double intercept = 0.0;  // log survival at log kappa = 0
    int points = 0;
};

/// Dyadic kappa_min * 2^k, k = 0..levels; the fit uses rows with kappa >= kappa_fit and positive survival.
SurvivalFit survival_and_fit(const std::vector<double>& values, double cell_volume, double kappa_min, int levels,
                             double kappa_fit);

nlohmann::json to_json(const QuadraticExpansion& e);
nlohmann::json to_json(const SurvivalFit& f);
void write_theta_csv(const ThetaField& f, const std::string& path);
void write_psi_csv(const PsiField& f, const std::string& path);

}  // namespace prlab
