#pragma once

#include "common.hpp"

#include <json.hpp>
#include <string>
#include <vector>

namespace prlab {

/// Parameters of the bump function; c and beta are kept as natural logs since they overflow double.
struct BarrierParams {
    int d = 1;
    double lambda = 1.0, Lambda = 1.0, theta = 1.0, tau = 1.0;
    double a = 0.0, b = 0.0;
    double b_first = 0.0, b_second = 0.0;  // the two branches of the max defining b
    double log_c = 0.0, log_beta = 0.0;
    double rho0 = 0.0;
    double rho0_gap = 0.0;       // rho0 - 1/(2a)
    bool side_strict = false;    // rho0 < 1/(2a) (holds iff the first branch is strictly larger)
    bool side_weak = false;      // rho0 <= 1/(2a)

    double c() const { return std::exp(log_c); }
    double beta() const { return std::exp(log_beta); }
};

/// enforce_opening applies the theta >= 3/4 precondition; the rescaled use relaxes it.
BarrierParams barrier_params(int d, double lambda, double Lambda, double theta, double tau,
                             bool enforce_opening = true);

/// Same parameters with b replaced (c, beta recomputed); used by the sabotage regression.
BarrierParams with_b(const BarrierParams& p, double b);

/// Quantities divided by psi = c (t+tau)^{-(b+1)} e^{-a rho}.
struct BarrierValue {
    double rho = 0.0;
    double log_psi = 0.0;
    double phi_over_psi = 0.0;
    double dt_over_psi = 0.0;
    double eig_radial = 0.0;      // 2a(-1 + 2a rho), over psi
    double eig_tangential = 0.0;  // -2a, over psi (multiplicity d-1)
    std::array<double, 9> hess_over_psi{};  // 4a^2 x x^T/(t+tau) - 2a I

    double phi() const { return std::exp(log_psi) * phi_over_psi; }
    double dt_phi() const { return std::exp(log_psi) * dt_over_psi; }
};

bool barrier_domain_contains(const BarrierParams& p, const Point& xt, double slack = 1e-12);
BarrierValue barrier_eval(const BarrierParams& p, const Point& xt);
/// phi in plain double arithmetic (may overflow for large b).
double barrier_phi(const BarrierParams& p, const Point& xt);

struct PropertyResult {
    explicit PropertyResult(std::string n = {}) : name(std::move(n)) {}
    std::string name;
    bool passed = true;
    long checked = 0;
    long violations = 0;
    double worst = 0.0;
    Point witness;
};

struct BarrierReport {
    BarrierParams params;
    std::vector<PropertyResult> properties;  // (i)..(iv)
    double margin_i = 0.0;                   // -max(dt phi + P+(D^2 phi)) over samples
    bool passed = false;
};

BarrierReport verify_barrier(const BarrierParams& p, long samples, std::uint64_t seed);

/// Central-difference cross-check of dt phi and D^2 phi; returns the worst relative error.
double barrier_fd_check(const BarrierParams& p, long samples, std::uint64_t seed, Point* witness = nullptr);

/// w(y,s) = (h/2) phi((y-x2)/sqrt(h/2), (s-t2)/(h/2)) with opening alpha and tau = 2 delta,
/// living on G_{alpha, h(1/2+delta)}(x2, t2 - delta h); same four properties, slice bound beta h.
BarrierReport verify_rescaled_barrier(int d, double lambda, double Lambda, double alpha, double delta, double h,
                                      const Point& vertex, long samples, std::uint64_t seed);

nlohmann::json to_json(const BarrierParams& p);
nlohmann::json to_json(const BarrierReport& r);

}  // namespace prlab
