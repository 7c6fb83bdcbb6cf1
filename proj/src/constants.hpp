#pragma once

#include "barrier.hpp"
#include "geometry.hpp"

#include <json.hpp>
#include <string>
#include <vector>

namespace prlab {

struct ConstantInputs {
    int d = 1;
    double lambda = 1.0, Lambda = 1.0;
    double theta = 0.75;
    double R = 0.06;
    double c2 = 1.0;
    double c_vol = 0.0;  // <= 0 selects the derived value
    double g_norm = 0.0;
    double tau = 1.0;    // barrier tau feeding gamma
};

/// One link of the chain; log_value is the natural log, value is +inf when not representable.
struct ChainEntry {
    std::string name;
    double value = 0.0;
    double log_value = 0.0;
    std::string formula;
    std::string anchor;
};

struct SideConditions {
    double r_bound = 0.0;         // 1/((2+16 theta) sqrt d)
    bool r_ok = false;
    double t1_plus_h1 = 0.0;      // worst case T0 = -1/4
    bool t1_h1_ok = false;
    double s0_lower = 0.0;        // lower bound on s0 from t0 - s0 <= 2/kappa0 + dR^2/(2 theta)
    bool s0_ok = false;
    double spread = 0.0;          // dR^2/theta, needs <= 1/6
    bool spread_ok = false;
    double rho0_gap = 0.0;        // rho0 - 1/(2a) of the barrier feeding gamma
    bool rho0_strict = false;
    bool rho0_weak = false;
    bool all_strict() const { return r_ok && t1_h1_ok && s0_ok && spread_ok && rho0_strict; }
};

struct ConstantChain {
    ConstantInputs in;
    double nu = 0, eta = 0, eta0 = 0, alpha = 0, delta = 0;
    BarrierParams barrier;
    double log_beta = 0, log_gamma = 0, log_M = 0;
    double sigma = 0, xi = 0;
    double H_cube = 0, H0 = 0, H1 = 0, H2 = 0;
    double kappa0 = 0, epsilon = 0, C_w2 = 0;
    double beta41 = 0, C0 = 0, C2 = 0, C1 = 0, epsilon_w3 = 0;
    double c_vol = 0;
    bool c_vol_derived = true;
    SideConditions side;

    std::vector<ChainEntry> entries() const;
};

/// 2^{d/2} / (16^{1+d/2} nu^{d+2}).
double derived_c_vol(int d);
/// 0.9 of the admissible upper bound on R.
double default_R(int d, double theta);
/// Monte Carlo estimate of theta |G^-_{1/2, r^2/16}| / |G_{theta,h}| with r = sqrt(h/theta)/nu.
VolumeEstimate c_vol_monte_carlo(int d, double theta, long samples, std::uint64_t seed);

ConstantChain compute_constants(const ConstantInputs& in);

/// C_w2 (kappa / (scale kappa0))^{-epsilon}; scale = C1(1+|g|) turns it into the Psi bound.
double decay_bound(const ConstantChain& c, double kappa, double scale = 1.0);

nlohmann::json to_json(const ConstantChain& c);
ConstantInputs constant_inputs_from_json(const nlohmann::json& j);

}  // namespace prlab
