#include "constants.hpp"

#include <random>

namespace prlab {

double derived_c_vol(int d) {
    return std::pow(2.0, d / 2.0) / (std::pow(16.0, 1.0 + d / 2.0) * std::pow(nu_constant(), d + 2));
}

double default_R(int d, double theta) { return 0.9 / ((2.0 + 16.0 * theta) * std::sqrt(double(d))); }

VolumeEstimate c_vol_monte_carlo(int d, double theta, long samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const double h = 1.0;
    const double r = std::sqrt(h / theta) / nu_constant();
    ParabolicBall big{Point{d}, theta, h, Orientation::Upward};
    ParabolicBall small{Point{d}, 0.5, r * r / 16.0, Orientation::Downward};
    const VolumeEstimate vb = monte_carlo_volume(big, samples, rng);
    const VolumeEstimate vs = monte_carlo_volume(small, samples, rng);
    VolumeEstimate out;
    out.mean = theta * vs.mean / vb.mean;
    out.stderr_ = out.mean * std::sqrt(std::pow(vs.stderr_ / vs.mean, 2) + std::pow(vb.stderr_ / vb.mean, 2));
    return out;
}

ConstantChain compute_constants(const ConstantInputs& in) {
    check_dim(in.d);
    require(in.lambda > 0.0 && in.lambda <= in.Lambda, Status::invalid_argument, "need 0 < lambda <= Lambda");
    require(in.theta >= 0.75 && in.theta <= 5.0, Status::precondition, "theta must lie in [3/4, 5]");
    require(in.R > 0.0, Status::invalid_argument, "R must be positive");
    require(in.c2 > 0.0 && in.g_norm >= 0.0, Status::invalid_argument, "c2 > 0 and ||g|| >= 0 required");

    ConstantChain c;
    c.in = in;
    const int d = in.d;
    const double th = in.theta;
    const double dR2 = d * in.R * in.R;

    c.side.r_bound = 1.0 / ((2.0 + 16.0 * th) * std::sqrt(double(d)));
    c.side.r_ok = in.R < c.side.r_bound;
    require(c.side.r_ok, Status::precondition, "R violates the bound R < 1/((2+16 theta) sqrt d)");

    c.c_vol_derived = !(in.c_vol > 0.0);
    c.c_vol = c.c_vol_derived ? derived_c_vol(d) : in.c_vol;
    require(c.c_vol > 0.0 && c.c_vol < 1.0, Status::check_failed, "chain link c_vol outside (0,1)");

    c.nu = nu_constant();
    c.eta = hat_ratio(d);
    c.eta0 = eta0_constant(d, th);
    c.alpha = std::min(1.0, th / ((1.0 + kSqrt2) * (1.0 + kSqrt2)));
    c.delta = c.alpha / (16.0 * c.nu * c.nu * th);

    c.barrier = barrier_params(d, in.lambda, in.Lambda, th, in.tau);
    c.log_beta = c.barrier.log_beta;
    c.log_gamma = std::log(17.0 * (d * in.Lambda + 3.0) * th * c.nu * c.nu) + c.log_beta;
    // M = gamma + 1
    c.log_M = c.log_gamma + std::log1p(std::exp(-c.log_gamma));
    // 1/(gamma+1) = e^{-ln M}
    const double inv_M = std::exp(-c.log_M);
    c.sigma = std::pow(2.0, -d - 1) * std::pow(in.lambda, d) / std::pow(1.0 + inv_M + in.Lambda * d, d + 1) *
              (c.c_vol / th);
    require(c.sigma > 0.0 && c.sigma < 1.0, Status::check_failed, "chain link sigma outside (0,1)");
    require(c.eta > 0.0 && c.eta < 1.0, Status::check_failed, "chain link eta outside (0,1)");
    c.kappa0 = std::max(24.0, 320.0 / dR2);
    c.epsilon = -std::log1p(-c.sigma * c.eta) / c.log_M;

    c.H_cube = (1.0 + 5.0 * th) * dR2;
    c.H0 = (1.5 + 9.0 * th) * dR2;
    c.H1 = 0.5 * dR2;
    c.H2 = dR2 / 8.0;
    c.xi = std::pow(2.0 * in.R, d) * c.H_cube / pball_volume(d, th, c.H0);
    c.C_w2 = unit_ball_volume(d) / (c.xi * (1.0 - c.sigma * c.eta));

    c.beta41 = std::max(1.0, 2.0 * in.Lambda * (d + 1));
    c.C0 = 768.0 * (in.c2 * (1.0 + in.g_norm) + 3.0);
    c.C2 = 192.0 * (1.0 + c.beta41) * (in.c2 + 3.0);
    c.C1 = c.C2 + 7.0 / 6.0;
    c.epsilon_w3 = c.epsilon;

    c.side.t1_plus_h1 = -0.25 + (0.5 + 4.0 * th) * dR2;
    c.side.t1_h1_ok = c.side.t1_plus_h1 < 0.0;
    c.side.spread = dR2 / th;
    c.side.spread_ok = c.side.spread <= 1.0 / 6.0;
    c.side.s0_lower = -0.5 + 4.0 * d * th * in.R * in.R - 2.0 / c.kappa0 - 0.5 * c.side.spread;
    c.side.s0_ok = c.side.s0_lower > -1.0;
    c.side.rho0_gap = c.barrier.rho0_gap;
    c.side.rho0_strict = c.barrier.side_strict;
    c.side.rho0_weak = c.barrier.side_weak;
    return c;
}

std::vector<ChainEntry> ConstantChain::entries() const {
    auto plain = [](std::string n, double v, std::string f, std::string a) {
        return ChainEntry{std::move(n), v, std::log(v), std::move(f), std::move(a)};
    };
    auto logged = [](std::string n, double lv, std::string f, std::string a) {
        return ChainEntry{std::move(n), std::exp(lv), lv, std::move(f), std::move(a)};
    };
    return {
        plain("nu", nu, "4/(sqrt2-1)", "interior cylinder radius ratio"),
        plain("eta", eta, "4^{-(1+d/2)} (sqrt2+1)^{-d}", "hat-ball volume ratio"),
        plain("eta0", eta0, "(d+2)/(2^{d+3} omega_d) ((sqrt2-1)/4)^{d+2} / theta", "interior cylinder volume ratio"),
        plain("alpha", alpha, "min{1, theta/(1+sqrt2)^2}", "rescaled barrier opening"),
        plain("delta", delta, "alpha/(16 nu^2 theta)", "rescaled barrier lag"),
        plain("barrier_a", barrier.a, "max{(1+d Lambda theta)/(2 lambda), theta}", "barrier exponent"),
        plain("barrier_b", barrier.b,
              "max{(2 d Lambda a+1)/(1-e^{1/2-a/theta}), (4 lambda a-1)/e^{1/2-a/theta}}", "barrier time power"),
        logged("beta_barrier", log_beta, "2 ((1+tau)^{b+1}/tau^b)(e^{a/theta}-1)", "barrier slice bound"),
        logged("gamma", log_gamma, "17 (d Lambda+3) beta theta nu^2", "measure iteration growth"),
        logged("M", log_M, "gamma+1", "measure iteration ratio"),
        plain("c_vol", c_vol, c_vol_derived ? "2^{d/2}/(16^{1+d/2} nu^{d+2})" : "configured override",
              "volume comparison constant"),
        plain("sigma", sigma, "2^{-d-1} lambda^d/(1+1/(gamma+1)+Lambda d)^{d+1} * c_vol/theta",
              "measure iteration fraction"),
        plain("H_cube", H_cube, "(1+5 theta) d R^2", "initial cube height"),
        plain("H0", H0, "(3/2+9 theta) d R^2", "enclosing ball height"),
        plain("H1", H1, "d R^2/2", "first inner ball height"),
        plain("H2", H2, "d R^2/8", "second inner ball height"),
        plain("xi", xi, "(2R)^d H_cube / |G_{theta,H0}|", "cube to ball volume ratio"),
        plain("kappa0", kappa0, "max{24, 320/(d R^2)}", "initial opening"),
        plain("epsilon", epsilon, "-ln(1-sigma eta)/ln M", "W2 decay exponent"),
        plain("C_w2", C_w2, "|Q_1|/(xi (1-sigma eta))", "W2 decay constant"),
        plain("beta_expansion", beta41, "max{1, 2 Lambda (d+1)}", "expansion slope bound"),
        plain("C0", C0, "768 (c2 (1+||g||)+3)", "expansion constant"),
        plain("C2", C2, "192 (1+beta_expansion)(c2+3)", "expansion constant"),
        plain("C1", C1, "C2 + 7/6", "expansion to derivative bridge"),
        plain("epsilon_w3", epsilon_w3, "epsilon (same exponent, applied to u_{x_i})", "W3 decay exponent"),
    };
}

namespace {
nlohmann::json finite_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }
}  // namespace

double decay_bound(const ConstantChain& c, double kappa, double scale) {
    return c.C_w2 * std::pow(kappa / (scale * c.kappa0), -c.epsilon);
}

nlohmann::json to_json(const ConstantChain& c) {
    nlohmann::json links = nlohmann::json::array();
    for (const auto& e : c.entries())
        links.push_back({{"name", e.name},
                         {"value", finite_or_null(e.value)},
                         {"log10", e.log_value / std::log(10.0)},
                         {"formula", e.formula},
                         {"anchor", e.anchor}});
    const auto& s = c.side;
    return {{"inputs",
             {{"d", c.in.d},
              {"lambda", c.in.lambda},
              {"Lambda", c.in.Lambda},
              {"theta", c.in.theta},
              {"R", c.in.R},
              {"c2", c.in.c2},
              {"c_vol", c.c_vol},
              {"c_vol_derived", c.c_vol_derived},
              {"g_norm", c.in.g_norm},
              {"tau", c.in.tau}}},
            {"chain", links},
            {"side_conditions",
             {{"R_bound", s.r_bound},
              {"R_ok", s.r_ok},
              {"T1_plus_H1", s.t1_plus_h1},
              {"T1_plus_H1_ok", s.t1_h1_ok},
              {"s0_lower_bound", s.s0_lower},
              {"s0_ok", s.s0_ok},
              {"dR2_over_theta", s.spread},
              {"spread_ok", s.spread_ok},
              {"rho0_minus_knee", s.rho0_gap},
              {"rho0_strict", s.rho0_strict},
              {"rho0_weak", s.rho0_weak},
              {"all_strict", s.all_strict()}}},
            {"notes", "c2 is an input (interior estimate constant not computable here); every C0/C1/C2 depends on it"}};
}

ConstantInputs constant_inputs_from_json(const nlohmann::json& j) {
    ConstantInputs in;
    in.d = j.value("d", in.d);
    in.lambda = j.value("lambda", in.lambda);
    in.Lambda = j.value("Lambda", in.Lambda);
    in.theta = j.value("theta", in.theta);
    in.R = j.contains("R") ? j.at("R").get<double>() : default_R(in.d, in.theta);
    in.c2 = j.value("c2", in.c2);
    in.c_vol = j.value("c_vol", in.c_vol);
    in.g_norm = j.value("g_norm", in.g_norm);
    in.tau = j.value("tau", in.tau);
    return in;
}

}  // namespace prlab
