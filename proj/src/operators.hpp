#pragma once

#include "linalg.hpp"

#include <functional>
#include <json.hpp>
#include <vector>

namespace prlab {

struct Ellipticity {
    double lambda = 1.0;
    double Lambda = 1.0;
};

void check_ellipticity(const Ellipticity& e);

double pucci_plus(const Ellipticity& e, const SymMat& M);
double pucci_minus(const Ellipticity& e, const SymMat& M);

enum class OpKind { PucciPlus, PucciMinus, LinearTrace, BellmanMin, Custom };

/// F(M) = base(M + shift*I) + offset, base selected by kind.
struct OperatorSpec {
    OpKind kind = OpKind::PucciPlus;
    Ellipticity ell;
    SymMat A;                           // LinearTrace coefficient
    std::vector<OperatorSpec> members;  // BellmanMin
    std::function<double(const SymMat&)> custom;
    double offset = 0.0;
    double shift = 0.0;

    static OperatorSpec make(OpKind k, Ellipticity e) {
        OperatorSpec s;
        s.kind = k;
        s.ell = e;
        return s;
    }
    static OperatorSpec pucci_plus(Ellipticity e) { return make(OpKind::PucciPlus, e); }
    static OperatorSpec pucci_minus(Ellipticity e) { return make(OpKind::PucciMinus, e); }
    static OperatorSpec linear(const SymMat& A, Ellipticity e);
    static OperatorSpec heat(int d) { return linear(SymMat::identity(d), {1.0, 1.0}); }
    static OperatorSpec bellman_min(std::vector<OperatorSpec> members, Ellipticity e);
};

double eval_operator(const OperatorSpec& F, const SymMat& M);

std::string kind_name(OpKind k);

struct EllipticityReport {
    bool passed = true;
    int samples = 0;
    double worst_margin = std::numeric_limits<double>::infinity();
    SymMat witness_M, witness_N;
    std::string message;
    /// Sampled ratio |F(M+hE)-F(M)|/h spread, reported only.
    double sampled_modulus = 0.0;
};

/// Samples random pairs and checks P-(M-N) <= F(M)-F(N) <= P+(M-N) within tol.
EllipticityReport verify_ellipticity(const OperatorSpec& F, int d, int samples, std::uint64_t seed,
                                     double tol = 1e-9);

struct Normalization {
    double a = 0.0;       // F(aI) = 0
    double bound = 0.0;   // |F(0)|/(lambda d)
    double g_shift = 0.0; // subtract g(0,0) from g, and t*g(0,0) from u
    OperatorSpec spec;    // F^(M) = F(M + aI)
};

Normalization normalize_problem(const OperatorSpec& F, int d, double g0);

nlohmann::json operator_to_json(const OperatorSpec& F);
OperatorSpec operator_from_json(const nlohmann::json& j, int d);

}  // namespace prlab
