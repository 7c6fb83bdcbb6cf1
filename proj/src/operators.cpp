#include "operators.hpp"

#include <algorithm>
#include <json.hpp>

namespace prlab {

void check_ellipticity(const Ellipticity& e) {
    require(e.lambda > 0.0 && e.Lambda >= e.lambda && std::isfinite(e.Lambda),
            Status::invalid_argument, "ellipticity requires 0 < lambda <= Lambda");
}

namespace {

void check_sym(const SymMat& M) {
    check_dim(M.d);
    require(M.is_symmetric(1e-12), Status::invalid_argument, "matrix is not symmetric");
    for (int i = 0; i < M.d; ++i)
        for (int j = 0; j < M.d; ++j)
            require(std::isfinite(M(i, j)), Status::invalid_argument, "matrix has non-finite entries");
}

void pos_neg_sums(const SymMat& M, double& pos, double& neg) {
    const Eigen e = jacobi_eigen(M);
    pos = neg = 0.0;
    for (int k = 0; k < M.d; ++k) {
        if (e.values[k] > 0) pos += e.values[k];
        else neg += e.values[k];
    }
}

}  // namespace

double pucci_plus(const Ellipticity& e, const SymMat& M) {
    check_sym(M);
    double pos, neg;
    pos_neg_sums(M, pos, neg);
    return -e.lambda * pos - e.Lambda * neg;
}

double pucci_minus(const Ellipticity& e, const SymMat& M) {
    check_sym(M);
    double pos, neg;
    pos_neg_sums(M, pos, neg);
    return -e.Lambda * pos - e.lambda * neg;
}

OperatorSpec OperatorSpec::linear(const SymMat& A, Ellipticity e) {
    OperatorSpec s = make(OpKind::LinearTrace, e);
    s.A = A;
    return s;
}

OperatorSpec OperatorSpec::bellman_min(std::vector<OperatorSpec> members, Ellipticity e) {
    OperatorSpec s = make(OpKind::BellmanMin, e);
    s.members = std::move(members);
    return s;
}

double eval_operator(const OperatorSpec& F, const SymMat& M0) {
    SymMat M = M0;
    if (F.shift != 0.0)
        for (int i = 0; i < M.d; ++i) M(i, i) += F.shift;
    double v = 0.0;
    switch (F.kind) {
    case OpKind::PucciPlus: v = pucci_plus(F.ell, M); break;
    case OpKind::PucciMinus: v = pucci_minus(F.ell, M); break;
    case OpKind::LinearTrace:
        require(F.A.d == M.d, Status::invalid_argument, "operator/matrix dimension mismatch");
        v = -trace_product(F.A, M);
        break;
    case OpKind::BellmanMin: {
        require(!F.members.empty(), Status::invalid_argument, "empty Bellman family");
        v = std::numeric_limits<double>::infinity();
        for (const auto& m : F.members) v = std::min(v, eval_operator(m, M));
        break;
    }
    case OpKind::Custom:
        require(static_cast<bool>(F.custom), Status::invalid_argument, "custom operator without callback");
        v = F.custom(M);
        break;
    }
    return v + F.offset;
}

std::string kind_name(OpKind k) {
    switch (k) {
    case OpKind::PucciPlus: return "pucci_plus";
    case OpKind::PucciMinus: return "pucci_minus";
    case OpKind::LinearTrace: return "linear_trace";
    case OpKind::BellmanMin: return "bellman_min";
    case OpKind::Custom: return "custom";
    }
    return "unknown";
}

EllipticityReport verify_ellipticity(const OperatorSpec& F, int d, int samples, std::uint64_t seed,
                                     double tol) {
    require(samples >= 1, Status::invalid_argument, "samples must be >= 1");
    check_dim(d);
    check_ellipticity(F.ell);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    EllipticityReport r;
    r.samples = samples;
    for (int k = 0; k < samples; ++k) {
        const double scale = std::pow(10.0, -2.0 + 4.0 * U(rng));
        const SymMat M = random_sym(d, rng, scale);
        // every few draws use a nearby N so that small increments are probed too
        SymMat N = (k % 3 == 0) ? M + random_sym(d, rng, 1e-3 * scale) : random_sym(d, rng, scale);
        const double diff = eval_operator(F, M) - eval_operator(F, N);
        const SymMat D = M - N;
        const double lo = pucci_minus(F.ell, D), hi = pucci_plus(F.ell, D);
        const double margin = std::min(diff - lo, hi - diff);
        const double slack = tol * std::max(1.0, D.max_abs_entry());
        if (margin < r.worst_margin) {
            r.worst_margin = margin;
            r.witness_M = M;
            r.witness_N = N;
        }
        if (margin < -slack && r.passed) {
            r.passed = false;
            r.message = "F1 violated: F(M)-F(N)=" + std::to_string(diff) + " outside [" +
                        std::to_string(lo) + ", " + std::to_string(hi) + "]";
        }
        const double h = 1e-6 * scale;
        const SymMat E = random_sym(d, rng, 1.0);
        const double mod = std::abs(eval_operator(F, M + h * E) - eval_operator(F, M)) / h;
        r.sampled_modulus = std::max(r.sampled_modulus, mod);
    }
    if (r.passed) r.message = "F1 sandwich holds on all samples";
    return r;
}

Normalization normalize_problem(const OperatorSpec& F, int d, double g0) {
    check_dim(d);
    check_ellipticity(F.ell);
    Normalization n;
    n.g_shift = g0;
    const SymMat Z(d);
    const double f0 = eval_operator(F, Z);
    n.bound = std::abs(f0) / (F.ell.lambda * d);
    n.spec = F;
    if (f0 == 0.0) return n;

    auto phi = [&](double a) { return eval_operator(F, SymMat::identity(d, a)); };
    // phi is nonincreasing; the root lies in [-bound, bound] under F1
    double lo = -n.bound * (1.0 + 1e-12), hi = n.bound * (1.0 + 1e-12);
    double flo = phi(lo), fhi = phi(hi);
    require(flo >= 0.0 && fhi <= 0.0, Status::precondition,
            "bisection does not bracket a root; operator violates F1");
    for (int it = 0; it < 200 && hi - lo > 1e-16 * std::max(1.0, n.bound); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = phi(mid);
        if (fm == 0.0) {
            lo = hi = mid;
            break;
        }
        if (fm > 0.0) lo = mid;
        else hi = mid;
    }
    n.a = 0.5 * (lo + hi);
    n.spec.shift = F.shift + n.a;
    return n;
}

nlohmann::json operator_to_json(const OperatorSpec& F) {
    nlohmann::json j;
    j["kind"] = kind_name(F.kind);
    j["lambda"] = F.ell.lambda;
    j["Lambda"] = F.ell.Lambda;
    if (F.offset != 0.0) j["offset"] = F.offset;
    if (F.shift != 0.0) j["shift"] = F.shift;
    if (F.kind == OpKind::LinearTrace) {
        nlohmann::json rows = nlohmann::json::array();
        for (int i = 0; i < F.A.d; ++i) {
            nlohmann::json row = nlohmann::json::array();
            for (int k = 0; k < F.A.d; ++k) row.push_back(F.A(i, k));
            rows.push_back(row);
        }
        j["A"] = rows;
    }
    if (F.kind == OpKind::BellmanMin) {
        j["members"] = nlohmann::json::array();
        for (const auto& m : F.members) j["members"].push_back(operator_to_json(m));
    }
    return j;
}

OperatorSpec operator_from_json(const nlohmann::json& j, int d) {
    check_dim(d);
    OperatorSpec F;
    const std::string kind = j.value("kind", "pucci_plus");
    F.ell.lambda = j.value("lambda", 1.0);
    F.ell.Lambda = j.value("Lambda", F.ell.lambda);
    F.offset = j.value("offset", 0.0);
    F.shift = j.value("shift", 0.0);
    if (kind == "pucci_plus") F.kind = OpKind::PucciPlus;
    else if (kind == "pucci_minus") F.kind = OpKind::PucciMinus;
    else if (kind == "linear_trace" || kind == "heat") {
        F.kind = OpKind::LinearTrace;
        F.A = SymMat::identity(d);
        if (j.contains("A")) {
            const auto& rows = j.at("A");
            require(rows.is_array() && static_cast<int>(rows.size()) == d, Status::parse,
                    "operator A must be a d x d array");
            for (int i = 0; i < d; ++i)
                for (int k = 0; k < d; ++k) F.A(i, k) = rows.at(i).at(k).get<double>();
            require(F.A.is_symmetric(1e-12), Status::parse, "operator A must be symmetric");
        }
    } else if (kind == "bellman_min") {
        F.kind = OpKind::BellmanMin;
        require(j.contains("members") && j.at("members").is_array() && !j.at("members").empty(),
                Status::parse, "bellman_min needs a nonempty members list");
        for (const auto& m : j.at("members")) F.members.push_back(operator_from_json(m, d));
    } else {
        fail(Status::parse, "unknown operator kind '" + kind + "'");
    }
    check_ellipticity(F.ell);
    return F;
}

}  // namespace prlab
