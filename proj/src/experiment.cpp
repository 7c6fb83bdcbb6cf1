#include "experiment.hpp"

#include "barrier.hpp"
#include "constants.hpp"
#include "hausdorff.hpp"
#include "regularity.hpp"
#include "solver.hpp"

#include <openssl/evp.h>
#include <openssl/opensslv.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace prlab {

json default_config() {
    return json::parse(R"({
  "name": "experiment",
  "seed": 1,
  "problem": {
    "enabled": true,
    "d": 1,
    "nx": 33,
    "rho": 1.0,
    "t0": 0.0,
    "cfl_safety": 1.0,
    "directions": 4,
    "operator": {"kind": "heat", "lambda": 1.0, "Lambda": 1.0},
    "source": "solve",
    "exact": {"name": "heat_mode", "params": {"amplitude": 1.0}},
    "g": null,
    "data_file": null,
    "max_nodes": 50000000
  },
  "analysis": {
    "domain": {"center": [0.0, 0.0, 0.0], "t": 0.0, "radius": 1.0},
    "region": {"center": [0.0, 0.0, 0.0], "t": -0.25, "radius": 0.5},
    "theta": true,
    "psi": true,
    "theta_mode": "gradient",
    "normalize": true,
    "kappa": {"min": null, "levels": 10, "fit_from": null, "diagnostic_min": 1.0, "diagnostic_levels": 16},
    "akappa": {"enabled": false, "kappas": [1, 2, 4, 8, 16], "mode": "exact", "vertex_h": 0.0,
               "max_containment": 100, "tol": 1e-8},
    "singular": {"enabled": true, "delta": 0.05, "radii": [0.04, 0.03, 0.02]},
    "c_vol_mc_samples": 0
  },
  "constants": {"d": null, "lambda": null, "Lambda": null, "theta": 0.75, "R": 0.06, "c2": 1.0,
                "c_vol": 0.0, "g_norm": 0.0, "tau": 1.0},
  "constants_sweep": {"enabled": false, "theta": [0.75, 1, 2, 5], "d": [1, 2, 3],
                      "lambda_over_Lambda": [1, 0.5, 0.2], "R": "default"},
  "checks": {
    "solver_error_max": null,
    "psi_max": null,
    "singular_empty": false,
    "survival_domination": true,
    "fit_positive": false,
    "akappa": true,
    "chain_valid": true,
    "rho0": "weak"
  }
})");
}

namespace {

void check_keys(const json& user, const json& defaults, const std::string& where) {
    require(user.is_object(), Status::parse, where + " must be an object");
    for (auto it = user.begin(); it != user.end(); ++it) {
        require(defaults.contains(it.key()), Status::parse, "unknown config key '" + where + it.key() + "'");
        const json& dv = defaults.at(it.key());
        // nested objects are checked too, except free-form parameter blocks
        if (dv.is_object() && it->is_object() && it.key() != "params" && it.key() != "operator")
            check_keys(*it, dv, where + it.key() + ".");
    }
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    return j.contains(key) && !j.at(key).is_null() ? j.at(key).get<T>() : fallback;
}

Cylinder cylinder_from(const json& j, int d) {
    Cylinder c;
    c.center.d = d;
    const json& ctr = j.at("center");
    for (int i = 0; i < d; ++i) c.center.x[i] = i < int(ctr.size()) ? ctr.at(i).get<double>() : 0.0;
    c.center.t = j.at("t").get<double>();
    c.radius = j.at("radius").get<double>();
    require(c.radius > 0.0, Status::parse, "cylinder radius must be positive");
    return c;
}

Field g_field(const json& problem, const ExactSolution& ex) {
    const json& g = problem.at("g");
    if (g.is_null()) return ex.g;
    if (g.is_number()) {
        const double v = g.get<double>();
        return [v](const Point&) { return v; };
    }
    require(g.is_object() && g.value("kind", "") == "sin", Status::parse, "g must be null, a number or {kind: sin}");
    const double A = g.value("amplitude", 1.0), k = g.value("frequency", 1.0);
    return [A, k](const Point& p) { return A * std::sin(k * p.x[0]); };
}

// sup|g| + Lip(g) for the g forms above
double g_norm_of(const json& problem) {
    const json& g = problem.at("g");
    if (g.is_null()) return 0.0;
    if (g.is_number()) return std::abs(g.get<double>());
    const double A = std::abs(g.value("amplitude", 1.0)), k = std::abs(g.value("frequency", 1.0));
    return A + A * k;
}

ConstantInputs inputs_from(const json& c, int d, const Ellipticity& e) {
    ConstantInputs in;
    in.d = get_or<int>(c, "d", d);
    in.lambda = get_or<double>(c, "lambda", e.lambda);
    in.Lambda = get_or<double>(c, "Lambda", e.Lambda);
    in.theta = get_or<double>(c, "theta", in.theta);
    if (c.contains("R") && c.at("R").is_string()) {
        require(c.at("R") == "default", Status::parse, "R must be a number or \"default\"");
        in.R = default_R(in.d, in.theta);
    } else {
        in.R = get_or<double>(c, "R", in.R);
    }
    in.c2 = get_or<double>(c, "c2", in.c2);
    in.c_vol = get_or<double>(c, "c_vol", in.c_vol);
    in.g_norm = get_or<double>(c, "g_norm", in.g_norm);
    in.tau = get_or<double>(c, "tau", in.tau);
    return in;
}

struct Ledgerish {
    json rows = json::array();
    void add(const std::string& module, const std::string& op, const std::string& name, bool ok,
             const std::string& detail) {
        rows.push_back({{"module", module}, {"op", op}, {"check", name}, {"passed", ok}, {"detail", detail}});
    }
    bool passed() const {
        return std::all_of(rows.begin(), rows.end(), [](const json& r) { return r.at("passed").get<bool>(); });
    }
};

std::string num(double v) {
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
}

void write_json(const json& j, const fs::path& p) {
    std::ofstream out(p);
    require(out.good(), Status::io, "cannot open '" + p.string() + "' for writing");
    out << j.dump(2) << '\n';
    require(out.good(), Status::io, "write failed for '" + p.string() + "'");
}

std::string file_sha256(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return sha256_hex(ss.str());
}

bool chain_check(const ConstantChain& c, const std::string& rho0_mode, std::string& why) {
    bool ok = c.epsilon > 0.0 && c.epsilon < 1.0 && c.side.r_ok && c.side.t1_h1_ok && c.side.s0_ok &&
              c.side.spread_ok;
    if (rho0_mode == "strict") ok = ok && c.side.rho0_strict;
    else if (rho0_mode == "weak") ok = ok && c.side.rho0_weak;
    for (const ChainEntry& e : c.entries())
        if (!(std::isfinite(e.log_value) || (std::isfinite(e.value) && e.value > 0.0))) ok = false;
    why = "eps " + num(c.epsilon) + ", T1+H1 " + num(c.side.t1_plus_h1) + ", s0 " + num(c.side.s0_lower) +
          ", rho0 gap " + num(c.side.rho0_gap);
    return ok;
}

std::vector<double> normalized(const std::vector<double>& v, double by) {
    std::vector<double> out(v);
    if (by > 0.0)
        for (double& x : out) x /= by;
    return out;
}

}  // namespace

json resolve_config(const json& user) {
    json def = default_config();
    check_keys(user, def, "");
    json r = def;
    r.merge_patch(user);
    // merge_patch drops explicit nulls; restore the defaults' null markers
    for (const char* sect : {"problem", "analysis", "constants", "checks"})
        for (auto it = def.at(sect).begin(); it != def.at(sect).end(); ++it)
            if (!r.at(sect).contains(it.key())) r[sect][it.key()] = nullptr;
    // free-form blocks are taken whole from the user
    if (user.contains("problem"))
        for (const char* k : {"operator", "exact"})
            if (user.at("problem").contains(k) && !user.at("problem").at(k).is_null()) r["problem"][k] = user["problem"][k];
    for (const char* k : {"min", "fit_from"})
        if (!r["analysis"]["kappa"].contains(k)) r["analysis"]["kappa"][k] = nullptr;

    const json& p = r.at("problem");
    const int d = p.at("d").get<int>();
    check_dim(d, 2);
    require(p.at("nx").get<int>() >= 5, Status::parse, "problem.nx must be >= 5");
    require(p.at("cfl_safety").get<double>() > 0.0 && p.at("cfl_safety").get<double>() <= 1.0, Status::parse,
            "problem.cfl_safety must lie in (0, 1]");
    const std::string src = p.at("source");
    require(src == "solve" || src == "sample", Status::parse, "problem.source must be solve or sample");
    if (!p.at("data_file").is_null())
        require(fs::exists(p.at("data_file").get<std::string>()), Status::parse,
                "problem.data_file does not exist: " + p.at("data_file").get<std::string>());
    const std::string rho0 = r.at("checks").at("rho0").is_null() ? "off" : r.at("checks").at("rho0").get<std::string>();
    require(rho0 == "weak" || rho0 == "strict" || rho0 == "off", Status::parse, "checks.rho0 must be weak, strict or null");
    require(r.at("seed").is_number_unsigned() || r.at("seed").is_number_integer(), Status::parse, "seed must be an integer");
    return r;
}

json load_config(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), Status::io, "cannot read config '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        fail(Status::parse, "config '" + path + "': " + e.what());
    }
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    require(EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) == 1, Status::internal,
            "SHA-256 failed");
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return os.str();
}

std::string config_hash(const json& resolved) { return sha256_hex(resolved.dump(2) + "\n"); }

GridFunction solve_command(const json& problem_in, int threads) {
    const json problem = resolve_config({{"problem", problem_in}}).at("problem");
    const int d = problem.at("d");
    if (!problem.at("data_file").is_null()) return read_binary(problem.at("data_file").get<std::string>());
    const OperatorSpec F = operator_from_json(problem.at("operator"), d);
    const double rho = problem.at("rho"), t0 = problem.at("t0");
    const int nx = problem.at("nx"), dirs = problem.at("directions");
    const double dx = 2.0 * rho / (nx - 1);
    const Grid g = Grid::with_dt(d, nx, rho, t0, problem.at("cfl_safety").get<double>() * cfl_dt(F, d, dx, dirs));
    require(double(g.size()) <= problem.at("max_nodes").get<double>(), Status::precondition,
            "grid has " + std::to_string(g.size()) + " nodes, above problem.max_nodes");
    const json& ej = problem.at("exact");
    const ExactSolution ex = exact_solution(ej.at("name"), ej.value("params", json::object()), F, d, rho, t0);
    if (problem.at("source") == "sample") return sample(g, ex.u);
    ProblemSpec P = problem_from_exact(ex, F);
    P.g = g_field(problem, ex);
    return solve(P, g, {dirs, threads});
}

namespace {

std::vector<ConstantChain> sweep_chains(const json& in, const json& s) {
    std::vector<ConstantChain> out;
    for (const auto& th : s.at("theta"))
        for (const auto& d : s.at("d"))
            for (const auto& r : s.at("lambda_over_Lambda")) {
                json c = in;
                c["theta"] = th;
                c["d"] = d;
                c["lambda"] = 1.0;
                c["Lambda"] = 1.0 / r.get<double>();
                c["R"] = s.value("R", json("default"));
                out.push_back(compute_constants(inputs_from(c, 1, {1.0, 1.0})));
            }
    return out;
}

}  // namespace

json constants_command(const json& request) {
    const json& in = request.contains("inputs") ? request.at("inputs") : request;
    if (request.contains("sweep")) {
        json out = json::array();
        for (const auto& c : sweep_chains(in, request.at("sweep"))) out.push_back(to_json(c));
        return {{"sweep", out}};
    }
    return to_json(compute_constants(inputs_from(in, 1, {1.0, 1.0})));
}

json theta_command(const GridFunction& u, const json& request, const std::string& csv_path, int threads) {
    const int d = u.grid.d;
    const json def = default_config().at("analysis");
    const Cylinder D = cylinder_from(request.value("domain", def.at("domain")), d);
    const Cylinder R = cylinder_from(request.value("region", def.at("region")), d);
    const std::string mode = request.value("theta_mode", std::string("gradient"));
    require(mode == "gradient" || mode == "lattice", Status::parse, "theta_mode must be gradient or lattice");
    const ThetaField f = theta_field(u, D, R, mode == "gradient" ? ThetaMode::Gradient : ThetaMode::Lattice, threads);
    if (!csv_path.empty()) write_theta_csv(f, csv_path);
    double lo = 0.0, up = 0.0;
    for (std::size_t i = 0; i < f.nodes.size(); ++i) {
        lo = std::max(lo, f.lower[i]);
        up = std::max(up, f.upper[i]);
    }
    return {{"nodes", f.nodes.size()}, {"max_theta_lower", lo}, {"max_theta_upper", up}, {"mode", mode}};
}

json psi_command(const GridFunction& u, const json& request, const std::string& csv_path, int threads) {
    const int d = u.grid.d;
    const json def = default_config().at("analysis");
    const Cylinder D = cylinder_from(request.value("domain", def.at("domain")), d);
    const Cylinder R = cylinder_from(request.value("region", def.at("region")), d);
    const PsiField f = psi_field(u, D, R, threads);
    if (!csv_path.empty()) write_psi_csv(f, csv_path);
    double mx = 0.0;
    for (double v : f.value) mx = std::max(mx, v);
    return {{"nodes", f.nodes.size()}, {"max_psi", mx}};
}

json akappa_command(const GridFunction& u, const json& request, GridFunction* mask) {
    const json def = default_config().at("analysis").at("akappa");
    json a = def;
    a.merge_patch(request);
    const std::string m = a.at("mode");
    require(m == "exact" || m == "lattice", Status::parse, "akappa.mode must be exact or lattice");
    const KappaMode mode = m == "exact" ? KappaMode::Exact : KappaMode::Lattice;
    std::vector<double> ks = a.at("kappas").get<std::vector<double>>();
    require(!ks.empty(), Status::parse, "akappa.kappas is empty");
    const double vh = a.at("vertex_h");
    json sizes = json::array();
    for (double k : ks) {
        const KappaSetField f = a_kappa_set(u, k, mode, vh);
        sizes.push_back({{"kappa", k}, {"members", f.count()}, {"tol", f.tol}});
        if (mask && k == *std::max_element(ks.begin(), ks.end())) {
            *mask = GridFunction(u.grid);
            for (std::size_t i = 0; i < f.member.size(); ++i) mask->v[i] = f.member[i];
        }
    }
    const KappaChecks c = check_a_kappa(u, ks, mode, vh, a.at("max_containment").get<long>(), a.at("tol").get<double>());
    return {{"mode", m},
            {"sets", sizes},
            {"monotone_violations", c.monotone_violations},
            {"containment_checked", c.containment_checked},
            {"containment_violations", c.containment_violations},
            {"containment_worst", c.containment_worst}};
}

json barrier_command(const json& request) {
    const long samples = request.value("samples", 10000L);
    const std::uint64_t seed = request.value("seed", std::uint64_t(1));
    auto one = [&](int d, double lam, double Lam, double th, double tau) {
        const BarrierParams p = barrier_params(d, lam, Lam, th, tau);
        return to_json(verify_barrier(p, samples, seed));
    };
    if (request.contains("sweep") && request.at("sweep").get<bool>()) {
        json out = json::array();
        bool all = true;
        for (double th : {0.75, 1.0, 2.0, 5.0})
            for (double L : {1.0, 2.0, 5.0})
                for (int d : {1, 2})
                    for (double tau : {0.5, 1.0}) {
                        json r = one(d, 1.0, L, th, tau);
                        all = all && r.at("passed").get<bool>();
                        out.push_back(std::move(r));
                    }
        return {{"reports", out}, {"passed", all}};
    }
    return one(request.value("d", 1), request.value("lambda", 1.0), request.value("Lambda", 1.0),
               request.value("theta", 0.75), request.value("tau", 1.0));
}

json dimension_command(const json& request, const std::string& csv_path) {
    PointSet E;
    int d = request.value("d", 1);
    check_dim(d, 3);
    if (request.contains("points_csv")) {
        std::ifstream in(request.at("points_csv").get<std::string>());
        require(in.good(), Status::io, "cannot read points file");
        std::string line;
        std::getline(in, line);  // header
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::stringstream ss(line);
            std::vector<double> v;
            std::string cell;
            while (std::getline(ss, cell, ',')) v.push_back(std::stod(cell));
            require(int(v.size()) >= d + 1, Status::parse, "points file row has too few columns");
            Point p;
            p.d = d;
            for (int i = 0; i < d; ++i) p.x[i] = v[i];
            p.t = v[d];
            E.push_back(p);
        }
    } else {
        // synthetic sets: time_segment, spatial_slice, cylinder
        const std::string kind = request.value("set", std::string("time_segment"));
        const int n = request.value("n", 256);
        if (kind == "time_segment") {
            for (int i = 0; i < n * n; ++i) E.push_back(Point{d, {}, -1.0 + (i + 0.5) / (n * n)});
        } else if (kind == "spatial_slice" || kind == "cylinder") {
            const int nt = kind == "cylinder" ? n * n / 4 : 1;
            std::vector<int> idx(d, 0);
            const long total = long(std::pow(n, d));
            for (long m = 0; m < total; ++m) {
                Point p{d, {}, 0.0};
                long r = m;
                for (int i = 0; i < d; ++i) {
                    p.x[i] = -1.0 + (r % n + 0.5) * 2.0 / n;
                    r /= n;
                }
                if (norm2(p.x, d) >= 1.0) continue;
                for (int k = 0; k < nt; ++k) {
                    p.t = nt == 1 ? -1e-9 : -1.0 + (k + 0.5) / nt;
                    E.push_back(p);
                }
            }
        } else {
            fail(Status::parse, "unknown synthetic set '" + kind + "'");
        }
    }
    const std::vector<double> radii =
        request.value("radii", std::vector<double>{1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64});
    const CoverReport c = box_dimension(E, radii);
    if (!csv_path.empty()) write_cover_csv(c, csv_path);
    json j = to_json(c);
    j["points"] = E.size();
    j["d"] = d;
    return j;
}

RunSummary run_experiment(const json& config, const std::string& out_dir, int threads) {
    const json cfg = resolve_config(config);
    const fs::path out(out_dir);
    fs::create_directories(out);
    Ledgerish L;
    json files = json::array();
    auto keep = [&](const fs::path& p) { files.push_back(p.filename().string()); };

    const std::uint64_t seed = cfg.at("seed").get<std::uint64_t>();
    const json& P = cfg.at("problem");
    const json& A = cfg.at("analysis");
    const json& C = cfg.at("checks");
    const int d = P.at("d");
    const OperatorSpec F = operator_from_json(P.at("operator"), d);

    // constants
    ConstantInputs ci = inputs_from(cfg.at("constants"), d, F.ell);
    if (cfg.at("constants").at("g_norm").get<double>() == 0.0) ci.g_norm = g_norm_of(P);
    const ConstantChain cc = compute_constants(ci);
    json cj = to_json(cc);
    if (const long n = A.at("c_vol_mc_samples").get<long>(); n > 0) {
        const VolumeEstimate mc = c_vol_monte_carlo(ci.d, ci.theta, n, seed);
        cj["c_vol_monte_carlo"] = {{"samples", n}, {"mean", mc.mean}, {"stderr", mc.stderr_}};
    }
    write_json(cj, out / "constants.json");
    keep(out / "constants.json");
    if (C.at("chain_valid").get<bool>()) {
        std::string why;
        const std::string mode = C.at("rho0").is_null() ? "off" : C.at("rho0").get<std::string>();
        const bool ok = chain_check(cc, mode, why);
        L.add("constants", "compute_constants", "chain valid (rho0 " + mode + ")", ok, why);
    }

    const json& S = cfg.at("constants_sweep");
    if (S.at("enabled").get<bool>()) {
        const auto chains = sweep_chains(cfg.at("constants"), S);
        json arr = json::array();
        for (const auto& c : chains) arr.push_back(to_json(c));
        write_json({{"sweep", arr}}, out / "constants_sweep.json");
        keep(out / "constants_sweep.json");
        if (C.at("chain_valid").get<bool>()) {
            const std::string mode = C.at("rho0").is_null() ? "off" : C.at("rho0").get<std::string>();
            long bad = 0, strict_eq = 0;
            std::string why, first;
            for (const auto& c : chains) {
                if (!chain_check(c, mode, why)) {
                    ++bad;
                    if (first.empty())
                        first = "; first invalid: theta=" + num(c.in.theta) + " d=" + std::to_string(c.in.d) +
                                " Lambda=" + num(c.in.Lambda) + " (" + why + ")";
                }
                strict_eq += !c.side.rho0_strict;
            }
            L.add("constants", "compute_constants", "sweep chains valid (rho0 " + mode + ")", bad == 0,
                  std::to_string(chains.size()) + " tuples, " + std::to_string(bad) + " invalid, " +
                      std::to_string(strict_eq) + " with rho0 = 1/(2a)" + first);
        }
    }

    if (P.at("enabled").get<bool>()) {
        const GridFunction u = solve_command(P, threads);
        write_binary(u, out / "u.bin");
        keep(out / "u.bin");
        json grid = {{"d", u.grid.d}, {"nx", u.grid.nx}, {"nt", u.grid.nt}, {"rho", u.grid.rho},
                     {"t0", u.grid.t0}, {"dx", u.grid.dx()}, {"dt", u.grid.dt()}};
        json report = {{"grid", grid}, {"operator", operator_to_json(F)}, {"sup_abs", u.sup_abs()}};

        if (!C.at("solver_error_max").is_null() && P.at("data_file").is_null()) {
            const json& ej = P.at("exact");
            const ExactSolution ex = exact_solution(ej.at("name"), ej.value("params", json::object()), F, d,
                                                    u.grid.rho, u.grid.t0);
            double err = 0.0;
            for (std::size_t k = 0; k < u.v.size(); ++k) err = std::max(err, std::abs(u.v[k] - ex.u(u.grid.node(k))));
            report["max_error_vs_exact"] = err;
            const double tol = C.at("solver_error_max");
            L.add("solver", "solve", "max error vs closed form", err <= tol, num(err) + " (max " + num(tol) + ")");
        }

        const Cylinder D = cylinder_from(A.at("domain"), d), R = cylinder_from(A.at("region"), d);
        const double supu = u.sup_abs();
        const double Lsup = std::max(0.0, -supersolution_residual_min(u, F.ell));
        const double gn = g_norm_of(P);
        const bool norm = A.at("normalize");
        const json& K = A.at("kappa");
        const double kmin = K.at("min").is_null() ? cc.kappa0 : K.at("min").get<double>();
        const double kfit = K.at("fit_from").is_null() ? cc.kappa0 : K.at("fit_from").get<double>();
        const int levels = K.at("levels");
        json survival = json::object();

        auto survive = [&](const std::string& q, const std::vector<double>& vals, double scale) {
            const SurvivalFit f = survival_and_fit(vals, u.grid.cell_volume(), kmin, levels, kfit);
            const SurvivalFit diag = survival_and_fit(vals, u.grid.cell_volume(), K.at("diagnostic_min"),
                                                      K.at("diagnostic_levels"), K.at("diagnostic_min"));
            json sj = to_json(f);
            sj["diagnostic"] = to_json(diag);
            json bound = json::array();
            long dominated = 0;
            for (const auto& row : f.table) {
                const double b = decay_bound(cc, row.kappa, scale);
                bound.push_back(b);
                if (row.measure <= b) ++dominated;
            }
            sj["bound"] = bound;
            survival[q] = sj;
            if (C.at("survival_domination").get<bool>())
                L.add("regularity", "survival_and_fit", q + " survival dominated by C(k/k0)^-eps",
                      dominated == long(f.table.size()),
                      std::to_string(dominated) + "/" + std::to_string(f.table.size()) + " kappa levels");
            if (C.at("fit_positive").get<bool>())
                L.add("regularity", "survival_and_fit", q + " fitted eps-hat > 0", f.fitted && f.eps_hat > 0.0,
                      f.fitted ? "eps-hat " + num(f.eps_hat) : "fit refused: " + f.reason);
        };

        if (A.at("theta").get<bool>()) {
            const ThetaField tf = theta_field(u, D, R, A.at("theta_mode") == "gradient" ? ThetaMode::Gradient
                                                                                        : ThetaMode::Lattice,
                                              threads);
            write_theta_csv(tf, (out / "theta.csv").string());
            keep(out / "theta.csv");
            double lo = 0.0, up = 0.0;
            for (std::size_t i = 0; i < tf.nodes.size(); ++i) {
                lo = std::max(lo, tf.lower[i]);
                up = std::max(up, tf.upper[i]);
            }
            report["theta"] = {{"nodes", tf.nodes.size()}, {"max_theta_lower", lo}, {"max_theta_upper", up}};
            survive("theta_lower", normalized(tf.lower, norm ? supu + Lsup : 0.0), 1.0);
        }
        if (A.at("psi").get<bool>()) {
            const PsiField pf = psi_field(u, D, R, threads);
            write_psi_csv(pf, (out / "psi.csv").string());
            keep(out / "psi.csv");
            double mx = 0.0;
            for (double v : pf.value) mx = std::max(mx, v);
            report["psi"] = {{"nodes", pf.nodes.size()}, {"max_psi", mx}};
            if (!C.at("psi_max").is_null()) {
                const double cap = C.at("psi_max");
                L.add("regularity", "psi", "sup Psi bounded", mx <= cap, num(mx) + " (max " + num(cap) + ")");
            }
            const double np = supu + std::abs(eval_operator(F, SymMat(d))) + gn;
            survive("psi", normalized(pf.value, norm ? np : 0.0), cc.C1 * (1.0 + gn));

            const json& Sg = A.at("singular");
            if (Sg.at("enabled").get<bool>()) {
                const auto radii = Sg.at("radii").get<std::vector<double>>();
                const auto sets = singular_set(pf, Sg.at("delta").get<double>(), radii);
                json sj = json::array();
                std::size_t total = 0;
                for (std::size_t i = 0; i < radii.size(); ++i) {
                    total += sets[i].size();
                    sj.push_back({{"r", radii[i]}, {"nodes", sets[i].size()}});
                }
                json sing = {{"delta", Sg.at("delta")}, {"sets", sj}};
                if (!sets.back().empty() && radii.size() >= 3) {
                    const CoverReport cr = box_dimension(sets.back(), radii);
                    sing["cover"] = to_json(cr);
                    write_cover_csv(cr, (out / "singular_cover.csv").string());
                    keep(out / "singular_cover.csv");
                }
                write_json(sing, out / "singular.json");
                keep(out / "singular.json");
                if (C.at("singular_empty").get<bool>())
                    L.add("hausdorff", "singular_set", "singular set empty", total == 0,
                          std::to_string(total) + " nodes over " + std::to_string(radii.size()) + " radii");
            }
        }
        if (A.at("theta").get<bool>() || A.at("psi").get<bool>()) {
            write_json(survival, out / "survival.json");
            keep(out / "survival.json");
        }
        if (A.at("akappa").at("enabled").get<bool>()) {
            const json ak = akappa_command(u, A.at("akappa"), nullptr);
            report["akappa"] = ak;
            if (C.at("akappa").get<bool>()) {
                L.add("regularity", "a_kappa_set", "monotone in kappa", ak.at("monotone_violations") == 0,
                      ak.at("monotone_violations").dump() + " violations");
                L.add("regularity", "a_kappa_set", "inside {Theta-lower <= kappa(1+tol)}",
                      ak.at("containment_violations") == 0,
                      ak.at("containment_violations").dump() + "/" + ak.at("containment_checked").dump());
            }
        }
        write_json(report, out / "fields.json");
        keep(out / "fields.json");
    }

    write_json(L.rows, out / "ledger.json");
    keep(out / "ledger.json");
    write_json(cfg, out / "config.resolved.json");

    RunSummary rs;
    rs.ledger = L.rows;
    rs.passed = L.passed();
    json fh = json::object();
    for (const auto& f : files) fh[f.get<std::string>()] = file_sha256(out / f.get<std::string>());
    rs.manifest = {{"name", cfg.at("name")},
                   {"config_hash", config_hash(cfg)},
                   {"config_file", "config.resolved.json"},
                   {"seed", seed},
                   {"versions",
                    {{"prlab", kVersion},
                     {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                           std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                           std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
                     {"openssl", OPENSSL_VERSION_TEXT},
                     {"compiler", __VERSION__}}},
                   {"files", fh},
                   {"passed", rs.passed},
                   {"failures", std::count_if(L.rows.begin(), L.rows.end(),
                                              [](const json& r) { return !r.at("passed").get<bool>(); })},
                   {"notes", "c2 is an input; C0, C1, C2 depend on it. Box counts are box-dimension estimates."}};
    write_json(rs.manifest, out / "manifest.json");
    return rs;
}

}  // namespace prlab
