// prlab command line front end; talks to the library only through the C API.
#include <prlab/prlab.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace {

using nlohmann::json;

struct CStr {
    char* p = nullptr;
    ~CStr() { prlab_string_free(p); }
};

struct Grid {
    prlab_grid* p = nullptr;
    ~Grid() { prlab_grid_free(p); }
};

int report(prlab_status s) {
    if (s == PRLAB_OK) return 0;
    std::fprintf(stderr, "prlab: %s: %s\n", prlab_status_name(s), prlab_last_error());
    return 2;
}

std::string slurp(const std::string& path) {
    if (path.empty()) return "{}";
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Writes text to --out when given, otherwise to stdout.
void print(const std::string& text, const std::string& out) {
    if (out.empty()) {
        std::cout << text << "\n";
        return;
    }
    std::ofstream f(out);
    f << text << "\n";
    if (!f) throw std::runtime_error("cannot write " + out);
}

bool json_passed(const char* s) {
    const json j = json::parse(s);
    return !j.contains("passed") || j.at("passed").get<bool>();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"prlab: numerical laboratory for fully nonlinear parabolic regularity"};
    app.set_version_flag("--version", std::string(prlab_version()));
    app.require_subcommand(1);

    std::string config, out, input, csv, suite = "all";
    long long seed = -1;
    int threads = 1;

    auto common = [&](CLI::App* c, bool needs_config) {
        auto* o = c->add_option("--config", config, "JSON config or request file");
        if (needs_config) o->required()->check(CLI::ExistingFile);
        else o->check(CLI::ExistingFile);
        c->add_option("--threads", threads, "worker threads")->check(CLI::Range(1, 256));
    };

    auto* run = app.add_subcommand("run", "full pipeline from a config file");
    common(run, true);
    run->add_option("--out", out, "output directory")->required();
    run->add_option("--seed", seed, "override the config seed")->check(CLI::NonNegativeNumber);

    auto* verify = app.add_subcommand("verify", "module invariant batteries");
    verify->add_option("suite", suite, "geometry|operators|solver|regularity|barrier|constants|hausdorff|all");
    verify->add_option("--seed", seed, "RNG seed")->check(CLI::NonNegativeNumber);
    verify->add_option("--threads", threads, "worker threads")->check(CLI::Range(1, 256));
    verify->add_option("--out", out, "write the ledger JSON here");

    auto* constants = app.add_subcommand("constants", "constant chain for the given inputs");
    common(constants, false);
    constants->add_option("--out", out, "write JSON here");

    auto* solve = app.add_subcommand("solve", "solve or sample the config's problem block");
    common(solve, true);
    solve->add_option("--out", out, "binary grid output")->required();
    solve->add_option("--csv", csv, "also write a CSV");

    auto* theta = app.add_subcommand("theta", "Theta field of a grid");
    auto* psi = app.add_subcommand("psi", "Psi field of a grid");
    auto* akappa = app.add_subcommand("akappa", "A_kappa sets of a grid");
    for (auto* c : {theta, psi, akappa}) {
        common(c, false);
        c->add_option("--input", input, "binary grid file")->required()->check(CLI::ExistingFile);
        c->add_option("--out", out, "write JSON here");
    }
    theta->add_option("--csv", csv, "per-node CSV");
    psi->add_option("--csv", csv, "per-node CSV");
    akappa->add_option("--csv", csv, "membership grid CSV of the largest kappa");

    auto* barrier = app.add_subcommand("barrier-check", "certify the barrier inequality");
    common(barrier, false);
    barrier->add_option("--out", out, "write JSON here");

    auto* dimension = app.add_subcommand("dimension", "box-counting dimension of a point set");
    common(dimension, false);
    dimension->add_option("--input", input, "points CSV (x..., t) with a header row")->check(CLI::ExistingFile);
    dimension->add_option("--csv", csv, "per-radius cover counts");
    dimension->add_option("--out", out, "write JSON here");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            CStr m;
            int passed = 0;
            if (int rc = report(prlab_run(config.c_str(), out.c_str(), seed, threads, &m.p, &passed))) return rc;
            const json j = json::parse(m.p);
            std::cout << "run " << j.value("name", std::string()) << ": " << (passed ? "PASS" : "FAIL") << "\n";
            for (const auto& c : j.at("ledger"))
                if (!c.at("passed").get<bool>())
                    std::cout << "  FAIL " << c.at("module").get<std::string>() << "/" << c.at("op").get<std::string>()
                              << ": " << c.at("check").get<std::string>() << " -- " << c.at("detail").get<std::string>()
                              << "\n";
            return passed ? 0 : 1;
        }
        if (verify->parsed()) {
            CStr l;
            int passed = 0;
            const uint64_t s = seed < 0 ? 20240611u : uint64_t(seed);
            if (int rc = report(prlab_verify(suite.c_str(), s, threads, &l.p, &passed))) return rc;
            const json j = json::parse(l.p);
            for (const auto& c : j.at("checks"))
                std::cout << (c.at("passed").get<bool>() ? "  ok   " : "  FAIL ") << c.at("module").get<std::string>()
                          << "/" << c.at("op").get<std::string>() << ": " << c.at("check").get<std::string>() << "\n";
            std::cout << "verify " << suite << ": " << (passed ? "PASS" : "FAIL") << "\n";
            if (!out.empty()) print(j.dump(2), out);
            return passed ? 0 : 1;
        }
        if (constants->parsed()) {
            CStr r;
            if (int rc = report(prlab_constants(slurp(config).c_str(), &r.p))) return rc;
            print(r.p, out);
            return 0;
        }
        if (solve->parsed()) {
            json cfg = json::parse(slurp(config));
            const json problem = cfg.contains("problem") ? cfg.at("problem") : cfg;
            Grid g;
            if (int rc = report(prlab_solve(problem.dump().c_str(), threads, &g.p))) return rc;
            if (int rc = report(prlab_grid_write(g.p, out.c_str()))) return rc;
            if (!csv.empty())
                if (int rc = report(prlab_grid_write_csv(g.p, csv.c_str()))) return rc;
            int d = 0, nx = 0, nt = 0;
            prlab_grid_info(g.p, &d, &nx, &nt, nullptr, nullptr);
            std::cout << "wrote " << out << " (d=" << d << ", nx=" << nx << ", nt=" << nt << ")\n";
            return 0;
        }
        if (theta->parsed() || psi->parsed() || akappa->parsed()) {
            Grid g;
            if (int rc = report(prlab_grid_read(input.c_str(), &g.p))) return rc;
            json req = json::parse(slurp(config));
            if (req.contains("analysis")) req = req.at("analysis");
            CStr r;
            prlab_status s;
            if (theta->parsed()) {
                s = prlab_theta(g.p, req.dump().c_str(), csv.c_str(), threads, &r.p);
            } else if (psi->parsed()) {
                s = prlab_psi(g.p, req.dump().c_str(), csv.c_str(), threads, &r.p);
            } else {
                if (req.contains("akappa")) req = req.at("akappa");
                Grid mask;
                s = prlab_akappa(g.p, req.dump().c_str(), &r.p, csv.empty() ? nullptr : &mask.p);
                if (s == PRLAB_OK && !csv.empty()) s = prlab_grid_write_csv(mask.p, csv.c_str());
            }
            if (int rc = report(s)) return rc;
            print(r.p, out);
            return 0;
        }
        if (barrier->parsed()) {
            CStr r;
            if (int rc = report(prlab_barrier_check(slurp(config).c_str(), &r.p))) return rc;
            print(r.p, out);
            return json_passed(r.p) ? 0 : 1;
        }
        if (dimension->parsed()) {
            json req = json::parse(slurp(config));
            if (!input.empty()) req["points_csv"] = input;
            CStr r;
            if (int rc = report(prlab_dimension(req.dump().c_str(), csv.c_str(), &r.p))) return rc;
            print(r.p, out);
            return 0;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "prlab: %s\n", e.what());
        return 2;
    }
    return 2;
}
