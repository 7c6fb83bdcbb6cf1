#include <prlab/prlab.h>

#include "experiment.hpp"
#include "operators.hpp"
#include "verify.hpp"

#include <cstdlib>
#include <cstring>
#include <string>

struct prlab_grid {
    prlab::GridFunction u;
};

namespace {

thread_local std::string g_last_error;

char* dup(const std::string& s) {
    char* p = static_cast<char*>(std::malloc(s.size() + 1));
    if (p) std::memcpy(p, s.c_str(), s.size() + 1);
    return p;
}

template <class F>
prlab_status guarded(F&& body) {
    try {
        body();
        return PRLAB_OK;
    } catch (const prlab::Error& e) {
        g_last_error = e.what();
        return static_cast<prlab_status>(e.code());
    } catch (const nlohmann::json::exception& e) {
        g_last_error = std::string("json: ") + e.what();
        return PRLAB_PARSE;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return PRLAB_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return PRLAB_INTERNAL;
    }
}

nlohmann::json parse(const char* s) {
    if (!s || !*s) return nlohmann::json::object();
    try {
        return nlohmann::json::parse(s);
    } catch (const nlohmann::json::parse_error& e) {
        prlab::fail(prlab::Status::parse, e.what());
    }
}

void need(const void* p, const char* what) {
    prlab::require(p != nullptr, prlab::Status::invalid_argument, std::string(what) + " is null");
}

void emit(char** out, const nlohmann::json& j) {
    if (!out) return;
    *out = dup(j.dump(2));
    prlab::require(*out != nullptr, prlab::Status::internal, "out of memory");
}

}  // namespace

extern "C" {

const char* prlab_version(void) { return prlab::kVersion; }

const char* prlab_last_error(void) { return g_last_error.c_str(); }

const char* prlab_status_name(prlab_status s) {
    switch (s) {
    case PRLAB_OK: return "ok";
    case PRLAB_INVALID_ARGUMENT: return "invalid_argument";
    case PRLAB_PRECONDITION: return "precondition";
    case PRLAB_CFL: return "cfl";
    case PRLAB_IO: return "io";
    case PRLAB_PARSE: return "parse";
    case PRLAB_CHECK_FAILED: return "check_failed";
    case PRLAB_INTERNAL: return "internal";
    }
    return "unknown";
}

void prlab_string_free(char* s) { std::free(s); }

prlab_status prlab_pucci(int d, double lambda, double Lambda, const double* M, int plus, double* out) {
    return guarded([&] {
        need(M, "M");
        need(out, "out");
        prlab::check_dim(d);
        prlab::SymMat m(d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) m(i, j) = M[i * d + j];
        const prlab::Ellipticity e{lambda, Lambda};
        prlab::check_ellipticity(e);
        *out = plus ? prlab::pucci_plus(e, m) : prlab::pucci_minus(e, m);
    });
}

prlab_status prlab_grid_read(const char* path, prlab_grid** out) {
    return guarded([&] {
        need(path, "path");
        need(out, "out");
        *out = new prlab_grid{prlab::read_binary(path)};
    });
}

prlab_status prlab_grid_write(const prlab_grid* g, const char* path) {
    return guarded([&] {
        need(g, "grid");
        need(path, "path");
        prlab::write_binary(g->u, path);
    });
}

prlab_status prlab_grid_write_csv(const prlab_grid* g, const char* path) {
    return guarded([&] {
        need(g, "grid");
        need(path, "path");
        prlab::write_csv(g->u, path);
    });
}

prlab_status prlab_grid_info(const prlab_grid* g, int* d, int* nx, int* nt, double* rho, double* t0) {
    return guarded([&] {
        need(g, "grid");
        if (d) *d = g->u.grid.d;
        if (nx) *nx = g->u.grid.nx;
        if (nt) *nt = g->u.grid.nt;
        if (rho) *rho = g->u.grid.rho;
        if (t0) *t0 = g->u.grid.t0;
    });
}

prlab_status prlab_grid_values(const prlab_grid* g, const double** data, size_t* n) {
    return guarded([&] {
        need(g, "grid");
        need(data, "data");
        need(n, "n");
        *data = g->u.v.data();
        *n = g->u.v.size();
    });
}

void prlab_grid_free(prlab_grid* g) { delete g; }

prlab_status prlab_solve(const char* problem_json, int threads, prlab_grid** out) {
    return guarded([&] {
        need(out, "out");
        *out = new prlab_grid{prlab::solve_command(parse(problem_json), threads)};
    });
}

prlab_status prlab_constants(const char* request_json, char** result_json) {
    return guarded([&] { emit(result_json, prlab::constants_command(parse(request_json))); });
}

prlab_status prlab_theta(const prlab_grid* u, const char* request_json, const char* csv_path, int threads,
                         char** result_json) {
    return guarded([&] {
        need(u, "grid");
        emit(result_json, prlab::theta_command(u->u, parse(request_json), csv_path ? csv_path : "", threads));
    });
}

prlab_status prlab_psi(const prlab_grid* u, const char* request_json, const char* csv_path, int threads,
                       char** result_json) {
    return guarded([&] {
        need(u, "grid");
        emit(result_json, prlab::psi_command(u->u, parse(request_json), csv_path ? csv_path : "", threads));
    });
}

prlab_status prlab_akappa(const prlab_grid* u, const char* request_json, char** result_json, prlab_grid** mask) {
    return guarded([&] {
        need(u, "grid");
        prlab::GridFunction m;
        emit(result_json, prlab::akappa_command(u->u, parse(request_json), mask ? &m : nullptr));
        if (mask) *mask = new prlab_grid{std::move(m)};
    });
}

prlab_status prlab_barrier_check(const char* request_json, char** result_json) {
    return guarded([&] { emit(result_json, prlab::barrier_command(parse(request_json))); });
}

prlab_status prlab_dimension(const char* request_json, const char* csv_path, char** result_json) {
    return guarded([&] { emit(result_json, prlab::dimension_command(parse(request_json), csv_path ? csv_path : "")); });
}

prlab_status prlab_verify(const char* suite, uint64_t seed, int threads, char** ledger_json, int* passed) {
    return guarded([&] {
        need(suite, "suite");
        const prlab::Ledger l = prlab::verify_suite(suite, seed, threads);
        if (passed) *passed = l.passed() ? 1 : 0;
        emit(ledger_json, prlab::to_json(l));
    });
}

prlab_status prlab_default_config(char** config_json) {
    return guarded([&] { emit(config_json, prlab::resolve_config(nlohmann::json::object())); });
}

prlab_status prlab_run(const char* config_path, const char* out_dir, int64_t seed, int threads, char** manifest_json,
                       int* passed) {
    return guarded([&] {
        need(config_path, "config_path");
        need(out_dir, "out_dir");
        nlohmann::json cfg = prlab::load_config(config_path);
        if (seed >= 0) cfg["seed"] = seed;
        const prlab::RunSummary r = prlab::run_experiment(cfg, out_dir, threads);
        if (passed) *passed = r.passed ? 1 : 0;
        nlohmann::json m = r.manifest;
        m["ledger"] = r.ledger;
        emit(manifest_json, m);
    });
}

}  // extern "C"
