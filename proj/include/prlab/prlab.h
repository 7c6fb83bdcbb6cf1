/* prlab C interface.
 *
 * Every call returns a prlab_status; on failure prlab_last_error() holds a
 * message for the calling thread until its next failing call.  Strings
 * returned through char** are owned by the caller and released with
 * prlab_string_free.  Grids are opaque and released with prlab_grid_free.
 */
#ifndef PRLAB_PRLAB_H
#define PRLAB_PRLAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define PRLAB_API __declspec(dllexport)
#else
#define PRLAB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum prlab_status {
    PRLAB_OK = 0,
    PRLAB_INVALID_ARGUMENT = 1,
    PRLAB_PRECONDITION = 2,
    PRLAB_CFL = 3,
    PRLAB_IO = 4,
    PRLAB_PARSE = 5,
    PRLAB_CHECK_FAILED = 6,
    PRLAB_INTERNAL = 7
} prlab_status;

typedef struct prlab_grid prlab_grid;

PRLAB_API const char* prlab_version(void);
PRLAB_API const char* prlab_last_error(void);
PRLAB_API const char* prlab_status_name(prlab_status s);
PRLAB_API void prlab_string_free(char* s);

/* Pucci extremal operators of a row-major symmetric d x d matrix, d in 1..3. */
PRLAB_API prlab_status prlab_pucci(int d, double lambda, double Lambda, const double* M, int plus, double* out);

/* Grid handles. */
PRLAB_API prlab_status prlab_grid_read(const char* path, prlab_grid** out);
PRLAB_API prlab_status prlab_grid_write(const prlab_grid* g, const char* path);
PRLAB_API prlab_status prlab_grid_write_csv(const prlab_grid* g, const char* path);
PRLAB_API prlab_status prlab_grid_info(const prlab_grid* g, int* d, int* nx, int* nt, double* rho, double* t0);
/* Borrowed pointer into the grid's values, valid until prlab_grid_free. */
PRLAB_API prlab_status prlab_grid_values(const prlab_grid* g, const double** data, size_t* n);
PRLAB_API void prlab_grid_free(prlab_grid* g);

/* JSON in, JSON out.  problem_json is the "problem" block of a run config. */
PRLAB_API prlab_status prlab_solve(const char* problem_json, int threads, prlab_grid** out);
PRLAB_API prlab_status prlab_constants(const char* request_json, char** result_json);
PRLAB_API prlab_status prlab_theta(const prlab_grid* u, const char* request_json, const char* csv_path, int threads,
                                   char** result_json);
PRLAB_API prlab_status prlab_psi(const prlab_grid* u, const char* request_json, const char* csv_path, int threads,
                                 char** result_json);
/* mask (optional) receives the membership of the largest kappa as a 0/1 grid. */
PRLAB_API prlab_status prlab_akappa(const prlab_grid* u, const char* request_json, char** result_json,
                                    prlab_grid** mask);
PRLAB_API prlab_status prlab_barrier_check(const char* request_json, char** result_json);
PRLAB_API prlab_status prlab_dimension(const char* request_json, const char* csv_path, char** result_json);

/* Module invariant batteries; *passed is 1 when every check holds. */
PRLAB_API prlab_status prlab_verify(const char* suite, uint64_t seed, int threads, char** ledger_json, int* passed);
/* Resolved default config as JSON. */
PRLAB_API prlab_status prlab_default_config(char** config_json);
/* Full pipeline; seed >= 0 overrides the config seed.  *passed mirrors the run's exit status. */
PRLAB_API prlab_status prlab_run(const char* config_path, const char* out_dir, int64_t seed, int threads,
                                 char** manifest_json, int* passed);

#ifdef __cplusplus
}
#endif

#endif /* PRLAB_PRLAB_H */
