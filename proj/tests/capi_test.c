/* Exercises the public C interface from plain C. */
#include <prlab/prlab.h>

#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

static int failures = 0;

#define EXPECT(cond)                                                    \
    do {                                                                \
        if (!(cond)) {                                                  \
            fprintf(stderr, "%s:%d: expected %s\n", __FILE__, __LINE__, #cond); \
            ++failures;                                                 \
        }                                                               \
    } while (0)

int main(int argc, char** argv) {
    const char* tmp = argc > 1 ? argv[1] : ".";
    char path[4096];

    EXPECT(strcmp(prlab_version(), "0.1.0") == 0);

    /* eigenvalues 2, -3 with lambda = 1, Lambda = 2 */
    double M[4] = {2.0, 0.0, 0.0, -3.0}, v = 0.0;
    EXPECT(prlab_pucci(2, 1.0, 2.0, M, 1, &v) == PRLAB_OK && fabs(v - 4.0) < 1e-14);
    EXPECT(prlab_pucci(2, 1.0, 2.0, M, 0, &v) == PRLAB_OK && fabs(v + 1.0) < 1e-14);
    EXPECT(prlab_pucci(2, 2.0, 1.0, M, 1, &v) == PRLAB_INVALID_ARGUMENT);
    EXPECT(strlen(prlab_last_error()) > 0);
    EXPECT(prlab_pucci(4, 1.0, 1.0, M, 1, &v) == PRLAB_INVALID_ARGUMENT);
    EXPECT(prlab_pucci(1, 1.0, 1.0, NULL, 1, &v) == PRLAB_INVALID_ARGUMENT);

    prlab_grid* g = NULL;
    EXPECT(prlab_solve("{\"d\": 1, \"nx\": 17, \"exact\": {\"name\": \"heat_mode\", \"params\": {}}}", 1, &g) == PRLAB_OK);
    int d = 0, nx = 0, nt = 0;
    double rho = 0.0, t0 = 1.0;
    EXPECT(prlab_grid_info(g, &d, &nx, &nt, &rho, &t0) == PRLAB_OK);
    EXPECT(d == 1 && nx == 17 && nt > 2 && rho == 1.0 && t0 == 0.0);
    const double* data = NULL;
    size_t n = 0;
    EXPECT(prlab_grid_values(g, &data, &n) == PRLAB_OK && n == (size_t)(nx * nt));

    snprintf(path, sizeof path, "%s/capi_grid.bin", tmp);
    EXPECT(prlab_grid_write(g, path) == PRLAB_OK);
    prlab_grid* h = NULL;
    EXPECT(prlab_grid_read(path, &h) == PRLAB_OK);
    const double* data2 = NULL;
    size_t n2 = 0;
    EXPECT(prlab_grid_values(h, &data2, &n2) == PRLAB_OK && n2 == n && memcmp(data, data2, n * sizeof(double)) == 0);
    remove(path);

    char* out = NULL;
    EXPECT(prlab_theta(h, "{}", NULL, 1, &out) == PRLAB_OK && strstr(out, "max_theta_lower") != NULL);
    prlab_string_free(out);
    out = NULL;
    EXPECT(prlab_psi(h, NULL, NULL, 1, &out) == PRLAB_OK && strstr(out, "max_psi") != NULL);
    prlab_string_free(out);
    out = NULL;
    prlab_grid* mask = NULL;
    EXPECT(prlab_akappa(h, "{\"kappas\": [1, 4]}", &out, &mask) == PRLAB_OK && mask != NULL);
    prlab_string_free(out);
    prlab_grid_free(mask);
    prlab_grid_free(h);
    prlab_grid_free(g);

    out = NULL;
    EXPECT(prlab_constants("{\"d\": 1, \"theta\": 0.75, \"R\": 0.06}", &out) == PRLAB_OK);
    EXPECT(out != NULL && strstr(out, "\"kappa0\"") != NULL);
    prlab_string_free(out);
    out = NULL;
    EXPECT(prlab_constants("{\"R\": 0.5}", &out) == PRLAB_PRECONDITION && out == NULL);
    EXPECT(prlab_constants("{not json", &out) == PRLAB_PARSE);

    EXPECT(prlab_barrier_check("{\"samples\": 500}", &out) == PRLAB_OK && strstr(out, "\"passed\": true") != NULL);
    prlab_string_free(out);
    out = NULL;
    EXPECT(prlab_dimension("{\"set\": \"time_segment\", \"n\": 128}", NULL, &out) == PRLAB_OK);
    prlab_string_free(out);

    int passed = -1;
    out = NULL;
    EXPECT(prlab_verify("hausdorff", 1, 1, &out, &passed) == PRLAB_OK && passed == 1);
    prlab_string_free(out);
    EXPECT(prlab_verify("nope", 1, 1, &out, &passed) != PRLAB_OK);

    out = NULL;
    EXPECT(prlab_default_config(&out) == PRLAB_OK && strstr(out, "\"problem\"") != NULL);
    prlab_string_free(out);

    EXPECT(prlab_run("/nonexistent/config.json", tmp, -1, 1, &out, &passed) == PRLAB_IO);

    EXPECT(prlab_grid_info(NULL, &d, NULL, NULL, NULL, NULL) == PRLAB_INVALID_ARGUMENT);
    EXPECT(strcmp(prlab_status_name(PRLAB_CFL), "cfl") == 0);

    if (failures) fprintf(stderr, "%d C API expectations failed\n", failures);
    else printf("C API: all expectations hold\n");
    return failures ? 1 : 0;
}
