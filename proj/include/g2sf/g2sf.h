/* g2sf — numerical toolkit for semi-flat G2 structures, minimal immersions
 * into Lambda^2 R^4, Monge-Ampere reductions, harmonic sequences in quadrics,
 * and affine Toda systems.
 *
 * C interface of the shared library. All objects are opaque handles; every
 * function returns a g2sf_status and reports details through
 * g2sf_last_error(). Strings returned through char** are heap-allocated and
 * must be released with g2sf_string_free().
 */

#ifndef G2SF_H
#define G2SF_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum g2sf_status {
    G2SF_OK = 0,
    G2SF_ERROR_INVALID_ARGUMENT = 1, /* bad inputs, malformed files or configs */
    G2SF_ERROR_IO = 2,               /* unreadable / unwritable paths */
    G2SF_ERROR_NUMERIC = 3,          /* divergence, singular or indefinite data */
} g2sf_status;

typedef struct g2sf_grid g2sf_grid;     /* a grid document: geometry + named fields */
typedef struct g2sf_report g2sf_report; /* a residual report: named checks + notes */

const char* g2sf_version(void);
/* Thread-local message for the most recent failing call. */
const char* g2sf_last_error(void);
void g2sf_string_free(char* s);

/* Worker threads for grid loops (default: G2SF_THREADS env or hardware
 * concurrency). Results are bitwise independent of the thread count. */
void g2sf_set_threads(int n);

/* ---- grid documents ---------------------------------------------------- */

g2sf_status g2sf_grid_read(const char* path, g2sf_grid** out);
g2sf_status g2sf_grid_write(const g2sf_grid* grid, const char* path);
g2sf_status g2sf_grid_create(int dim, const int64_t* shape, const double* origin,
                             const double* spacing, g2sf_grid** out);
g2sf_status g2sf_grid_add_field(g2sf_grid* grid, const char* name, int components,
                                const double* data, size_t count);
void g2sf_grid_free(g2sf_grid* grid);

int g2sf_grid_dim(const g2sf_grid* grid);
void g2sf_grid_shape(const g2sf_grid* grid, int64_t out[3]);
void g2sf_grid_origin(const g2sf_grid* grid, double out[3]);
void g2sf_grid_spacing(const g2sf_grid* grid, double out[3]);
int g2sf_grid_field_count(const g2sf_grid* grid);
const char* g2sf_grid_field_name(const g2sf_grid* grid, int index);
int g2sf_grid_field_components(const g2sf_grid* grid, int index);
/* Borrowed pointer into the grid; valid until the grid is freed. */
g2sf_status g2sf_grid_field_data(const g2sf_grid* grid, const char* name, const double** data,
                                 size_t* count);

/* ---- reports ----------------------------------------------------------- */

g2sf_status g2sf_report_render(const g2sf_report* report, char** text);
int g2sf_report_entry_count(const g2sf_report* report);
const char* g2sf_report_entry_name(const g2sf_report* report, int index);
double g2sf_report_entry_value(const g2sf_report* report, int index);
int g2sf_report_entry_passed(const g2sf_report* report, int index);
int g2sf_report_passed(const g2sf_report* report);
void g2sf_report_free(g2sf_report* report);

/* Observed convergence orders from three reports at h, h/2, h/4 with
 * identical check sets. */
g2sf_status g2sf_order_estimate(const g2sf_report* at_h, const g2sf_report* at_h2,
                                const g2sf_report* at_h4, g2sf_report** out);

/* ---- G2 algebra tables -------------------------------------------------- */

/* Component tables of the standard 3-/4-form pair, the recovered metric and
 * volume, and the Lambda^2 R^4 wedge-pairing matrix (golden-file format). */
g2sf_status g2sf_g2_tables(char** text);

/* ---- semi-flat pipeline -------------------------------------------------
 * Immersion grids carry a 6-component field "u" (Lambda^2 R^4 components in
 * the order 12,13,14,23,24,34) and optionally a constant 1-component field
 * "tau"; tau_override > 0 takes precedence. */

g2sf_status g2sf_semiflat_build(const g2sf_grid* u, double tau_override, g2sf_grid** out);
/* tol <= 0 selects the default 10 h^2. */
g2sf_status g2sf_semiflat_verify(const g2sf_grid* u, double tau_override, double tol,
                                 g2sf_report** out);

/* ---- Monge-Ampere -------------------------------------------------------
 * Potential grids carry a scalar field "phi" on a 3D grid. */

g2sf_status g2sf_ma_check(const g2sf_grid* phi, double tol, g2sf_report** out);
/* Cylindrical embedding; output is an immersion grid ("u" + "tau"). */
g2sf_status g2sf_ma_embed(const g2sf_grid* phi, g2sf_grid** out);

/* ---- minimal surfaces in quadrics ---------------------------------------
 * Surface grids carry a field "phi" with p+q components on a 2D grid. */

g2sf_status g2sf_quadric_analyze(const g2sf_grid* phi, int p, int q, double h0, double tol_scale,
                                 g2sf_report** out);
/* curve_text: JSON curve document; output grid carries "phi". */
g2sf_status g2sf_quadric_weierstrass(const char* curve_text, double x0, double x1, double y0,
                                     double y1, int64_t n, g2sf_grid** out);

/* ---- affine Toda solver --------------------------------------------------
 * config_text: JSON problem document (see README). Outputs the solution grid
 * (fields "w1".."wr"), the Newton trace as CSV, and a solver report. Any of
 * the out parameters may be NULL. Divergence returns G2SF_ERROR_NUMERIC and
 * still fills the outputs. */

g2sf_status g2sf_toda_solve(const char* config_text, g2sf_grid** w_out, char** trace_csv,
                            g2sf_report** report);
/* w1: grid with a scalar field ("w1" or the single field). q_poly: polynomial
 * in z, e.g. "z" or "(1+2i)*z^2 - 0.5". tol <= 0 selects 50 h^2. */
g2sf_status g2sf_toda_lift(const g2sf_grid* w1, const char* q_poly, double tol,
                           g2sf_report** report, g2sf_grid** pair_out);

/* ---- cones ---------------------------------------------------------------
 * Surface input as in quadric analysis, signature (3,3), h0 = +1. */

g2sf_status g2sf_cone_extend(const g2sf_grid* phi, double r0, double r1, int64_t nr,
                             g2sf_grid** out);
g2sf_status g2sf_cone_verify(const g2sf_grid* phi, g2sf_report** out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* G2SF_H */
