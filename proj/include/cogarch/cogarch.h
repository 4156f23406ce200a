#ifndef COGARCH_COGARCH_H
#define COGARCH_COGARCH_H

/*
 * C interface to the COGARCH(p,q) library.
 *
 * Every fallible call returns a cogarch_status; on failure a message is
 * available from cogarch_last_error() on the same thread. Matrices are
 * column-major. Handles are immutable after creation and may be shared
 * between threads.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(COGARCH_BUILDING_LIBRARY)
#    define COGARCH_API __declspec(dllexport)
#  else
#    define COGARCH_API __declspec(dllimport)
#  endif
#else
#  define COGARCH_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cogarch_status {
    COGARCH_OK = 0,
    COGARCH_E_INVALID_ARGUMENT = 1,
    COGARCH_E_VALIDATION = 2,
    COGARCH_E_DEGENERATE_SPECTRUM = 3,
    COGARCH_E_ILL_CONDITIONED = 4,
    COGARCH_E_SINGULAR = 5,
    COGARCH_E_NOT_APPLICABLE = 6,
    COGARCH_E_NON_CONVERGENCE = 7,
    COGARCH_E_OVERFLOW = 8,
    COGARCH_E_DOMAIN = 9,
    COGARCH_E_INTERNAL = 10,
    COGARCH_E_ALLOC = 11
} cogarch_status;

typedef enum cogarch_norm { COGARCH_NORM_1 = 0, COGARCH_NORM_2 = 1, COGARCH_NORM_INF = 2 } cogarch_norm;

typedef enum cogarch_jump_kind {
    COGARCH_JUMP_NORMAL = 0,    /* param = variance */
    COGARCH_JUMP_TWO_POINT = 1, /* param = v, jumps +-v */
    COGARCH_JUMP_CONSTANT = 2   /* param = v, compensated by a drift */
} cogarch_jump_kind;

typedef struct cogarch_model cogarch_model;
typedef struct cogarch_driver cogarch_driver;
typedef struct cogarch_path cogarch_path;
typedef struct cogarch_grid cogarch_grid;

/* ---- diagnostics ---- */

COGARCH_API const char* cogarch_version(void);
COGARCH_API const char* cogarch_last_error(void);
COGARCH_API const char* cogarch_status_name(cogarch_status status);
/* Non-fatal warnings accumulated on this thread since the last clear. */
COGARCH_API size_t cogarch_warning_count(void);
COGARCH_API const char* cogarch_warning(size_t index);
COGARCH_API void cogarch_clear_warnings(void);

/* ---- model ---- */

COGARCH_API cogarch_status cogarch_model_create(int p, int q, double alpha0, const double* alpha, const double* beta,
                                                cogarch_model** out);
COGARCH_API void cogarch_model_destroy(cogarch_model* model);
COGARCH_API int cogarch_model_q(const cogarch_model* model);
/* Eigenvalues of B sorted by nonincreasing real part; arrays of length q. */
COGARCH_API cogarch_status cogarch_model_eigenvalues(const cogarch_model* model, double* re, double* im);
COGARCH_API cogarch_status cogarch_model_lambda(const cogarch_model* model, double* out);
COGARCH_API cogarch_status cogarch_model_kappa(const cogarch_model* model, cogarch_norm r, double* out);
COGARCH_API cogarch_status cogarch_model_cond_s(const cogarch_model* model, double* out);
COGARCH_API cogarch_status cogarch_model_b_matrix(const cogarch_model* model, double* out);
/* Eigenvalues of B + mu e a'; *distinct set to 1 when pairwise distinct. */
COGARCH_API cogarch_status cogarch_mean_corrected_eigenvalues(const cogarch_model* model, double mu, double* re,
                                                              double* im, int* distinct);
/* a' exp(B t) e */
COGARCH_API cogarch_status cogarch_kernel(const cogarch_model* model, double t, double* out);

/* ---- driver ---- */

typedef struct cogarch_driver_moments {
    double mu;     /* int y^2 dnu */
    double rho;    /* int y^4 dnu */
    double el1_sq; /* E L_1^2 */
} cogarch_driver_moments;

COGARCH_API cogarch_status cogarch_driver_create(double rate, cogarch_jump_kind kind, double param,
                                                 double brownian_var, cogarch_driver** out);
COGARCH_API void cogarch_driver_destroy(cogarch_driver* driver);
COGARCH_API cogarch_status cogarch_driver_get_moments(const cogarch_driver* driver, cogarch_driver_moments* out);
COGARCH_API cogarch_status cogarch_log_integral(const cogarch_driver* driver, double kappa, double* out);
COGARCH_API cogarch_status cogarch_power_integral(const cogarch_driver* driver, double kappa, int k, double* out);

/* ---- conditions ---- */

typedef struct cogarch_condition_entry {
    cogarch_norm r;
    double kappa;
    double lhs;
    double rhs;
    double margin; /* rhs - lhs */
    int satisfied;
} cogarch_condition_entry;

typedef struct cogarch_condition_report {
    char rule[48];
    cogarch_condition_entry entries[3];
    int verdict; /* some norm satisfied */
} cogarch_condition_report;

COGARCH_API cogarch_status cogarch_check_stationarity(const cogarch_model* model, const cogarch_driver* driver,
                                                      cogarch_condition_report* out);
COGARCH_API cogarch_status cogarch_check_moment(const cogarch_model* model, const cogarch_driver* driver, int k,
                                                cogarch_condition_report* out);

typedef enum cogarch_positivity_status {
    COGARCH_PROVEN_NONNEGATIVE = 0,
    COGARCH_PROVEN_VIOLATED = 1,
    COGARCH_NUMERIC_EVIDENCE_ONLY = 2
} cogarch_positivity_status;

typedef struct cogarch_positivity {
    cogarch_positivity_status status;
    char rule[48];
    int has_witness;
    double witness_t;
    double witness_value;
    int has_grid;
    double grid_step;
    double grid_horizon;
    double grid_min;
    double grid_argmin;
    int grid_nonnegative;
    int tail_nonnegative;
} cogarch_positivity;

COGARCH_API cogarch_status cogarch_check_positivity(const cogarch_model* model, cogarch_positivity* out);
COGARCH_API cogarch_status cogarch_check_initial_state(const cogarch_model* model, const double* y0, double t_max,
                                                       int* ok, double* infimum);

/* ---- stationary moments ---- */

COGARCH_API cogarch_status cogarch_mean_state(const cogarch_model* model, const cogarch_driver* driver, double* out);
COGARCH_API cogarch_status cogarch_cov_state(const cogarch_model* model, const cogarch_driver* driver, double* out);
/* Both routes unvalidated, plus their relative max-entry difference. */
COGARCH_API cogarch_status cogarch_cov_state_routes(const cogarch_model* model, const cogarch_driver* driver,
                                                    double* kronecker, double* gramian, double* rel_diff);
COGARCH_API cogarch_status cogarch_m_value(const cogarch_model* model, const cogarch_driver* driver, double* out);
COGARCH_API cogarch_status cogarch_v_moments(const cogarch_model* model, const cogarch_driver* driver, double* mean,
                                             double* var);
COGARCH_API cogarch_status cogarch_psi_mean(const cogarch_model* model, const cogarch_driver* driver, double* out);

typedef enum cogarch_acvf_route { COGARCH_ACVF_MATRIX = 0, COGARCH_ACVF_SPECTRAL = 1 } cogarch_acvf_route;

COGARCH_API cogarch_status cogarch_acvf_v(const cogarch_model* model, const cogarch_driver* driver, double h,
                                          cogarch_acvf_route route, double* out);
/* Matrix route always; spectral route (may be NULL) when eigenvalues of B~ are distinct. */
COGARCH_API cogarch_status cogarch_acvf_v_table(const cogarch_model* model, const cogarch_driver* driver,
                                                const double* lags, size_t n, double* matrix_out,
                                                double* spectral_out, int* spectral_available);
COGARCH_API cogarch_status cogarch_increment_moments(const cogarch_model* model, const cogarch_driver* driver,
                                                     double r, double* mean, double* variance);
COGARCH_API cogarch_status cogarch_sq_increment_acvf(const cogarch_model* model, const cogarch_driver* driver,
                                                     double r, double h, const double* hr, double* out);
/* Monte-Carlo H_r and its standard errors (length q each); n_paths >= 1000. */
COGARCH_API cogarch_status cogarch_estimate_hr(const cogarch_model* model, const cogarch_driver* driver, double r,
                                               size_t n_paths, uint64_t seed, double* hr, double* hr_se);
COGARCH_API cogarch_status cogarch_fixed_point_mean_residual(const cogarch_model* model,
                                                             const cogarch_driver* driver, double* out);
/* Entrywise Monte-Carlo mean and standard error of J_{0,t} (q x q each). */
COGARCH_API cogarch_status cogarch_propagator_mean(const cogarch_model* model, const cogarch_driver* driver,
                                                   double t, size_t n, uint64_t seed, double* mean, double* se);

/* ---- simulation ---- */

typedef enum cogarch_init_kind {
    COGARCH_INIT_ZERO = 0,
    COGARCH_INIT_GIVEN = 1,
    COGARCH_INIT_STATIONARY = 2
} cogarch_init_kind;

typedef struct cogarch_init {
    cogarch_init_kind kind;
    const double* y0;   /* length q, for COGARCH_INIT_GIVEN */
    int override_check; /* accept a y0 that fails the admissibility check */
} cogarch_init;

typedef struct cogarch_event {
    double time;
    double dl; /* jump of L */
    double z;  /* dl^2 */
    double v;  /* volatility left limit */
    double dg; /* increment of G since the previous event */
    double g;  /* G after the jump */
} cogarch_event;

/* One path on (0, horizon]; all randomness comes from (seed, stream 0). */
COGARCH_API cogarch_status cogarch_simulate(const cogarch_model* model, const cogarch_driver* driver, double horizon,
                                            const cogarch_init* init, uint64_t seed, cogarch_path** out);
COGARCH_API void cogarch_path_destroy(cogarch_path* path);
COGARCH_API size_t cogarch_path_event_count(const cogarch_path* path);
/* Copies up to cap events starting at first; *written receives the count. */
COGARCH_API cogarch_status cogarch_path_events(const cogarch_path* path, size_t first, cogarch_event* out, size_t cap,
                                               size_t* written);
COGARCH_API cogarch_status cogarch_path_event_state(const cogarch_path* path, size_t index, double* y_pre,
                                                    double* y_post);
COGARCH_API cogarch_status cogarch_path_end(const cogarch_path* path, double* g_end, double* y_end);
COGARCH_API cogarch_status cogarch_path_initial_state(const cogarch_path* path, double* y0);
COGARCH_API cogarch_status cogarch_path_min_v(const cogarch_path* path, double* min_v, size_t* negative_count);
COGARCH_API cogarch_status cogarch_path_sample_grid(const cogarch_path* path, double dt, cogarch_grid** out);

/* Streams a path onto a grid without storing events (long horizons). */
COGARCH_API cogarch_status cogarch_simulate_grid(const cogarch_model* model, const cogarch_driver* driver,
                                                 double horizon, double dt, const cogarch_init* init, uint64_t seed,
                                                 cogarch_grid** out);
COGARCH_API void cogarch_grid_destroy(cogarch_grid* grid);
COGARCH_API size_t cogarch_grid_size(const cogarch_grid* grid);
/* Any of t, v, g may be NULL; each non-NULL array needs cogarch_grid_size entries. */
COGARCH_API cogarch_status cogarch_grid_data(const cogarch_grid* grid, double* t, double* v, double* g);

COGARCH_API cogarch_status cogarch_step_recurrence(const cogarch_model* model, const double* y, double wait, double z,
                                                   double* out);
/* n independent stationary states (q x n) from streams (seed, 0..n-1). */
COGARCH_API cogarch_status cogarch_stationary_sample(const cogarch_model* model, const cogarch_driver* driver,
                                                     size_t n, uint64_t seed, double* out);

/* sigma^2 at the given times (left limits) from the explicit COGARCH(1,1)
 * representation; jumps are given by time and squared size. */
COGARCH_API cogarch_status cogarch_cogarch11_reference(double omega0, double omega1, double eta,
                                                       const double* jump_times, const double* jump_sq,
                                                       size_t n_jumps, double sigma0_sq, const double* times,
                                                       size_t n_times, double* out);

/* ---- statistics ---- */

/* Autocorrelations at lags 0..max_lag (max_lag + 1 values) and the 1.96/sqrt(n) band. */
COGARCH_API cogarch_status cogarch_sample_acf(const double* x, size_t n, size_t max_lag, double* out, double* band);
COGARCH_API cogarch_status cogarch_batch_mean(const double* x, size_t n, size_t batches, double* value, double* se);
COGARCH_API cogarch_status cogarch_batch_variance(const double* x, size_t n, size_t batches, double* value,
                                                  double* se);
COGARCH_API cogarch_status cogarch_ks_two_sample(const double* a, size_t na, const double* b, size_t nb,
                                                 double* statistic, double* p_value);

#ifdef __cplusplus
}
#endif

#endif
