#ifndef SHEARSTAB_SHEARSTAB_H_
#define SHEARSTAB_SHEARSTAB_H_

/* C interface to the shearstab library.
 *
 * Objects are opaque handles created by sst_*_create (or returned through an
 * out-parameter) and released with the matching sst_*_destroy. Every call
 * that can fail returns an sst_status; on failure the message is available
 * from sst_last_error() on the calling thread until the next failing call.
 * Handles are immutable after creation except sst_sim_t, which must not be
 * used from two threads at once. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SST_EXPORT __declspec(dllexport)
#else
#define SST_EXPORT __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sst_status {
  SST_OK = 0,
  SST_INVALID_ARGUMENT = 1,
  SST_NO_CONVERGENCE = 2,
  SST_BLOWUP = 3,
  SST_SOLVER_FAILURE = 4,
  SST_NO_CRITICAL_POINT = 5, /* no neutral point / no finite eigenvalue */
  SST_OUT_OF_MEMORY = 6,
  SST_INTERNAL = 99
} sst_status;

typedef enum sst_profile_kind {
  SST_PROFILE_COUETTE = 0,
  SST_PROFILE_POISEUILLE = 1,
  SST_PROFILE_CUSTOM = 2
} sst_profile_kind;

typedef enum sst_energy_mode {
  SST_ENERGY_SPANWISE = 0,
  SST_ENERGY_FULL = 1
} sst_energy_mode;

typedef struct sst_discretization_t sst_discretization_t;
typedef struct sst_profile_t sst_profile_t;
typedef struct sst_eigen_t sst_eigen_t;
typedef struct sst_critical_t sst_critical_t;
typedef struct sst_field_t sst_field_t;
typedef struct sst_sim_t sst_sim_t;
typedef struct sst_trajectory_t sst_trajectory_t;

SST_EXPORT const char* sst_version(void);
SST_EXPORT const char* sst_status_name(sst_status status);
SST_EXPORT const char* sst_last_error(void);

/* ---- discretization ---------------------------------------------------- */

/* Chebyshev collocation on n_modes >= 8 nodes, descending from z = +1. */
SST_EXPORT sst_status sst_discretization_create(int n_modes, sst_discretization_t** out);
SST_EXPORT void sst_discretization_destroy(sst_discretization_t* disc);
SST_EXPORT int sst_discretization_size(const sst_discretization_t* disc);
/* Copy nodes / quadrature weights into buffers of length n_modes. */
SST_EXPORT sst_status sst_discretization_nodes(const sst_discretization_t* disc, double* nodes);
SST_EXPORT sst_status sst_discretization_weights(const sst_discretization_t* disc,
                                                 double* weights);

/* ---- base flow --------------------------------------------------------- */

/* Custom profiles take `count` samples of f on the count-point
 * Chebyshev-Gauss-Lobatto grid (descending), interpolated onto `disc`.
 * Samples are ignored for the built-in kinds. */
SST_EXPORT sst_status sst_profile_create(const sst_discretization_t* disc, sst_profile_kind kind,
                                         const double* samples, size_t count,
                                         sst_profile_t** out);
SST_EXPORT void sst_profile_destroy(sst_profile_t* profile);
SST_EXPORT int sst_profile_shear_free(const sst_profile_t* profile);

/* ---- energy eigenproblem ----------------------------------------------- */

typedef struct sst_eigen_info {
  double reynolds_critical; /* +inf when no finite eigenvalue */
  double imag_ratio;
  double residual;
  double a, b;
  int n_modes;
  int has_eigenvalue;
} sst_eigen_info;

/* Critical energy Reynolds number at fixed (a, b). Spanwise mode ignores b.
 * A flow without production yields SST_OK with has_eigenvalue == 0. */
SST_EXPORT sst_status sst_energy_solve(const sst_profile_t* profile, sst_energy_mode mode,
                                       double a, double b, sst_eigen_t** out);
SST_EXPORT void sst_eigen_destroy(sst_eigen_t* eigen);
SST_EXPORT sst_status sst_eigen_get_info(const sst_eigen_t* eigen, sst_eigen_info* info);
/* Nodal W (and Z for the full mode) split into real/imaginary buffers of
 * length n_modes. Z is unavailable in spanwise mode. */
SST_EXPORT sst_status sst_eigen_w_profile(const sst_eigen_t* eigen, double* re, double* im);
SST_EXPORT sst_status sst_eigen_zeta_profile(const sst_eigen_t* eigen, double* re, double* im);

typedef struct sst_search_box {
  double a_min, a_max;
  double b_min, b_max;
  double coarse_step;
} sst_search_box;

SST_EXPORT sst_search_box sst_default_search_box(sst_energy_mode mode);

typedef struct sst_critical_info {
  double a_star, b_star;
  double reynolds_energy;
  double residual;
  double imag_ratio;
  int n_modes;
  size_t trace_length;
  size_t warning_count;
} sst_critical_info;

/* Minimize the critical energy Reynolds number over wavenumbers. box may be
 * NULL for the per-mode default; threads <= 0 picks SHEARSTAB_THREADS or the
 * hardware concurrency. */
SST_EXPORT sst_status sst_energy_search(const sst_profile_t* profile, sst_energy_mode mode,
                                        const sst_search_box* box, double tol, int threads,
                                        sst_critical_t** out);
SST_EXPORT void sst_critical_destroy(sst_critical_t* critical);
SST_EXPORT sst_status sst_critical_get_info(const sst_critical_t* critical,
                                            sst_critical_info* info);
SST_EXPORT sst_status sst_critical_trace(const sst_critical_t* critical, size_t index, double* a,
                                         double* b, double* reynolds);
/* Borrowed string, valid while the handle lives. */
SST_EXPORT const char* sst_critical_warning(const sst_critical_t* critical, size_t index);
/* Borrowed eigen handle at the optimum, valid while the handle lives. */
SST_EXPORT const sst_eigen_t* sst_critical_eigen(const sst_critical_t* critical);

/* Critical Reynolds numbers on the tensor grid as x bs; row-major output of
 * length na * nb, ordered by (a, b). +inf marks points without production. */
SST_EXPORT sst_status sst_energy_sweep(const sst_profile_t* profile, sst_energy_mode mode,
                                       const double* as, size_t na, const double* bs, size_t nb,
                                       int threads, double* reynolds);

/* ---- Reynolds-Orr functionals ------------------------------------------ */

typedef struct sst_energy_breakdown {
  double energy;
  double production;
  double dissipation;
  double ratio;
} sst_energy_breakdown;

/* Reproducible random admissible mode; spanwise != 0 gives b = 0, v = 0. */
SST_EXPORT sst_status sst_field_random(const sst_discretization_t* disc, uint64_t seed, double a,
                                       double b, int spanwise, sst_field_t** out);
/* Spanwise field whose wall-normal velocity is the eigenfunction W. */
SST_EXPORT sst_status sst_field_from_eigen(const sst_discretization_t* disc,
                                           const sst_eigen_t* eigen, sst_field_t** out);
/* Copy scaled by a real factor. */
SST_EXPORT sst_status sst_field_scaled(const sst_field_t* field, double factor,
                                       sst_field_t** out);
SST_EXPORT void sst_field_destroy(sst_field_t* field);
SST_EXPORT sst_status sst_field_energy(const sst_field_t* field, const sst_profile_t* profile,
                                       sst_energy_breakdown* out);
SST_EXPORT sst_status sst_field_divergence(const sst_field_t* field, double* residual);

typedef struct sst_ascent_options {
  double tol;
  int patience;
  int max_iters;
} sst_ascent_options;

typedef struct sst_ascent_info {
  double m; /* maximum of production / dissipation */
  int iterations;
  int converged;
} sst_ascent_info;

SST_EXPORT sst_ascent_options sst_default_ascent_options(void);
/* Gradient ascent for the spanwise ratio at wavenumber a. On
 * SST_NO_CONVERGENCE `info` still holds the last iterate. */
SST_EXPORT sst_status sst_maximize_spanwise(const sst_profile_t* profile, double a,
                                            const sst_ascent_options* options,
                                            sst_ascent_info* info);

/* ---- linear stability -------------------------------------------------- */

/* Leading eigenvalue c and growth rate a Im c of the Orr-Sommerfeld problem
 * at (a, b, re); b = 0 is the two-dimensional problem. */
SST_EXPORT sst_status sst_os_growth(const sst_profile_t* profile, double a, double b, double re,
                                    double* growth, double* c_re, double* c_im);
/* Normwise backward error of the leading eigenpair at (a, b, re). */
SST_EXPORT sst_status sst_os_residual(const sst_profile_t* profile, double a, double b, double re,
                                      double* residual);
/* Up to `capacity` eigenvalues, sorted by decreasing imaginary part. */
SST_EXPORT sst_status sst_os_spectrum(const sst_profile_t* profile, double a, double b, double re,
                                      double* c_re, double* c_im, size_t capacity,
                                      size_t* count);
SST_EXPORT sst_status sst_squire_transform(double a, double b, double re, double* k,
                                           double* re_2d);

typedef struct sst_linear_box {
  double a_min, a_max;
  double re_min, re_max;
  int re_scan_points;
} sst_linear_box;

typedef struct sst_linear_critical_info {
  double a_c;
  double re_c;
  size_t evaluations;
} sst_linear_critical_info;

SST_EXPORT sst_linear_box sst_default_linear_box(void);
/* SST_NO_CRITICAL_POINT when nothing in the box is unstable. */
SST_EXPORT sst_status sst_linear_critical(const sst_profile_t* profile, const sst_linear_box* box,
                                          double a_tol, double re_tol,
                                          sst_linear_critical_info* info);

typedef struct sst_growth_scan_info {
  double max_growth;
  double a_at_max;
  double re_at_max;
  int points;
} sst_growth_scan_info;

SST_EXPORT sst_status sst_growth_scan(const sst_profile_t* profile, const double* as, size_t na,
                                      const double* res, size_t nre, int threads,
                                      sst_growth_scan_info* info);

/* ---- evolution --------------------------------------------------------- */

typedef struct sst_energy_sample {
  double energy;
  double production;
  double dissipation;
} sst_energy_sample;

SST_EXPORT sst_status sst_sim_create(const sst_field_t* field, const sst_profile_t* profile,
                                     double re, double dt, int nx, sst_sim_t** out);
SST_EXPORT void sst_sim_destroy(sst_sim_t* sim);
/* On SST_BLOWUP the simulation keeps its last valid state. */
SST_EXPORT sst_status sst_sim_step(sst_sim_t* sim);
SST_EXPORT double sst_sim_time(const sst_sim_t* sim);
SST_EXPORT sst_status sst_sim_diagnostics(const sst_sim_t* sim, sst_energy_sample* out);
SST_EXPORT sst_status sst_sim_residuals(const sst_sim_t* sim, double* no_slip,
                                        double* divergence);
/* Advance to t_final (measured from the current time) sampling every
 * `sample_every` steps. On SST_BLOWUP *out is NULL and the simulation holds the
 * last valid state. */
SST_EXPORT sst_status sst_sim_run(sst_sim_t* sim, double t_final, int sample_every,
                                  sst_trajectory_t** out);

typedef struct sst_trajectory_row {
  double t;
  double energy;
  double production;
  double dissipation;
  double residual;
  double bound; /* NaN until a decay check has been run */
} sst_trajectory_row;

typedef struct sst_decay_report {
  int evaluated;
  int passed;
  int monotone;
  int ratio_bound_holds;
  double worst_margin;
} sst_decay_report;

SST_EXPORT void sst_trajectory_destroy(sst_trajectory_t* trajectory);
SST_EXPORT size_t sst_trajectory_length(const sst_trajectory_t* trajectory);
SST_EXPORT sst_status sst_trajectory_row_at(const sst_trajectory_t* trajectory, size_t index,
                                            sst_trajectory_row* row);
SST_EXPORT double sst_trajectory_max_residual(const sst_trajectory_t* trajectory);
/* Compare against E(0) exp(pi^2/2 (1/re_energy - 1/re) t); stores the bound in
 * the trajectory for later CSV output. */
SST_EXPORT sst_status sst_trajectory_check_decay(sst_trajectory_t* trajectory, double re_energy,
                                                 sst_decay_report* report);
SST_EXPORT sst_status sst_trajectory_write_csv(const sst_trajectory_t* trajectory,
                                               const char* path);

#ifdef __cplusplus
}
#endif

#endif /* SHEARSTAB_SHEARSTAB_H_ */
