/* qmemsim: single-photon pulse propagation in a resonant absorber.
 *
 * C interface to the simulation core.  All functions return a qms_status;
 * results are written through out-parameters.  Objects returned through
 * double pointers are owned by the caller and released with the matching
 * _free function.  On failure the out-parameters are left untouched and
 * qms_last_error() describes the problem (thread-local storage).
 */
#ifndef QMEMSIM_H
#define QMEMSIM_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined _WIN32
#define QMS_API __declspec(dllexport)
#else
#define QMS_API __attribute__((visibility("default")))
#endif

typedef enum qms_status {
    QMS_OK = 0,
    QMS_ERR_ARGUMENT = 1, /* null pointer / malformed argument */
    QMS_ERR_DOMAIN = 2,   /* parameter outside its mathematical domain */
    QMS_ERR_CONFIG = 3,   /* inconsistent grid or configuration */
    QMS_ERR_SINGULAR = 4, /* computation degenerate (e.g. zero probability) */
    QMS_ERR_INTERNAL = 5  /* unexpected failure */
} qms_status;

typedef struct qms_medium qms_medium;
typedef struct qms_signal qms_signal;
typedef struct qms_profile qms_profile;

/* Uniform time grid: samples at t_start + k*dt, k = 0..n-1. */
typedef struct qms_grid_spec {
    double t_start;
    double dt;
    size_t n;
} qms_grid_spec;

typedef struct qms_metrics {
    double depth;
    double input_probability;
    double efficiency;
    double efficiency_asymptotic;
    double leak_before_zero;
    double retrieved_after_zero;
    double p_abs;
    double p_abs_closed;
    double first_burst_fraction;
    double first_burst_t_end;
    double flatness_cv;
    double boundary_layer_width;
    double boundary_layer_expected;
    double plateau_median;
    double dip_depth;
    double peak_density; /* max |F_out|^2 over t > 0 */
    double peak_time;
} qms_metrics;

QMS_API const char* qms_version(void);
QMS_API const char* qms_last_error(void);

/* --- medium ----------------------------------------------------------- */

QMS_API qms_status qms_medium_create(double alpha, double length, double t2,
                                     qms_medium** out);
QMS_API void qms_medium_free(qms_medium* m);

QMS_API qms_status qms_medium_depth(const qms_medium* m, double* out);
QMS_API qms_status qms_medium_norm_const(const qms_medium* m, double* out);
QMS_API qms_status qms_medium_g_factor(const qms_medium* m, double z, double* out);
QMS_API qms_status qms_medium_default_grid(const qms_medium* m, qms_grid_spec* out);

/* Single-scatterer coupling mu = 3 lambda^2 / (8 pi S). */
QMS_API qms_status qms_mu_geometric(double wavelength, double beam_area, double* out);

/* Attenuation coefficient alpha = 4 mu n, n = scatterers per unit length. */
QMS_API qms_status qms_alpha_from_geometry(double mu, double linear_density,
                                           double* out);

/* --- signals ----------------------------------------------------------- */

QMS_API qms_status qms_signal_create(const qms_grid_spec* grid, const double* re,
                                     const double* im /* may be NULL */,
                                     qms_signal** out);
QMS_API void qms_signal_free(qms_signal* s);

QMS_API qms_status qms_signal_grid(const qms_signal* s, qms_grid_spec* out);
QMS_API qms_status qms_signal_copy_data(const qms_signal* s, double* re, double* im);

/* Integral of |f|^2 over [t_lo, t_hi] (pass +-HUGE_VAL for open ends);
 * bounds snap to integration-cell boundaries. */
QMS_API qms_status qms_signal_probability(const qms_signal* s, double t_lo, double t_hi,
                                          double* out);

/* --- pulse construction and propagation -------------------------------- */

/* Matched (optimal) input pulse, unit probability, supported on t < 0.
 * Pass grid = NULL for the medium's default grid. */
QMS_API qms_status qms_optimal_pulse(const qms_medium* m, const qms_grid_spec* grid,
                                     qms_signal** out);

/* Field after traversing depth z. */
QMS_API qms_status qms_propagate(const qms_medium* m, const qms_signal* in, double z,
                                 qms_signal** out);

/* Series evaluation of the backscatter kernel gamma(t).  truncated (may be
 * NULL) is set nonzero if the term cap was hit before convergence. */
QMS_API qms_status qms_gamma_value(const qms_medium* m, double t, int m_max,
                                   double* value, int* truncated);

/* Analytic output field gamma(t) - F_in(-t) on the grid (NULL for default). */
QMS_API qms_status qms_analytic_output(const qms_medium* m, const qms_grid_spec* grid,
                                       int m_max, qms_signal** out);

/* --- excitation profile ------------------------------------------------ */

/* Scatterer amplitude c(t, z) versus depth at observation time t, on a
 * default-refined z grid with about z_points base points. */
QMS_API qms_status qms_excitation_profile(const qms_medium* m, const qms_signal* in,
                                          size_t z_points, double t, qms_profile** out);

/* Same amplitude on an explicit list of nz depths (each in [0, length]). */
QMS_API qms_status qms_excitation_profile_z(const qms_medium* m, const qms_signal* in,
                                            const double* z, size_t nz, double t,
                                            qms_profile** out);
QMS_API void qms_profile_free(qms_profile* p);

QMS_API qms_status qms_profile_size(const qms_profile* p, size_t* out);
QMS_API qms_status qms_profile_copy_data(const qms_profile* p, double* z, double* re,
                                         double* im);

/* Integral_0^L |c|^2 dz of a stored profile. */
QMS_API qms_status qms_profile_absorbed(const qms_profile* p, double* out);

/* Closed-form profile value at t = 0 for the optimal input. */
QMS_API qms_status qms_amplitude_closed(const qms_medium* m, double z, double* out);

/* --- metrics ------------------------------------------------------------ */

/* Full metrics for the optimal input; grid = NULL selects the default. */
QMS_API qms_status qms_compute_metrics(const qms_medium* m, const qms_grid_spec* grid,
                                       size_t z_points, qms_metrics* out);

/* Full metrics for a caller-supplied input signal. */
QMS_API qms_status qms_compute_metrics_for(const qms_medium* m, const qms_signal* in,
                                           size_t z_points, qms_metrics* out);

#ifdef __cplusplus
}
#endif

#endif /* QMEMSIM_H */
