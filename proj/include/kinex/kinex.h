/* C interface to the kinex library. Objects are opaque handles created by
   kx_*_create functions and released with the matching kx_*_free. Every
   fallible call returns a kx_status; on failure kx_last_error() describes
   the problem (per thread, valid until the next call on that thread). */
#ifndef KINEX_H
#define KINEX_H

#include <stddef.h>
#include <stdint.h>

#if defined(KX_BUILDING)
#define KX_API __attribute__((visibility("default")))
#else
#define KX_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum kx_status {
  KX_OK = 0,
  KX_ERR_INVALID_ARGUMENT = 1,
  KX_ERR_DOMAIN = 2,
  KX_ERR_CONFIG = 3,
  KX_ERR_DATA = 4,
  KX_ERR_STABILITY = 5,
  KX_ERR_RANGE = 6,
  KX_ERR_UNDEFINED = 7,
  KX_ERR_IO = 8,
  KX_ERR_INVALID_PAIR = 9,
  KX_ERR_INTERNAL = 99
} kx_status;

typedef struct kx_wealth kx_wealth;     /* agent balances */
typedef struct kx_density kx_density;   /* density on a uniform grid */
typedef struct kx_spectrum kx_spectrum; /* Laguerre coefficients */

KX_API const char* kx_version(void);
KX_API const char* kx_last_error(void);
KX_API const char* kx_status_name(kx_status status);

/* ---- particles ---- */
KX_API kx_status kx_wealth_create(const double* balances, size_t n, kx_wealth** out);
KX_API kx_status kx_wealth_constant(size_t n, double value, kx_wealth** out);
KX_API kx_status kx_wealth_exponential(size_t n, double mean, uint64_t seed, kx_wealth** out);
KX_API void kx_wealth_free(kx_wealth* w);
KX_API size_t kx_wealth_size(const kx_wealth* w);
KX_API double kx_wealth_total(const kx_wealth* w);
/* Copies min(n, size) balances into out. */
KX_API kx_status kx_wealth_get(const kx_wealth* w, double* out, size_t n);
KX_API kx_status kx_wealth_exchange(kx_wealth* w, size_t i, size_t j, double u);
/* Advances w in place to time horizon; global_n selects the rate-N clock. */
KX_API kx_status kx_wealth_simulate(kx_wealth* w, double horizon, uint64_t seed, int global_n, uint64_t* events);
/* W1 between the empirical law of w and Exp(mean). */
KX_API kx_status kx_wealth_w1_exponential(const kx_wealth* w, double mean, double* out);

/* ---- grid densities ---- */
KX_API kx_status kx_density_create(double x_max, const double* values, size_t cells, kx_density** out);
KX_API kx_status kx_density_equilibrium(double m1, double x_max, size_t cells, kx_density** out);
KX_API kx_status kx_density_uniform(double a, double b, double x_max, size_t cells, kx_density** out);
KX_API void kx_density_free(kx_density* q);
KX_API size_t kx_density_cells(const kx_density* q);
KX_API double kx_density_mass(const kx_density* q);
KX_API double kx_density_mean(const kx_density* q);
KX_API kx_status kx_density_get(const kx_density* q, double* out, size_t n);
KX_API kx_status kx_density_gain(const kx_density* q, kx_density** out);
/* Forward Euler in place up to horizon. */
KX_API kx_status kx_density_solve(kx_density* q, double horizon, double dt);
KX_API kx_status kx_relative_entropy(const kx_density* p, const kx_density* r, double* out);
KX_API kx_status kx_dissipation(const kx_density* q, double* out);
KX_API kx_status kx_density_w1_exponential(const kx_density* q, double mean, double* out);
KX_API kx_status kx_density_w2_exponential(const kx_density* q, double mean, double* out);

/* ---- moments ---- */
/* Integrates the moment hierarchy m[0..count-1] to time t (RK4, step dt), in place. */
KX_API kx_status kx_moments_integrate(double* m, size_t count, double t, double dt);

/* ---- linearised spectrum ---- */
KX_API kx_status kx_spectrum_create(const double* alpha, size_t n, kx_spectrum** out);
KX_API void kx_spectrum_free(kx_spectrum* s);
KX_API size_t kx_spectrum_size(const kx_spectrum* s);
KX_API double kx_spectrum_norm(const kx_spectrum* s);
KX_API kx_status kx_spectrum_get(const kx_spectrum* s, double* out, size_t n);
KX_API kx_status kx_spectrum_gap_ratio(const kx_spectrum* s, double* out);
KX_API kx_status kx_spectrum_evolve(const kx_spectrum* s, double t, kx_spectrum** out);

/* ---- runs ----
   config_text holds `key = value` lines (later lines win). Outputs are
   written under out_dir, which is created if missing. kx_last_summary()
   returns a short human-readable result of the last successful run. */
KX_API kx_status kx_run_simulate(const char* config_text, const char* out_dir);
KX_API kx_status kx_run_pde(const char* config_text, const char* out_dir);
/* passed receives 1 when every check of the study passed. */
KX_API kx_status kx_run_study(const char* study, const char* config_text, const char* out_dir, int* passed);
KX_API int kx_is_study(const char* name);
KX_API const char* kx_last_summary(void);

#ifdef __cplusplus
}
#endif

#endif
