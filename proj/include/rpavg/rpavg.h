/* C interface to the rpavg library.
 *
 * Every function returns an rpa_status. On failure a thread-local message
 * is available from rpa_last_error() until the next call on the same thread.
 * Strings returned through char** are owned by the caller and released with
 * rpa_string_free(). Handles are opaque and released with their _free call;
 * passing NULL to a _free call is a no-op. */
#ifndef RPAVG_H
#define RPAVG_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(RPAVG_BUILDING)
#    define RPA_API __declspec(dllexport)
#  else
#    define RPA_API __declspec(dllimport)
#  endif
#else
#  define RPA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rpa_status {
  RPA_OK = 0,
  RPA_ERR_PARAMETER = 1,     /* invalid distribution or kernel parameters */
  RPA_ERR_RANGE = 2,         /* subsequence growth beyond double range */
  RPA_ERR_CONFIGURATION = 3, /* malformed or inconsistent configuration */
  RPA_ERR_SIZE = 4,          /* grid or enumeration over budget */
  RPA_ERR_ARGUMENT = 5,      /* precondition violated by an argument */
  RPA_ERR_IO = 6,
  RPA_ERR_INTERNAL = 99
} rpa_status;

typedef struct rpa_config rpa_config;
typedef struct rpa_model rpa_model;
typedef struct rpa_observable rpa_observable;

RPA_API const char* rpa_version(void);
RPA_API const char* rpa_last_error(void);
RPA_API const char* rpa_status_name(rpa_status status);
RPA_API void rpa_string_free(char* s);

/* Experiment configurations (JSON or TOML). */
RPA_API rpa_status rpa_config_load(const char* path, rpa_config** out);
/* format is "json" or "toml"; relative observable paths resolve against base_dir (may be NULL). */
RPA_API rpa_status rpa_config_parse(const char* text, const char* format, const char* base_dir,
                                    rpa_config** out);
RPA_API void rpa_config_free(rpa_config* config);
/* NULL out_dir, threads <= 0 or seed_count <= 0 leave the setting unchanged. */
RPA_API rpa_status rpa_config_override(rpa_config* config, const char* out_dir, int threads,
                                       long long seed_count);
RPA_API rpa_status rpa_config_to_json(const rpa_config* config, char** json);
RPA_API rpa_status rpa_config_hash(const rpa_config* config, char** hex);
/* ok receives 1 when every hypothesis check passes. */
RPA_API rpa_status rpa_config_validate(const rpa_config* config, char** report_json, int* ok);
RPA_API rpa_status rpa_config_run(const rpa_config* config, char** summary_json);
RPA_API rpa_status rpa_config_sweep(const rpa_config* config, char** summary_json);

/* Transition-measure models, described by the "model" block of a config. */
RPA_API rpa_status rpa_model_create(const char* model_json, rpa_model** out);
RPA_API void rpa_model_free(rpa_model* model);
RPA_API int rpa_model_dimension(const rpa_model* model);

/* sum_{n < |k| <= m} a_k (nuhat_k(t) - E nuhat_k(t)); t has d entries. */
RPA_API rpa_status rpa_partial_sum(const rpa_model* model, uint64_t seed, long long n, long long m,
                                   const double* t, size_t d, double* re, double* im);
/* Certified supremum of |P_{n,m}| over [-T,T]^d; h <= 0 picks the default spacing. */
RPA_API rpa_status rpa_sup_on_grid(const rpa_model* model, uint64_t seed, long long n, long long m,
                                   double T, double h, double* sup, double* certified);
/* family is one of "K", "G", "H", "F", "E", "D". */
RPA_API rpa_status rpa_kernel_value(const rpa_model* model, const char* family, uint64_t seed,
                                    long long n, const double* t, size_t d, double* re, double* im);

RPA_API rpa_status rpa_observable_create(const char* json, rpa_observable** out);
RPA_API void rpa_observable_free(rpa_observable* f);
RPA_API rpa_status rpa_square_function(const rpa_model* model, uint64_t seed,
                                       const rpa_observable* f, double rho, int N, double* value,
                                       double* moment);

/* v(s) norm of x = re + i im (im may be NULL). */
RPA_API rpa_status rpa_variation_norm(const double* re, const double* im, size_t n, double s,
                                      double* out);

#ifdef __cplusplus
}
#endif

#endif /* RPAVG_H */
