/* C interface to the adiamorse library. Every handle is opaque and owned by
   the caller once returned; free it with the matching *_free function.
   Functions return AM_OK or an error code; am_last_error() then holds a
   message for the calling thread. */
#ifndef ADIAMORSE_H
#define ADIAMORSE_H

#include <stddef.h>

#if defined(_WIN32)
#  if defined(ADIAMORSE_BUILDING_LIBRARY)
#    define AM_API __declspec(dllexport)
#  else
#    define AM_API __declspec(dllimport)
#  endif
#else
#  define AM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum am_status {
  AM_OK = 0,
  AM_INVALID_ARGUMENT = 1,
  AM_DOMAIN_ERROR = 2,
  AM_DEGENERATE_CRITICAL_POINT = 3,
  AM_NO_INTERSECTION = 4,
  AM_DIVERGENT_DELAY = 5,
  AM_PERTURBATION_TOO_LARGE = 6,
  AM_UNRESOLVED_TRAJECTORY = 7,
  AM_INTERNAL_CONSISTENCY = 8,
  AM_IO_ERROR = 9,
  AM_UNKNOWN_ERROR = 99
} am_status;

typedef struct am_path am_path;
typedef struct am_field am_field;
typedef struct am_report am_report;

AM_API const char* am_version(void);
AM_API const char* am_status_string(am_status status);
/* Message and pipeline stage of the last failure on this thread ("" if none). */
AM_API const char* am_last_error(void);
AM_API const char* am_last_error_stage(void);
/* Strings returned through char** out-parameters. */
AM_API void am_string_free(char* s);

/* Paths H(s) */
AM_API am_status am_path_grover(long long N, int orthonormal, am_path** out);
AM_API am_status am_path_pspin(int n, int p, double b, int k, am_path** out);
/* h0, h1: dim*dim real row-major; H(s) = (1-s) h0 + s h1 */
AM_API am_status am_path_linear(int dim, const double* h0, const double* h1, am_path** out);
AM_API void am_path_free(am_path* path);
AM_API int am_path_dim(const am_path* path);
/* re, im: dim*dim row-major; im may be NULL */
AM_API am_status am_path_evaluate(const am_path* path, double s, double* re, double* im);
/* out: dim ascending eigenvalues */
AM_API am_status am_path_eigenvalues(const am_path* path, double s, double* out);

/* Landscape fields */
AM_API am_status am_field_from_path(const am_path* path, double s_lo, double s_hi,
                                    double lambda_lo, double lambda_hi, am_field** out);
/* f = sum c[t] s^i[t] lambda^j[t] */
AM_API am_status am_field_polynomial(size_t n_terms, const int* i, const int* j,
                                     const double* c, double s_lo, double s_hi,
                                     double lambda_lo, double lambda_hi, am_field** out);
AM_API void am_field_free(am_field* field);
AM_API am_status am_field_value(const am_field* field, double s, double lambda, double* out);
AM_API am_status am_field_gradient(const am_field* field, double s, double lambda,
                                   double out[2]);
/* out: row-major 2x2 */
AM_API am_status am_field_hessian(const am_field* field, double s, double lambda,
                                  double out[4]);

/* Full pipeline from a JSON config. A partial report is still AM_OK; query
   am_report_certified. apply_env != 0 honours ADIAMORSE_* overrides. */
AM_API am_status am_analyze(const char* config_json, int apply_env, am_report** out);
AM_API void am_report_free(am_report* report);
AM_API int am_report_certified(const am_report* report);
AM_API const char* am_report_status(const am_report* report);
/* Owned by the report. */
AM_API const char* am_report_json(const am_report* report);
AM_API int am_report_euler(const am_report* report);
AM_API am_status am_report_counts(const am_report* report, int* n_min, int* n_saddle,
                                  int* n_max);
/* Writes report.json and side files; the paths stay queryable afterwards. */
AM_API am_status am_report_write(am_report* report, const char* dir);
AM_API size_t am_report_artifact_count(const am_report* report);
AM_API const char* am_report_artifact(const am_report* report, size_t i);
/* Output directory named in the config ("" when absent). */
AM_API const char* am_report_output_dir(const am_report* report);

AM_API am_status am_compare_reports(const am_report* a, const am_report* b, char** diff_json);

/* b sweep of the p-spin census. csv_out / json_out may be NULL.
   homotopy_pass receives 1, 0, or -1 when fewer than two records are usable. */
AM_API am_status am_pspin_sweep(int n, int p, int k, const double* b_grid, size_t n_b,
                                char** csv_out, char** json_out, int* homotopy_pass);

/* Writes content atomically (temporary file + rename). */
AM_API am_status am_write_file(const char* path, const char* content);

#ifdef __cplusplus
}
#endif

#endif
