#ifndef CATENARY_H
#define CATENARY_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes. `CAT_OK` is zero; core error kinds map one to one.
typedef enum CatStatus {
  CAT_OK = 0,
  CAT_NULL_POINTER = 1,
  CAT_INVALID_ARGUMENT = 2,
  CAT_DOMAIN = 3,
  CAT_DIVERGENCE = 4,
  CAT_EXITED = 5,
  CAT_CAPACITY = 6,
  CAT_PARTITION = 7,
  CAT_SPEC = 8,
  CAT_BASIN = 9,
  CAT_TRUNCATION = 10,
  CAT_PROJECTION = 11,
  CAT_UNRESOLVED = 12,
  CAT_CONFIG = 13,
  CAT_PANIC = 14,
} CatStatus;

// Finished scenario run.
typedef struct CatReport CatReport;

// Catenary function of the planar saddle `ẋ = x, ẏ = −y` on the block
// `|x| + |y| ≤ δ`, solving the boundary value problem with constant
// boundary data.
typedef struct CatSaddle CatSaddle;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failure on this thread, or null. Valid until the
// next call into this library from the same thread.
const char *cat_last_error(void);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not have been freed.
void cat_string_free(char *s);

// Writes the roots `λ_s < 1 < λ_u` of `λ² − 3λ + 1`.
//
// # Safety
// Both pointers must be valid for writes.
enum CatStatus cat_catenary_roots(double *lambda_s, double *lambda_u);

// Shift metric `Σ_{x_n ≠ y_n} λ^{−|n|}` between two finite-support binary
// sequences given by the indices of their ones.
//
// # Safety
// `x_ones`/`y_ones` must point to `x_len`/`y_len` integers (or be null
// with length zero); `out` must be valid for writes.
enum CatStatus cat_shift_metric(const int64_t *x_ones,
                                size_t x_len,
                                const int64_t *y_ones,
                                size_t y_len,
                                double lambda,
                                double *out);

// Creates a saddle handle. `t_max` bounds the exit-time scan.
//
// # Safety
// `out` must be valid for writes; on success it owns a handle released
// with [`cat_saddle_free`].
enum CatStatus cat_saddle_new(double delta,
                              double boundary,
                              double a,
                              double t_max,
                              struct CatSaddle **out);

// # Safety
// `h` must be null or a live handle from [`cat_saddle_new`].
void cat_saddle_free(struct CatSaddle *h);

// Value of the catenary function at `(x, y)`, which must lie in the block.
//
// # Safety
// `h` must be a live handle and `out` valid for writes.
enum CatStatus cat_saddle_eval(const struct CatSaddle *h, double x, double y, double *out);

// Exit times `T^s ≤ 0 ≤ T^u` of `(x, y)` from the block; an orbit that
// never leaves on one side reports `∓∞` there.
//
// # Safety
// `h` must be a live handle; `t_s` and `t_u` valid for writes.
enum CatStatus cat_saddle_hit_times(const struct CatSaddle *h,
                                    double x,
                                    double y,
                                    double *t_s,
                                    double *t_u);

// Parses and runs a scenario given as JSON text, writing its outputs under
// `out_dir` (the current directory when null). A config error returns
// `CAT_CONFIG`; a run that completes with failing checks still returns
// `CAT_OK` and reports `passed == 0`.
//
// # Safety
// `json` must be a NUL-terminated string, `out_dir` null or one, and
// `out` valid for writes.
enum CatStatus cat_scenario_run(const char *json, const char *out_dir, struct CatReport **out);

// # Safety
// `h` must be null or a live handle from [`cat_scenario_run`].
void cat_report_free(struct CatReport *h);

// 1 when every check passed, 0 otherwise, −1 for a null handle.
//
// # Safety
// `h` must be null or a live handle.
int32_t cat_report_passed(const struct CatReport *h);

// Number of checks in the report, 0 for a null handle.
//
// # Safety
// `h` must be null or a live handle.
size_t cat_report_check_count(const struct CatReport *h);

// The report as JSON. The string is owned by the caller.
//
// # Safety
// `h` must be a live handle and `out` valid for writes.
enum CatStatus cat_report_json(const struct CatReport *h, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CATENARY_H */
