#ifndef QMWRT_H
#define QMWRT_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QmwrtStatus {
  QMWRT_STATUS_OK = 0,
  QMWRT_STATUS_NULL_POINTER = 1,
  QMWRT_STATUS_INVALID_ARGUMENT = 2,
  QMWRT_STATUS_HYPOTHESIS = 3,
  QMWRT_STATUS_UNSUPPORTED = 4,
  QMWRT_STATUS_COST_GUARD = 5,
  QMWRT_STATUS_PANIC = 6,
} QmwrtStatus;

/**
 * A parsed manifold selector.
 */
typedef struct QmwrtManifold QmwrtManifold;

/**
 * The outcome of a verification run.
 */
typedef struct QmwrtReport QmwrtReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *qmwrt_last_error(void);

/**
 * Parses a selector such as `brieskorn:2,3,7` or `lens:5`.
 *
 * # Safety
 * `selector` must be a nul-terminated string and `out` writable.
 */
enum QmwrtStatus qmwrt_manifold_parse(const char *selector, struct QmwrtManifold **out);

/**
 * # Safety
 * `m` must come from [`qmwrt_manifold_parse`] or be null.
 */
void qmwrt_manifold_free(struct QmwrtManifold *m);

/**
 * Normalized WRT invariant W at the root `e^{2πis/r}`.
 *
 * # Safety
 * `m` must be a live handle; `re` and `im` writable.
 */
enum QmwrtStatus qmwrt_w(const struct QmwrtManifold *m,
                         int64_t r,
                         int64_t s,
                         double *re,
                         double *im);

/**
 * Difference between W and its saddle expansion truncated at `order`.
 *
 * # Safety
 * `m` must be a live handle; `re` and `im` writable.
 */
enum QmwrtStatus qmwrt_saddle_residual(const struct QmwrtManifold *m,
                                       int64_t r,
                                       int64_t s,
                                       size_t order,
                                       double *re,
                                       double *im);

/**
 * Quadratic Gauss sum `Σ_{n mod r} e^{2πi s n²/r}`.
 *
 * # Safety
 * `re` and `im` must be writable.
 */
enum QmwrtStatus qmwrt_gauss(int64_t s, int64_t r, double *re, double *im);

/**
 * Runs a suite (`all`, `identity`, `integrality`, `geometric`, `oracle`,
 * `decomposition`, `phase-sums`) at one root.
 *
 * # Safety
 * `m` must be a live handle, `suite` nul-terminated and `out` writable.
 */
enum QmwrtStatus qmwrt_verify(const struct QmwrtManifold *m,
                              int64_t r,
                              int64_t s,
                              const char *suite,
                              struct QmwrtReport **out);

/**
 * 1 if every check passed, 0 otherwise, -1 for a null handle.
 *
 * # Safety
 * `rep` must be a live handle or null.
 */
int32_t qmwrt_report_passed(const struct QmwrtReport *rep);

/**
 * Number of checks in the report.
 *
 * # Safety
 * `rep` must be a live handle or null.
 */
size_t qmwrt_report_len(const struct QmwrtReport *rep);

/**
 * The report as JSON. Release the string with [`qmwrt_string_free`].
 *
 * # Safety
 * `rep` must be a live handle and `out` writable.
 */
enum QmwrtStatus qmwrt_report_json(const struct QmwrtReport *rep, char **out);

/**
 * # Safety
 * `rep` must come from [`qmwrt_verify`] or be null.
 */
void qmwrt_report_free(struct QmwrtReport *rep);

/**
 * # Safety
 * `s` must come from this library or be null.
 */
void qmwrt_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QMWRT_H */
