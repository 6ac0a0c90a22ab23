#ifndef NODICE_H
#define NODICE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum NdMethod {
  ND_METHOD_BISECTION = 0,
  ND_METHOD_RESTART = 1,
  ND_METHOD_BOTH = 2,
} NdMethod;

typedef enum NdStatus {
  ND_STATUS_OK = 0,
  ND_STATUS_NULL_ARGUMENT = 1,
  ND_STATUS_INVALID_UTF8 = 2,
  /**
   * Syntax, type or desugaring error in the program text.
   */
  ND_STATUS_PROGRAM = 3,
  /**
   * Query value malformed or of the wrong type.
   */
  ND_STATUS_VALUE = 4,
  ND_STATUS_PARAM = 5,
  ND_STATUS_ANALYSIS = 6,
  ND_STATUS_IO = 7,
  ND_STATUS_PANIC = 8,
  ND_STATUS_OUT_OF_RANGE = 9,
} NdStatus;

/**
 * A checked program.
 */
typedef struct NdProgram NdProgram;

/**
 * Per-value results of one query.
 */
typedef struct NdResult NdResult;

typedef struct NdOptions {
  enum NdMethod method;
  double tol;
  bool compress;
  size_t max_fanout;
} NdOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *nd_last_error(void);

/**
 * Library version as a static string.
 */
const char *nd_version(void);

struct NdOptions nd_default_options(void);

/**
 * Parses and checks `source`. On success `*out` holds a new program.
 *
 * # Safety
 * `source` must be null or a NUL-terminated string; `out` must be null or
 * writable.
 */
enum NdStatus nd_program_parse(const char *source, struct NdProgram **out);

/**
 * Reads and checks the program at `path`.
 *
 * # Safety
 * As [`nd_program_parse`].
 */
enum NdStatus nd_program_load(const char *path, struct NdProgram **out);

/**
 * # Safety
 * `p` must be null or a handle from this library not yet freed.
 */
void nd_program_free(struct NdProgram *p);

/**
 * Maximum conditional probability of `value`, or of every output value
 * when `value` is null. `options` may be null for the defaults.
 *
 * # Safety
 * `p` must be a live program handle; `value` null or NUL-terminated;
 * `options` null or valid; `out` writable.
 */
enum NdStatus nd_infer(const struct NdProgram *p,
                       const char *value,
                       const struct NdOptions *options,
                       struct NdResult **out);

/**
 * # Safety
 * `r` must be null or a live result handle.
 */
size_t nd_result_len(const struct NdResult *r);

/**
 * Rendered value of entry `i`, owned by the result. Null when out of range.
 *
 * # Safety
 * `r` must be null or a live result handle.
 */
const char *nd_result_value(const struct NdResult *r, size_t i);

/**
 * # Safety
 * `r` must be a live result handle and `out` writable.
 */
enum NdStatus nd_result_probability(const struct NdResult *r, size_t i, double *out);

/**
 * Iterations used for entry `i`, or 0 when out of range.
 *
 * # Safety
 * `r` must be null or a live result handle.
 */
uint64_t nd_result_iterations(const struct NdResult *r, size_t i);

/**
 * # Safety
 * `r` must be null or a handle from this library not yet freed.
 */
void nd_result_free(struct NdResult *r);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NODICE_H */
