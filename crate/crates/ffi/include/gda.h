#ifndef GDA_H
#define GDA_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GdaStatus {
  GDA_STATUS_OK = 0,
  GDA_STATUS_NULL_POINTER = 1,
  GDA_STATUS_INVALID_UTF8 = 2,
  GDA_STATUS_INVALID_INPUT = 3,
  GDA_STATUS_SINGULAR = 4,
  GDA_STATUS_NOT_HOMOGENEOUS = 5,
  GDA_STATUS_NOT_DEGREE_ZERO = 6,
  GDA_STATUS_ORDER_TOO_SMALL = 7,
  GDA_STATUS_EXCEPTIONAL_F2 = 8,
  GDA_STATUS_INFINITE_FIELD = 9,
  GDA_STATUS_BUDGET_EXCEEDED = 10,
  GDA_STATUS_UNSUPPORTED = 11,
  GDA_STATUS_INTERNAL = 12,
} GdaStatus;

/**
 * Opaque algebra handle.
 */
typedef struct GdaAlgebra GdaAlgebra;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *gda_last_error_message(void);

/**
 * Library version, a static nul-terminated string.
 */
const char *gda_version(void);

/**
 * Parses and validates a TOML algebra spec.
 *
 * # Safety
 * `toml` must be a nul-terminated string and `out` a valid pointer.
 */
enum GdaStatus gda_algebra_from_toml(const char *toml, struct GdaAlgebra **out);

/**
 * Releases a handle; null is ignored.
 *
 * # Safety
 * `algebra` must come from [`gda_algebra_from_toml`] and not be used again.
 */
void gda_algebra_free(struct GdaAlgebra *algebra);

/**
 * Releases a string returned by this library; null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used again.
 */
void gda_string_free(char *s);

/**
 * `{s, e, field, invariants...}` for the algebra.
 *
 * # Safety
 * `algebra` must be a live handle and `out` a valid pointer.
 */
enum GdaStatus gda_algebra_describe(const struct GdaAlgebra *algebra, char **out);

/**
 * Strict Bruhat normal form of a JSON matrix.
 *
 * # Safety
 * Pointers must be valid; `matrix_json` nul-terminated.
 */
enum GdaStatus gda_bruhat(const struct GdaAlgebra *algebra, const char *matrix_json, char **out);

/**
 * Homogeneous Dieudonne determinant of a JSON matrix.
 *
 * # Safety
 * Pointers must be valid; `matrix_json` nul-terminated.
 */
enum GdaStatus gda_det(const struct GdaAlgebra *algebra, const char *matrix_json, char **out);

/**
 * Reduced norms of a JSON matrix.
 *
 * # Safety
 * Pointers must be valid; `matrix_json` nul-terminated.
 */
enum GdaStatus gda_nrd(const struct GdaAlgebra *algebra, const char *matrix_json, char **out);

/**
 * `SK(E)`, the kernel group and `SK^h` at size `n` (0 for the spec's own
 * `[matrix]` section), with the oracle when `with_oracle` is nonzero.
 * `budget` 0 means the default.
 *
 * # Safety
 * `algebra` must be a live handle and `out` a valid pointer.
 */
enum GdaStatus gda_sk(const struct GdaAlgebra *algebra,
                      size_t n,
                      int32_t with_oracle,
                      uint64_t budget,
                      char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GDA_H */
