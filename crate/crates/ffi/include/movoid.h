#ifndef MOVOID_H
#define MOVOID_H

/* Generated by cbindgen; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible call.
 */
typedef enum MovoidStatus {
  MOVOID_STATUS_OK = 0,
  MOVOID_STATUS_NULL_POINTER = 1,
  MOVOID_STATUS_INVALID_ARGUMENT = 2,
  MOVOID_STATUS_BUILD_FAILED = 3,
  MOVOID_STATUS_VALIDATION_FAILED = 4,
  MOVOID_STATUS_BUFFER_TOO_SMALL = 5,
} MovoidStatus;

/**
 * Opaque polar space handle.
 */
typedef struct MovoidSpace MovoidSpace;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Builds a polar space. `kind` is "Q-", "W", or "H"; `q` the field order
 * (Hermitian: the ambient square order); `r` the rank. On success `*out`
 * owns the space; release it with [`movoid_space_free`].
 *
 * # Safety
 * `kind` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum MovoidStatus movoid_space_new(const char *kind,
                                   uint64_t q,
                                   uint32_t r,
                                   struct MovoidSpace **out);

/**
 * Releases a space handle. Null is ignored.
 *
 * # Safety
 * `space` must come from [`movoid_space_new`] and not be freed twice.
 */
void movoid_space_free(struct MovoidSpace *space);

/**
 * Point and generator counts of a built space. Either out pointer may be
 * null to skip that value.
 *
 * # Safety
 * `space` must be a live handle.
 */
enum MovoidStatus movoid_space_counts(const struct MovoidSpace *space,
                                      uint64_t *out_points,
                                      uint64_t *out_generators);

/**
 * Writes the display name (e.g. "Q-(5,3)") into `buf`.
 *
 * # Safety
 * `space` must be a live handle; `buf` must hold `buf_len` bytes.
 */
enum MovoidStatus movoid_space_name(const struct MovoidSpace *space, char *buf, uintptr_t buf_len);

/**
 * Best proven lower bound on m for the given parameters, written as a
 * decimal string (it can exceed any fixed-width integer).
 *
 * # Safety
 * `kind` must be a valid NUL-terminated string; `buf` must hold
 * `buf_len` bytes.
 */
enum MovoidStatus movoid_best_bound(const char *kind,
                                    uint64_t q,
                                    uint32_t r,
                                    char *buf,
                                    uintptr_t buf_len);

/**
 * Validates a point-index set as an m-ovoid. Returns `Ok` when valid,
 * `ValidationFailed` when the set is well-formed but not an m-ovoid, and
 * `InvalidArgument` for out-of-range or non-polar indices.
 *
 * # Safety
 * `space` must be a live handle; `points` must reference `len` readable
 * indices.
 */
enum MovoidStatus movoid_validate_ovoid(const struct MovoidSpace *space,
                                        const uint64_t *points,
                                        uintptr_t len,
                                        uint64_t m);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* MOVOID_H */
