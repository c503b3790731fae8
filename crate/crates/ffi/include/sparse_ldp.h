#ifndef SPARSE_LDP_H
#define SPARSE_LDP_H

/* Generated by cbindgen from crates/ffi/src. Do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SldpFamily {
  SLDP_FAMILY_LAPLACE = 0,
  SLDP_FAMILY_GAUSSIAN = 1,
} SldpFamily;

/**
 * Status codes returned by every fallible call.
 */
typedef enum SldpStatus {
  SLDP_STATUS_OK = 0,
  SLDP_STATUS_NULL_POINTER = 1,
  SLDP_STATUS_INVALID_ARGUMENT = 2,
  SLDP_STATUS_EVEN_SUPPORT_SIZE = 3,
  SLDP_STATUS_INPUT_NOT_FOUND = 4,
  SLDP_STATUS_PARSE_ERROR = 5,
  SLDP_STATUS_INVALID_SPEC = 6,
  SLDP_STATUS_BUFFER_TOO_SMALL = 7,
  SLDP_STATUS_PRECONDITION = 8,
  SLDP_STATUS_PANIC = 9,
} SldpStatus;

/**
 * Opaque general mechanism spec.
 */
typedef struct SldpSpec SldpSpec;

/**
 * Opaque radius-truncated channel.
 */
typedef struct SldpTruncated SldpTruncated;

typedef struct SldpDefect {
  double support_leakage;
  double overlap_excess;
  double total;
} SldpDefect;

/**
 * Design search outcome. `s_chosen`, `delta_star`, `r1`, `r2` are
 * meaningful only when `feasible`.
 */
typedef struct SldpDesign {
  bool feasible;
  uint64_t s_chosen;
  double delta_star;
  double r1;
  double r2;
  uint64_t s_scanned_max;
} SldpDesign;

/**
 * Pure-LDP level. `epsilon_star` is meaningful only when `finite`.
 */
typedef struct SldpPureLdp {
  bool finite;
  double epsilon_star;
  bool has_witness;
  int64_t witness_x;
  int64_t witness_x_prime;
  int64_t witness_output;
} SldpPureLdp;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *sldp_last_error_message(void);

/**
 * Creates a truncated channel with odd support size `s`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum SldpStatus sldp_truncated_new(enum SldpFamily kind,
                                   double param,
                                   uint64_t s,
                                   struct SldpTruncated **out);

/**
 * # Safety
 * `handle` must be null or a pointer from [`sldp_truncated_new`] that has
 * not been freed.
 */
void sldp_truncated_free(struct SldpTruncated *handle);

/**
 * Support size, or 0 for a null handle.
 *
 * # Safety
 * `handle` must be null or a live handle.
 */
uint64_t sldp_truncated_support_size(const struct SldpTruncated *handle);

/**
 * Writes the `s` atoms of `Q(· | x)` into `outputs`/`probs` (capacity
 * `capacity`) and their count into `len`. With too small a buffer, `len`
 * receives the required capacity and `BufferTooSmall` is returned.
 *
 * # Safety
 * `handle` must be live; `outputs` and `probs` must point to `capacity`
 * writable elements; `len` must be writable.
 */
enum SldpStatus sldp_truncated_pmf(const struct SldpTruncated *handle,
                                   int64_t x,
                                   int64_t *outputs,
                                   double *probs,
                                   size_t capacity,
                                   size_t *len);

/**
 * # Safety
 * `handle` must be live; `r1` and `r2` must be writable.
 */
enum SldpStatus sldp_truncated_moments(const struct SldpTruncated *handle, double *r1, double *r2);

/**
 * Defect between inputs `0` and `h`.
 *
 * # Safety
 * `handle` must be live; `out` must be writable.
 */
enum SldpStatus sldp_truncated_separation_defect(const struct SldpTruncated *handle,
                                                 double epsilon,
                                                 uint64_t h,
                                                 struct SldpDefect *out);

/**
 * Worst defect over separations `0..=range`, with the smallest maximizing
 * separation.
 *
 * # Safety
 * `handle` must be live; `delta_star` and `argmax_h` must be writable.
 */
enum SldpStatus sldp_truncated_worst_case(const struct SldpTruncated *handle,
                                          double epsilon,
                                          uint64_t range,
                                          double *delta_star,
                                          uint64_t *argmax_h);

/**
 * Writes `n` seeded draws from `Q(· | x)` into `out`.
 *
 * # Safety
 * `handle` must be live; `out` must point to `n` writable elements.
 */
enum SldpStatus sldp_truncated_sample(const struct SldpTruncated *handle,
                                      int64_t x,
                                      uint64_t seed,
                                      size_t n,
                                      int64_t *out);

/**
 * Smallest odd support size whose worst defect over `0..=range` is at most
 * `delta`. `s_max = 0` selects the default scan limit.
 *
 * # Safety
 * `out` must be writable.
 */
enum SldpStatus sldp_min_feasible_support(enum SldpFamily kind,
                                          double param,
                                          double epsilon,
                                          double delta,
                                          uint64_t range,
                                          uint64_t s_max,
                                          struct SldpDesign *out);

/**
 * Parses a mechanism spec from a NUL-terminated UTF-8 JSON document.
 *
 * # Safety
 * `json` must be a valid NUL-terminated string; `out` must be writable.
 */
enum SldpStatus sldp_spec_from_json(const char *json, struct SldpSpec **out);

/**
 * # Safety
 * `handle` must be null or a live pointer from [`sldp_spec_from_json`].
 */
void sldp_spec_free(struct SldpSpec *handle);

/**
 * # Safety
 * `handle` must be live; `out` must be writable.
 */
enum SldpStatus sldp_spec_pure_ldp(const struct SldpSpec *handle, struct SldpPureLdp *out);

/**
 * Ordered defect of `x` against `x_prime` at level `epsilon`.
 *
 * # Safety
 * `handle` must be live; `out` must be writable.
 */
enum SldpStatus sldp_spec_ordered_defect(const struct SldpSpec *handle,
                                         int64_t x,
                                         int64_t x_prime,
                                         double epsilon,
                                         struct SldpDefect *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPARSE_LDP_H */
