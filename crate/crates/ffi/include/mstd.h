#ifndef MSTD_H
#define MSTD_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MstdStatus {
  MSTD_STATUS_OK = 0,
  MSTD_STATUS_NULL_POINTER = 1,
  MSTD_STATUS_INVALID_ARGUMENT = 2,
  MSTD_STATUS_UNIVERSE_MISMATCH = 3,
  MSTD_STATUS_BUDGET = 4,
  MSTD_STATUS_IO = 5,
  MSTD_STATUS_PANIC = 6,
} MstdStatus;

/**
 * Opaque subset of `{0..universe-1}`.
 */
typedef struct MstdIntSet MstdIntSet;

/**
 * Opaque exact MSTD probability polynomial.
 */
typedef struct MstdPolynomial MstdPolynomial;

typedef struct MstdPairStats {
  /**
   * `|A+B|`
   */
  size_t sum_size;
  /**
   * `|±(A−B)|`
   */
  size_t diff_size;
  bool is_mstd;
} MstdPairStats;

typedef struct MstdEstimate {
  double point;
  double ci_low;
  double ci_high;
  uint64_t trials;
  uint64_t successes;
} MstdEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or `""`.
 *
 * The pointer stays valid until the next call into this library on the
 * same thread.
 */
const char *mstd_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *mstd_version(void);

/**
 * Creates an empty set over `{0..universe-1}`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum MstdStatus mstd_intset_new(size_t universe, struct MstdIntSet **out);

/**
 * Creates a set from `len` elements, each `< universe`.
 *
 * # Safety
 * `elements` must point to `len` readable values (or be null when `len` is 0);
 * `out` must be valid for one handle.
 */
enum MstdStatus mstd_intset_from_elements(size_t universe,
                                          const size_t *elements,
                                          size_t len,
                                          struct MstdIntSet **out);

/**
 * Releases a set; null is ignored.
 *
 * # Safety
 * `set` must come from this library and not have been freed.
 */
void mstd_intset_free(struct MstdIntSet *set);

/**
 * # Safety
 * `set` must be a live handle.
 */
enum MstdStatus mstd_intset_insert(struct MstdIntSet *set, size_t element);

/**
 * # Safety
 * `set` must be a live handle and `out` writable.
 */
enum MstdStatus mstd_intset_contains(const struct MstdIntSet *set, size_t element, bool *out);

/**
 * # Safety
 * `set` must be a live handle and `out` writable.
 */
enum MstdStatus mstd_intset_count(const struct MstdIntSet *set, size_t *out);

/**
 * `|A+B|`, `|±(A−B)|` and whether the pair is MSTD. Both sets must share
 * a universe.
 *
 * # Safety
 * `a` and `b` must be live handles and `out` writable.
 */
enum MstdStatus mstd_pair_stats(const struct MstdIntSet *a,
                                const struct MstdIntSet *b,
                                struct MstdPairStats *out);

/**
 * Monte Carlo estimate of P(MSTD) for a correlated pair over `{0..n}`.
 * `threads == 0` uses every available core; the result does not depend on it.
 *
 * # Safety
 * `out` must be writable.
 */
enum MstdStatus mstd_estimate_p_n(size_t n,
                                  double p,
                                  double rho1,
                                  double rho2,
                                  uint64_t trials,
                                  uint64_t seed,
                                  size_t threads,
                                  struct MstdEstimate *out);

/**
 * Enumerates every MSTD pair over `{0..n}` and compresses them into a
 * polynomial. Fails with `MSTD_STATUS_BUDGET` above the enumeration cap.
 *
 * # Safety
 * `out` must be valid for one handle.
 */
enum MstdStatus mstd_polynomial_enumerate(size_t n, struct MstdPolynomial **out);

/**
 * Loads a polynomial written by `mstd enumerate --poly`.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` valid for one handle.
 */
enum MstdStatus mstd_polynomial_from_json(const char *json, struct MstdPolynomial **out);

/**
 * # Safety
 * `poly` must be a live handle and `out` writable.
 */
enum MstdStatus mstd_polynomial_evaluate(const struct MstdPolynomial *poly,
                                         double p,
                                         double rho1,
                                         double rho2,
                                         double *out);

/**
 * Number of MSTD pairs the polynomial was built from.
 *
 * # Safety
 * `poly` must be a live handle and `out` writable.
 */
enum MstdStatus mstd_polynomial_pair_count(const struct MstdPolynomial *poly, uint64_t *out);

/**
 * Releases a polynomial; null is ignored.
 *
 * # Safety
 * `poly` must come from this library and not have been freed.
 */
void mstd_polynomial_free(struct MstdPolynomial *poly);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MSTD_H */
