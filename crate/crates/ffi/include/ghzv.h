#ifndef GHZV_H
#define GHZV_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Which GME strategy [`ghzv_gme_tests`] assumes.
 */
typedef enum GhzvGmeKind {
  GHZV_GME_KIND_OPTIMAL = 0,
  GHZV_GME_KIND_PLM = 1,
  GHZV_GME_KIND_ZH = 2,
} GhzvGmeKind;

/**
 * Result codes.
 */
typedef enum GhzvStatus {
  GHZV_STATUS_OK = 0,
  GHZV_STATUS_NULL_POINTER = 1,
  GHZV_STATUS_INVALID_ARGUMENT = 2,
  GHZV_STATUS_NUMERICAL = 3,
  GHZV_STATUS_CAP_EXCEEDED = 4,
  GHZV_STATUS_BUFFER_TOO_SMALL = 5,
  GHZV_STATUS_PANIC = 6,
} GhzvStatus;

/**
 * Opaque strategy handle.
 */
typedef struct GhzvStrategy GhzvStrategy;

typedef struct GhzvSpectral {
  double beta;
  double nu;
  double tau;
  bool homogeneous;
} GhzvSpectral;

/**
 * Summary of a simulated run; `fidelity` and `fidelity_std` are NaN when
 * the strategy is not homogeneous.
 */
typedef struct GhzvRunSummary {
  uint64_t trials;
  uint64_t passes;
  double pass_rate;
  double fidelity;
  double fidelity_std;
} GhzvRunSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer
 * stays valid until the next call into this library on the same thread.
 */
const char *ghzv_last_error(void);

/**
 * Overrides the maximum Hilbert-space dimension; 0 restores the default.
 */
void ghzv_set_dim_cap(size_t cap);

/**
 * Builds a named strategy (`omega1`..`omega9`, `omega5prime`).
 *
 * Optional inputs: `d = 0` and `m = 0` mean unset, `p` and `beta` are unset
 * when NaN, and `lambdas` may be NULL.
 *
 * # Safety
 * `name` must be a NUL-terminated string, `lambdas` must point to
 * `n_lambdas` doubles when non-NULL, and `out` must be writable.
 */
enum GhzvStatus ghzv_strategy_new(const char *name,
                                  size_t n,
                                  size_t d,
                                  size_t m,
                                  double p,
                                  double beta,
                                  const double *lambdas,
                                  size_t n_lambdas,
                                  struct GhzvStrategy **out);

/**
 * Releases a handle; NULL is ignored.
 *
 * # Safety
 * `h` must come from [`ghzv_strategy_new`] and not be used afterwards.
 */
void ghzv_strategy_free(struct GhzvStrategy *h);

/**
 * Hilbert-space dimension of the strategy, or 0 for NULL.
 *
 * # Safety
 * `h` must be a live handle or NULL.
 */
size_t ghzv_strategy_dim(const struct GhzvStrategy *h);

/**
 * Number of tests in the strategy, or 0 for NULL.
 *
 * # Safety
 * `h` must be a live handle or NULL.
 */
size_t ghzv_strategy_test_count(const struct GhzvStrategy *h);

/**
 * `β`, `ν`, `τ` and homogeneity of the strategy.
 *
 * # Safety
 * `h` must be a live handle and `out` writable.
 */
enum GhzvStatus ghzv_strategy_spectral(const struct GhzvStrategy *h, struct GhzvSpectral *out);

/**
 * Copies `Ω` row-major into `re` and `im`, each of length `len >= dim²`.
 *
 * # Safety
 * `h` must be a live handle; `re` and `im` must hold `len` doubles.
 */
enum GhzvStatus ghzv_strategy_omega(const struct GhzvStrategy *h,
                                    double *re,
                                    double *im,
                                    size_t len);

/**
 * JSON description of the strategy; free with [`ghzv_string_free`].
 * Returns NULL for a NULL handle.
 *
 * # Safety
 * `h` must be a live handle or NULL.
 */
char *ghzv_strategy_json(const struct GhzvStrategy *h);

/**
 * Releases a string returned by this library; NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void ghzv_string_free(char *s);

/**
 * `⌈ln δ / ln(1 - νε)⌉`.
 *
 * # Safety
 * `out` must be writable.
 */
enum GhzvStatus ghzv_num_tests(double epsilon, double delta, double nu, uint64_t *out);

/**
 * Tests needed to certify GME; `n` is used only by the PLM kind.
 *
 * # Safety
 * `out` must be writable.
 */
enum GhzvStatus ghzv_gme_tests(size_t d,
                               double delta,
                               enum GhzvGmeKind kind,
                               size_t n,
                               uint64_t *out);

/**
 * High-precision adversarial test count for second-largest eigenvalue `beta`.
 *
 * # Safety
 * `out` must be writable.
 */
enum GhzvStatus ghzv_adversarial_num_tests(double beta,
                                           double epsilon,
                                           double delta,
                                           uint64_t *out);

/**
 * Simulates `trials` tests against `source` (`target`, `depolarized:w` or
 * `file:path`).
 *
 * # Safety
 * `h` must be a live handle, `source` NUL-terminated and `out` writable.
 */
enum GhzvStatus ghzv_simulate(const struct GhzvStrategy *h,
                              const char *source,
                              uint64_t trials,
                              uint64_t seed,
                              struct GhzvRunSummary *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GHZV_H */
