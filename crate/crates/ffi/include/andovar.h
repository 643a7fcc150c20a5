#ifndef ANDOVAR_H
#define ANDOVAR_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum AndovarStatus {
  ANDOVAR_STATUS_OK = 0,
  ANDOVAR_STATUS_NULL_POINTER = 1,
  ANDOVAR_STATUS_INVALID_INPUT = 2,
  ANDOVAR_STATUS_DIMENSION = 3,
  ANDOVAR_STATUS_BUFFER_TOO_SMALL = 4,
  ANDOVAR_STATUS_NOT_PSD = 5,
  ANDOVAR_STATUS_NOT_CONTRACTION = 6,
  ANDOVAR_STATUS_NOT_COMMUTING = 7,
  ANDOVAR_STATUS_NOT_PURE = 8,
  ANDOVAR_STATUS_BOUNDARY_POLE = 9,
  ANDOVAR_STATUS_SPLIT_LEAKAGE = 10,
  ANDOVAR_STATUS_CHAIN_VIOLATION = 11,
  ANDOVAR_STATUS_NUMERIC = 12,
  ANDOVAR_STATUS_PANIC = 13,
} AndovarStatus;

/**
 * Unitary colligation of a pair, with the purity tolerance it was built with.
 */
typedef struct AndovarColligation AndovarColligation;

/**
 * Validated commuting contractive pair.
 */
typedef struct AndovarPair AndovarPair;

typedef struct AndovarComplex {
  double re;
  double im;
} AndovarComplex;

typedef struct AndovarVnReport {
  double lhs;
  double sup_variety;
  double sup_bidisc;
  double slack;
} AndovarVnReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next call into the library from the same thread.
 */
const char *andovar_last_error(void);

/**
 * Validates `(T1, T2)`, both `n x n` row-major, with default tolerances.
 *
 * # Safety
 * `t1` and `t2` must point to `n * n` entries; `out` must be writable.
 */
enum AndovarStatus andovar_pair_new(size_t n,
                                    const struct AndovarComplex *t1,
                                    const struct AndovarComplex *t2,
                                    struct AndovarPair **out);

/**
 * # Safety
 * `pair` must come from [`andovar_pair_new`] and not be used afterwards.
 */
void andovar_pair_free(struct AndovarPair *pair);

/**
 * Writes whether `T1` and `T2` are pure (spectral radius below `1 - tol_pure`).
 *
 * # Safety
 * `pair` must be a live handle; `t1_pure` and `t2_pure` must be writable.
 */
enum AndovarStatus andovar_pair_purity(const struct AndovarPair *pair,
                                       bool *t1_pure,
                                       bool *t2_pure);

/**
 * # Safety
 * `pair` must be a live handle; `out` must be writable.
 */
enum AndovarStatus andovar_colligation_new(const struct AndovarPair *pair,
                                           struct AndovarColligation **out);

/**
 * # Safety
 * `coll` must come from [`andovar_colligation_new`] and not be used afterwards.
 */
void andovar_colligation_free(struct AndovarColligation *coll);

/**
 * Defect ranks `r1 = rank D_T1`, `r2 = rank D_T2`; the unitary is `(r1 + r2)` square.
 *
 * # Safety
 * `coll` must be a live handle; `r1` and `r2` must be writable.
 */
enum AndovarStatus andovar_colligation_dims(const struct AndovarColligation *coll,
                                            size_t *r1,
                                            size_t *r2);

/**
 * Copies `U = [[A, B], [C, D]]` row-major into `out` (`len` entries available).
 *
 * # Safety
 * `coll` must be a live handle; `out` must hold `len` entries.
 */
enum AndovarStatus andovar_colligation_copy_unitary(const struct AndovarColligation *coll,
                                                    struct AndovarComplex *out,
                                                    size_t len);

/**
 * Evaluates the `r1 x r1` inner function `Ψ(z)`, `|z| <= 1`.
 *
 * # Safety
 * `coll` must be a live handle; `out` must hold `len` entries.
 */
enum AndovarStatus andovar_psi_eval(const struct AndovarColligation *coll,
                                    struct AndovarComplex z,
                                    struct AndovarComplex *out,
                                    size_t len);

/**
 * Points `z2` of the variety over `z1`. Writes up to `cap` values to `z2`
 * and, when `kinds` is not null, `0` for `V0` and `1` for `V1` points.
 * `count` receives the fiber size even when it exceeds `cap`, in which case
 * the status is `BufferTooSmall`.
 *
 * # Safety
 * `coll` must be a live handle; `z2` and `kinds` (if not null) must hold
 * `cap` entries; `count` must be writable.
 */
enum AndovarStatus andovar_variety_fiber(const struct AndovarColligation *coll,
                                         struct AndovarComplex z1,
                                         struct AndovarComplex *z2,
                                         uint8_t *kinds,
                                         size_t cap,
                                         size_t *count);

/**
 * Checks `|p(T1, T2)| <= sup_V |p| <= sup_{T^2} |p|` for the polynomial with
 * coefficients `coeffs[j * cols + k]` of `z1^j z2^k`, `rows x cols`. Zero
 * grid sizes select the defaults. A broken chain returns `ChainViolation`.
 *
 * # Safety
 * `pair` must be a live handle; `coeffs` must hold `rows * cols` entries;
 * `out` must be writable.
 */
enum AndovarStatus andovar_vn_report(const struct AndovarPair *pair,
                                     const struct AndovarComplex *coeffs,
                                     size_t rows,
                                     size_t cols,
                                     size_t n_theta,
                                     size_t torus_grid,
                                     struct AndovarVnReport *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ANDOVAR_H */
