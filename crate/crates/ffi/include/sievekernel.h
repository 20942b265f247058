#ifndef SIEVEKERNEL_H
#define SIEVEKERNEL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stddef.h>
#include <stdint.h>

/**
 * Result codes.
 */
typedef enum SkStatus {
  SK_STATUS_OK = 0,
  SK_STATUS_NULL_POINTER = 1,
  SK_STATUS_DOMAIN = 2,
  SK_STATUS_INVALID_PARAMETER = 3,
  SK_STATUS_MISMATCH = 4,
  SK_STATUS_NON_CONVERGENCE = 5,
  SK_STATUS_DIVERGENT = 6,
  SK_STATUS_TAIL_INVALID = 7,
  SK_STATUS_INTERNAL = 8,
  SK_STATUS_PANIC = 9,
} SkStatus;

/**
 * Certified `c_n` table.
 */
typedef struct SkCnTable SkCnTable;

/**
 * `tau_1..tau_N` for one `eps`.
 */
typedef struct SkTauSequence SkTauSequence;

/**
 * Series tables for `f_1..f_N`.
 */
typedef struct SkTaylorFamily SkTaylorFamily;

typedef struct SkConstants {
  double alpha;
  double gamma;
  double h2;
  double h3;
} SkConstants;

typedef struct SkSieveBounds {
  double big_f1;
  double small_f1;
  size_t k1;
  size_t k2;
} SkSieveBounds;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. Valid until the
 * next call into the library from the same thread.
 */
const char *sk_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *sk_version(void);

/**
 * `h(s)` for `s >= 1`.
 *
 * # Safety
 * `out` must be NULL or valid for writes.
 */
enum SkStatus sk_eval_h(double s, double *out);

/**
 * `alpha`, `gamma`, `H(2)`, `H(3)`.
 *
 * # Safety
 * `out` must be NULL or valid for writes.
 */
enum SkStatus sk_constants(struct SkConstants *out);

/**
 * Build certified `c_2..c_{n_max}` on a grid of density `m`.
 *
 * # Safety
 * `out` must be NULL or valid for writes. The handle written there must be
 * released with [`sk_cn_table_free`].
 */
enum SkStatus sk_cn_table_build(size_t n_max, size_t m, double inflation, struct SkCnTable **out);

/**
 * Largest `n` in the table.
 *
 * # Safety
 * `table` must be NULL or a live handle.
 */
size_t sk_cn_table_n_max(const struct SkCnTable *table);

/**
 * `c_n` (with `c_1 = 1`).
 *
 * # Safety
 * `table` must be NULL or a live handle; `out` NULL or valid for writes.
 */
enum SkStatus sk_cn_table_get(const struct SkCnTable *table, size_t n, double *out);

/**
 * # Safety
 * `table` must be NULL or a handle not yet freed.
 */
void sk_cn_table_free(struct SkCnTable *table);

/**
 * `tau_1..tau_len` at `eps = eps_num / eps_den`.
 *
 * # Safety
 * `table` must be NULL or a live handle; `out` NULL or valid for writes. The
 * handle written to `out` must be released with [`sk_tau_free`].
 */
enum SkStatus sk_tau_build(const struct SkCnTable *table,
                           int64_t eps_num,
                           int64_t eps_den,
                           size_t len,
                           struct SkTauSequence **out);

/**
 * # Safety
 * `tau` must be NULL or a live handle.
 */
size_t sk_tau_len(const struct SkTauSequence *tau);

/**
 * `tau_n`, 1-based.
 *
 * # Safety
 * `tau` must be NULL or a live handle; `out` NULL or valid for writes.
 */
enum SkStatus sk_tau_get(const struct SkTauSequence *tau, size_t n, double *out);

/**
 * Bounds for `F_1` and `f_1` with automatically chosen cutoffs.
 *
 * # Safety
 * `tau` must be NULL or a live handle; `out` NULL or valid for writes.
 */
enum SkStatus sk_tau_bounds(const struct SkTauSequence *tau, struct SkSieveBounds *out);

/**
 * # Safety
 * `tau` must be NULL or a handle not yet freed.
 */
void sk_tau_free(struct SkTauSequence *tau);

/**
 * Series tables for levels `1..=n_max` of degree `order`.
 *
 * # Safety
 * `out` must be NULL or valid for writes. The handle must be released with
 * [`sk_taylor_free`].
 */
enum SkStatus sk_taylor_build(size_t n_max, size_t order, struct SkTaylorFamily **out);

/**
 * `f_n(s)` from the series tables.
 *
 * # Safety
 * `family` must be NULL or a live handle; `out` NULL or valid for writes.
 */
enum SkStatus sk_taylor_eval(const struct SkTaylorFamily *family, size_t n, double s, double *out);

/**
 * # Safety
 * `family` must be NULL or a handle not yet freed.
 */
void sk_taylor_free(struct SkTaylorFamily *family);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SIEVEKERNEL_H */
