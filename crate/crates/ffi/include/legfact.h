#ifndef LEGFACT_H
#define LEGFACT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LfStatus {
  LF_STATUS_OK = 0,
  LF_STATUS_NULL_POINTER = 1,
  LF_STATUS_INVALID_ARGUMENT = 2,
  LF_STATUS_CONFIG = 3,
  LF_STATUS_DOMAIN = 4,
  LF_STATUS_SIZE = 5,
  LF_STATUS_NUMERIC = 6,
  LF_STATUS_IO = 7,
  LF_STATUS_PANIC = 8,
} LfStatus;

/**
 * Field, excluded set, and weight function.
 */
typedef struct LfContext LfContext;

/**
 * An increment table `B(1..=x_max)` with its prefix sums.
 */
typedef struct LfTable LfTable;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the calling thread's last error message into `buf` (NUL-terminated, truncated
 * to `len - 1` bytes) and returns the full message length excluding the NUL.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
uintptr_t lf_last_error(char *buf, uintptr_t len);

/**
 * Creates a context from a field string (`"Q"`, `"Q(sqrt-1)"`), an fspec string
 * (`"norm"`, `"norm-1"`, `"c*norm:2"`, `"table:<path>"`), and an excluded set such as
 * `"2,5:one"`; `s_exclude` may be null for the empty set.
 *
 * # Safety
 * String arguments must be null or NUL-terminated; `out` must be writable.
 */
enum LfStatus lf_context_new(const char *field,
                             const char *fspec,
                             const char *s_exclude,
                             struct LfContext **out);

/**
 * # Safety
 * `ctx` must be null or a pointer from [`lf_context_new`] not yet freed.
 */
void lf_context_free(struct LfContext *ctx);

/**
 * Sieves the increment table up to `x_max`.
 *
 * # Safety
 * `ctx` must be a live context; `out` must be writable.
 */
enum LfStatus lf_table_build(const struct LfContext *ctx, uint64_t x_max, struct LfTable **out);

/**
 * # Safety
 * `table` must be null or a pointer from [`lf_table_build`] not yet freed.
 */
void lf_table_free(struct LfTable *table);

/**
 * # Safety
 * `table` must be a live table; `out` must be writable.
 */
enum LfStatus lf_table_len(const struct LfTable *table, uint64_t *out);

/**
 * `B(n)` for `1 <= n <= x_max`.
 *
 * # Safety
 * `table` must be a live table; `out` must be writable.
 */
enum LfStatus lf_table_increment(const struct LfTable *table, uint64_t n, double *out);

/**
 * `S(x)` for `0 <= x < x_max + 1`.
 *
 * # Safety
 * `table` must be a live table; `out` must be writable.
 */
enum LfStatus lf_table_summatory(const struct LfTable *table, double x, double *out);

/**
 * Least-squares `S(x) ≈ a x log x + C x` at the default sample points.
 *
 * # Safety
 * `table` must be a live table; the out-pointers must be writable.
 */
enum LfStatus lf_fit(const struct LfTable *table, double *a_hat, double *c_hat);

/**
 * `B(n)` computed directly, without a table.
 *
 * # Safety
 * `ctx` must be a live context; `out` must be writable.
 */
enum LfStatus lf_increment(const struct LfContext *ctx, uint64_t n, double *out);

/**
 * `log N(n!)`.
 *
 * # Safety
 * `ctx` must be a live context; `out` must be writable.
 */
enum LfStatus lf_factorial_log_norm(const struct LfContext *ctx, uint64_t n, double *out);

/**
 * Kronecker symbol `(d/p)` for a prime `p`.
 *
 * # Safety
 * `out` must be writable.
 */
enum LfStatus lf_kronecker(int64_t d, uint64_t p, int8_t *out);

/**
 * Riemann zeta on real `s > 1`.
 *
 * # Safety
 * `out` must be writable.
 */
enum LfStatus lf_zeta_real(double s, double *out);

/**
 * The prime-ideal series `H(s)` over norms up to `p`, tail-completed. `tail_bound` may
 * be null.
 *
 * # Safety
 * `ctx` must be a live context; `value` must be writable.
 */
enum LfStatus lf_h_truncated(const struct LfContext *ctx,
                             double s,
                             uint64_t p,
                             double *value,
                             double *tail_bound);

/**
 * `J(s) = H(s) - c^-s (-ζ'_K/ζ_K)(s)` over norms up to `p`. `tail_bound` may be null.
 *
 * # Safety
 * `ctx` must be a live context; `value` must be writable.
 */
enum LfStatus lf_j_estimate(const struct LfContext *ctx,
                            double s,
                            uint64_t p,
                            double *value,
                            double *tail_bound);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LEGFACT_H */
