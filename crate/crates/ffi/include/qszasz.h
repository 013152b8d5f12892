#ifndef QSZASZ_H
#define QSZASZ_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stddef.h>
#include <stdint.h>

typedef enum QszFunction {
  /**
   * `param`
   */
  QSZ_FUNCTION_CONST = 0,
  QSZ_FUNCTION_IDENTITY = 1,
  QSZ_FUNCTION_SQUARE = 2,
  QSZ_FUNCTION_SIN = 3,
  /**
   * `|s - param|`
   */
  QSZ_FUNCTION_ABS_DEV = 4,
  QSZ_FUNCTION_SQRT = 5,
  /**
   * `e^{-s}`
   */
  QSZ_FUNCTION_EXP_DECAY = 6,
} QszFunction;

typedef enum QszStatus {
  QSZ_STATUS_OK = 0,
  QSZ_STATUS_NULL_POINTER = 1,
  QSZ_STATUS_DOMAIN = 2,
  QSZ_STATUS_POSITIVITY = 3,
  QSZ_STATUS_OVERFLOW = 4,
  QSZ_STATUS_INVALID_PARAMETER = 5,
  QSZ_STATUS_PRECONDITION = 6,
  QSZ_STATUS_TRUNCATION = 7,
  QSZ_STATUS_PANIC = 8,
  QSZ_STATUS_BUFFER_TOO_SMALL = 9,
} QszStatus;

/**
 * Opaque operator handle.
 */
typedef struct QszOperator QszOperator;

/**
 * Test-function callback: `f(s, user_data)`.
 */
typedef double (*QszCallback)(double s, void *user_data);

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. Valid until the
 * next failing call on the same thread.
 */
const char *qsz_last_error(void);

/**
 * NUL-terminated library version.
 */
const char *qsz_version(void);

enum QszStatus qsz_q_integer(uint32_t n, double q, double *out);

enum QszStatus qsz_q_factorial(uint32_t n, double q, double *out);

enum QszStatus qsz_q_binomial(uint32_t n, uint32_t k, double q, double *out);

/**
 * `e_q^x`, defined for `|x| (1 - q) < 1`. `terms` may be NULL.
 */
enum QszStatus qsz_q_exp_small(double x, double q, double tol, double *out, size_t *terms);

/**
 * `E_q^x` for every real `x`. `terms` may be NULL.
 */
enum QszStatus qsz_q_exp_big(double x, double q, double tol, double *out, size_t *terms);

/**
 * Builds an operator for generator coefficients `a[0..a_len]`.
 *
 * `relaxed != 0` drops the `alpha <= beta` requirement. `tol` is the
 * certified series tail tolerance (e.g. `1e-13`).
 */
enum QszStatus qsz_operator_new(uint32_t n,
                                double t,
                                double alpha,
                                double beta,
                                double q,
                                const double *a,
                                size_t a_len,
                                int32_t relaxed,
                                double tol,
                                struct QszOperator **out);

/**
 * Releases a handle; NULL is ignored.
 */
void qsz_operator_free(struct QszOperator *op);

/**
 * `T(f; q; x)` for a caller-supplied `f`.
 */
enum QszStatus qsz_operator_apply(const struct QszOperator *op,
                                  QszCallback f,
                                  void *user_data,
                                  double x,
                                  double *out);

/**
 * `T(f; q; x)` for a built-in test function; `param` is used by
 * `CONST` and `ABS_DEV`.
 */
enum QszStatus qsz_operator_apply_builtin(const struct QszOperator *op,
                                          enum QszFunction function,
                                          double param,
                                          double x,
                                          double *out);

/**
 * `T(s^v; q; x)` by direct summation, `v` in {0, 1, 2}.
 */
enum QszStatus qsz_operator_moment(const struct QszOperator *op, uint32_t v, double x, double *out);

/**
 * `T((s - (x + t))^2)`, independent of `x`.
 */
enum QszStatus qsz_operator_central_moment(const struct QszOperator *op, double *out);

/**
 * `e_q^{qy} E_q^{-y} / A(1)`.
 */
enum QszStatus qsz_operator_r_factor(const struct QszOperator *op, double *out);

/**
 * Copies the retained weights into `buf`.
 *
 * `*len` is always set to the number of weights. With `buf == NULL` or
 * `cap < *len` nothing is copied; the latter returns `BUFFER_TOO_SMALL`.
 */
enum QszStatus qsz_operator_weights(const struct QszOperator *op,
                                    double *buf,
                                    size_t cap,
                                    size_t *len);

/**
 * Certified bound on the weight mass dropped by truncation.
 */
enum QszStatus qsz_operator_tail_bound(const struct QszOperator *op, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QSZASZ_H */
