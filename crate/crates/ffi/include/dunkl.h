#ifndef DUNKL_H
#define DUNKL_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DunklStatus {
  DUNKL_STATUS_OK = 0,
  DUNKL_STATUS_NULL_POINTER = 1,
  DUNKL_STATUS_INVALID_ARGUMENT = 2,
  DUNKL_STATUS_NUMERIC = 3,
  DUNKL_STATUS_BUFFER_TOO_SMALL = 4,
  DUNKL_STATUS_PANIC = 5,
} DunklStatus;

/**
 * Opaque kernel handle.
 */
typedef struct DunklKernelHandle DunklKernelHandle;

typedef struct DunklComplex {
  double re;
  double im;
} DunklComplex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Builds a kernel. `family` is one of `z2n`, `a2`, `b2`, `i2m`; `param` is
 * `n` for `z2n`, `m` for `i2m` and ignored otherwise. `k` holds one
 * multiplicity per root orbit.
 *
 * # Safety
 * `family` must be a NUL-terminated string, `k` must point to `k_len`
 * doubles and `out` must be writable.
 */
enum DunklStatus dunkl_kernel_new(const char *family,
                                  size_t param,
                                  const double *k,
                                  size_t k_len,
                                  struct DunklKernelHandle **out);

/**
 * # Safety
 * `h` must come from [`dunkl_kernel_new`] and not be used afterwards.
 */
void dunkl_kernel_free(struct DunklKernelHandle *h);

/**
 * Order of the reflection group, 0 for a null handle.
 *
 * # Safety
 * `h` must be null or a live handle.
 */
size_t dunkl_kernel_group_order(const struct DunklKernelHandle *h);

/**
 * Rank of the root system, 0 for a null handle.
 *
 * # Safety
 * `h` must be null or a live handle.
 */
size_t dunkl_kernel_rank(const struct DunklKernelHandle *h);

/**
 * `γ_k`, NaN for a null handle.
 *
 * # Safety
 * `h` must be null or a live handle.
 */
double dunkl_kernel_gamma(const struct DunklKernelHandle *h);

/**
 * `w_k(x)`.
 *
 * # Safety
 * `x` must point to `rank` doubles and `out` must be writable.
 */
enum DunklStatus dunkl_kernel_weight(const struct DunklKernelHandle *h,
                                     const double *x,
                                     double *out);

/**
 * Writes `E_k(t x, g·y)` for every group element `g` into `out`.
 *
 * # Safety
 * `x` and `y` must point to `rank` doubles, `out` to `out_len` values.
 */
enum DunklStatus dunkl_kernel_eval(const struct DunklKernelHandle *h,
                                   const double *x,
                                   const double *y,
                                   double t,
                                   struct DunklComplex *out,
                                   size_t out_len);

/**
 * Writes `E_k(i t x, g·y)` for every group element `g` into `out`.
 *
 * # Safety
 * `x` and `y` must point to `rank` doubles, `out` to `out_len` values.
 */
enum DunklStatus dunkl_kernel_eval_imaginary(const struct DunklKernelHandle *h,
                                             const double *x,
                                             const double *y,
                                             double t,
                                             struct DunklComplex *out,
                                             size_t out_len);

/**
 * Copies the last error message of this thread into `buf` (truncated and
 * NUL-terminated) and returns the full message length in bytes.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t dunkl_last_error(char *buf, size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DUNKL_H */
