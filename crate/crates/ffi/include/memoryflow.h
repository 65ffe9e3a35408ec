#ifndef MEMORYFLOW_H
#define MEMORYFLOW_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Scalar history datum: `Zero`; `Affine` is `p0 (1 + 2t)`; `Step` is height
 * `p0` on `[p1, p2]`.
 */
typedef enum MfHistoryKind {
  MF_HISTORY_KIND_ZERO = 0,
  MF_HISTORY_KIND_AFFINE = 1,
  MF_HISTORY_KIND_STEP = 2,
} MfHistoryKind;

typedef enum MfKernelFamily {
  MF_KERNEL_FAMILY_NORMALIZED_FRACTIONAL = 0,
  MF_KERNEL_FAMILY_TRUNCATED_CAPUTO = 1,
} MfKernelFamily;

typedef enum MfStatus {
  MF_STATUS_OK = 0,
  MF_STATUS_NULL_POINTER = 1,
  MF_STATUS_INVALID_ARGUMENT = 2,
  MF_STATUS_DOMAIN = 3,
  MF_STATUS_NUMERICAL = 4,
  MF_STATUS_BUFFER_TOO_SMALL = 5,
  MF_STATUS_PANIC = 6,
} MfStatus;

/**
 * Opaque memory kernel.
 */
typedef struct MfKernel MfKernel;

/**
 * Opaque discrete memory weights.
 */
typedef struct MfWeights MfWeights;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copy the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `cap`). Returns the full message length excluding the NUL.
 *
 * # Safety
 * `buf` must be null or point to `cap` writable bytes.
 */
size_t mf_last_error_message(char *buf, size_t cap);

/**
 * Power-law kernel of the given family.
 *
 * # Safety
 * `out` must be a valid pointer to write the handle to.
 */
enum MfStatus mf_kernel_new(enum MfKernelFamily family,
                            double alpha,
                            double delta,
                            struct MfKernel **out);

/**
 * Tabulated kernel from `n` samples `(s[i], rho[i])`, `s` strictly
 * increasing with the last sample at the horizon.
 *
 * # Safety
 * `s` and `rho` must point to `n` readable doubles; `out` must be writable.
 */
enum MfStatus mf_kernel_new_tabulated(const double *s,
                                      const double *rho,
                                      size_t n,
                                      struct MfKernel **out);

/**
 * # Safety
 * `kernel` must be null or a handle from `mf_kernel_new*` not yet freed.
 */
void mf_kernel_free(struct MfKernel *kernel);

/**
 * # Safety
 * `kernel` must be a live handle; `out` must be writable.
 */
enum MfStatus mf_kernel_density(const struct MfKernel *kernel, double s, double *out);

/**
 * # Safety
 * `kernel` must be a live handle; `out` must be writable.
 */
enum MfStatus mf_kernel_mass(const struct MfKernel *kernel, double *out);

/**
 * # Safety
 * `kernel` must be a live handle; `out` must be writable.
 */
enum MfStatus mf_kernel_first_moment(const struct MfKernel *kernel, double *out);

/**
 * Laplace symbol `K(z)` for `Re z > 0`.
 *
 * # Safety
 * `kernel` must be a live handle; `out_re` and `out_im` must be writable.
 */
enum MfStatus mf_kernel_symbol(const struct MfKernel *kernel,
                               double re,
                               double im,
                               double *out_re,
                               double *out_im);

/**
 * Weights for step `tau`, which must divide the horizon.
 *
 * # Safety
 * `kernel` must be a live handle; `out` must be writable.
 */
enum MfStatus mf_weights_new(const struct MfKernel *kernel, double tau, struct MfWeights **out);

/**
 * # Safety
 * `weights` must be null or a handle from `mf_weights_new` not yet freed.
 */
void mf_weights_free(struct MfWeights *weights);

/**
 * Memory depth `M`; 0 for a null handle.
 *
 * # Safety
 * `weights` must be null or a live handle.
 */
size_t mf_weights_len(const struct MfWeights *weights);

/**
 * `w_k` for `1 ≤ k ≤ M`; `k = 0` gives `W0 = Σ w_k`.
 *
 * # Safety
 * `weights` must be a live handle; `out` must be writable.
 */
enum MfStatus mf_weights_get(const struct MfWeights *weights, size_t k, double *out);

/**
 * `W0·current − Σ w_k history[k-1]`, history most recent first, `len = M`.
 *
 * # Safety
 * `history` must point to `len` readable doubles; `out` must be writable.
 */
enum MfStatus mf_weights_apply(const struct MfWeights *weights,
                               double current,
                               const double *history,
                               size_t len,
                               double *out);

/**
 * March `𝒢 m = rhs` to `t_end`, writing `m(0), m(τ), …` into `out`.
 * `written` receives the number of values; when `cap` is too small it
 * receives the required count and `BufferTooSmall` is returned.
 *
 * # Safety
 * `out` must point to `cap` writable doubles (may be null when `cap` is 0);
 * `written` must be writable.
 */
enum MfStatus mf_msd_solve(const struct MfWeights *weights,
                           enum MfHistoryKind history,
                           double p0,
                           double p1,
                           double p2,
                           double rhs,
                           double t_end,
                           double *out,
                           size_t cap,
                           size_t *written);

/**
 * Free-space fundamental solution `u(x, t)` by contour inversion with `nq`
 * nodes (0 selects the default).
 *
 * # Safety
 * `kernel` must be a live handle; `out` must be writable.
 */
enum MfStatus mf_fundamental(const struct MfKernel *kernel,
                             double x,
                             double t,
                             size_t nq,
                             double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MEMORYFLOW_H */
