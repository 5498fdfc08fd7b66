#ifndef INDEX_TRANSFORM_H
#define INDEX_TRANSFORM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every entry point.
 */
typedef enum {
  IHT_STATUS_OK = 0,
  IHT_STATUS_INVALID_ARGUMENT = 1,
  IHT_STATUS_POLE = 2,
  IHT_STATUS_NON_CONVERGENCE = 3,
  IHT_STATUS_DOMAIN = 4,
  IHT_STATUS_PARSE = 5,
  IHT_STATUS_NULL_POINTER = 6,
  IHT_STATUS_DEGENERATE = 7,
  IHT_STATUS_PANIC = -1,
} IhtStatus;

/**
 * A parsed function of x with its inferred endpoint behaviour.
 */
typedef struct IhtFunction IhtFunction;

/**
 * The built-in identity registry.
 */
typedef struct IhtRegistry IhtRegistry;

/**
 * Transform parameters (b, c) together with quadrature settings.
 */
typedef struct IhtTransform IhtTransform;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Static NUL-terminated version string.
 */
const char *iht_version(void);

/**
 * Writes the last error message of this thread into `buf`; returns its full length.
 *
 * # Safety
 * `buf` must be null or point to at least `len` writable bytes.
 */
size_t iht_last_error_message(char *buf, size_t len);

/**
 * Creates a transform handle for J_{b,c} with default quadrature settings.
 *
 * # Safety
 * `out_handle` must be a valid pointer; the handle is released with [`iht_transform_free`].
 */
IhtStatus iht_transform_new(double b, double c, IhtTransform **out_handle);

/**
 * # Safety
 * `handle` must be null or come from [`iht_transform_new`] and not have been freed.
 */
void iht_transform_free(IhtTransform *handle);

/**
 * Sets the relative and absolute quadrature tolerances and the spectral cutoff.
 *
 * # Safety
 * `handle` must be a live transform handle.
 */
IhtStatus iht_transform_configure(IhtTransform *handle,
                                  double tol_rel,
                                  double tol_abs,
                                  double s_max);

/**
 * Number of discrete eigenvalues (b+m)² (zero when b ≥ 0).
 *
 * # Safety
 * `handle` and `out_count` must be valid pointers.
 */
IhtStatus iht_transform_discrete_count(const IhtTransform *handle, size_t *out_count);

/**
 * Parses an expression in x (e.g. `"bump(0,2)"`, `"pow1p(-1.5)"`).
 *
 * # Safety
 * `source` must be a NUL-terminated string and `out_handle` a valid pointer.
 */
IhtStatus iht_function_parse(const char *source, IhtFunction **out_handle);

/**
 * # Safety
 * `handle` must be null or come from [`iht_function_parse`] and not have been freed.
 */
void iht_function_free(IhtFunction *handle);

/**
 * Evaluates the function at x.
 *
 * # Safety
 * `handle` and `out_value` must be valid pointers.
 */
IhtStatus iht_function_eval(const IhtFunction *handle, double x, double *out_value);

/**
 * Forward transform at n real spectral points.
 *
 * # Safety
 * `s` and `out_values` must point to `n` readable respectively writable doubles.
 */
IhtStatus iht_forward(const IhtTransform *transform,
                      const IhtFunction *function,
                      const double *s,
                      size_t n,
                      double *out_values);

/**
 * Forward transform at one complex spectral point inside the holomorphy strip.
 *
 * # Safety
 * All pointers must be valid.
 */
IhtStatus iht_forward_complex(const IhtTransform *transform,
                              const IhtFunction *function,
                              double s_re,
                              double s_im,
                              double *out_re,
                              double *out_im);

/**
 * Inverse transform of spectral samples (s_k, g_k), interpolated by a natural
 * cubic spline, plus `n_discrete` discrete coefficients ⟨f, p_m⟩ for m = 0, 1, ….
 *
 * # Safety
 * `s`, `g` must hold `n` doubles, `discrete` `n_discrete` doubles, `x` and
 * `out_values` `n_x` doubles.
 */
IhtStatus iht_inverse(const IhtTransform *transform,
                      const double *s,
                      const double *g,
                      size_t n,
                      const double *discrete,
                      size_t n_discrete,
                      const double *x,
                      size_t n_x,
                      double *out_values);

/**
 * Plancherel density (1/2π)|Γ(b+is)Γ(c+is)/Γ(2is)|².
 *
 * # Safety
 * `transform` and `out_value` must be valid pointers.
 */
IhtStatus iht_density(const IhtTransform *transform, double s, double *out_value);

/**
 * Kernel ₂F₁(b+is, b−is; b+c; −x) at complex s.
 *
 * # Safety
 * `out_re` and `out_im` must be valid pointers.
 */
IhtStatus iht_kernel(double b,
                     double c,
                     double x,
                     double s_re,
                     double s_im,
                     double *out_re,
                     double *out_im);

/**
 * Loads the built-in identity registry.
 *
 * # Safety
 * `out_handle` must be a valid pointer; release with [`iht_registry_free`].
 */
IhtStatus iht_registry_new(IhtRegistry **out_handle);

/**
 * # Safety
 * `handle` must be null or come from [`iht_registry_new`] and not have been freed.
 */
void iht_registry_free(IhtRegistry *handle);

/**
 * Number of registry entries.
 *
 * # Safety
 * `handle` and `out_len` must be valid pointers.
 */
IhtStatus iht_registry_len(const IhtRegistry *handle, size_t *out_len);

/**
 * Copies the id of entry `index` into `buf`; `out_len` receives its full length.
 *
 * # Safety
 * `buf` must be null or hold `len` bytes; `out_len` may be null.
 */
IhtStatus iht_registry_id(const IhtRegistry *handle,
                          size_t index,
                          char *buf,
                          size_t len,
                          size_t *out_len);

/**
 * Checks entry `id` at `trials` seeded draws; reports whether all passed and the largest gap.
 *
 * # Safety
 * `id` must be NUL-terminated; the out pointers must be valid.
 */
IhtStatus iht_registry_verify(const IhtRegistry *handle,
                              const char *id,
                              uint64_t seed,
                              size_t trials,
                              bool *out_passed,
                              double *out_worst_gap);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* INDEX_TRANSFORM_H */
