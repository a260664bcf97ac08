#ifndef KGEOM_H
#define KGEOM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * `kind` value selecting the Laplace-Beltrami operator in
 * `kg_assemble_operator`. Values `0..dim` select a surface-gradient component.
 */
#define KG_OPERATOR_LAPLACE_BELTRAMI -1

/**
 * Result of every fallible call.
 */
typedef enum KgStatus {
  KG_STATUS_OK = 0,
  KG_STATUS_NULL_POINTER = 1,
  KG_STATUS_INVALID_ARGUMENT = 2,
  KG_STATUS_DIMENSION_MISMATCH = 3,
  KG_STATUS_LENGTH_MISMATCH = 4,
  KG_STATUS_DUPLICATE_POINTS = 5,
  KG_STATUS_NON_FINITE = 6,
  KG_STATUS_ILL_CONDITIONED = 7,
  KG_STATUS_DEGENERATE_GRADIENT = 8,
  KG_STATUS_NON_DIFFERENTIABLE_KERNEL = 9,
  KG_STATUS_MALFORMED_INPUT = 10,
  KG_STATUS_PANIC = 11,
} KgStatus;

/**
 * A fitted kernel model.
 */
typedef struct KgModel KgModel;

/**
 * Diagnostics of the linear solve behind a fit.
 */
typedef struct KgSolveReport {
  double jitter_added;
  size_t cholesky_attempts;
  double residual_norm;
} KgSolveReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the most recent failure on this thread, or an empty
 * string. The pointer stays valid until the next call into this library
 * from the same thread.
 */
const char *kg_last_error_message(void);

/**
 * Library version as a static string.
 */
const char *kg_version(void);

/**
 * Fits `values` on `count` distinct points. `kernel_desc` is a descriptor such as
 * `"laplace:eps=1"` or `"gauss:l=0.5"`; NULL selects `laplace:eps=1`.
 * `out_report` may be NULL.
 *
 * # Safety
 * Pointers must be valid for the stated lengths.
 */
enum KgStatus kg_fit(const char *kernel_desc,
                     const double *coords,
                     size_t count,
                     size_t dim,
                     const double *values,
                     double alpha,
                     struct KgModel **out_model,
                     struct KgSolveReport *out_report);

/**
 * Fits the constant 1 on the points: the signature function.
 *
 * # Safety
 * As for `kg_fit`.
 */
enum KgStatus kg_signature_fit(const char *kernel_desc,
                               const double *coords,
                               size_t count,
                               size_t dim,
                               double alpha,
                               struct KgModel **out_model,
                               struct KgSolveReport *out_report);

/**
 * Releases a model. NULL is ignored.
 *
 * # Safety
 * `model` must come from this library and not be used afterwards.
 */
void kg_model_free(struct KgModel *model);

/**
 * Ambient dimension, or 0 for NULL.
 *
 * # Safety
 * `model` must be NULL or a live handle.
 */
size_t kg_model_dim(const struct KgModel *model);

/**
 * Number of centers, or 0 for NULL.
 *
 * # Safety
 * `model` must be NULL or a live handle.
 */
size_t kg_model_len(const struct KgModel *model);

/**
 * # Safety
 * `x` must hold `dim` values.
 */
enum KgStatus kg_model_evaluate(const struct KgModel *model,
                                const double *x,
                                size_t dim,
                                double *out);

/**
 * Writes the `dim` gradient components to `out_grad`.
 *
 * # Safety
 * `x` and `out_grad` must hold `dim` values.
 */
enum KgStatus kg_model_gradient(const struct KgModel *model,
                                const double *x,
                                size_t dim,
                                double *out_grad);

/**
 * Normal and curvatures of the level set of a signature model through `x`.
 * `out_normal` receives `dim` values, `out_kappas` the `dim - 1` principal
 * curvatures in ascending order. Any output may be NULL.
 *
 * # Safety
 * Non-NULL outputs must hold the stated number of values.
 */
enum KgStatus kg_model_curvatures(const struct KgModel *model,
                                  const double *x,
                                  size_t dim,
                                  double tau_grad,
                                  double *out_normal,
                                  double *out_kappas,
                                  double *out_mean_curvature,
                                  double *out_gauss_curvature,
                                  double *out_grad_norm);

/**
 * Surface gradient at `x` of the data model `f`, with geometry from the
 * signature model `sig`. Writes `dim` values.
 *
 * # Safety
 * `x` and `out_grad` must hold `dim` values.
 */
enum KgStatus kg_surface_gradient(const struct KgModel *sig,
                                  const struct KgModel *f,
                                  const double *x,
                                  size_t dim,
                                  double tau_grad,
                                  double *out_grad);

/**
 * Laplace-Beltrami at `x` of the data model `f`, with geometry from `sig`.
 *
 * # Safety
 * `x` must hold `dim` values.
 */
enum KgStatus kg_laplace_beltrami(const struct KgModel *sig,
                                  const struct KgModel *f,
                                  const double *x,
                                  size_t dim,
                                  double tau_grad,
                                  double *out);

/**
 * Dense `n x count` operator matrix, row-major, mapping values on the
 * points to operator values at `eval`. `kind` is
 * `KG_OPERATOR_LAPLACE_BELTRAMI` or a gradient component in `0..dim`.
 *
 * # Safety
 * `out` must hold `n * count` values.
 */
enum KgStatus kg_assemble_operator(const char *kernel_desc,
                                   const double *coords,
                                   size_t count,
                                   size_t dim,
                                   double alpha,
                                   const double *eval,
                                   size_t n,
                                   int32_t kind,
                                   double tau_grad,
                                   double *out);

/**
 * Posterior variance at `x` of the Gaussian process with covariance
 * `kernel` and noise variance `sigma2`, conditioned on the points.
 *
 * # Safety
 * `x` must hold `dim` values.
 */
enum KgStatus kg_gpr_variance(const char *kernel_desc,
                              const double *coords,
                              size_t count,
                              size_t dim,
                              double sigma2,
                              const double *x,
                              double *out);

/**
 * Serializes a model to JSON. Release the string with `kg_string_free`.
 *
 * # Safety
 * `out_json` must be writable.
 */
enum KgStatus kg_model_to_json(const struct KgModel *model, char **out_json);

/**
 * # Safety
 * `json` must be a NUL-terminated string.
 */
enum KgStatus kg_model_from_json(const char *json, struct KgModel **out_model);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void kg_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KGEOM_H */
