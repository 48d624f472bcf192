#ifndef MFE_LAB_H
#define MFE_LAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result codes.
 */
typedef enum MfeStatus {
  MFE_STATUS_OK = 0,
  MFE_STATUS_NULL_POINTER = 1,
  MFE_STATUS_INVALID_ARGUMENT = 2,
  MFE_STATUS_REPEATED_ROOTS = 3,
  MFE_STATUS_BAD_DEGREE = 4,
  MFE_STATUS_OUT_OF_CHART = 5,
  MFE_STATUS_AT_SINGULAR_SUPPORT = 6,
  MFE_STATUS_POLE_AT_POINT = 7,
  MFE_STATUS_NON_CONVERGENT = 8,
  MFE_STATUS_BAD_EXCISION = 9,
  MFE_STATUS_WRONG_GENUS = 10,
  MFE_STATUS_NOT_EFFECTIVE = 11,
  MFE_STATUS_DIVISOR_HITS_WEIERSTRASS = 12,
  MFE_STATUS_BAD_HERMITIAN = 13,
  MFE_STATUS_DIMENSION_MISMATCH = 14,
  MFE_STATUS_SUITE_FAILED = 15,
  MFE_STATUS_PANIC = 16,
} MfeStatus;

/*
 Opaque curve handle.
 */
typedef struct MfeCurve MfeCurve;

/*
 Opaque Hermitian form handle.
 */
typedef struct MfeHermitian MfeHermitian;

/*
 A point of the curve. With `infinity == 0` the point lies over `x` on
 the sheet `y = +√f(x)` when `sheet >= 0` and `y = −√f(x)` otherwise.
 With `infinity != 0` it is `∞₊` for `sheet >= 0` and `∞₋` otherwise.
 */
typedef struct MfePoint {
  double x_re;
  double x_im;
  int32_t sheet;
  int32_t infinity;
} MfePoint;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the most recent failure on this thread; empty after a
 success. Valid until the next call into the library on this thread.
 */
const char *mfe_last_error(void);

/*
 Curve from `n_roots` roots given as interleaved `(re, im)` pairs.

 # Safety
 `roots` must point to `2 * n_roots` doubles; `out` must be writable.
 */
enum MfeStatus mfe_curve_new(const double *roots, size_t n_roots, struct MfeCurve **out);

/*
 Built-in curve, `"unity6"` or `"unity8"`.

 # Safety
 `name` must be a nul-terminated string; `out` must be writable.
 */
enum MfeStatus mfe_curve_preset(const char *name, struct MfeCurve **out);

/*
 # Safety
 `curve` must be null or a handle from `mfe_curve_new`/`mfe_curve_preset`
 that has not been freed.
 */
void mfe_curve_free(struct MfeCurve *curve);

/*
 Genus of the curve, 0 for a null handle.

 # Safety
 `curve` must be null or a live handle.
 */
size_t mfe_curve_genus(const struct MfeCurve *curve);

/*
 Identity form of dimension `dim`.

 # Safety
 `out` must be writable.
 */
enum MfeStatus mfe_hermitian_identity(size_t dim, struct MfeHermitian **out);

/*
 Form from a row-major `dim × dim` matrix of interleaved `(re, im)` pairs.

 # Safety
 `entries` must point to `2 * dim * dim` doubles; `out` must be writable.
 */
enum MfeStatus mfe_hermitian_new(const double *entries, size_t dim, struct MfeHermitian **out);

/*
 # Safety
 `form` must be null or a live handle.
 */
void mfe_hermitian_free(struct MfeHermitian *form);

/*
 Gaussian curvature `K` at `point`.

 # Safety
 Handles must be live; `point` and `out` must be valid pointers.
 */
enum MfeStatus mfe_curvature(const struct MfeCurve *curve,
                             const struct MfeHermitian *form,
                             const struct MfePoint *point,
                             double *out);

/*
 `u = log(−K)` at `point`.

 # Safety
 Handles must be live; `point` and `out` must be valid pointers.
 */
enum MfeStatus mfe_u(const struct MfeCurve *curve,
                     const struct MfeHermitian *form,
                     const struct MfePoint *point,
                     double *out);

/*
 `Φ`, the smooth part of `Δu + 6eᵘ`, at `point`.

 # Safety
 Handles must be live; `point` and `out` must be valid pointers.
 */
enum MfeStatus mfe_phi(const struct MfeCurve *curve,
                       const struct MfeHermitian *form,
                       const struct MfePoint *point,
                       double *out);

/*
 `F_P(Q)`.

 # Safety
 `curve` must be live; `p`, `q` and `out` must be valid pointers.
 */
enum MfeStatus mfe_f_point(const struct MfeCurve *curve,
                           const struct MfePoint *p,
                           const struct MfePoint *q,
                           double *out);

/*
 `∫ K dA` over the curve with the default quadrature; `error` receives
 the difference between refinement levels and may be null.

 # Safety
 Handles must be live; `value` must be writable.
 */
enum MfeStatus mfe_gauss_bonnet(const struct MfeCurve *curve,
                                const struct MfeHermitian *form,
                                double *value,
                                double *error);

/*
 Pointwise residual of `Δu + 6eᵘ = 0` (genus 2).

 # Safety
 Handles must be live; `point` and `out` must be valid pointers.
 */
enum MfeStatus mfe_residual_e3(const struct MfeCurve *curve,
                               const struct MfeHermitian *form,
                               const struct MfePoint *point,
                               double *out);

/*
 Runs the named suite and writes its JSON report to `*json`, to be
 released with [`mfe_string_free`]. Returns `SuiteFailed` when the report
 does not pass; the report is written either way.

 # Safety
 Handles must be live; `suite` must be a nul-terminated string; `json`
 must be writable.
 */
enum MfeStatus mfe_verify_suite(const struct MfeCurve *curve,
                                const struct MfeHermitian *form,
                                const char *suite,
                                uint64_t seed,
                                char **json);

/*
 # Safety
 `s` must be null or a string returned by this library, not yet freed.
 */
void mfe_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MFE_LAB_H */
