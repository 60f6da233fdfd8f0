#ifndef WELDING_H
#define WELDING_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum WeldingDomain {
  WELDING_DOMAIN_DISK = 0,
  WELDING_DOMAIN_SQUARE = 1,
  WELDING_DOMAIN_INTERIOR_CUSP = 2,
  WELDING_DOMAIN_EXTERIOR_CUSP = 3,
} WeldingDomain;

typedef enum WeldingStatus {
  WELDING_STATUS_OK = 0,
  WELDING_STATUS_NULL_POINTER = 1,
  WELDING_STATUS_INVALID_PARAMETER = 2,
  /**
   * Query outside the domain of a map or control function.
   */
  WELDING_STATUS_DOMAIN = 3,
  /**
   * Injectivity or orientation failure.
   */
  WELDING_STATUS_NOT_HOMEOMORPHIC = 4,
  WELDING_STATUS_GEOMETRY = 5,
  WELDING_STATUS_NUMERICAL = 6,
  WELDING_STATUS_IO = 7,
  WELDING_STATUS_PANIC = 8,
} WeldingStatus;

typedef struct WeldingControl WeldingControl;

typedef struct WeldingCurve WeldingCurve;

typedef struct WeldingField WeldingField;

typedef struct WeldingHomeo WeldingHomeo;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the calling thread's last error message into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length in bytes.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t welding_last_error(char *buf, size_t len);

/**
 * Releases a handle; null is ignored.
 *
 * # Safety
 * `h` must be null or a live handle from this library, freed once.
 */
void welding_homeo_free(struct WeldingHomeo *h);

/**
 * Releases a handle; null is ignored.
 *
 * # Safety
 * `h` must be null or a live handle from this library, freed once.
 */
void welding_field_free(struct WeldingField *h);

/**
 * Releases a handle; null is ignored.
 *
 * # Safety
 * `h` must be null or a live handle from this library, freed once.
 */
void welding_control_free(struct WeldingControl *h);

/**
 * Releases a handle; null is ignored.
 *
 * # Safety
 * `h` must be null or a live handle from this library, freed once.
 */
void welding_curve_free(struct WeldingCurve *h);

/**
 * # Safety
 * `out` must be a valid pointer to a handle slot.
 */
enum WeldingStatus welding_homeo_identity(struct WeldingHomeo **out);

/**
 * # Safety
 * `out` must be a valid pointer to a handle slot.
 */
enum WeldingStatus welding_homeo_rotation(double c, struct WeldingHomeo **out);

/**
 * # Safety
 * `out` must be a valid pointer to a handle slot.
 */
enum WeldingStatus welding_homeo_power(double a, struct WeldingHomeo **out);

/**
 * # Safety
 * `out` must be a valid pointer to a handle slot.
 */
enum WeldingStatus welding_homeo_log_power(double beta, struct WeldingHomeo **out);

/**
 * Lift values at `i / (n - 1)`, `i = 0..n`.
 *
 * # Safety
 * `values` must point to `n` readable doubles; `out` to a handle slot.
 */
enum WeldingStatus welding_homeo_from_table(const double *values,
                                            size_t n,
                                            struct WeldingHomeo **out);

/**
 * # Safety
 * `h` must be a live handle and `out` writable.
 */
enum WeldingStatus welding_homeo_lift(const struct WeldingHomeo *h, double x, double *out);

/**
 * Extension of the welding to the plane.
 *
 * # Safety
 * `h` must be a live handle; `out` a handle slot.
 */
enum WeldingStatus welding_field_new(const struct WeldingHomeo *h, struct WeldingField **out);

/**
 * # Safety
 * `f` must be a live handle; `out_re`, `out_im` writable.
 */
enum WeldingStatus welding_field_eval(const struct WeldingField *f,
                                      double re,
                                      double im,
                                      double *out_re,
                                      double *out_im);

/**
 * # Safety
 * `f` must be a live handle; `out` writable.
 */
enum WeldingStatus welding_field_distortion(const struct WeldingField *f,
                                            double re,
                                            double im,
                                            double *out);

/**
 * Largest distortion on the circle `|z| = r` and its argument.
 *
 * # Safety
 * `f` must be a live handle; `out_k`, `out_theta` writable.
 */
enum WeldingStatus welding_field_shell_max(const struct WeldingField *f,
                                           double r,
                                           size_t theta_samples,
                                           double *out_k,
                                           double *out_theta);

/**
 * # Safety
 * `out` must be a handle slot.
 */
enum WeldingStatus welding_control_linear(double c, struct WeldingControl **out);

/**
 * `t^s`.
 *
 * # Safety
 * `out` must be a handle slot.
 */
enum WeldingStatus welding_control_power(double s, struct WeldingControl **out);

/**
 * `c t log^β(1/t)`.
 *
 * # Safety
 * `out` must be a handle slot.
 */
enum WeldingStatus welding_control_log_power(double c, double beta, struct WeldingControl **out);

/**
 * # Safety
 * `p` must be a live handle; `out` writable.
 */
enum WeldingStatus welding_control_eval(const struct WeldingControl *p, double t, double *out);

/**
 * # Safety
 * `p` must be a live handle; `out` writable.
 */
enum WeldingStatus welding_control_inverse(const struct WeldingControl *p, double r, double *out);

/**
 * Generalized-quasidisk condition on `r = 10^{-1} … 10^{-decades}`;
 * `out_bounded` is 1 for a bounded verdict.
 *
 * # Safety
 * `p` must be a live handle; outputs writable.
 */
enum WeldingStatus welding_control_thm51(const struct WeldingControl *p,
                                         uint32_t decades,
                                         double t0,
                                         int32_t *out_bounded,
                                         double *out_log_exponent);

/**
 * Closed polyline from `n` interleaved `x, y` pairs.
 *
 * # Safety
 * `xy` must point to `2n` readable doubles; `out` a handle slot.
 */
enum WeldingStatus welding_curve_new(const double *xy, size_t n, struct WeldingCurve **out);

/**
 * Zoo domain (a `WeldingDomain` value) with `n` vertices; `s` is the cusp exponent (ignored otherwise).
 *
 * # Safety
 * `out` must be a handle slot.
 */
enum WeldingStatus welding_curve_domain(uint32_t kind,
                                        double s,
                                        size_t n,
                                        struct WeldingCurve **out);

/**
 * # Safety
 * `c` must be a live handle; `out` writable.
 */
enum WeldingStatus welding_curve_diameter(const struct WeldingCurve *c, double *out);

/**
 * Fitted three-point envelope: `out_exponent` is 1 for a linear fit, `s`
 * for a power fit and `NAN` for log-power; `out_max_ratio` is `max m/d`.
 *
 * # Safety
 * `c` must be a live handle; outputs writable.
 */
enum WeldingStatus welding_curve_envelope(const struct WeldingCurve *c,
                                          size_t pair_samples,
                                          uint64_t seed,
                                          double *out_exponent,
                                          double *out_max_ratio);

/**
 * Moduli of the region between `inner` and `outer`: connecting and
 * separating families.
 *
 * # Safety
 * Handles must be live; outputs writable.
 */
enum WeldingStatus welding_ring_modulus(const struct WeldingCurve *inner,
                                        const struct WeldingCurve *outer,
                                        size_t grid,
                                        double *out_connecting,
                                        double *out_separating);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WELDING_H */
