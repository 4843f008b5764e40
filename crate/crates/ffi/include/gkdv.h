#ifndef GKDV_H
#define GKDV_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GkdvModulational {
  GKDV_MODULATIONAL_STABLE_TRIPLE_IMAGINARY = 0,
  GKDV_MODULATIONAL_UNSTABLE_TWO_BRANCHES = 1,
  GKDV_MODULATIONAL_DEGENERATE = 2,
} GkdvModulational;

typedef enum GkdvRealAxis {
  GKDV_REAL_AXIS_ODD_PERIODIC_COUNT = 0,
  GKDV_REAL_AXIS_EVEN_PERIODIC_COUNT = 1,
} GkdvRealAxis;

typedef enum GkdvStatus {
  GKDV_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  GKDV_STATUS_NULL_POINTER = 1,
  /**
   * Bad number, bad UTF-8 or unknown command name.
   */
  GKDV_STATUS_INVALID_ARGUMENT = 2,
  /**
   * The run configuration could not be resolved.
   */
  GKDV_STATUS_CONFIG = 3,
  /**
   * The computation failed; see [`gkdv_last_error_kind`].
   */
  GKDV_STATUS_COMPUTATION = 4,
  /**
   * `validate` ran but some checks failed. The report is still returned.
   */
  GKDV_STATUS_VALIDATION_FAILED = 5,
  /**
   * A Rust panic was caught at the boundary.
   */
  GKDV_STATUS_PANIC = 6,
} GkdvStatus;

/**
 * Opaque wave handle.
 */
typedef struct GkdvWave GkdvWave;

/**
 * Indices at one wave. `tr2` and `tr3` are the second and third
 * μ-derivatives of tr M at the origin (up to the usual factorials).
 */
typedef struct GkdvIndices {
  double period;
  double tr2;
  double tr3;
  double orientation_jacobian;
  double delta;
  enum GkdvModulational modulational;
  enum GkdvRealAxis real_axis;
} GkdvIndices;

typedef struct GkdvComplex {
  double re;
  double im;
} GkdvComplex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string. Never free it.
 */
const char *gkdv_version(void);

/**
 * Message of the last failure on this thread, or null if the last call
 * succeeded. Valid until the next library call on the same thread.
 */
const char *gkdv_last_error_message(void);

/**
 * Error kind of the last failure (`"NoPeriodicOrbit"`, `"DetDrift"`, ...),
 * or null. Same lifetime as [`gkdv_last_error_message`].
 */
const char *gkdv_last_error_kind(void);

/**
 * Creates a power-law wave, f(u) = u^(p+1), and checks that (a, E, c)
 * carries a periodic orbit. On success `*out` owns a handle to release
 * with [`gkdv_wave_free`].
 *
 * # Safety
 * `out` must be valid for one pointer write.
 */
enum GkdvStatus gkdv_wave_new(double p, double a, double energy, double c, struct GkdvWave **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `wave` must come from [`gkdv_wave_new`] and not be used afterwards.
 */
void gkdv_wave_free(struct GkdvWave *wave);

/**
 * Spatial period of the wave.
 *
 * # Safety
 * `wave` must be a live handle and `out` valid for one write.
 */
enum GkdvStatus gkdv_wave_period(const struct GkdvWave *wave, double *out);

/**
 * Stability indices and their classification. `tol <= 0` picks the
 * default tolerance.
 *
 * # Safety
 * `wave` must be a live handle and `out` valid for one write.
 */
enum GkdvStatus gkdv_wave_indices(const struct GkdvWave *wave, double tol, struct GkdvIndices *out);

/**
 * Trace of the monodromy matrix at spectral point `mu`, and optionally
 * `|det M − 1|`. The profile is built on first use and cached in the
 * handle, so a handle must not be shared between threads during this call.
 *
 * # Safety
 * `wave` must be a live handle, `out` valid for one write, and
 * `det_residual` null or valid for one write.
 */
enum GkdvStatus gkdv_wave_trace(struct GkdvWave *wave,
                                struct GkdvComplex mu,
                                double tol,
                                struct GkdvComplex *out,
                                double *det_residual);

/**
 * Runs a CLI command (`"wave"`, `"indices"`, `"band-trace"`, `"real-scan"`,
 * `"hill"`, `"sweep"`, `"validate"`) on a JSON run configuration with the
 * same keys as a `--config` file, and returns the rendered report in
 * `*out`. A failed `validate` still fills `*out` and returns
 * [`GkdvStatus::ValidationFailed`].
 *
 * # Safety
 * `command` and `config_json` must be NUL-terminated strings, `out` valid
 * for one pointer write. Release `*out` with [`gkdv_string_free`].
 */
enum GkdvStatus gkdv_run(const char *command, const char *config_json, char **out);

/**
 * Releases a string returned by the library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void gkdv_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GKDV_H */
