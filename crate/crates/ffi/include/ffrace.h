#ifndef FFRACE_H
#define FFRACE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FfrStatus {
  FFR_STATUS_OK = 0,
  FFR_STATUS_INVALID_ARGUMENT = 1,
  FFR_STATUS_WORK_BOUND = 2,
  FFR_STATUS_PARSE = 3,
  FFR_STATUS_UNSUPPORTED = 4,
  FFR_STATUS_COMPUTATION = 5,
  FFR_STATUS_NULL_POINTER = 6,
  FFR_STATUS_OVERFLOW = 7,
  FFR_STATUS_PANIC = 8,
} FfrStatus;

typedef struct FfrCurve FfrCurve;

typedef struct FfrLPoly FfrLPoly;

typedef struct FfrSpectrum FfrSpectrum;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. Valid until the next failing call.
 */
const char *ffr_last_error_message(void);

const char *ffr_version(void);

/**
 * Frees a string returned by this library.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void ffr_string_free(char *s);

/**
 * Parses a curve file (JSON text).
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum FfrStatus ffr_curve_from_json(const char *json, struct FfrCurve **out);

/**
 * The curve y^2 + xy = x^3 - t^d over F_{p^k}(t).
 *
 * # Safety
 * `out` must be writable.
 */
enum FfrStatus ffr_curve_ulmer(uint64_t p, uint32_t k, size_t d, struct FfrCurve **out);

/**
 * # Safety
 * `c` must be NULL or a live handle from this library.
 */
void ffr_curve_free(struct FfrCurve *c);

/**
 * Computes L(E, T). A negative `degree_hint` means use the conductor.
 *
 * # Safety
 * `curve` must be a live handle; `out` must be writable.
 */
enum FfrStatus ffr_lpoly_compute(const struct FfrCurve *curve,
                                 int64_t degree_hint,
                                 uint64_t max_residue_field,
                                 struct FfrLPoly **out);

/**
 * # Safety
 * `l` must be a live handle.
 */
size_t ffr_lpoly_degree(const struct FfrLPoly *l);

/**
 * Copies the coefficients a_0..a_N into `buf` (length `len` >= N + 1).
 *
 * # Safety
 * `l` must be a live handle; `buf` must hold `len` elements.
 */
enum FfrStatus ffr_lpoly_coeffs(const struct FfrLPoly *l, int64_t *buf, size_t len);

/**
 * Text form such as "1 - 81*T^4"; release with `ffr_string_free`.
 *
 * # Safety
 * `l` must be a live handle.
 */
char *ffr_lpoly_to_string(const struct FfrLPoly *l);

/**
 * # Safety
 * `l` must be NULL or a live handle from this library.
 */
void ffr_lpoly_free(struct FfrLPoly *l);

/**
 * # Safety
 * `l` must be a live handle; `out` must be writable.
 */
enum FfrStatus ffr_spectrum_from_lpoly(const struct FfrLPoly *l, struct FfrSpectrum **out);

/**
 * Parses a spectrum file, or any JSON document with a "spectrum" member.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum FfrStatus ffr_spectrum_from_json(const char *json, struct FfrSpectrum **out);

/**
 * # Safety
 * `s` must be a live handle.
 */
uint32_t ffr_spectrum_rank(const struct FfrSpectrum *s);

/**
 * # Safety
 * `s` must be NULL or a live handle from this library.
 */
void ffr_spectrum_free(struct FfrSpectrum *s);

/**
 * Exact density bounds (equal unless the race has boundary classes).
 *
 * # Safety
 * `s` must be a live handle; `lo` and `hi` must be writable.
 */
enum FfrStatus ffr_density_exact(const struct FfrSpectrum *s, double *lo, double *hi);

/**
 * Monte Carlo density under the limiting distribution.
 *
 * # Safety
 * `s` must be a live handle; `delta` and `std_error` must be writable.
 */
enum FfrStatus ffr_delta_mc(const struct FfrSpectrum *s,
                            size_t samples,
                            uint64_t seed,
                            double *delta,
                            double *std_error);

/**
 * Density by characteristic-function inversion up to `cap`.
 *
 * # Safety
 * `s` must be a live handle; `delta` must be writable.
 */
enum FfrStatus ffr_delta_cf(const struct FfrSpectrum *s, double cap, double *delta);

/**
 * Exact density bounds for the Ulmer curve over F_{p^k}(t).
 *
 * # Safety
 * `lo` and `hi` must be writable.
 */
enum FfrStatus ffr_ulmer_delta(uint64_t p, uint32_t k, uint64_t d, double *lo, double *hi);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FFRACE_H */
