#ifndef MOTZKIN_H
#define MOTZKIN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum MotzkinStatus {
  MOTZKIN_STATUS_OK = 0,
  MOTZKIN_STATUS_NULL_POINTER = 1,
  MOTZKIN_STATUS_DOMAIN = 2,
  MOTZKIN_STATUS_INVALID_PATH = 3,
  MOTZKIN_STATUS_QUADRATURE_FAILURE = 4,
  MOTZKIN_STATUS_INTERNAL_MISMATCH = 5,
  MOTZKIN_STATUS_BUFFER_TOO_SMALL = 6,
  MOTZKIN_STATUS_PARSE = 7,
  MOTZKIN_STATUS_PANIC = 8,
} MotzkinStatus;

typedef enum MotzkinSamplerMode {
  MOTZKIN_SAMPLER_MODE_CYCLE_LEMMA = 0,
  MOTZKIN_SAMPLER_MODE_DP_EXACT = 1,
  MOTZKIN_SAMPLER_MODE_DP_LOGSPACE = 2,
} MotzkinSamplerMode;

/**
 * Uniform path sampler with its own random stream.
 */
typedef struct MotzkinSampler MotzkinSampler;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version, a static nul-terminated string.
 */
const char *motzkin_version(void);

/**
 * Message of the last failing call on this thread, or null if none.
 * Valid until the next failing call on the same thread.
 */
const char *motzkin_last_error(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void motzkin_string_free(char *s);

/**
 * Exact `M_n` as a decimal string in `*out`.
 *
 * # Safety
 * `out` must be valid for a pointer write.
 */
enum MotzkinStatus motzkin_count(size_t n, char **out);

/**
 * `ln M_n`, accurate for any `n`.
 *
 * # Safety
 * `out` must be valid for a write.
 */
enum MotzkinStatus motzkin_count_ln(size_t n, double *out);

/**
 * Checks that `steps[0..len]`, each in `{-1, 0, 1}`, form a Motzkin path.
 * Returns `InvalidPath` with the reason otherwise.
 *
 * # Safety
 * `steps` must point to `len` readable values (or be null when `len == 0`).
 */
enum MotzkinStatus motzkin_path_validate(const int8_t *steps, size_t len);

/**
 * New sampler of uniform paths of length `n`, seeded with `seed`; `mode`
 * is a [`MotzkinSamplerMode`] value.
 *
 * # Safety
 * `out` must be valid for a pointer write. The handle must be released with
 * [`motzkin_sampler_free`].
 */
enum MotzkinStatus motzkin_sampler_new(size_t n,
                                       uint32_t mode,
                                       uint64_t seed,
                                       struct MotzkinSampler **out);

/**
 * Path length of the sampler, 0 for a null handle.
 *
 * # Safety
 * `sampler` must be null or a live handle.
 */
size_t motzkin_sampler_length(const struct MotzkinSampler *sampler);

/**
 * Draws one path and writes its steps (`-1`, `0`, `1`) to `buf`.
 * `len` must be at least the sampler length.
 *
 * # Safety
 * `sampler` must be a live handle not used concurrently; `buf` must be valid
 * for `len` writes.
 */
enum MotzkinStatus motzkin_sampler_sample(struct MotzkinSampler *sampler, int8_t *buf, size_t len);

/**
 * # Safety
 * `sampler` must be null or a handle from [`motzkin_sampler_new`], not yet
 * freed.
 */
void motzkin_sampler_free(struct MotzkinSampler *sampler);

/**
 * Density of the free Brownian motion at time `t > 0`.
 *
 * # Safety
 * `out` must be valid for a write.
 */
enum MotzkinStatus motzkin_fbm_density(double t, double x, double *out);

/**
 * Transition density from `x` at time `s` to `y` at time `t > s`.
 *
 * # Safety
 * `out` must be valid for a write.
 */
enum MotzkinStatus motzkin_fbm_transition(double s, double x, double t, double y, double *out);

/**
 * Finite-dimensional density of the Brownian excursion at the `d` grid times.
 *
 * # Safety
 * `times` and `x` must each point to `d` readable values.
 */
enum MotzkinStatus motzkin_excursion_density(const double *times,
                                             const double *x,
                                             size_t d,
                                             double *out);

/**
 * Limit joint Laplace transform; `z` and `w` hold `d + 1` values, `d <= 2`.
 *
 * # Safety
 * `times` must point to `d` values, `z` and `w` to `d + 1` values each.
 */
enum MotzkinStatus motzkin_limit_laplace(const double *times,
                                         size_t d,
                                         const double *z,
                                         const double *w,
                                         double *out);

/**
 * Finite-`n` joint Laplace transform of the increments; `d <= 2`.
 *
 * # Safety
 * `times` must point to `d` values, `z` and `w` to `d + 1` values each.
 */
enum MotzkinStatus motzkin_laplace_joint(size_t n,
                                         const double *times,
                                         size_t d,
                                         const double *z,
                                         const double *w,
                                         double *out);

/**
 * Finite-`n` Laplace transform of the level-count increments, raw or
 * centered and scaled when `centered` is nonzero.
 *
 * # Safety
 * `times` must point to `d` values and `w` to `d + 1` values.
 */
enum MotzkinStatus motzkin_laplace_level(size_t n,
                                         const double *times,
                                         size_t d,
                                         const double *w,
                                         int32_t centered,
                                         double *out);

/**
 * Level-weighted path generating polynomial at `t`.
 *
 * # Safety
 * `out` must be valid for a write.
 */
enum MotzkinStatus motzkin_sulanke(size_t n, double t, double *out);

/**
 * Sum over paths of length `len` of the product of `u_j` over level steps.
 *
 * # Safety
 * `u` must point to `len` readable values.
 */
enum MotzkinStatus motzkin_level_pgf(const double *u, size_t len, double *out);

/**
 * Stieltjes transform of the semicircle law at real `|z| > 2`.
 *
 * # Safety
 * `out` must be valid for a write.
 */
enum MotzkinStatus motzkin_stieltjes(double z, double *out);

/**
 * Copies the last error message into `buf` (nul-terminated, truncated to
 * fit) and returns the full message length, excluding the nul.
 *
 * # Safety
 * `buf` must be null or valid for `len` writes.
 */
size_t motzkin_last_error_copy(char *buf, size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MOTZKIN_H */
