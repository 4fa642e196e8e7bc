#ifndef GENSHIFT_H
#define GENSHIFT_H

/* Generated by cbindgen from crates/ffi. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Identity family for generalized and higher derivations.
 */
typedef enum GsFlavor {
  GS_FLAVOR_PLAIN = 0,
  GS_FLAVOR_JORDAN = 1,
  GS_FLAVOR_JORDAN_TRIPLE = 2,
} GsFlavor;

/**
 * Result code of every fallible call.
 */
typedef enum GsStatus {
  GS_STATUS_OK = 0,
  GS_STATUS_NULL_POINTER = 1,
  GS_STATUS_INVALID_INPUT = 2,
  GS_STATUS_DIMENSION_MISMATCH = 3,
  GS_STATUS_INDEX_OUT_OF_RANGE = 4,
  GS_STATUS_PARSE_ERROR = 5,
  GS_STATUS_AUXILIARY_CHECK_FAILED = 6,
  GS_STATUS_PANIC = 7,
} GsStatus;

/**
 * Opaque self-map of `{0, …, n-1}`.
 */
typedef struct GsIndexMap GsIndexMap;

/**
 * Opaque linear operator on ℂⁿ.
 */
typedef struct GsLinOp GsLinOp;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *gs_last_error_message(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must be NULL or a pointer returned by `gs_linop_to_json` or
 * `gs_verify` that has not been freed yet.
 */
void gs_string_free(char *s);

/**
 * Creates a map from its image list `image[0..n]`.
 *
 * # Safety
 * `image` must point to `n` readable `size_t` values; `out` must be writable.
 */
enum GsStatus gs_index_map_new(const size_t *image, size_t n, struct GsIndexMap **out);

/**
 * Parses `{"n": …, "map": […]}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum GsStatus gs_index_map_from_json(const char *json, struct GsIndexMap **out);

/**
 * # Safety
 * `map` must be NULL or a handle from this library that has not been freed.
 */
void gs_index_map_free(struct GsIndexMap *map);

/**
 * Domain size `n`, or 0 for a NULL handle.
 *
 * # Safety
 * `map` must be NULL or a live handle.
 */
size_t gs_index_map_len(const struct GsIndexMap *map);

/**
 * Largest fiber size `max_β |φ⁻¹(β)|`.
 *
 * # Safety
 * `map` must be a live handle and `bound` writable.
 */
enum GsStatus gs_index_map_fiber_bound(const struct GsIndexMap *map, size_t *bound);

/**
 * Operator norm of `σ_φ` on ℓᵖ. Pass `p = INFINITY` for the sup norm.
 *
 * # Safety
 * `map` must be a live handle and `norm` writable.
 */
enum GsStatus gs_shift_operator_norm(const struct GsIndexMap *map, double p, double *norm);

/**
 * `σ_φ` as an operator handle.
 *
 * # Safety
 * `map` must be a live handle and `out` writable.
 */
enum GsStatus gs_linop_shift(const struct GsIndexMap *map, struct GsLinOp **out);

/**
 * `x ↦ (r_α x_{φ(α)})_α`. `r_im` may be NULL for a real multiplier.
 *
 * # Safety
 * `r_re` (and `r_im` unless NULL) must hold `n` doubles; `map` must be live.
 */
enum GsStatus gs_linop_multiplier_shift(const struct GsIndexMap *map,
                                        const double *r_re,
                                        const double *r_im,
                                        size_t n,
                                        struct GsLinOp **out);

/**
 * Dense `n×n` operator from row-major parts. `im` may be NULL.
 *
 * # Safety
 * `re` (and `im` unless NULL) must hold `n*n` doubles.
 */
enum GsStatus gs_linop_dense(size_t n, const double *re, const double *im, struct GsLinOp **out);

/**
 * Parses the dense or multiplier-shift JSON operator format.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum GsStatus gs_linop_from_json(const char *json, struct GsLinOp **out);

/**
 * Serializes an operator; release the string with `gs_string_free`.
 *
 * # Safety
 * `op` must be a live handle and `json` writable.
 */
enum GsStatus gs_linop_to_json(const struct GsLinOp *op, char **json);

/**
 * # Safety
 * `op` must be NULL or a handle from this library that has not been freed.
 */
void gs_linop_free(struct GsLinOp *op);

/**
 * Dimension `n`, or 0 for a NULL handle.
 *
 * # Safety
 * `op` must be NULL or a live handle.
 */
size_t gs_linop_dim(const struct GsLinOp *op);

/**
 * `y = op(x)`. `x_im` may be NULL; outputs must hold `n` doubles each.
 *
 * # Safety
 * All arrays must hold `n` doubles; `op` must be live.
 */
enum GsStatus gs_linop_apply(const struct GsLinOp *op,
                             const double *x_re,
                             const double *x_im,
                             size_t n,
                             double *y_re,
                             double *y_im);

/**
 * `d(ab) = d(a)ψ(b) + λ(a)d(b)` on ℂⁿ.
 *
 * # Safety
 * Handles must be live; `holds` writable.
 */
enum GsStatus gs_is_psi_lambda_derivation(const struct GsLinOp *d,
                                          const struct GsLinOp *psi,
                                          const struct GsLinOp *lambda,
                                          bool *holds);

/**
 * # Safety
 * `d` must be live; `holds` writable.
 */
enum GsStatus gs_is_derivation(const struct GsLinOp *d, bool *holds);

/**
 * # Safety
 * `d` must be live; `holds` writable.
 */
enum GsStatus gs_is_jordan_derivation(const struct GsLinOp *d, bool *holds);

/**
 * # Safety
 * `d` must be live; `holds` writable.
 */
enum GsStatus gs_is_jordan_triple_derivation(const struct GsLinOp *d, bool *holds);

/**
 * Generalized (Jordan, Jordan triple) derivation check for `D` with
 * auxiliary `d`. Returns `GS_STATUS_AUXILIARY_CHECK_FAILED` when `d` is not
 * of the kind the flavor requires.
 *
 * # Safety
 * Handles must be live; `holds` writable.
 */
enum GsStatus gs_is_generalized_derivation(const struct GsLinOp *big_d,
                                           const struct GsLinOp *d,
                                           enum GsFlavor flavor,
                                           bool *holds);

/**
 * `ψ = r·σ_φ`, `λ = (1 − r)·σ_φ`. `r_im` may be NULL.
 *
 * # Safety
 * `r_re` (and `r_im` unless NULL) must hold `n` doubles; outputs writable.
 */
enum GsStatus gs_synthesize_pair(const struct GsIndexMap *map,
                                 const double *r_re,
                                 const double *r_im,
                                 size_t n,
                                 struct GsLinOp **psi_out,
                                 struct GsLinOp **lambda_out);

/**
 * `r_α = π_α(ψ(w^{φ(α)}))` written to `r_re`/`r_im` (length `n`).
 *
 * # Safety
 * Handles must be live; outputs must hold `n` doubles.
 */
enum GsStatus gs_recover_r(const struct GsIndexMap *map,
                           const struct GsLinOp *psi,
                           double *r_re,
                           double *r_im,
                           size_t n);

/**
 * Sets `accepted` and, when accepted and `r_re`/`r_im` are non-NULL,
 * writes the recovered multiplier.
 *
 * # Safety
 * Handles must be live; `r_re`/`r_im` NULL or holding `n` doubles.
 */
enum GsStatus gs_classify_psi_lambda(const struct GsIndexMap *map,
                                     const struct GsLinOp *psi,
                                     const struct GsLinOp *lambda,
                                     bool *accepted,
                                     double *r_re,
                                     double *r_im,
                                     size_t n);

/**
 * Dimension of `{d : d(ab) = d(a)ψ(b) + λ(a)d(b)}`.
 *
 * # Safety
 * Handles must be live; `dimension` writable.
 */
enum GsStatus gs_twisted_derivation_dimension(const struct GsLinOp *psi,
                                              const struct GsLinOp *lambda,
                                              size_t *dimension);

/**
 * Whether `σ_φ` is a generalized derivation of the given flavor.
 *
 * # Safety
 * `map` must be live; `feasible` writable.
 */
enum GsStatus gs_generalized_derivation_feasible(const struct GsIndexMap *map,
                                                 enum GsFlavor flavor,
                                                 bool *feasible);

/**
 * Solution-space dimension at levels `1..=depth` of a higher derivation
 * with `d₀ = σ_φ`, written to `dimensions[0..depth]`. `all_zero` reports
 * whether every chosen `d_k` vanished. Levels after an inconsistent one are
 * reported as `SIZE_MAX`.
 *
 * # Safety
 * `map` must be live; `dimensions` must hold `depth` values.
 */
enum GsStatus gs_higher_tail_dimensions(const struct GsIndexMap *map,
                                        enum GsFlavor flavor,
                                        size_t depth,
                                        size_t *dimensions,
                                        bool *all_zero);

/**
 * Runs the verification suite. `report_json` may be NULL; otherwise it
 * receives the JSON report, to be released with `gs_string_free`.
 *
 * # Safety
 * `passed` must be writable; `report_json` NULL or writable.
 */
enum GsStatus gs_verify(size_t n_max, uint64_t seed, bool *passed, char **report_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GENSHIFT_H */
