#ifndef SINGLIFT_H
#define SINGLIFT_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SlStatus {
  SL_STATUS_OK = 0,
  SL_STATUS_NULL_POINTER = 1,
  SL_STATUS_INVALID_ARGUMENT = 2,
  SL_STATUS_INVALID_WEIGHT = 3,
  SL_STATUS_UNSOLVABLE = 4,
  SL_STATUS_ODD_M = 5,
  SL_STATUS_CERTIFICATION_FAILED = 6,
  SL_STATUS_COMPUTATION_FAILED = 7,
  SL_STATUS_VERIFICATION_FAILED = 8,
  SL_STATUS_OUT_OF_RANGE = 9,
  SL_STATUS_PANIC = 10,
} SlStatus;

/**
 * A certified tensor decomposition.
 */
typedef struct SlDecomposition SlDecomposition;

/**
 * Fourier expansion of the unimodular lift.
 */
typedef struct SlLift SlLift;

/**
 * A truncated q-expansion.
 */
typedef struct SlSeries SlSeries;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *sl_last_error(void);

/**
 * # Safety
 * `s` must come from this library or be null.
 */
void sl_string_free(char *s);

/**
 * E_k below q^prec.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum SlStatus sl_eisenstein(int64_t k, int64_t prec, struct SlSeries **out);

/**
 * Δ below q^prec.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum SlStatus sl_delta(int64_t prec, struct SlSeries **out);

/**
 * The weakly holomorphic form of the given weight with principal part
 * written as "d:c,d:c" (c the coefficient of q^-d).
 *
 * # Safety
 * `principal` must be a NUL-terminated string; `out` valid for writes.
 */
enum SlStatus sl_weakly_holomorphic(int64_t weight,
                                    const char *principal,
                                    int64_t prec,
                                    struct SlSeries **out);

/**
 * Coefficient of q^n as a decimal fraction string.
 *
 * # Safety
 * `s` must be a live series handle; `out` valid for writes.
 */
enum SlStatus sl_series_coeff(const struct SlSeries *s, int64_t n, char **out);

/**
 * # Safety
 * `s` must be a live series handle.
 */
enum SlStatus sl_series_truncation(const struct SlSeries *s, int64_t *out);

/**
 * # Safety
 * `s` must be a live series handle; `out` valid for writes.
 */
enum SlStatus sl_series_render(const struct SlSeries *s, char **out);

/**
 * # Safety
 * `s` must come from this library or be null.
 */
void sl_series_free(struct SlSeries *s);

/**
 * Lift of the weight -m form with the given principal part, regular part
 * on 1 <= a < nq, 1 <= b < np.
 *
 * # Safety
 * `principal` must be a NUL-terminated string; `out` valid for writes.
 */
enum SlStatus sl_lift_unimodular(int64_t m,
                                 const char *principal,
                                 int64_t nq,
                                 int64_t np,
                                 struct SlLift **out);

/**
 * Regular coefficient at q^a p^b.
 *
 * # Safety
 * `h` must be a live lift handle; `out` valid for writes.
 */
enum SlStatus sl_lift_regular_coeff(const struct SlLift *h, int64_t a, int64_t b, char **out);

/**
 * # Safety
 * `h` must be a live lift handle.
 */
enum SlStatus sl_lift_singular_count(const struct SlLift *h, uintptr_t *out);

/**
 * The whole expansion as JSON.
 *
 * # Safety
 * `h` must be a live lift handle; `out` valid for writes.
 */
enum SlStatus sl_lift_to_json(const struct SlLift *h, char **out);

/**
 * # Safety
 * `h` must come from this library or be null.
 */
void sl_lift_free(struct SlLift *h);

/**
 * Lift, pole clearing by Δ^delta_power and tensor decomposition, certified
 * at two guards. `guard_size` <= 0 selects the default guard.
 *
 * # Safety
 * `principal` must be a NUL-terminated string; `out` valid for writes.
 */
enum SlStatus sl_decompose(int64_t m,
                           const char *principal,
                           uint32_t delta_power,
                           int64_t guard_size,
                           struct SlDecomposition **out);

/**
 * Table in F_{rs} notation, e.g. "-F20 - 4F11 - F02 + ...".
 *
 * # Safety
 * `h` must be a live decomposition handle; `out` valid for writes.
 */
enum SlStatus sl_decomposition_render(const struct SlDecomposition *h, char **out);

/**
 * λ_{rs}, the coefficient of F_r(q) F_s(p).
 *
 * # Safety
 * `h` must be a live decomposition handle; `out` valid for writes.
 */
enum SlStatus sl_decomposition_coeff(const struct SlDecomposition *h,
                                     uintptr_t r,
                                     uintptr_t s,
                                     char **out);

/**
 * # Safety
 * `h` must come from this library or be null.
 */
void sl_decomposition_free(struct SlDecomposition *h);

/**
 * Runs an operator identity suite ("all" or one name) for the listed b
 * and m, e.g. "2,3,4" and "-2..4". Returns [`SlStatus::VerificationFailed`]
 * if any identity fails; `report_json` (may be null) receives the report.
 *
 * # Safety
 * String arguments must be NUL-terminated; `report_json` null or valid for writes.
 */
enum SlStatus sl_verify(const char *suite, const char *bs, const char *ms, char **report_json);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* SINGLIFT_H */
