#ifndef MODFLOW_H
#define MODFLOW_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MfStatus {
  MF_STATUS_OK = 0,
  MF_STATUS_NULL_POINTER = 1,
  MF_STATUS_INVALID_UTF8 = 2,
  MF_STATUS_PARSE = 3,
  MF_STATUS_DOMAIN = 4,
  MF_STATUS_ARITHMETIC = 5,
  MF_STATUS_BUDGET = 6,
  MF_STATUS_GEODESIC = 7,
  MF_STATUS_INDEX = 8,
  MF_STATUS_FAILED = 9,
} MfStatus;

typedef enum MfSystem {
  MF_SYSTEM_RCF = 0,
  MF_SYSTEM_LEHNER = 1,
  MF_SYSTEM_FAREY = 2,
  MF_SYSTEM_FSTAR = 3,
} MfSystem;

/**
 * An eventually periodic expansion in one of the digit systems.
 */
typedef struct MfExpansion MfExpansion;

/**
 * An exact real number.
 */
typedef struct MfReal MfReal;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * The message of the last failed call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *mf_last_error(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library, freed once.
 */
void mf_string_free(char *s);

/**
 * Parses text such as `(1+sqrt(5))/2`, `-3/7` or `inf`.
 *
 * # Safety
 * `text` must be a nul-terminated string and `out` a valid pointer.
 */
enum MfStatus mf_real_parse(const char *text, struct MfReal **out);

/**
 * # Safety
 * `r` must be null or a handle from `mf_real_parse`, freed once.
 */
void mf_real_free(struct MfReal *r);

/**
 * # Safety
 * `r` must be a live handle and `out` a valid pointer.
 */
enum MfStatus mf_real_to_string(const struct MfReal *r, char **out);

/**
 * Nearest double; NaN for a null handle.
 *
 * # Safety
 * `r` must be null or a live handle.
 */
double mf_real_to_f64(const struct MfReal *r);

/**
 * # Safety
 * `r` must be a live handle and `out` a valid pointer.
 */
enum MfStatus mf_expand(const struct MfReal *r,
                        enum MfSystem system,
                        size_t max_digits,
                        struct MfExpansion **out);

/**
 * # Safety
 * `e` must be null or a handle from `mf_expand`, freed once.
 */
void mf_expansion_free(struct MfExpansion *e);

/**
 * Writes the preperiod and period lengths; a zero period means a finite word.
 *
 * # Safety
 * `e` must be a live handle; the out-pointers must be valid.
 */
enum MfStatus mf_expansion_lengths(const struct MfExpansion *e, size_t *preperiod, size_t *period);

/**
 * Digit `index` of the (infinite, for periodic words) sequence as a
 * quotient and a sign. RCF digits carry sign +1; the RCF head is not a digit.
 * Farey digits report the denominator as quotient and the numerator as sign.
 *
 * # Safety
 * `e` must be a live handle; the out-pointers must be valid.
 */
enum MfStatus mf_expansion_digit(const struct MfExpansion *e,
                                 size_t index,
                                 int64_t *quotient,
                                 int32_t *sign);

/**
 * The expansion as JSON, in the same form the command line prints.
 *
 * # Safety
 * `e` must be a live handle and `out` a valid pointer.
 */
enum MfStatus mf_expansion_to_json(const struct MfExpansion *e, char **out);

/**
 * The value the expansion evaluates to, as a new handle.
 *
 * # Safety
 * `e` must be a live handle and `out` a valid pointer.
 */
enum MfStatus mf_expansion_value(const struct MfExpansion *e, struct MfReal **out);

/**
 * Runs the `geodesic` command; the JSON result is written even on failure.
 *
 * # Safety
 * `backward` and `forward` must be nul-terminated strings; `out` valid.
 */
enum MfStatus mf_geodesic_json(const char *backward,
                               const char *forward,
                               size_t letters,
                               char **out);

/**
 * Runs a verification suite by name; the JSON result is written even on failure.
 *
 * # Safety
 * `suite` must be a nul-terminated string; `out` valid.
 */
enum MfStatus mf_verify_json(const char *suite, size_t samples, uint64_t seed, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MODFLOW_H */
