#ifndef BSROOTS_H
#define BSROOTS_H

/* Generated by cbindgen from bsroots-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result category of every call.
 */
typedef enum BsrStatus {
  /**
   * Success.
   */
  BSR_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  BSR_STATUS_NULL_POINTER = 1,
  /**
   * An input string was not valid UTF-8.
   */
  BSR_STATUS_UTF8 = 2,
  /**
   * The input cannot be used (syntax, weights, option ranges).
   */
  BSR_STATUS_INPUT = 3,
  /**
   * The input parses but contradicts the mathematical hypotheses
   * (singularity data inconsistent with the computed tables).
   */
  BSR_STATUS_DATA = 4,
  /**
   * An internal invariant failed, or a panic was caught — a bug in the
   * library, never a user error.
   */
  BSR_STATUS_INVARIANT = 5,
} BsrStatus;

/**
 * An analysis result: the classified candidates plus the cached canonical
 * JSON rendering.  Opaque to C; create with `bsr_analyze`, read with the
 * `bsr_report_*` accessors, release with `bsr_report_free`.
 */
typedef struct BsrReport BsrReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or null after a
 * success.  The pointer stays valid until the next `bsr_` call from the
 * same thread.
 */
const char *bsr_last_error_message(void);

/**
 * Library version as a static string; never freed.
 */
const char *bsr_version(void);

/**
 * Classify every candidate root of `poly`.
 *
 * `vars_csv` (nullable) lists the variables, comma-separated; when null
 * they are inferred from the polynomial text in order of first
 * appearance.  `sing_json` (nullable) is the singularity list in the same
 * JSON shape the command line reads from a file; null declares the
 * hypersurface smooth.  Nonzero `modular` switches the rank computations
 * to modular arithmetic with exact confirmation; nonzero
 * `n3_kmax_variant` relaxes the closed-form support rule for plane
 * curves.  On success `*out` owns the new handle.
 *
 * # Safety
 * All pointer arguments must be null or valid; `out` must be non-null and
 * writable.
 */
enum BsrStatus bsr_analyze(const char *poly,
                           const char *vars_csv,
                           const char *sing_json,
                           int modular,
                           int n3_kmax_variant,
                           struct BsrReport **out);

/**
 * Canonical JSON of the report, borrowed from the handle: valid until
 * `bsr_report_free`, do **not** pass to `bsr_string_free`.  Null when the
 * handle is null.
 *
 * # Safety
 * `rep` must be null or a live handle from `bsr_analyze`.
 */
const char *bsr_report_json(const struct BsrReport *rep);

/**
 * 1 when no candidate was left undetermined, 0 when some were, −1 on a
 * null handle.
 *
 * # Safety
 * `rep` must be null or a live handle from `bsr_analyze`.
 */
int bsr_report_complete(const struct BsrReport *rep);

/**
 * Number of undetermined candidates; −1 on a null handle.
 *
 * # Safety
 * `rep` must be null or a live handle from `bsr_analyze`.
 */
int bsr_report_undetermined_count(const struct BsrReport *rep);

/**
 * Release a handle from `bsr_analyze`.  Null is a no-op; freeing twice is
 * undefined behavior, as with `free`.
 *
 * # Safety
 * `rep` must be null or a live handle, and must not be used afterwards.
 */
void bsr_report_free(struct BsrReport *rep);

/**
 * One-shot analysis: like `bsr_analyze` followed by `bsr_report_json`,
 * but `*out_json` is an owned string to release with `bsr_string_free`.
 *
 * # Safety
 * As for `bsr_analyze`; `out_json` must be non-null and writable.
 */
enum BsrStatus bsr_analyze_json(const char *poly,
                                const char *vars_csv,
                                const char *sing_json,
                                int modular,
                                int n3_kmax_variant,
                                char **out_json);

/**
 * Spectrum of a weighted-homogeneous germ from comma-separated weights,
 * as canonical JSON `{display, m, spectral_numbers}`.  `*out_json` is
 * released with `bsr_string_free`.
 *
 * # Safety
 * `weights_csv` must be a valid string; `out_json` non-null and writable.
 */
enum BsrStatus bsr_spectrum_json(const char *weights_csv, char **out_json);

/**
 * Graded tables of a polynomial as canonical JSON.  `vars_csv` nullable
 * as in `bsr_analyze`; `*out_json` is released with `bsr_string_free`.
 *
 * # Safety
 * As for `bsr_analyze`; `out_json` must be non-null and writable.
 */
enum BsrStatus bsr_tables_json(const char *poly,
                               const char *vars_csv,
                               int modular,
                               char **out_json);

/**
 * Release a string produced by a `*_json` one-shot function.  Null is a
 * no-op.
 *
 * # Safety
 * `s` must be null or an owned string from this library, not used again.
 */
void bsr_string_free(char *s);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* BSROOTS_H */
