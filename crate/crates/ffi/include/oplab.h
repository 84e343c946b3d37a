#ifndef OPLAB_H
#define OPLAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every call.
 */
typedef enum OplabStatus {
  OPLAB_STATUS_OK = 0,
  OPLAB_STATUS_NULL_POINTER = 1,
  OPLAB_STATUS_INVALID_UTF8 = 2,
  OPLAB_STATUS_PARSE = 3,
  OPLAB_STATUS_INVALID_ARGUMENT = 4,
  /**
   * The point lies outside the disk or hits a pole.
   */
  OPLAB_STATUS_DOMAIN = 5,
  /**
   * The operator is unbounded, so tail quantities are undefined.
   */
  OPLAB_STATUS_UNBOUNDED = 6,
  OPLAB_STATUS_NUMERIC = 7,
  OPLAB_STATUS_IO = 8,
  OPLAB_STATUS_PANIC = 9,
} OplabStatus;

/**
 * A parsed analytic function.
 */
typedef struct OplabFunction OplabFunction;

/**
 * The outcome of one subcommand.
 */
typedef struct OplabReport OplabReport;

/**
 * A parsed scenario.
 */
typedef struct OplabScenario OplabScenario;

/**
 * Optional overrides for [`oplab_run`]; negative values mean "not set".
 */
typedef struct OplabOptions {
  /**
   * 0 = double, 1 = extended, negative = scenario default.
   */
  int32_t precision;
  int32_t grid_depth;
  int32_t tail_depth;
  bool paper_3term;
} OplabOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version, a static NUL-terminated string.
 */
const char *oplab_version(void);

/**
 * Message for the last failed call on this thread, or NULL. The pointer
 * stays valid until the next call on the same thread.
 */
const char *oplab_last_error(void);

/**
 * Static description of a status code.
 */
const char *oplab_status_name(enum OplabStatus status);

/**
 * Parse a function expression such as `"sigma(0.5) * z^2"`.
 *
 * # Safety
 * `src` must be NUL-terminated; `out` must be writable.
 */
enum OplabStatus oplab_function_parse(const char *src, struct OplabFunction **out);

/**
 * Value at `re + i im`.
 *
 * # Safety
 * `f` must come from [`oplab_function_parse`]; the outputs must be writable.
 */
enum OplabStatus oplab_function_eval(const struct OplabFunction *f,
                                     double re,
                                     double im,
                                     double *out_re,
                                     double *out_im);

/**
 * Derivatives `f^(0..=order)` at `re + i im`, written as interleaved
 * real and imaginary parts into `out`, which holds `2 * (order + 1)` values.
 *
 * # Safety
 * `f` must come from [`oplab_function_parse`]; `out` must hold
 * `2 * (order + 1)` doubles.
 */
enum OplabStatus oplab_function_derivatives(const struct OplabFunction *f,
                                            double re,
                                            double im,
                                            uint32_t order,
                                            double *out);

/**
 * Canonical text of the function; release it with [`oplab_string_free`].
 *
 * # Safety
 * `f` must come from [`oplab_function_parse`]; `out` must be writable.
 */
enum OplabStatus oplab_function_to_string(const struct OplabFunction *f, char **out);

/**
 * # Safety
 * `f` must come from [`oplab_function_parse`] and not be used afterwards.
 */
void oplab_function_free(struct OplabFunction *f);

/**
 * Parse a scenario JSON document.
 *
 * # Safety
 * `json` must be NUL-terminated; `out` must be writable.
 */
enum OplabStatus oplab_scenario_parse(const char *json, struct OplabScenario **out);

/**
 * # Safety
 * `s` must come from [`oplab_scenario_parse`] and not be used afterwards.
 */
void oplab_scenario_free(struct OplabScenario *s);

/**
 * Default options: nothing overridden.
 */
struct OplabOptions oplab_options_default(void);

/**
 * Run a subcommand (`"check-bounded"`, `"essential-norm"`, ...) on a
 * scenario. `options` may be NULL.
 *
 * # Safety
 * `scenario` must come from [`oplab_scenario_parse`], `command` must be
 * NUL-terminated, `options` must be NULL or valid, and `out` writable.
 */
enum OplabStatus oplab_run(const struct OplabScenario *scenario,
                           const char *command,
                           const struct OplabOptions *options,
                           struct OplabReport **out);

/**
 * The report as pretty-printed JSON, owned by the report.
 *
 * # Safety
 * `r` must come from [`oplab_run`].
 */
const char *oplab_report_json(const struct OplabReport *r);

/**
 * The radial profile CSV, or NULL unless the command was `profile`.
 *
 * # Safety
 * `r` must come from [`oplab_run`].
 */
const char *oplab_report_csv(const struct OplabReport *r);

/**
 * 0 when every check passed and every verdict is definite, 2 otherwise,
 * -1 for a NULL report.
 *
 * # Safety
 * `r` must come from [`oplab_run`].
 */
int32_t oplab_report_exit_code(const struct OplabReport *r);

/**
 * # Safety
 * `r` must come from [`oplab_run`] and not be used afterwards.
 */
void oplab_report_free(struct OplabReport *r);

/**
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void oplab_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* OPLAB_H */
