/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef PARCHERN_H
#define PARCHERN_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes. The nonzero data codes match the command-line exit codes.
 */
typedef enum ParchernStatus {
  PARCHERN_STATUS_OK = 0,
  PARCHERN_STATUS_PARSE_ERROR = 2,
  PARCHERN_STATUS_INVARIANT_VIOLATED = 3,
  PARCHERN_STATUS_UNSUPPORTED_RANK = 4,
  PARCHERN_STATUS_CHECK_FAILED = 5,
  PARCHERN_STATUS_NULL_ARGUMENT = 6,
  PARCHERN_STATUS_INVALID_UTF8 = 7,
  PARCHERN_STATUS_PANIC = 8,
} ParchernStatus;

/**
 * A parsed and validated scenario.
 */
typedef struct ParchernScenario ParchernScenario;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses and validates a scenario given as JSON text.
 *
 * # Safety
 * `json` must be a nul-terminated string and `out` a valid pointer.
 */
enum ParchernStatus parchern_scenario_load(const char *json, struct ParchernScenario **out);

/**
 * # Safety
 * `scenario` must come from `parchern_scenario_load` and not be used
 * afterwards. Null is ignored.
 */
void parchern_scenario_free(struct ParchernScenario *scenario);

/**
 * Rank of the bundle, or 0 for a null handle.
 *
 * # Safety
 * `scenario` must be null or a live handle.
 */
size_t parchern_scenario_rank(const struct ParchernScenario *scenario);

/**
 * Global invariants report.
 *
 * # Safety
 * `scenario` must be a live handle and `out` a valid pointer.
 */
enum ParchernStatus parchern_delta(const struct ParchernScenario *scenario, char **out);

/**
 * Decomposition report. A failing check returns `CheckFailed` together with
 * the report.
 *
 * # Safety
 * `scenario` must be a live handle and `out` a valid pointer.
 */
enum ParchernStatus parchern_decompose(const struct ParchernScenario *scenario, char **out);

/**
 * Minimization report. `point` may be null for every multiple point; a
 * negative `cap` selects the default.
 *
 * # Safety
 * `scenario` must be a live handle, `point` null or a nul-terminated string,
 * and `out` a valid pointer.
 */
enum ParchernStatus parchern_minimize(const struct ParchernScenario *scenario,
                                      const char *point,
                                      int64_t cap,
                                      bool prune,
                                      char **out);

/**
 * Invariant-suite report for the given seed.
 *
 * # Safety
 * `scenario` must be a live handle and `out` a valid pointer.
 */
enum ParchernStatus parchern_check(const struct ParchernScenario *scenario,
                                   uint64_t seed,
                                   char **out);

/**
 * # Safety
 * `s` must come from this library and not be used afterwards. Null is
 * ignored.
 */
void parchern_string_free(char *s);

/**
 * Message for the last failed call on this thread, or null.
 */
const char *parchern_last_error(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PARCHERN_H */
