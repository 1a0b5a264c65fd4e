#ifndef QRL_H
#define QRL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QrlStatus {
  QRL_STATUS_OK = 0,
  QRL_STATUS_NULL_POINTER = 1,
  QRL_STATUS_INVALID_UTF8 = 2,
  QRL_STATUS_PARSE = 3,
  QRL_STATUS_MALFORMED = 4,
  QRL_STATUS_PRECONDITION = 5,
  QRL_STATUS_REFUSED = 6,
  QRL_STATUS_INTERNAL = 7,
  QRL_STATUS_INVALID_ARGUMENT = 8,
} QrlStatus;

typedef enum QrlPolicy {
  QRL_POLICY_ASCENDING = 0,
  QRL_POLICY_DESCENDING = 1,
  /**
   * Shuffled scan order; uses the `seed` argument.
   */
  QRL_POLICY_SEEDED_RANDOM = 2,
} QrlPolicy;

typedef enum QrlVerdict {
  QRL_VERDICT_FALSE = 0,
  QRL_VERDICT_TRUE = 1,
} QrlVerdict;

typedef enum QrlOracle {
  QRL_ORACLE_RECURSIVE = 0,
  QRL_ORACLE_ELIMINATION = 1,
} QrlOracle;

/**
 * A parsed formula.
 */
typedef struct QrlFormula QrlFormula;

/**
 * The result of running the reduction procedure.
 */
typedef struct QrlTrace QrlTrace;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. Valid until the
 * next failing call on the same thread.
 */
const char *qrl_last_error_message(void);

/**
 * Parses NUL-terminated QDIMACS text into `*out`.
 *
 * # Safety
 * `text` must be NULL or a valid NUL-terminated string; `out` must be NULL
 * or valid for writes.
 */
enum QrlStatus qrl_formula_parse(const char *text, bool lenient, struct QrlFormula **out);

/**
 * # Safety
 * `f` must be NULL or a handle from [`qrl_formula_parse`] not yet freed.
 */
void qrl_formula_free(struct QrlFormula *f);

/**
 * # Safety
 * `f` must be NULL or a live formula handle.
 */
size_t qrl_formula_num_vars(const struct QrlFormula *f);

/**
 * # Safety
 * `f` must be NULL or a live formula handle.
 */
size_t qrl_formula_num_clauses(const struct QrlFormula *f);

/**
 * Variables plus clauses plus literal occurrences.
 *
 * # Safety
 * `f` must be NULL or a live formula handle.
 */
size_t qrl_formula_size(const struct QrlFormula *f);

/**
 * Canonical QDIMACS text of `f`, or NULL on failure. Free with [`qrl_string_free`].
 *
 * # Safety
 * `f` must be NULL or a live formula handle.
 */
char *qrl_formula_to_qdimacs(const struct QrlFormula *f);

/**
 * Runs the reduction procedure and stores the trace in `*out`.
 *
 * # Safety
 * `f` must be a live formula handle; `out` must be valid for writes.
 */
enum QrlStatus qrl_decide(const struct QrlFormula *f,
                          enum QrlPolicy policy,
                          uint64_t seed,
                          bool early_exit,
                          struct QrlTrace **out);

/**
 * # Safety
 * `t` must be NULL or a handle from [`qrl_decide`] not yet freed.
 */
void qrl_trace_free(struct QrlTrace *t);

/**
 * # Safety
 * `t` must be a live trace handle.
 */
enum QrlVerdict qrl_trace_verdict(const struct QrlTrace *t);

/**
 * # Safety
 * `t` must be NULL or a live trace handle.
 */
size_t qrl_trace_num_steps(const struct QrlTrace *t);

/**
 * The trace as `qrl-trace/1` JSON, or NULL. Free with [`qrl_string_free`].
 *
 * # Safety
 * `t` must be NULL or a live trace handle.
 */
char *qrl_trace_to_json(const struct QrlTrace *t);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library, not yet freed.
 */
void qrl_string_free(char *s);

/**
 * Evaluates `f` exactly. Zero limits select the defaults.
 *
 * # Safety
 * `f` must be a live formula handle; `out` must be valid for writes.
 */
enum QrlStatus qrl_oracle_eval(const struct QrlFormula *f,
                               enum QrlOracle method,
                               size_t max_vars,
                               size_t max_literals,
                               enum QrlVerdict *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QRL_H */
