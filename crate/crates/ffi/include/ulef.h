#ifndef ULEF_H
#define ULEF_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status of every fallible call.
 */
typedef enum UlefStatus {
  ULEF_STATUS_OK = 0,
  /**
   * Malformed document, unknown name, or a mathematical precondition
   * (not tame, unsupported kind, ...).
   */
  ULEF_STATUS_INVALID_INPUT = 1,
  /**
   * A region or enumeration budget was exceeded.
   */
  ULEF_STATUS_RESOURCE = 2,
  /**
   * Internal invariant breach or panic; always a bug.
   */
  ULEF_STATUS_INTERNAL = 3,
  ULEF_STATUS_NULL_POINTER = 4,
  ULEF_STATUS_UTF8 = 5,
} UlefStatus;

/**
 * Quotient complex handle.
 */
typedef struct UlefComplex UlefComplex;

/**
 * Deck group handle.
 */
typedef struct UlefGroup UlefGroup;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version, a static string (do not free).
 */
const char *ulef_version(void);

/**
 * Message of the last failed call on this thread, or null. Valid until
 * the next call into the library on the same thread; do not free.
 */
const char *ulef_last_error(void);

/**
 * # Safety
 * `s` is null or a string returned through an `out_*` pointer of this
 * library that has not been freed yet.
 */
void ulef_string_free(char *s);

/**
 * Build a group from `Z^k`, `F_k`, `surface:g`, `cyclic:n` or a JSON
 * group spec.
 *
 * # Safety
 * `desc` is a NUL-terminated string; `out` is a valid pointer.
 */
enum UlefStatus ulef_group_new(const char *desc, struct UlefGroup **out);

/**
 * # Safety
 * `g` is null or a handle from [`ulef_group_new`] not yet freed.
 */
void ulef_group_free(struct UlefGroup *g);

/**
 * Number of elements of the word-metric ball of radius `radius`.
 *
 * # Safety
 * `g` is a live group handle; `out` is a valid pointer.
 */
enum UlefStatus ulef_group_ball_size(const struct UlefGroup *g, size_t radius, size_t *out);

/**
 * Decide the class of `{constant, finite: [[word, value]]}` in the
 * coinvariants of `g`; writes the certificate document (with the
 * verifier's result) as JSON.
 *
 * # Safety
 * `g` is a live group handle; `class_json` is a NUL-terminated string;
 * `out_json` is a valid pointer.
 */
enum UlefStatus ulef_decide_class(const struct UlefGroup *g,
                                  const char *class_json,
                                  char **out_json);

/**
 * Load a quotient complex from a JSON document or a fixture name
 * (`torus7`, `genus2`, `tetrahedron`, `octahedron`, `torus-grid:M`,
 * `surface:G`, `klein:M`).
 *
 * # Safety
 * `src` is a NUL-terminated string; `out` is a valid pointer.
 */
enum UlefStatus ulef_complex_new(const char *src, struct UlefComplex **out);

/**
 * # Safety
 * `c` is null or a handle from [`ulef_complex_new`] not yet freed.
 */
void ulef_complex_free(struct UlefComplex *c);

/**
 * # Safety
 * `c` is a live complex handle; `out` is a valid pointer.
 */
enum UlefStatus ulef_complex_euler_characteristic(const struct UlefComplex *c, int64_t *out);

/**
 * Validation report `{violations: [{condition, detail}]}` as JSON.
 *
 * # Safety
 * `c` is a live complex handle; `out_json` is a valid pointer.
 */
enum UlefStatus ulef_complex_validate(const struct UlefComplex *c, char **out_json);

/**
 * Run `map-analyze`, `field-analyze` or `decide-class` on a document
 * given as text. `radius == 0` and `capacity <= 0` select the defaults.
 * Writes the same JSON report as the `ulef` binary and its exit code.
 *
 * # Safety
 * `command` and `document` are NUL-terminated strings; `out_json` and
 * `out_exit_code` are valid pointers.
 */
enum UlefStatus ulef_analyze(const char *command,
                             const char *document,
                             size_t radius,
                             int64_t capacity,
                             char **out_json,
                             int32_t *out_exit_code);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ULEF_H */
