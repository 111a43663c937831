#ifndef PROXRANK2_H
#define PROXRANK2_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum Prx2Format {
  PRX2_FORMAT_JSON = 0,
  PRX2_FORMAT_DOT = 1,
} Prx2Format;

/**
 * Result of every exported call.
 */
typedef enum Prx2Status {
  PRX2_STATUS_OK = 0,
  PRX2_STATUS_NULL_POINTER = 1,
  PRX2_STATUS_INVALID_UTF8 = 2,
  PRX2_STATUS_INVALID_INPUT = 3,
  PRX2_STATUS_LEVEL_OUT_OF_RANGE = 4,
  PRX2_STATUS_EXPANSION_TOO_LARGE = 5,
  PRX2_STATUS_OVERFLOW = 6,
  PRX2_STATUS_BUFFER_TOO_SMALL = 7,
  PRX2_STATUS_TRUNCATED_MAXIMAL = 8,
  PRX2_STATUS_NOT_REDUCED_FORM = 9,
  PRX2_STATUS_NOT_RANK2_PROXIMAL = 10,
  PRX2_STATUS_PANIC = 99,
} Prx2Status;

typedef enum Prx2Verdict {
  PRX2_VERDICT_UNIQUELY_ERGODIC = 0,
  PRX2_VERDICT_TWO_ERGODIC = 1,
  PRX2_VERDICT_UNDETERMINED = 2,
} Prx2Verdict;

/**
 * Opaque ordered Bratteli diagram.
 */
typedef struct Prx2Diagram Prx2Diagram;

/**
 * Opaque covering spec.
 */
typedef struct Prx2Spec Prx2Spec;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until the next call.
 */
const char *prx2_last_error(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library and not yet freed.
 */
void prx2_string_free(char *s);

/**
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum Prx2Status prx2_spec_from_json(const char *json, struct Prx2Spec **out);

/**
 * Generated family `tag` with default parameters and `depth` maps (0 keeps the default depth).
 *
 * # Safety
 * `tag` must be a NUL-terminated string; `out` must be writable.
 */
enum Prx2Status prx2_spec_family(const char *tag, uint32_t depth, struct Prx2Spec **out);

/**
 * # Safety
 * `spec` must be null or a handle from this library not yet freed.
 */
void prx2_spec_free(struct Prx2Spec *spec);

/**
 * # Safety
 * `spec` must be a live handle; `out` must be writable.
 */
enum Prx2Status prx2_spec_to_json(const struct Prx2Spec *spec, char **out);

/**
 * Number of presented level maps.
 *
 * # Safety
 * `spec` must be a live handle; `out` must be writable.
 */
enum Prx2Status prx2_spec_depth(const struct Prx2Spec *spec, uintptr_t *out);

/**
 * `l_n` in decimal.
 *
 * # Safety
 * `spec` must be a live handle; `out` must be writable.
 */
enum Prx2Status prx2_circuit_length(const struct Prx2Spec *spec, uintptr_t n, char **out);

/**
 * Writes `N_{m,n}(u,v)` up to `max_gap` into `buf`; `*len` receives the gap count. When the
 * count exceeds `cap_len` nothing is written and the status is `BufferTooSmall`.
 *
 * # Safety
 * `spec` must be a live handle; `buf` must hold `cap_len` values; `len` must be writable.
 */
enum Prx2Status prx2_gap_set(const struct Prx2Spec *spec,
                             uintptr_t m,
                             uintptr_t n,
                             uint32_t u,
                             uint32_t v,
                             uint64_t max_gap,
                             uint64_t expansion_cap,
                             uint64_t *buf,
                             uintptr_t cap_len,
                             uintptr_t *len);

/**
 * Ergodicity verdict from the first `depth` terms; `report_json` (nullable) receives the full report.
 *
 * # Safety
 * `spec` must be a live handle; `verdict` must be writable.
 */
enum Prx2Status prx2_classify_ergodicity(const struct Prx2Spec *spec,
                                         uintptr_t depth,
                                         enum Prx2Verdict *verdict,
                                         char **report_json);

/**
 * # Safety
 * `spec` must be a live handle; `out` must be writable.
 */
enum Prx2Status prx2_diagram_from_spec(const struct Prx2Spec *spec,
                                       uintptr_t depth,
                                       struct Prx2Diagram **out);

/**
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum Prx2Status prx2_diagram_from_json(const char *json, struct Prx2Diagram **out);

/**
 * # Safety
 * `d` must be null or a handle from this library not yet freed.
 */
void prx2_diagram_free(struct Prx2Diagram *d);

/**
 * # Safety
 * `d` must be a live handle; `out` must be writable.
 */
enum Prx2Status prx2_diagram_export(const struct Prx2Diagram *d,
                                    enum Prx2Format format,
                                    char **out);

/**
 * Reads the level maps off a rank-2 proximal diagram in reduced form.
 *
 * # Safety
 * `d` must be a live handle; `out` must be writable.
 */
enum Prx2Status prx2_diagram_to_spec(const struct Prx2Diagram *d, struct Prx2Spec **out);

/**
 * Replaces the path `(*end, ordinals[0..len])` by its Vershik successor in place.
 *
 * # Safety
 * `d` must be a live handle; `end` must be writable; `ordinals` must hold `len` values.
 */
enum Prx2Status prx2_vershik_successor(const struct Prx2Diagram *d,
                                       uintptr_t *end,
                                       uint64_t *ordinals,
                                       uintptr_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PROXRANK2_H */
