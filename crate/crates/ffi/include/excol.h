#ifndef EXCOL_H
#define EXCOL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Object kinds reported by [`excol_collection_object`].
 */
typedef enum ExcolObjectKind {
  EXCOL_OBJECT_KIND_LINE = 0,
  EXCOL_OBJECT_KIND_PUSH = 1,
} ExcolObjectKind;

typedef enum ExcolStatus {
  EXCOL_STATUS_OK = 0,
  EXCOL_STATUS_NULL_POINTER = 1,
  EXCOL_STATUS_INVALID_UTF8 = 2,
  EXCOL_STATUS_INVALID_SPEC = 3,
  EXCOL_STATUS_INVALID_CENTER = 4,
  EXCOL_STATUS_HYPOTHESIS_FAILED = 5,
  EXCOL_STATUS_INVALID_JSON = 6,
  EXCOL_STATUS_NOT_LINE_BUNDLES = 7,
  EXCOL_STATUS_OUT_OF_RANGE = 8,
  EXCOL_STATUS_BUFFER_TOO_SMALL = 9,
  EXCOL_STATUS_INTERNAL = 10,
} ExcolStatus;

/**
 * Opaque ordered collection with its mutation log.
 */
typedef struct ExcolCollection ExcolCollection;

/**
 * Opaque certification report.
 */
typedef struct ExcolReport ExcolReport;

/**
 * One entry of a collection: `f^*O(alpha, beta) (x) O(kE)` for a line
 * bundle, `i_*pi^*O_Y(alpha, beta) (x) O(kE)` for a pushforward.
 */
typedef struct ExcolObject {
  enum ExcolObjectKind kind;
  int64_t alpha;
  int64_t beta;
  int64_t k;
} ExcolObject;

/**
 * Verdicts of a certification.
 */
typedef struct ExcolFlags {
  bool exceptional;
  bool semiorthogonal;
  bool strong;
  bool gram_unimodular;
  bool length_ok;
  size_t length_expected;
  size_t length_actual;
  size_t violations;
} ExcolFlags;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. The pointer
 * stays valid until the next call into this library from the same thread.
 */
const char *excol_last_error(void);

/**
 * Frees a string returned by this library. NULL is ignored.
 */
void excol_string_free(char *s);

/**
 * Builds the collection for `P_{P^base_dim}(O(a_0) + ... + O(a_r))` blown
 * up along the comma-separated rays in `center`. Set `use_cache` to read
 * and write the on-disk cohomology cache (`EXCOL_CACHE_DIR`).
 *
 * On `EXCOL_STATUS_HYPOTHESIS_FAILED`, `*out` may still receive the
 * partial collection with its log.
 */
enum ExcolStatus excol_construct(size_t base_dim,
                                 const int64_t *fiber_degrees,
                                 size_t n_degrees,
                                 const char *center,
                                 bool use_cache,
                                 struct ExcolCollection **out);

/**
 * Parses a collection from its JSON form.
 */
enum ExcolStatus excol_collection_from_json(const char *json, struct ExcolCollection **out);

/**
 * JSON form of a collection; free with [`excol_string_free`]. NULL on a null handle.
 */
char *excol_collection_to_json(const struct ExcolCollection *col);

/**
 * Number of objects; 0 for a null handle.
 */
size_t excol_collection_len(const struct ExcolCollection *col);

/**
 * Number of applied rules in the mutation log; 0 for a null handle.
 */
size_t excol_collection_log_len(const struct ExcolCollection *col);

/**
 * Reads object `index` into `*out`.
 */
enum ExcolStatus excol_collection_object(const struct ExcolCollection *col,
                                         size_t index,
                                         struct ExcolObject *out);

/**
 * Swaps objects `index` and `index + 1` without any check (for negative
 * controls).
 */
enum ExcolStatus excol_collection_swap(struct ExcolCollection *col, size_t index);

void excol_collection_free(struct ExcolCollection *col);

/**
 * Certifies a collection of line bundles on its own blow-up.
 */
enum ExcolStatus excol_verify(const struct ExcolCollection *col,
                              bool use_cache,
                              struct ExcolReport **out);

/**
 * Copies the verdicts into `*out`.
 */
enum ExcolStatus excol_report_flags(const struct ExcolReport *report, struct ExcolFlags *out);

/**
 * True iff every check passed; false for a null handle.
 */
bool excol_report_all_pass(const struct ExcolReport *report);

/**
 * JSON form of a report; free with [`excol_string_free`].
 */
char *excol_report_to_json(const struct ExcolReport *report);

void excol_report_free(struct ExcolReport *report);

/**
 * Dimensions `h^0..h^n` of a line bundle, written to `dims[0..=n]` with
 * `*len = n + 1`.
 *
 * With `center` NULL the variety is the bundle itself and `coords` is
 * `(alpha, beta)`; otherwise it is the blow-up and `coords` is
 * `(alpha, beta, k)`. If `capacity` is too small, `*len` still receives the
 * required size and `EXCOL_STATUS_BUFFER_TOO_SMALL` is returned.
 */
enum ExcolStatus excol_cohomology(size_t base_dim,
                                  const int64_t *fiber_degrees,
                                  size_t n_degrees,
                                  const char *center,
                                  const int64_t *coords,
                                  size_t n_coords,
                                  uint64_t *dims,
                                  size_t capacity,
                                  size_t *len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EXCOL_H */
