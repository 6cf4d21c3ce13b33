#ifndef CDWSD_H
#define CDWSD_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CdwsdStatus {
  CDWSD_STATUS_OK = 0,
  CDWSD_STATUS_NULL_POINTER = 1,
  CDWSD_STATUS_INVALID_UTF8 = 2,
  CDWSD_STATUS_IO = 3,
  CDWSD_STATUS_PARSE = 4,
  CDWSD_STATUS_INVALID_TAXONOMY = 5,
  CDWSD_STATUS_UNKNOWN_SYNSET = 6,
  CDWSD_STATUS_INVALID_ARGUMENT = 7,
  CDWSD_STATUS_PANIC = 8,
} CdwsdStatus;

/**
 * Loaded taxonomy. Opaque to C callers.
 */
typedef struct CdwsdTaxonomy CdwsdTaxonomy;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *cdwsd_last_error_message(void);

/**
 * Load a taxonomy file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a writable pointer.
 */
enum CdwsdStatus cdwsd_taxonomy_load_file(const char *path, struct CdwsdTaxonomy **out);

/**
 * Load a taxonomy from its text form.
 *
 * # Safety
 * `source` must be a NUL-terminated string and `out` a writable pointer.
 */
enum CdwsdStatus cdwsd_taxonomy_load_str(const char *source, struct CdwsdTaxonomy **out);

/**
 * # Safety
 * `t` must come from one of the load functions and not be used afterwards.
 * NULL is ignored.
 */
void cdwsd_taxonomy_free(struct CdwsdTaxonomy *t);

/**
 * # Safety
 * `t` must be a live taxonomy handle and `out` a writable pointer.
 */
enum CdwsdStatus cdwsd_taxonomy_synset_count(const struct CdwsdTaxonomy *t, size_t *out);

/**
 * Size of the subhierarchy under `id`, the synset itself included.
 *
 * # Safety
 * `t` must be a live taxonomy handle, `id` a NUL-terminated string and
 * `out` a writable pointer.
 */
enum CdwsdStatus cdwsd_taxonomy_descendants(const struct CdwsdTaxonomy *t,
                                            const char *id,
                                            uint64_t *out);

/**
 * # Safety
 * Same contract as `cdwsd_taxonomy_descendants`.
 */
enum CdwsdStatus cdwsd_taxonomy_height(const struct CdwsdTaxonomy *t,
                                       const char *id,
                                       uint32_t *out);

/**
 * # Safety
 * Same contract as `cdwsd_taxonomy_descendants`.
 */
enum CdwsdStatus cdwsd_taxonomy_nhyp(const struct CdwsdTaxonomy *t, const char *id, double *out);

/**
 * # Safety
 * `out` must be a writable pointer.
 */
enum CdwsdStatus cdwsd_solve_nhyp(uint64_t descendants, uint32_t height, double *out);

/**
 * Density of a concept with the given subhierarchy shape and mark count.
 *
 * # Safety
 * `out` must be a writable pointer.
 */
enum CdwsdStatus cdwsd_conceptual_density(uint64_t descendants,
                                          uint32_t height,
                                          size_t marks,
                                          double alpha,
                                          double beta,
                                          double *out);

/**
 * Disambiguate a whitespace-separated lemma stream. Lemmas unknown to the
 * taxonomy are skipped. On success `*out` holds one
 * `position\tlemma\tSTATUS\tkeys` line per known lemma; release it with
 * `cdwsd_string_free`.
 *
 * # Safety
 * `t` must be a live taxonomy handle, `lemmas` a NUL-terminated string and
 * `out` a writable pointer.
 */
enum CdwsdStatus cdwsd_disambiguate(const struct CdwsdTaxonomy *t,
                                    const char *lemmas,
                                    size_t window,
                                    double alpha,
                                    double beta,
                                    char **out);

/**
 * # Safety
 * `s` must be a string returned by this library, not freed before. NULL is
 * ignored.
 */
void cdwsd_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CDWSD_H */
