#ifndef GRADED_FCA_H
#define GRADED_FCA_H

#include <stddef.h>
#include <stdint.h>

/*
 Result codes shared by every entry point.
 */
typedef enum FcaStatus {
  FCA_STATUS_OK = 0,
  FCA_STATUS_NULL_POINTER = 1,
  FCA_STATUS_INVALID_UTF8 = 2,
  FCA_STATUS_PARSE = 3,
  FCA_STATUS_OUT_OF_RANGE = 4,
  FCA_STATUS_UNDEFINED_GRADE = 5,
  FCA_STATUS_NOT_CONVERGED = 6,
  FCA_STATUS_NUMERIC = 7,
  FCA_STATUS_BUFFER_TOO_SMALL = 8,
  FCA_STATUS_INTERNAL = 9,
} FcaStatus;

/*
 A crisp formal context.
 */
typedef struct FcaContext FcaContext;

/*
 A concept lattice with its cover relation.
 */
typedef struct FcaLattice FcaLattice;

/*
 A many-valued context with entries in [0, 1].
 */
typedef struct FcaMvContext FcaMvContext;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failure on this thread, or null if none. The pointer
 stays valid until the next failing call on the same thread.
 */
const char *fca_last_error_message(void);

/*
 # Safety
 `text` must be null or a string returned by this library, not yet freed.
 */
void fca_string_free(char *text);

/*
 Parses Burmeister CXT text into a new context handle.

 # Safety
 `text` must be a NUL-terminated string and `out` writable.
 */
enum FcaStatus fca_context_parse_cxt(const char *text, struct FcaContext **out);

/*
 # Safety
 `ctx` must be null or a handle from this library, not yet freed.
 */
void fca_context_free(struct FcaContext *ctx);

/*
 # Safety
 `ctx` must be null or a live context handle.
 */
size_t fca_context_object_count(const struct FcaContext *ctx);

/*
 # Safety
 `ctx` must be null or a live context handle.
 */
size_t fca_context_attribute_count(const struct FcaContext *ctx);

/*
 Serializes a context to canonical CXT text.

 # Safety
 `ctx` must be a live context handle and `out` writable.
 */
enum FcaStatus fca_context_to_cxt(const struct FcaContext *ctx, char **out);

/*
 Parses a many-valued CSV table into a new handle.

 # Safety
 `text` must be a NUL-terminated string and `out` writable.
 */
enum FcaStatus fca_mv_parse_csv(const char *text, struct FcaMvContext **out);

/*
 # Safety
 `mv` must be null or a handle from this library, not yet freed.
 */
void fca_mv_free(struct FcaMvContext *mv);

/*
 Crisp context of the cells with membership at least `theta`.

 # Safety
 `mv` must be a live handle and `out` writable.
 */
enum FcaStatus fca_mv_threshold(const struct FcaMvContext *mv,
                                double theta,
                                struct FcaContext **out);

/*
 Graded concept lattice at `theta`, as the same JSON document the CLI
 prints for `graded --json`.

 # Safety
 `mv` must be a live handle and `out` writable.
 */
enum FcaStatus fca_graded_json(const struct FcaMvContext *mv, double theta, char **out);

/*
 Builds the concept lattice of a context.

 # Safety
 `ctx` must be a live context handle and `out` writable.
 */
enum FcaStatus fca_lattice_build(const struct FcaContext *ctx, struct FcaLattice **out);

/*
 # Safety
 `lattice` must be null or a handle from this library, not yet freed.
 */
void fca_lattice_free(struct FcaLattice *lattice);

/*
 Concepts are indexed in lectic order of their intents.

 # Safety
 `lattice` must be null or a live lattice handle.
 */
size_t fca_lattice_concept_count(const struct FcaLattice *lattice);

/*
 # Safety
 `lattice` must be a live lattice handle.
 */
size_t fca_lattice_top(const struct FcaLattice *lattice);

/*
 # Safety
 `lattice` must be a live lattice handle.
 */
size_t fca_lattice_bottom(const struct FcaLattice *lattice);

/*
 Writes the attribute indices of concept `index` into `out`. `*out_len`
 always receives the required length; if it exceeds `cap` nothing is
 written and `BufferTooSmall` is returned.

 # Safety
 `out` must have room for `cap` elements and `out_len` must be writable.
 */
enum FcaStatus fca_lattice_concept_intent(const struct FcaLattice *lattice,
                                          size_t index,
                                          size_t *out,
                                          size_t cap,
                                          size_t *out_len);

/*
 Object indices of concept `index`, with the same buffer protocol as
 [`fca_lattice_concept_intent`].

 # Safety
 `out` must have room for `cap` elements and `out_len` must be writable.
 */
enum FcaStatus fca_lattice_concept_extent(const struct FcaLattice *lattice,
                                          size_t index,
                                          size_t *out,
                                          size_t cap,
                                          size_t *out_len);

/*
 # Safety
 `lattice` must be null or a live lattice handle.
 */
size_t fca_lattice_cover_count(const struct FcaLattice *lattice);

/*
 Cover pair `index`: `*upper` covers `*lower`.

 # Safety
 `lattice` must be a live lattice handle; `lower` and `upper` writable.
 */
enum FcaStatus fca_lattice_cover(const struct FcaLattice *lattice,
                                 size_t index,
                                 size_t *lower,
                                 size_t *upper);

/*
 Closure of the attribute set `attrs[0..len]`, written with the same
 buffer protocol as [`fca_lattice_concept_intent`].

 # Safety
 `attrs` must point to `len` readable elements when `len > 0`; `out` must
 have room for `cap` elements and `out_len` must be writable.
 */
enum FcaStatus fca_closure_intent(const struct FcaContext *ctx,
                                  const size_t *attrs,
                                  size_t len,
                                  size_t *out,
                                  size_t cap,
                                  size_t *out_len);

/*
 Iterates `x -> k·x` from `x0[0..dim]` until the certified bound is at most
 `tol`. Writes the fixed point into `out_fixed[0..dim]`.

 # Safety
 `x0` must point to `dim` readable and `out_fixed` to `dim` writable
 elements; `out_steps` and `out_bound` must be writable.
 */
enum FcaStatus fca_iterate_scaling(double k,
                                   const double *x0,
                                   size_t dim,
                                   double tol,
                                   size_t max_iter,
                                   double *out_fixed,
                                   size_t *out_steps,
                                   double *out_bound);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GRADED_FCA_H */
