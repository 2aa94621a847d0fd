#ifndef GHOST_SLOPES_H
#define GHOST_SLOPES_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible entry point.
 */
typedef enum GsStatus {
  GsOk = 0,
  GsInvalidParam = 1,
  GsDomain = 2,
  GsUncertifiedTruncation = 3,
  GsMissingDimension = 4,
  GsInvariant = 5,
  GsParse = 6,
  GsIo = 7,
  GsNullPointer = 8,
  GsBufferTooSmall = 9,
  GsPanic = 10,
} GsStatus;

/**
 * Opaque computation context (parameters plus memo caches).
 */
typedef struct GsCtx GsCtx;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Last error message for this thread; empty string if none. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *gs_last_error(void);

/**
 * Create a context for parameters (p, a, b). On success writes the handle to
 * `out`; free it with [`gs_ctx_free`].
 */
enum GsStatus gs_ctx_new(int64_t p, int64_t a, int64_t b, struct GsCtx **out);

/**
 * Like [`gs_ctx_new`] with explicit compatibility flags (nonzero = on):
 * `case3_printed_b` uses the printed case-3 constant, `case3_branch_a_printed`
 * the printed branch-(a) truncation length.
 */
enum GsStatus gs_ctx_new_with_flags(int64_t p,
                                    int64_t a,
                                    int64_t b,
                                    uint8_t case3_printed_b,
                                    uint8_t case3_branch_a_printed,
                                    struct GsCtx **out);

/**
 * Release a context handle. A null handle is a no-op.
 */
void gs_ctx_free(struct GsCtx *handle);

/**
 * Dimensions at weight k for character index s_eps. `new_dim` receives -1
 * when k is outside the character's congruence class.
 */
enum GsStatus gs_dims(const struct GsCtx *handle,
                      int64_t s_eps,
                      int64_t k,
                      uint64_t *ur,
                      uint64_t *iw,
                      int64_t *new_dim);

/**
 * Slope sequence at in-class weight k by the recursive algorithm, length
 * dim_ur(k). Two-call protocol: pass `cap = 0` to learn the length.
 */
enum GsStatus gs_recursive_slopes(const struct GsCtx *handle,
                                  int64_t s_eps,
                                  int64_t k,
                                  int64_t *num,
                                  int64_t *den,
                                  uintptr_t cap,
                                  uintptr_t *len);

/**
 * First `count` Newton-polygon slopes of the ghost series at evaluation
 * weight k. Two-call protocol as in [`gs_recursive_slopes`].
 */
enum GsStatus gs_np_slopes(const struct GsCtx *handle,
                           int64_t s_eps,
                           int64_t k,
                           uint64_t count,
                           int64_t *num,
                           int64_t *den,
                           uintptr_t cap,
                           uintptr_t *len);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* GHOST_SLOPES_H */
