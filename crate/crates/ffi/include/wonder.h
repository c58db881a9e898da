#ifndef WONDER_H
#define WONDER_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes; the first four match the CLI exit codes.
typedef enum WonderStatus {
  WONDER_STATUS_OK = 0,
  WONDER_STATUS_INPUT = 1,
  WONDER_STATUS_COMPUTATION = 2,
  WONDER_STATUS_INVARIANT = 3,
  WONDER_STATUS_NULL_ARGUMENT = 4,
  WONDER_STATUS_BUFFER_TOO_SMALL = 5,
  WONDER_STATUS_PANIC = 6,
} WonderStatus;

// Opaque diagram handle.
typedef struct WonderDiagram WonderDiagram;

// Opaque ring handle.
typedef struct WonderRing WonderRing;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread (empty after a success). The
// pointer stays valid until the next call into this library on the same thread.
const char *wonder_last_error(void);

// Parses a diagram file (`wonder-diagram/1` JSON) and validates it.
//
// # Safety
// `text` must be a NUL-terminated string and `out` a valid pointer.
enum WonderStatus wonder_diagram_from_json(const char *text, struct WonderDiagram **out);

// Built-in models: `"fm-p1"`, `"fm-p2"`, `"fm-curve"` (diagonals of size >= 2)
// and `"keel"`.
//
// # Safety
// `kind` must be a NUL-terminated string and `out` a valid pointer.
enum WonderStatus wonder_diagram_model(const char *kind, uint32_t n, struct WonderDiagram **out);

// # Safety
// `d` must come from a `wonder_diagram_*` constructor and not be used afterwards.
void wonder_diagram_free(struct WonderDiagram *d);

// Builds the ring; `max_rewrites = 0` selects the default cap.
//
// # Safety
// `d` must be a live diagram handle and `out` a valid pointer.
enum WonderStatus wonder_ring_build(const struct WonderDiagram *d,
                                    uintptr_t max_rewrites,
                                    struct WonderRing **out);

// # Safety
// `r` must come from [`wonder_ring_build`] and not be used afterwards.
void wonder_ring_free(struct WonderRing *r);

// Writes the dimension vector into `buf` (capacity `cap`) and its length into
// `len`. With a short buffer only `len` is set and `BufferTooSmall` returned.
//
// # Safety
// `r` must be a live ring handle, `len` valid, `buf` valid for `cap` writes.
enum WonderStatus wonder_ring_dims(const struct WonderRing *r,
                                   uintptr_t *buf,
                                   uintptr_t cap,
                                   uintptr_t *len);

// Sets `*out` to 1 when the ring has Poincaré duality at the diagram's socle
// degree, else 0.
//
// # Safety
// `r` must be a live ring handle and `out` valid.
enum WonderStatus wonder_ring_is_pd(const struct WonderRing *r, int32_t *out);

// Serializes the ring (`wonder-ring/1` JSON). Release the string with
// [`wonder_string_free`].
//
// # Safety
// `r` must be a live ring handle and `out` valid.
enum WonderStatus wonder_ring_to_json(const struct WonderRing *r, char **out);

// # Safety
// `s` must come from this library and not be used afterwards.
void wonder_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WONDER_H */
