#ifndef TRILOCAL_H
#define TRILOCAL_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Classification of a ring.
typedef enum TlCase {
  TL_CASE_SEMISIMPLE = 0,
  TL_CASE_MIXED = 1,
  TL_CASE_EQUICHARACTERISTIC = 2,
  TL_CASE_NONE = 3,
} TlCase;

// Status codes.
typedef enum TlStatus {
  TL_STATUS_OK = 0,
  TL_STATUS_NULL_ARGUMENT = 1,
  TL_STATUS_INVALID_UTF8 = 2,
  TL_STATUS_INVALID_RING = 3,
  TL_STATUS_UNSUPPORTED = 4,
  TL_STATUS_USAGE = 5,
  TL_STATUS_VIOLATION = 6,
  TL_STATUS_PANIC = 7,
} TlStatus;

// Opaque ring handle.
typedef struct TlRing TlRing;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. Valid until the
// next call on the same thread.
const char *tl_last_error(void);

// Parses a ring spec such as `"w2(4)"` or `"skewpoly(64; frob^2)"`.
//
// # Safety
// `spec` is a nul-terminated string; `out` is writable.
enum TlStatus tl_ring_new(const char *spec, struct TlRing **out);

// Releases a ring handle; null is ignored.
//
// # Safety
// `ring` came from [`tl_ring_new`] and is not used afterwards.
void tl_ring_free(struct TlRing *ring);

// Number of elements.
//
// # Safety
// `ring` is a live handle; `out` is writable.
enum TlStatus tl_ring_size(const struct TlRing *ring, uint64_t *out);

// Canonical spec string; free with [`tl_string_free`].
//
// # Safety
// `ring` is a live handle; `out` is writable.
enum TlStatus tl_ring_spec(const struct TlRing *ring, char **out);

// Case of the classification.
//
// # Safety
// `ring` is a live handle; `out` is writable.
enum TlStatus tl_ring_classify(const struct TlRing *ring, enum TlCase *out);

// Number of triangulations.
//
// # Safety
// `ring` is a live handle; `out` is writable.
enum TlStatus tl_ring_count(const struct TlRing *ring, uint64_t *out);

// Number of equivalence classes of triangulations.
//
// # Safety
// `ring` is a live handle; `out` is writable.
enum TlStatus tl_ring_class_count(const struct TlRing *ring, uint64_t *out);

// Runs one command-line invocation and returns its JSON report.
//
// `argv` holds `argc` arguments after the program name, e.g.
// `{"axioms", "--ring", "w2(4)"}`; `--format json` is appended. On
// [`TlStatus::Ok`] and [`TlStatus::Violation`] (negative verdict or
// violations) `*out` receives the report.
//
// # Safety
// `argv` points to `argc` nul-terminated strings; `out` is writable.
enum TlStatus tl_run_json(int argc, const char *const *argv, char **out);

// Releases a string returned by this library; null is ignored.
//
// # Safety
// `s` came from this library and is not used afterwards.
void tl_string_free(char *s);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* TRILOCAL_H */
