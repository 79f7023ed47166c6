#ifndef MGN_H
#define MGN_H

/* Generated by cbindgen. Do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum MgnStatus {
  MGN_STATUS_OK = 0,
  MGN_STATUS_INVALID_INPUT = 1,
  MGN_STATUS_CHECK_FAILED = 2,
  MGN_STATUS_RESOURCE_LIMIT = 3,
  MGN_STATUS_NULL_POINTER = 4,
  MGN_STATUS_INTERNAL = 5,
} MgnStatus;

// Opaque computation engine with memoized recursion state.
typedef struct MgnEngine MgnEngine;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Allocates an engine. Never null; release with [`mgn_engine_free`].
struct MgnEngine *mgn_engine_new(void);

// Releases an engine. A null handle is a no-op.
//
// # Safety
// `engine` must be null or a pointer obtained from [`mgn_engine_new`]
// that has not been freed yet.
void mgn_engine_free(struct MgnEngine *engine);

// Frees a string returned through any `out` parameter. Null is a
// no-op.
//
// # Safety
// `s` must be null or a string produced by this library that has not
// been freed yet.
void mgn_string_free(char *s);

// Intersection number `<tau_{d_1} ... tau_{d_n}>_g` as a `"p/q"`
// string.
//
// # Safety
// `engine` must be a live engine handle, `d` must point to `d_len`
// integers (or be null with `d_len == 0`), and `out` must be a valid
// destination for one pointer.
enum MgnStatus mgn_correlator(struct MgnEngine *engine,
                              uint32_t g,
                              const uint32_t *d,
                              size_t d_len,
                              char **out);

// Single Hurwitz number `H^g_alpha` as a `"p/q"` string.
//
// # Safety
// Same contract as [`mgn_correlator`] with `alpha` in place of `d`.
enum MgnStatus mgn_single_hurwitz(struct MgnEngine *engine,
                                  uint32_t g,
                                  const uint32_t *alpha,
                                  size_t alpha_len,
                                  char **out);

// One-part double Hurwitz number `H^g_((d), beta)` as a `"p/q"`
// string.
//
// # Safety
// Same contract as [`mgn_correlator`] with `beta` in place of `d`.
enum MgnStatus mgn_double_hurwitz(struct MgnEngine *engine,
                                  uint32_t g,
                                  uint32_t d,
                                  const uint32_t *beta,
                                  size_t beta_len,
                                  char **out);

// Closed genus-`g` partition function for the semisimple structure
// whose pairing values are given as a comma-separated list of
// rationals, e.g. `"1,4"` or `"1/2,-3"`.
//
// # Safety
// `deltas` must be a NUL-terminated string and `out` a valid
// destination for one pointer.
enum MgnStatus mgn_tft_closed(uint32_t g, const char *deltas, char **out);

// Runs one command of the command-line surface. `argv_json` is a JSON
// array of argument strings, e.g. `["correlator","--g","1","--d","1"]`.
// `out` receives an envelope
// `{"status":"...","exit_code":N,"payload":...}` whose payload is the
// command's canonical JSON document (or null when the command printed
// nothing). The returned status mirrors the envelope.
//
// # Safety
// `argv_json` must be a NUL-terminated string and `out` a valid
// destination for one pointer.
enum MgnStatus mgn_execute_json(const char *argv_json, char **out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* MGN_H */
