#ifndef RNN_AUTOMATA_H
#define RNN_AUTOMATA_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes. `RA_OK` is zero.
 */
typedef enum RaStatus {
  RA_OK = 0,
  RA_NULL_POINTER = 1,
  RA_INVALID_UTF8 = 2,
  RA_PARSE = 3,
  RA_UNKNOWN_SYMBOL = 4,
  RA_INVALID_NETWORK = 5,
  /**
   * `k` too small, degenerate or cancelling infinite gates, singular
   * matrices, domain errors.
   */
  RA_NUMERIC = 6,
  RA_PRECONDITION = 7,
  RA_IO = 8,
  RA_PANIC = 9,
} RaStatus;

/**
 * Opaque network handle.
 */
typedef struct RaNetwork RaNetwork;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or an empty string. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *ra_last_error(void);

/**
 * Loads a weights file's contents.
 *
 * # Safety
 * `json` is a NUL-terminated string and `out` is writable.
 */
enum RaStatus ra_network_from_json(const char *json, struct RaNetwork **out);

/**
 * Compiles a network. `kind` is one of `dfa-rnn`, `dyck-rnn`, `cfl-rnn`,
 * `dfa-gru`, `dyck-gru`, `cfl-gru`; `spec_json` is the DFA or CFL spec
 * (null for the Dyck kinds). Zero for `n`, `k`, `precision` or `max_len`
 * selects the command-line default.
 *
 * # Safety
 * `kind` is a NUL-terminated string, `spec_json` is null or one, and `out`
 * is writable.
 */
enum RaStatus ra_network_compile(const char *kind,
                                 const char *spec_json,
                                 size_t n,
                                 uint32_t k,
                                 uint32_t precision,
                                 size_t max_len,
                                 struct RaNetwork **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `net` is null or a handle not yet freed.
 */
void ra_network_free(struct RaNetwork *net);

/**
 * Number of hidden nodes, or 0 for a null handle.
 *
 * # Safety
 * `net` is null or a live handle.
 */
size_t ra_network_hidden_size(const struct RaNetwork *net);

/**
 * Serializes a network to its weights-file JSON.
 *
 * # Safety
 * `net` is a live handle and `out` is writable.
 */
enum RaStatus ra_network_to_json(const struct RaNetwork *net, char **out);

/**
 * Runs a word given as whitespace-separated symbols. Writes the verdict to
 * `accept` and, if `output` is not null, the final output as a string.
 *
 * # Safety
 * `net` is a live handle, `word` a NUL-terminated string, `accept`
 * writable, and `output` null or writable.
 */
enum RaStatus ra_network_run(const struct RaNetwork *net,
                             const char *word,
                             bool *accept,
                             char **output);

/**
 * Per-step trace table followed by the verdict line, as printed by the
 * `trace` command.
 *
 * # Safety
 * `net` is a live handle, `word` a NUL-terminated string and `out`
 * writable.
 */
enum RaStatus ra_network_trace(const struct RaNetwork *net, const char *word, char **out);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` is null or a string returned through an out-parameter of this
 * library and not yet freed.
 */
void ra_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RNN_AUTOMATA_H */
