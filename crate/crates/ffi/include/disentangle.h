#ifndef DISENTANGLE_H
#define DISENTANGLE_H

/* Generated by cbindgen. Do not edit. */

#include <stddef.h>
#include <stdint.h>

// Result of every call. Values match the command-line exit codes where
// they overlap.
typedef enum DsnStatus {
  DSN_STATUS_OK = 0,
  DSN_STATUS_ERROR = 1,
  DSN_STATUS_INVALID_ARGUMENT = 2,
  DSN_STATUS_EXCLUSION_UNSATISFIABLE = 3,
  DSN_STATUS_INCONSISTENT = 4,
  DSN_STATUS_PANIC = 5,
} DsnStatus;

// A causal network.
typedef struct DsnNet DsnNet;

// A set of intervention tuples tied to the network it was parsed against.
typedef struct DsnTuples DsnTuples;

// Message for the last failed call on this thread; empty after a success.
// Valid until the next call on the same thread.
const char *dsn_last_error(void);

// Library version as a static string.
const char *dsn_version(void);

// Parses a network document into `*out`.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer.
enum DsnStatus dsn_net_from_json(const char *json, struct DsnNet **out);

// Number of nodes, or 0 for a null handle.
//
// # Safety
// `net` must be null or a handle from [`dsn_net_from_json`].
uintptr_t dsn_net_node_count(const struct DsnNet *net);

// # Safety
// `net` must be null or a handle from [`dsn_net_from_json`] not yet freed.
void dsn_net_free(struct DsnNet *net);

// Parses a tuple-set document, checking targets against `net`.
//
// # Safety
// Pointers must be valid; `json` NUL-terminated.
enum DsnStatus dsn_tuples_from_json(const struct DsnNet *net,
                                    const char *json,
                                    struct DsnTuples **out);

// Number of tuples, or 0 for a null handle.
//
// # Safety
// `tuples` must be null or a live handle.
uintptr_t dsn_tuples_len(const struct DsnTuples *tuples);

// Serializes a tuple set; release the string with [`dsn_string_free`].
//
// # Safety
// `tuples` must be a live handle and `out` a valid pointer.
enum DsnStatus dsn_tuples_to_json(const struct DsnTuples *tuples, char **out);

// # Safety
// `tuples` must be null or a live handle.
void dsn_tuples_free(struct DsnTuples *tuples);

// Exact recovery of `tuples` from the mixture it generates on `net`; writes
// the report JSON to `*report`.
//
// # Safety
// Handles must be live and `report` a valid pointer.
enum DsnStatus dsn_disentangle_oracle(const struct DsnNet *net,
                                      const struct DsnTuples *tuples,
                                      char **report);

// Finite-sample recovery. `obs_csv` and `mix_csv` hold observational and
// mixture samples with a header row of node labels; only the graph of
// `net` is used.
//
// # Safety
// `net` must be live, the CSV arguments NUL-terminated, `report` valid.
enum DsnStatus dsn_disentangle_finite(const struct DsnNet *net,
                                      const char *obs_csv,
                                      const char *mix_csv,
                                      double epsilon,
                                      double delta,
                                      char **report);

// Draws `samples` rows as CSV: from the mixture of `tuples` when non-null,
// otherwise from `net` itself.
//
// # Safety
// `net` must be live, `tuples` null or live, `csv` valid.
enum DsnStatus dsn_sample(const struct DsnNet *net,
                          const struct DsnTuples *tuples,
                          uint64_t seed,
                          uintptr_t samples,
                          char **csv);

// Releases a string returned by this library.
//
// # Safety
// `s` must be null or a string from this library not yet freed.
void dsn_string_free(char *s);

#endif  /* DISENTANGLE_H */
