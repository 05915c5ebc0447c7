#ifndef NEGTYPE_H
#define NEGTYPE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes. Values 1 through 6 match the exit codes of the
// command-line tool.
typedef enum NtStatus {
  NT_STATUS_OK = 0,
  NT_STATUS_FAILURE = 1,
  NT_STATUS_PARSE_ERROR = 2,
  NT_STATUS_NOT_A_METRIC = 3,
  NT_STATUS_POSITIVE_DIRECTION_MISSING = 4,
  NT_STATUS_TOO_LARGE = 5,
  NT_STATUS_ORACLE_MISMATCH = 6,
  NT_STATUS_NULL_POINTER = 7,
  NT_STATUS_INVALID_ARGUMENT = 8,
  // The requested value does not exist for this input, e.g. `Γ` of a
  // space that is not of negative type.
  NT_STATUS_NO_VALUE = 9,
  NT_STATUS_BUFFER_TOO_SMALL = 10,
  NT_STATUS_PANIC = 11,
} NtStatus;

typedef enum NtMethod {
  NT_METHOD_ALL = 0,
  NT_METHOD_ENUMERATE = 1,
  NT_METHOD_OPNORM = 2,
  NT_METHOD_BINARY = 3,
} NtMethod;

typedef enum NtVerdict {
  NT_VERDICT_NOT_NEGATIVE_TYPE = 0,
  NT_VERDICT_NEGATIVE_TYPE_NON_STRICT = 1,
  NT_VERDICT_STRICT_NEGATIVE_TYPE = 2,
} NtVerdict;

// Classification and, for strict inputs, the gap.
typedef struct NtAnalysis NtAnalysis;

// A validated finite metric space.
typedef struct NtMetric NtMetric;

typedef struct NtGapOptions {
  enum NtMethod method;
  // Largest size for exhaustive enumeration.
  size_t max_n;
  bool parallel;
  // Use branch-and-bound above `max_n`.
  bool bnb;
  uint64_t bnb_budget;
  double singular_tol;
  double eig_tol;
  double strict_tol;
} NtGapOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null. The pointer
// stays valid until the next call into the library on the same thread.
const char *nt_last_error(void);

// Library version as a static NUL-terminated string.
const char *nt_version(void);

// Builds a metric space from a row-major `n × n` distance matrix.
//
// # Safety
// `distances` must point to `n * n` readable doubles and `out` must be
// writable.
enum NtStatus nt_metric_from_matrix(const double *distances, size_t n, struct NtMetric **out);

// Builds the shortest-path metric of a connected weighted graph on `n`
// vertices with `m` edges `(from[k], to[k], weight[k])`.
//
// # Safety
// `from`, `to` and `weight` must each point to `m` readable elements and
// `out` must be writable.
enum NtStatus nt_metric_from_edges(size_t n,
                                   const size_t *from,
                                   const size_t *to,
                                   const double *weight,
                                   size_t m,
                                   struct NtMetric **out);

// The discrete metric space on `n` points.
//
// # Safety
// `out` must be writable.
enum NtStatus nt_metric_discrete(size_t n, struct NtMetric **out);

// The unit-weight cycle on `n` vertices.
//
// # Safety
// `out` must be writable.
enum NtStatus nt_metric_cycle(size_t n, struct NtMetric **out);

// A seeded random weighted tree on `n` vertices with weights drawn
// uniformly from `[weight_min, weight_max]`.
//
// # Safety
// `out` must be writable.
enum NtStatus nt_metric_random_tree(size_t n,
                                    double weight_min,
                                    double weight_max,
                                    uint64_t seed,
                                    struct NtMetric **out);

// Number of distinct points; zero for a null handle.
//
// # Safety
// `metric` must be null or a live handle.
size_t nt_metric_len(const struct NtMetric *metric);

// Distance between points `i` and `j`.
//
// # Safety
// `metric` must be a live handle and `out` writable.
enum NtStatus nt_metric_distance(const struct NtMetric *metric, size_t i, size_t j, double *out);

// # Safety
// `metric` must be null or a handle not yet freed.
void nt_metric_free(struct NtMetric *metric);

// Default options: all three formulas, enumeration up to n = 24 in
// parallel, no branch-and-bound.
struct NtGapOptions nt_gap_options_default(void);

// Classifies `metric` at exponent `p` and computes the gap for strict
// inputs. `options` may be null for the defaults.
//
// # Safety
// `metric` must be a live handle, `options` null or readable, `out`
// writable.
enum NtStatus nt_analyze(const struct NtMetric *metric,
                         double p,
                         const struct NtGapOptions *options,
                         struct NtAnalysis **out);

// # Safety
// `analysis` must be null or a handle not yet freed.
void nt_analysis_free(struct NtAnalysis *analysis);

// # Safety
// `analysis` must be a live handle and `out` writable.
enum NtStatus nt_analysis_verdict(const struct NtAnalysis *analysis, enum NtVerdict *out);

// `Γ`; zero for non-strict inputs, [`NtStatus::NoValue`] when the space is
// not of negative type.
//
// # Safety
// `analysis` must be a live handle and `out` writable.
enum NtStatus nt_analysis_gamma(const struct NtAnalysis *analysis, double *out);

// `β = 2/Γ`, strict inputs only.
//
// # Safety
// `analysis` must be a live handle and `out` writable.
enum NtStatus nt_analysis_beta(const struct NtAnalysis *analysis, double *out);

// False when branch-and-bound ran out of budget and `β` is a lower bound.
//
// # Safety
// `analysis` must be a live handle and `out` writable.
enum NtStatus nt_analysis_certified(const struct NtAnalysis *analysis, bool *out);

// Copies the maximizing sign vector (entries ±1, first entry +1) into
// `buf`, which must hold at least `len` = number of points entries.
//
// # Safety
// `analysis` must be a live handle and `buf` must point to `len` writable
// bytes.
enum NtStatus nt_analysis_sign_vector(const struct NtAnalysis *analysis, int8_t *buf, size_t len);

// Copies the extremal vector `y₀` (with `‖y₀‖₁ = β`) into `buf`.
//
// # Safety
// `analysis` must be a live handle and `buf` must point to `len` writable
// doubles.
enum NtStatus nt_analysis_witness(const struct NtAnalysis *analysis, double *buf, size_t len);

// Closed-form `Γ` of the discrete space on `n` points.
//
// # Safety
// `out` must be writable.
enum NtStatus nt_closed_form_gamma_discrete(size_t n, double *out);

// Closed-form `Γ` of the unit-weight cycle on `n` vertices.
//
// # Safety
// `out` must be writable.
enum NtStatus nt_closed_form_gamma_cycle(size_t n, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NEGTYPE_H */
