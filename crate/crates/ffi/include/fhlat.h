/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#ifndef FHLAT_H
#define FHLAT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FhlStatus {
  FHL_STATUS_OK = 0,
  FHL_STATUS_NULL_POINTER = 1,
  FHL_STATUS_INVALID_ARGUMENT = 2,
  FHL_STATUS_UNSTABLE = 3,
  FHL_STATUS_CONFIG = 4,
  FHL_STATUS_UNREACHABLE = 5,
  FHL_STATUS_IO = 6,
  FHL_STATUS_OUT_OF_RANGE = 7,
  FHL_STATUS_PANIC = 8,
} FhlStatus;

typedef enum FhlBound {
  FHL_BOUND_LOWER = 0,
  FHL_BOUND_UPPER = 1,
} FhlBound;

typedef enum FhlCurveKind {
  FHL_CURVE_KIND_ANALYTIC_LOWER = 0,
  FHL_CURVE_KIND_ANALYTIC_UPPER = 1,
  FHL_CURVE_KIND_EMPIRICAL = 2,
} FhlCurveKind;

typedef struct FhlCurve FhlCurve;

typedef struct FhlExperiment FhlExperiment;

typedef struct FhlSimulation FhlSimulation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failed call on this thread. The pointer stays valid
 until the next failing call on the same thread; never free it.
 */
const char *fhl_last_error(void);

/*
 `P{T > tau}` for the M/M/1 sojourn time.

 # Safety
 `result` must be valid for writes.
 */
enum FhlStatus fhl_mm1_sojourn_tail(double arrival_rate,
                                    double service_rate,
                                    double tau,
                                    double *result);

/*
 Fork-join delay tail bound at `tau` for `(n, k)` coding over paths of
 `path_capacity_bps`, packets of `packet_size_bits` arriving at
 `arrival_rate`. `eps_trunc` only affects the upper bound.

 # Safety
 `result` must be valid for writes.
 */
enum FhlStatus fhl_bound_tail(enum FhlBound which,
                              size_t n,
                              size_t k,
                              double packet_size_bits,
                              double path_capacity_bps,
                              double arrival_rate,
                              double tau,
                              double eps_trunc,
                              double *result);

/*
 Bound curve on the `grid_len` latencies of `grid`.

 # Safety
 `grid` must point to `grid_len` doubles and `curve` must be valid for writes.
 */
enum FhlStatus fhl_bound_curve_new(enum FhlBound which,
                                   size_t n,
                                   size_t k,
                                   double packet_size_bits,
                                   double path_capacity_bps,
                                   double arrival_rate,
                                   const double *grid,
                                   size_t grid_len,
                                   double eps_trunc,
                                   struct FhlCurve **curve);

/*
 Reads a curve file written by `fhlat` (CSV or JSON).

 # Safety
 `path` must be a NUL-terminated string and `curve` valid for writes.
 */
enum FhlStatus fhl_curve_load(const char *path, struct FhlCurve **curve);

/*
 Writes the curve as CSV.

 # Safety
 `curve` must come from this library and `path` be NUL-terminated.
 */
enum FhlStatus fhl_curve_save_csv(const struct FhlCurve *curve, const char *path);

/*
 Number of grid points; 0 for a null handle.

 # Safety
 `curve` must be null or come from this library.
 */
size_t fhl_curve_len(const struct FhlCurve *curve);

/*
 # Safety
 `curve` must come from this library and `kind` be valid for writes.
 */
enum FhlStatus fhl_curve_kind(const struct FhlCurve *curve, enum FhlCurveKind *kind);

/*
 Point `index` of the curve. `ci_half_width` receives NaN for analytic
 curves; any of the out pointers may be null.

 # Safety
 `curve` must come from this library; non-null out pointers must be valid.
 */
enum FhlStatus fhl_curve_point(const struct FhlCurve *curve,
                               size_t index,
                               double *tau,
                               double *tail,
                               double *ci_half_width);

/*
 Smallest latency at which the curve's tail is at most `1 - reliability`.
 Returns `FHL_STATUS_UNREACHABLE` if the curve never gets there.

 # Safety
 `curve` must come from this library and `latency` be valid for writes.
 */
enum FhlStatus fhl_curve_achievable_latency(const struct FhlCurve *curve,
                                            double reliability,
                                            double *latency);

/*
 # Safety
 `curve` must be null or come from this library, and not be used afterwards.
 */
void fhl_curve_free(struct FhlCurve *curve);

/*
 Loads and validates an experiment config (or the config embedded in
 an output file).

 # Safety
 `path` must be NUL-terminated and `experiment` valid for writes.
 */
enum FhlStatus fhl_experiment_load(const char *path, struct FhlExperiment **experiment);

/*
 # Safety
 `experiment` must be null or come from this library.
 */
size_t fhl_experiment_class_count(const struct FhlExperiment *experiment);

/*
 Bound curve of class `class_index` on the experiment's grid.

 # Safety
 `experiment` must come from this library and `curve` be valid for writes.
 */
enum FhlStatus fhl_experiment_bound_curve(const struct FhlExperiment *experiment,
                                          size_t class_index,
                                          enum FhlBound which,
                                          struct FhlCurve **curve);

/*
 Runs every replication of the experiment.

 # Safety
 `experiment` must come from this library and `simulation` be valid for writes.
 */
enum FhlStatus fhl_experiment_simulate(const struct FhlExperiment *experiment,
                                       struct FhlSimulation **simulation);

/*
 # Safety
 `experiment` must be null or come from this library, and not be used afterwards.
 */
void fhl_experiment_free(struct FhlExperiment *experiment);

/*
 Pooled empirical curve of class `class_index`, as a new handle.

 # Safety
 `simulation` must come from this library and `curve` be valid for writes.
 */
enum FhlStatus fhl_simulation_curve(const struct FhlSimulation *simulation,
                                    size_t class_index,
                                    struct FhlCurve **curve);

/*
 Mean packet delay of class `class_index` and its batch-means standard error.

 # Safety
 `simulation` must come from this library; out pointers must be valid.
 */
enum FhlStatus fhl_simulation_mean_delay(const struct FhlSimulation *simulation,
                                         size_t class_index,
                                         double *mean,
                                         double *stderr);

/*
 # Safety
 `simulation` must be null or come from this library, and not be used afterwards.
 */
void fhl_simulation_free(struct FhlSimulation *simulation);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FHLAT_H */
