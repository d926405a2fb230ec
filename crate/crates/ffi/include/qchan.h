#ifndef QCHAN_H
#define QCHAN_H

/* Generated by cbindgen from the qchan-ffi crate; regenerate with cargo build, do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Call outcome. Zero is success; anything else leaves a human-readable
 * explanation in [`qchan_last_error_message`].
 */
typedef enum QchanStatus {
  QCHAN_STATUS_OK = 0,
  QCHAN_STATUS_NULL_ARGUMENT = 1,
  QCHAN_STATUS_PARSE_ERROR = 2,
  QCHAN_STATUS_VALIDATION_ERROR = 3,
  QCHAN_STATUS_DIMENSION_MISMATCH = 4,
  QCHAN_STATUS_INVALID_PARAMETER = 5,
  QCHAN_STATUS_NUMERICAL_ERROR = 6,
} QchanStatus;

/**
 * Opaque channel handle; build one with a constructor or
 * [`qchan_channel_from_json`], release it with [`qchan_channel_free`].
 */
typedef struct QchanChannel QchanChannel;

/**
 * Every similarity and distance measure between two channels, evaluated on
 * their Jamiołkowski states.
 */
typedef struct QchanMetricReport {
  /**
   * Fidelity F, clamped to [0, 1].
   */
  double fidelity;
  /**
   * Superfidelity G ≥ F, clamped to [0, 1].
   */
  double superfidelity;
  /**
   * Trace distance ½·tr|ρ−σ|.
   */
  double trace_distance;
  /**
   * √(2 − 2√F).
   */
  double bures_bf;
  /**
   * √(1 − F).
   */
  double root_infidelity_cf;
  /**
   * √(1 − G); a metric.
   */
  double root_superinfidelity_cg;
  /**
   * arccos(G); a metric.
   */
  double angle_ag2;
  /**
   * √(2 − 2√G); NOT a metric, diagnostic only.
   */
  double bures_bg;
  /**
   * Fidelity before clamping.
   */
  double raw_fidelity;
  /**
   * Superfidelity before clamping.
   */
  double raw_superfidelity;
} QchanMetricReport;

/**
 * Outcome of the three-stage interference estimate of the superfidelity.
 */
typedef struct QchanEstimateReport {
  double superfidelity_estimate;
  double superfidelity_exact;
  double overlap_estimate;
  double overlap_exact;
  double purity_a_estimate;
  double purity_a_exact;
  double purity_b_estimate;
  double purity_b_exact;
  double overlap_stderr;
  double purity_a_stderr;
  double purity_b_stderr;
  uint64_t overlap_shots;
  uint64_t purity_a_shots;
  uint64_t purity_b_shots;
} QchanEstimateReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string; never freed.
 */
const char *qchan_version(void);

/**
 * Static one-line description of a status code; never freed.
 */
const char *qchan_status_message(enum QchanStatus status);

/**
 * Detail of the most recent failure on this thread, or null when the last
 * call succeeded. The caller owns the string: release it with
 * [`qchan_string_free`].
 */
char *qchan_last_error_message(void);

/**
 * Releases a string returned by this library. Null is a no-op.
 */
void qchan_string_free(char *s);

/**
 * Parses a channel from its JSON description (Kraus, Choi, superoperator,
 * affine, or named family form).
 */
enum QchanStatus qchan_channel_from_json(const char *json, struct QchanChannel **out);

/**
 * Serializes a channel to JSON in its stored representation.
 */
enum QchanStatus qchan_channel_to_json(const struct QchanChannel *ch, char **out);

/**
 * Releases a channel handle. Null is a no-op.
 */
void qchan_channel_free(struct QchanChannel *ch);

/**
 * The dimension the channel acts on, or 0 for a null handle.
 */
size_t qchan_channel_dim(const struct QchanChannel *ch);

/**
 * Checks the channel is CP-TP within tolerance; the failure message carries
 * the defect magnitudes.
 */
enum QchanStatus qchan_channel_validate(const struct QchanChannel *ch);

/**
 * The identity channel on `dim`-dimensional states.
 */
enum QchanStatus qchan_channel_identity(size_t dim, struct QchanChannel **out);

/**
 * Depolarizing channel `ρ ↦ p·ρ + (1−p)·I/d` for `p ∈ [−1/(d²−1), 1]`.
 */
enum QchanStatus qchan_channel_depolarizing(size_t dim, double p, struct QchanChannel **out);

/**
 * Werner–Holevo channel `ρ ↦ p·ρᵀ + (1−p)·I/d` for `p ∈ [−1/(d−1), 1/(d+1)]`.
 */
enum QchanStatus qchan_channel_werner_holevo(size_t dim, double p, struct QchanChannel **out);

/**
 * Qubit dephasing channel scaling the off-diagonal element by `f`, `|f| ≤ 1`.
 */
enum QchanStatus qchan_channel_dephasing_qubit(double f_re, double f_im, struct QchanChannel **out);

/**
 * A CP-TP channel drawn from the Ginibre-based ensemble, deterministic in
 * the seed.
 */
enum QchanStatus qchan_channel_random(uint64_t seed, size_t dim, struct QchanChannel **out);

/**
 * The composition applying `earlier` first and `later` second.
 */
enum QchanStatus qchan_channel_compose(const struct QchanChannel *later,
                                       const struct QchanChannel *earlier,
                                       struct QchanChannel **out);

/**
 * The tensor product channel acting factor-wise.
 */
enum QchanStatus qchan_channel_tensor(const struct QchanChannel *a,
                                      const struct QchanChannel *b,
                                      struct QchanChannel **out);

/**
 * Computes every metric between two channels after validating both.
 */
enum QchanStatus qchan_process_metrics(const struct QchanChannel *a,
                                       const struct QchanChannel *b,
                                       struct QchanMetricReport *out);

/**
 * Exact control-zero probability `(1 + tr(ρ_a ρ_b))/2` of the interference
 * stage.
 */
enum QchanStatus qchan_exact_p0(const struct QchanChannel *a,
                                const struct QchanChannel *b,
                                double *out);

/**
 * Superfidelity estimate from the three-stage interference experiment with
 * `shots` measurements per stage, deterministic in the seed. `shots = 0`
 * reproduces the exact values.
 */
enum QchanStatus qchan_estimate_superfidelity(const struct QchanChannel *a,
                                              const struct QchanChannel *b,
                                              uint64_t shots,
                                              uint64_t seed,
                                              struct QchanEstimateReport *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QCHAN_H */
