#ifndef VCWARP_H
#define VCWARP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of a fallible call.
typedef enum VcwStatus {
  VCW_STATUS_OK = 0,
  // Null pointer, bad UTF-8, out-of-range value or mismatched inputs.
  VCW_STATUS_INVALID_ARGUMENT = 1,
  // The file system refused a read or write.
  VCW_STATUS_IO = 2,
  // A file was readable but not a valid WAV, feature file or warp JSON.
  VCW_STATUS_FORMAT = 3,
  // The inputs produced a degenerate or non-finite computation.
  VCW_STATUS_NUMERICAL = 4,
  // The library panicked; this is a bug.
  VCW_STATUS_PANIC = 5,
} VcwStatus;

// Warp-learning mode.
typedef enum VcwMode {
  VCW_MODE_SCALAR = 0,
  VCW_MODE_PER_BAND = 1,
} VcwMode;

// Opaque learned warp.
typedef struct VcwWarpModel VcwWarpModel;

// Opaque mono waveform.
typedef struct VcwWaveform VcwWaveform;

// Evaluation summary filled in by `vcw_evaluate`.
typedef struct VcwEvalReport {
  double mcd_db;
  double f0_rmse_norm;
  size_t n_aligned_frames;
  size_t n_covoiced_frames;
  // Non-zero when no aligned frame pair was voiced on both sides.
  uint8_t f0_degenerate;
  double dtw_cost;
} VcwEvalReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Description of the last failed call on this thread, or an empty string.
// The pointer stays valid until the next `vcw_*` call on the same thread.
const char *vcw_last_error(void);

// Library version as a static NUL-terminated string.
const char *vcw_version(void);

// Reads a mono 16-bit PCM or 32-bit float WAV file.
//
// # Safety
// `path` must be a NUL-terminated string; `out` must be writable.
enum VcwStatus vcw_waveform_read(const char *path, struct VcwWaveform **out);

// Copies `len` samples into a new waveform.
//
// # Safety
// `samples` must point to `len` readable doubles; `out` must be writable.
enum VcwStatus vcw_waveform_from_samples(const double *samples,
                                         size_t len,
                                         uint32_t sample_rate_hz,
                                         struct VcwWaveform **out);

// Writes the waveform as 16-bit PCM.
//
// # Safety
// `w` must be a live handle and `path` a NUL-terminated string.
enum VcwStatus vcw_waveform_write(const struct VcwWaveform *w, const char *path);

// Number of samples, or 0 for a null handle.
//
// # Safety
// `w` must be null or a live handle.
size_t vcw_waveform_len(const struct VcwWaveform *w);

// Sample rate in Hz, or 0 for a null handle.
//
// # Safety
// `w` must be null or a live handle.
uint32_t vcw_waveform_sample_rate(const struct VcwWaveform *w);

// Copies up to `capacity` samples into `dst`; returns the number copied.
//
// # Safety
// `w` must be null or a live handle; `dst` must have room for `capacity`
// doubles.
size_t vcw_waveform_copy_samples(const struct VcwWaveform *w, double *dst, size_t capacity);

// Releases a waveform. Null is ignored.
//
// # Safety
// `w` must be null or a handle not yet freed.
void vcw_waveform_free(struct VcwWaveform *w);

// Learns a warp from converted towards reference speech with the
// `warp80` analysis (both signals are resampled to 16 kHz).
//
// # Safety
// `conv` and `reference` must be live handles; `out` must be writable.
enum VcwStatus vcw_learn_warp(const struct VcwWaveform *conv,
                              const struct VcwWaveform *reference,
                              enum VcwMode mode,
                              struct VcwWarpModel **out);

// Loads a warp model from its JSON file.
//
// # Safety
// `path` must be a NUL-terminated string; `out` must be writable.
enum VcwStatus vcw_warp_model_load(const char *path, struct VcwWarpModel **out);

// Saves a warp model as JSON.
//
// # Safety
// `model` must be a live handle and `path` a NUL-terminated string.
enum VcwStatus vcw_warp_model_save(const struct VcwWarpModel *model, const char *path);

// Number of warp factors: 1 for a scalar model, one per coefficient
// otherwise; 0 for a null handle.
//
// # Safety
// `model` must be null or a live handle.
size_t vcw_warp_model_alpha_count(const struct VcwWarpModel *model);

// Warp factor acting on coefficient `band` (any band for scalar models).
//
// # Safety
// `model` must be a live handle; `out` must be writable.
enum VcwStatus vcw_warp_model_alpha(const struct VcwWarpModel *model, size_t band, double *out);

// Releases a warp model. Null is ignored.
//
// # Safety
// `model` must be null or a handle not yet freed.
void vcw_warp_model_free(struct VcwWarpModel *model);

// Applies a warp and resynthesises with `gl_iters` Griffin-Lim iterations
// from zero phase, keeping the excitation fine structure.
//
// # Safety
// `model` and `input` must be live handles; `out` must be writable.
enum VcwStatus vcw_apply_warp(const struct VcwWarpModel *model,
                              const struct VcwWaveform *input,
                              size_t gl_iters,
                              struct VcwWaveform **out);

// MCD and normalised F0 RMSE with the `mcd36` analysis.
//
// # Safety
// `conv` and `reference` must be live handles; `out` must be writable.
enum VcwStatus vcw_evaluate(const struct VcwWaveform *conv,
                            const struct VcwWaveform *reference,
                            struct VcwEvalReport *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* VCWARP_H */
