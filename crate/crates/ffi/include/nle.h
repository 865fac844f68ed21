#ifndef NLE_H
#define NLE_H

/* Generated by cbindgen from crates/ffi/src. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum NleStatus {
  NLE_STATUS_OK = 0,
  NLE_STATUS_NULL_POINTER = 1,
  NLE_STATUS_INVALID_ARGUMENT = 2,
  NLE_STATUS_DIMENSION_MISMATCH = 3,
  NLE_STATUS_INSUFFICIENT_SAMPLES = 4,
  NLE_STATUS_INFEASIBLE = 5,
  NLE_STATUS_INTERNAL = 6,
} NleStatus;

// Opaque enhancer handle.
typedef struct NleEnhancer NleEnhancer;

// Plain-data mirror of the core configuration. Obtain defaults from
// `nle_settings_default` and override fields as needed.
typedef struct NleSettings {
  double target_asii;
  double max_band_power_dbspl;
  double reference_level_dbspl;
  double f_lo_hz;
  double f_hi_hz;
  uint32_t num_bands;
  uint32_t sample_rate;
  uint32_t window_length;
  uint32_t hop;
  uint32_t fft_size;
} NleSettings;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Defaults: A* = 0.7, 30 ERB bands over 150-8000 Hz, 512-sample Hann
// window with hop 256 at 16 kHz, 100 dB SPL band cap.
struct NleSettings nle_settings_default(void);

// Creates an enhancer. `*out` receives the handle, or null on failure.
//
// # Safety
// `settings` must be null or point to a valid `NleSettings`; `out` must be
// null or writable.
enum NleStatus nle_enhancer_new(const struct NleSettings *settings, struct NleEnhancer **out);

// Releases a handle. Null is ignored.
//
// # Safety
// `handle` must come from `nle_enhancer_new` and not be used afterwards.
void nle_enhancer_free(struct NleEnhancer *handle);

// Number of one-sided STFT bins, i.e. the length of gain vectors.
//
// # Safety
// `handle` must be null or a live handle.
uintptr_t nle_enhancer_num_bins(const struct NleEnhancer *handle);

// # Safety
// `handle` must be null or a live handle.
uintptr_t nle_enhancer_num_bands(const struct NleEnhancer *handle);

// Changes the target intelligibility A*.
//
// # Safety
// `handle` must be null or a live handle.
enum NleStatus nle_enhancer_set_target(struct NleEnhancer *handle, double target_asii);

// Replaces the band importance table with `len` values (`len` must equal
// the band count). Passing null restores uniform importance.
//
// # Safety
// `handle` must be null or a live handle; `importance` must be null or
// point to `len` readable doubles.
enum NleStatus nle_enhancer_set_band_importance(struct NleEnhancer *handle,
                                                const double *importance,
                                                uintptr_t len);

// Gain rule on long-term per-bin powers (mean-square units), writing one
// gain per bin into `gains_out`. All arrays have `num_bins` entries.
//
// # Safety
// Pointers must be null or valid for `num_bins` doubles.
enum NleStatus nle_enhancer_gains_from_powers(const struct NleEnhancer *handle,
                                              const double *speech_bin_power,
                                              const double *noise_bin_power,
                                              uintptr_t num_bins,
                                              double *gains_out);

// Computes per-bin gains from time-domain speech and noise of equal length
// `len`. `gains_out` must hold `gains_len == nle_enhancer_num_bins()` values.
//
// # Safety
// Pointers must be null or valid for the stated lengths.
enum NleStatus nle_enhancer_bin_gains(const struct NleEnhancer *handle,
                                      const double *speech,
                                      const double *noise,
                                      uintptr_t len,
                                      double *gains_out,
                                      uintptr_t gains_len);

// Processes `len` samples of clean speech for playback into `noise` and
// writes `len` processed samples to `out`.
//
// # Safety
// Pointers must be null or valid for `len` doubles; `out` may not alias the
// inputs.
enum NleStatus nle_enhancer_process(const struct NleEnhancer *handle,
                                    const double *speech,
                                    const double *noise,
                                    uintptr_t len,
                                    double *out);

// Copies the calling thread's last error message into `buf` (NUL
// terminated, truncated to `buf_len`). Returns the full message length
// excluding the terminator, or 0 when there is no error.
//
// # Safety
// `buf` must be null or writable for `buf_len` bytes.
uintptr_t nle_last_error(char *buf, uintptr_t buf_len);

// Static description of a status code.
const char *nle_status_string(enum NleStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NLE_H */
