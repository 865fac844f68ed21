//! C ABI for the minimum-processing near-end listening enhancer.
//!
//! An `NleEnhancer` handle owns the analysis setup (STFT, filterbank and gain
//! rule settings). Every entry point returns an `NleStatus`; on failure the
//! message is kept per thread and can be read with `nle_last_error`.
//! Buffers are caller-owned `double` arrays.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use nle_core::gain::plan_from_bin_powers;
use nle_core::harness::Pipeline;
use nle_core::{Error, NleConfig, TimeSignal};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NleStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    InsufficientSamples = 4,
    Infeasible = 5,
    Internal = 6,
}

/// Plain-data mirror of the core configuration. Obtain defaults from
/// `nle_settings_default` and override fields as needed.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct NleSettings {
    pub target_asii: f64,
    pub max_band_power_dbspl: f64,
    pub reference_level_dbspl: f64,
    pub f_lo_hz: f64,
    pub f_hi_hz: f64,
    pub num_bands: u32,
    pub sample_rate: u32,
    pub window_length: u32,
    pub hop: u32,
    pub fft_size: u32,
}

impl From<&NleSettings> for NleConfig {
    fn from(s: &NleSettings) -> Self {
        NleConfig {
            target_asii: s.target_asii,
            band_importance: None,
            max_band_power_dbspl: s.max_band_power_dbspl,
            reference_level_dbspl: s.reference_level_dbspl,
            num_bands: s.num_bands as usize,
            f_lo_hz: s.f_lo_hz,
            f_hi_hz: s.f_hi_hz,
            sample_rate: s.sample_rate,
            window_length: s.window_length as usize,
            hop: s.hop as usize,
            fft_size: s.fft_size as usize,
        }
    }
}

/// Opaque enhancer handle.
pub struct NleEnhancer {
    pipeline: Pipeline,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(err: &Error) -> NleStatus {
    match err {
        Error::DimensionMismatch { .. } | Error::LengthMismatch { .. } => NleStatus::DimensionMismatch,
        Error::InsufficientSamples { .. } | Error::EmptySpectrogram => NleStatus::InsufficientSamples,
        Error::InfeasibleTarget { .. } | Error::InfeasibleInstance(_) | Error::SilentSignal => NleStatus::Infeasible,
        Error::InvalidParams(_)
        | Error::InvalidRange(_)
        | Error::InvalidConfig(_)
        | Error::NegativeGain { .. }
        | Error::WrongSampleRate(_)
        | Error::UnsupportedFormat(_) => NleStatus::InvalidArgument,
        _ => NleStatus::Internal,
    }
}

/// Runs `f`, translating errors and panics into status codes.
fn guard<F>(f: F) -> NleStatus
where
    F: FnOnce() -> Result<(), (NleStatus, String)>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => NleStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside nle".into());
            NleStatus::Internal
        }
    }
}

fn core_err(err: Error) -> (NleStatus, String) {
    (status_of(&err), err.to_string())
}

fn null(what: &str) -> (NleStatus, String) {
    (NleStatus::NullPointer, format!("{what} is null"))
}

unsafe fn slice<'a>(ptr: *const f64, len: usize, what: &str) -> Result<&'a [f64], (NleStatus, String)> {
    if ptr.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(ptr, len))
}

unsafe fn slice_mut<'a>(ptr: *mut f64, len: usize, what: &str) -> Result<&'a mut [f64], (NleStatus, String)> {
    if ptr.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts_mut(ptr, len))
}

unsafe fn enhancer<'a>(handle: *const NleEnhancer) -> Result<&'a NleEnhancer, (NleStatus, String)> {
    handle.as_ref().ok_or_else(|| null("enhancer"))
}

/// Defaults: A* = 0.7, 30 ERB bands over 150-8000 Hz, 512-sample Hann
/// window with hop 256 at 16 kHz, 100 dB SPL band cap.
#[no_mangle]
pub extern "C" fn nle_settings_default() -> NleSettings {
    let c = NleConfig::default();
    NleSettings {
        target_asii: c.target_asii,
        max_band_power_dbspl: c.max_band_power_dbspl,
        reference_level_dbspl: c.reference_level_dbspl,
        f_lo_hz: c.f_lo_hz,
        f_hi_hz: c.f_hi_hz,
        num_bands: c.num_bands as u32,
        sample_rate: c.sample_rate,
        window_length: c.window_length as u32,
        hop: c.hop as u32,
        fft_size: c.fft_size as u32,
    }
}

/// Creates an enhancer. `*out` receives the handle, or null on failure.
///
/// # Safety
/// `settings` must be null or point to a valid `NleSettings`; `out` must be
/// null or writable.
#[no_mangle]
pub unsafe extern "C" fn nle_enhancer_new(settings: *const NleSettings, out: *mut *mut NleEnhancer) -> NleStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = std::ptr::null_mut();
        let settings = settings.as_ref().ok_or_else(|| null("settings"))?;
        let pipeline = Pipeline::new(NleConfig::from(settings)).map_err(core_err)?;
        *out = Box::into_raw(Box::new(NleEnhancer { pipeline }));
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `handle` must come from `nle_enhancer_new` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn nle_enhancer_free(handle: *mut NleEnhancer) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Number of one-sided STFT bins, i.e. the length of gain vectors.
///
/// # Safety
/// `handle` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nle_enhancer_num_bins(handle: *const NleEnhancer) -> usize {
    handle.as_ref().map_or(0, |h| h.pipeline.params.num_bins())
}

/// # Safety
/// `handle` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nle_enhancer_num_bands(handle: *const NleEnhancer) -> usize {
    handle.as_ref().map_or(0, |h| h.pipeline.weights.num_bands())
}

/// Changes the target intelligibility A*.
///
/// # Safety
/// `handle` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nle_enhancer_set_target(handle: *mut NleEnhancer, target_asii: f64) -> NleStatus {
    guard(|| {
        let h = handle.as_mut().ok_or_else(|| null("enhancer"))?;
        let config = h.pipeline.config.clone().with_target(target_asii);
        config.validate().map_err(core_err)?;
        h.pipeline.config = config;
        Ok(())
    })
}

/// Replaces the band importance table with `len` values (`len` must equal
/// the band count). Passing null restores uniform importance.
///
/// # Safety
/// `handle` must be null or a live handle; `importance` must be null or
/// point to `len` readable doubles.
#[no_mangle]
pub unsafe extern "C" fn nle_enhancer_set_band_importance(
    handle: *mut NleEnhancer,
    importance: *const f64,
    len: usize,
) -> NleStatus {
    guard(|| {
        let h = handle.as_mut().ok_or_else(|| null("enhancer"))?;
        let mut config = h.pipeline.config.clone();
        config.band_importance = if importance.is_null() {
            None
        } else {
            Some(slice(importance, len, "importance")?.to_vec())
        };
        config.validate().map_err(core_err)?;
        h.pipeline.config = config;
        Ok(())
    })
}

/// Gain rule on long-term per-bin powers (mean-square units), writing one
/// gain per bin into `gains_out`. All arrays have `num_bins` entries.
///
/// # Safety
/// Pointers must be null or valid for `num_bins` doubles.
#[no_mangle]
pub unsafe extern "C" fn nle_enhancer_gains_from_powers(
    handle: *const NleEnhancer,
    speech_bin_power: *const f64,
    noise_bin_power: *const f64,
    num_bins: usize,
    gains_out: *mut f64,
) -> NleStatus {
    guard(|| {
        let h = enhancer(handle)?;
        let speech = slice(speech_bin_power, num_bins, "speech_bin_power")?;
        let noise = slice(noise_bin_power, num_bins, "noise_bin_power")?;
        let out = slice_mut(gains_out, num_bins, "gains_out")?;
        let plan = plan_from_bin_powers(speech.to_vec(), noise.to_vec(), &h.pipeline.config, &h.pipeline.weights)
            .map_err(core_err)?;
        out.copy_from_slice(&plan.bin_gains);
        Ok(())
    })
}

/// Computes per-bin gains from time-domain speech and noise of equal length
/// `len`. `gains_out` must hold `gains_len == nle_enhancer_num_bins()` values.
///
/// # Safety
/// Pointers must be null or valid for the stated lengths.
#[no_mangle]
pub unsafe extern "C" fn nle_enhancer_bin_gains(
    handle: *const NleEnhancer,
    speech: *const f64,
    noise: *const f64,
    len: usize,
    gains_out: *mut f64,
    gains_len: usize,
) -> NleStatus {
    guard(|| {
        let h = enhancer(handle)?;
        let (plan, _) = enhance(h, speech, noise, len)?;
        if gains_len != plan.bin_gains.len() {
            return Err(core_err(Error::DimensionMismatch {
                context: "gains_out",
                expected: plan.bin_gains.len(),
                got: gains_len,
            }));
        }
        slice_mut(gains_out, gains_len, "gains_out")?.copy_from_slice(&plan.bin_gains);
        Ok(())
    })
}

/// Processes `len` samples of clean speech for playback into `noise` and
/// writes `len` processed samples to `out`.
///
/// # Safety
/// Pointers must be null or valid for `len` doubles; `out` may not alias the
/// inputs.
#[no_mangle]
pub unsafe extern "C" fn nle_enhancer_process(
    handle: *const NleEnhancer,
    speech: *const f64,
    noise: *const f64,
    len: usize,
    out: *mut f64,
) -> NleStatus {
    guard(|| {
        let h = enhancer(handle)?;
        let (_, processed) = enhance(h, speech, noise, len)?;
        slice_mut(out, len, "out")?.copy_from_slice(&processed.samples);
        Ok(())
    })
}

unsafe fn enhance(
    h: &NleEnhancer,
    speech: *const f64,
    noise: *const f64,
    len: usize,
) -> Result<(nle_core::GainPlan, TimeSignal), (NleStatus, String)> {
    let rate = h.pipeline.config.sample_rate;
    let speech = TimeSignal::new(slice(speech, len, "speech")?.to_vec(), rate);
    let noise = TimeSignal::new(slice(noise, len, "noise")?.to_vec(), rate);
    h.pipeline
        .enhance(&speech, &noise, &h.pipeline.config)
        .map_err(core_err)
}

/// Copies the calling thread's last error message into `buf` (NUL
/// terminated, truncated to `buf_len`). Returns the full message length
/// excluding the terminator, or 0 when there is no error.
///
/// # Safety
/// `buf` must be null or writable for `buf_len` bytes.
#[no_mangle]
pub unsafe extern "C" fn nle_last_error(buf: *mut c_char, buf_len: usize) -> usize {
    LAST_ERROR.with(|e| match e.borrow().as_ref() {
        None => 0,
        Some(msg) => {
            let bytes = msg.as_bytes();
            if !buf.is_null() && buf_len > 0 {
                let n = bytes.len().min(buf_len - 1);
                std::ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
                *buf.add(n) = 0;
            }
            bytes.len()
        }
    })
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn nle_status_string(status: NleStatus) -> *const c_char {
    let s: &'static [u8] = match status {
        NleStatus::Ok => b"ok\0",
        NleStatus::NullPointer => b"null pointer\0",
        NleStatus::InvalidArgument => b"invalid argument\0",
        NleStatus::DimensionMismatch => b"dimension mismatch\0",
        NleStatus::InsufficientSamples => b"insufficient samples\0",
        NleStatus::Infeasible => b"infeasible target\0",
        NleStatus::Internal => b"internal error\0",
    };
    s.as_ptr().cast()
}
