//! Windowed STFT analysis and weighted overlap-add synthesis.
//!
//! Frames start at sample `i * hop` and never extend past the end of the
//! signal, so a signal of length `L` yields `floor((L - W) / hop) + 1` frames.
//! Synthesis multiplies every inverse frame by the analysis window again and
//! divides the overlap-added result by the summed squared window, which makes
//! `synthesize(analyze(x))` reproduce `x` wherever at least one frame has a
//! nonzero window value.

use std::f64::consts::PI;

use num_complex::Complex64;
use realfft::RealFftPlanner;

use crate::error::{Error, Result};

/// Real-valued time-domain signal.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSignal {
    pub samples: Vec<f64>,
    pub sample_rate: u32,
}

impl TimeSignal {
    pub fn new(samples: Vec<f64>, sample_rate: u32) -> Self {
        Self {
            samples,
            sample_rate,
        }
    }

    pub fn zeros(len: usize, sample_rate: u32) -> Self {
        Self::new(vec![0.0; len], sample_rate)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Mean squared amplitude.
    pub fn power(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        self.samples.iter().map(|x| x * x).sum::<f64>() / self.samples.len() as f64
    }
}

/// Periodic Hann window, `0.5 - 0.5 cos(2 pi n / N)`.
pub fn periodic_hann(len: usize) -> Vec<f64> {
    (0..len)
        .map(|n| 0.5 - 0.5 * (2.0 * PI * n as f64 / len as f64).cos())
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct StftParams {
    pub window_length: usize,
    pub hop: usize,
    pub fft_size: usize,
    pub window: Vec<f64>,
}

impl StftParams {
    /// Periodic Hann window with zero padding up to `fft_size`.
    pub fn hann(window_length: usize, hop: usize, fft_size: usize) -> Result<Self> {
        let params = Self {
            window_length,
            hop,
            fft_size,
            window: periodic_hann(window_length),
        };
        params.validate()?;
        Ok(params)
    }

    /// 32 ms periodic Hann window with 50% overlap at 16 kHz.
    pub fn speech_16k() -> Self {
        Self::hann(512, 256, 512).expect("default STFT parameters are valid")
    }

    pub fn validate(&self) -> Result<()> {
        if self.window_length == 0 || self.hop == 0 {
            return Err(Error::InvalidParams(
                "window length and hop must be positive".into(),
            ));
        }
        if self.window.len() != self.window_length {
            return Err(Error::InvalidParams(format!(
                "window has {} taps, window length is {}",
                self.window.len(),
                self.window_length
            )));
        }
        if !self.window_length.is_multiple_of(self.hop) {
            return Err(Error::InvalidParams(format!(
                "hop {} does not divide window length {}",
                self.hop, self.window_length
            )));
        }
        if self.fft_size < self.window_length || !self.fft_size.is_multiple_of(2) {
            return Err(Error::InvalidParams(format!(
                "fft size {} must be even and at least the window length {}",
                self.fft_size, self.window_length
            )));
        }
        if self.window.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidParams(
                "window must be finite and non-negative".into(),
            ));
        }
        Ok(())
    }

    /// One-sided bin count, `fft_size / 2 + 1`.
    pub fn num_bins(&self) -> usize {
        self.fft_size / 2 + 1
    }

    pub fn num_frames(&self, signal_len: usize) -> usize {
        if signal_len < self.window_length {
            0
        } else {
            (signal_len - self.window_length) / self.hop + 1
        }
    }

    /// Center frequency of every one-sided bin in Hz.
    pub fn bin_frequencies(&self, sample_rate: f64) -> Vec<f64> {
        (0..self.num_bins())
            .map(|k| k as f64 * sample_rate / self.fft_size as f64)
            .collect()
    }

    /// Parseval weights for the one-sided spectrum: `c_k / N` with `c_k = 2`
    /// except at DC and Nyquist. For a frame `X = DFT(w x)`,
    /// `sum_n (w_n x_n)^2 = sum_k parseval_weights[k] |X_k|^2`.
    pub fn parseval_weights(&self) -> Vec<f64> {
        let n = self.fft_size as f64;
        let last = self.num_bins() - 1;
        (0..self.num_bins())
            .map(|k| if k == 0 || k == last { 1.0 / n } else { 2.0 / n })
            .collect()
    }

    /// Per-bin factors turning `|X_k|^2` into mean-square signal power.
    ///
    /// These are the Parseval weights divided by the window energy, so that
    /// for a stationary signal the scaled bin powers sum to its variance.
    pub fn bin_power_scale(&self) -> Vec<f64> {
        let energy: f64 = self.window.iter().map(|w| w * w).sum();
        self.parseval_weights()
            .into_iter()
            .map(|c| c / energy)
            .collect()
    }
}

impl Default for StftParams {
    fn default() -> Self {
        Self::speech_16k()
    }
}

/// Complex one-sided STFT, stored frame-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrogram {
    coeffs: Vec<Complex64>,
    num_bins: usize,
    num_frames: usize,
    /// Length of the analyzed signal, restored by [`synthesize`].
    pub signal_len: usize,
    pub sample_rate: u32,
    pub params: StftParams,
}

impl Spectrogram {
    pub fn zeros(params: StftParams, num_frames: usize, signal_len: usize, sample_rate: u32) -> Self {
        let num_bins = params.num_bins();
        Self {
            coeffs: vec![Complex64::new(0.0, 0.0); num_bins * num_frames],
            num_bins,
            num_frames,
            signal_len,
            sample_rate,
            params,
        }
    }

    pub fn num_bins(&self) -> usize {
        self.num_bins
    }

    pub fn num_frames(&self) -> usize {
        self.num_frames
    }

    pub fn coeff(&self, bin: usize, frame: usize) -> Complex64 {
        self.coeffs[frame * self.num_bins + bin]
    }

    pub fn coeff_mut(&mut self, bin: usize, frame: usize) -> &mut Complex64 {
        &mut self.coeffs[frame * self.num_bins + bin]
    }

    pub fn frame(&self, frame: usize) -> &[Complex64] {
        &self.coeffs[frame * self.num_bins..(frame + 1) * self.num_bins]
    }

    pub fn frame_mut(&mut self, frame: usize) -> &mut [Complex64] {
        &mut self.coeffs[frame * self.num_bins..(frame + 1) * self.num_bins]
    }

    pub fn frames(&self) -> impl Iterator<Item = &[Complex64]> {
        self.coeffs.chunks_exact(self.num_bins)
    }

    /// Multiplies every coefficient by the matching entry of `gains`.
    ///
    /// `gains` is frame-major with the same shape as the spectrogram.
    pub fn apply_gains(&self, gains: &[f64]) -> Result<Spectrogram> {
        if gains.len() != self.coeffs.len() {
            return Err(Error::DimensionMismatch {
                context: "apply_gains",
                expected: self.coeffs.len(),
                got: gains.len(),
            });
        }
        check_gains(gains)?;
        let mut out = self.clone();
        for (c, g) in out.coeffs.iter_mut().zip(gains) {
            *c *= *g;
        }
        Ok(out)
    }

    /// Applies one gain per bin to every frame (time-invariant processing).
    pub fn apply_bin_gains(&self, gains: &[f64]) -> Result<Spectrogram> {
        if gains.len() != self.num_bins {
            return Err(Error::DimensionMismatch {
                context: "apply_bin_gains",
                expected: self.num_bins,
                got: gains.len(),
            });
        }
        check_gains(gains)?;
        let mut out = self.clone();
        for frame in out.coeffs.chunks_exact_mut(self.num_bins) {
            for (c, g) in frame.iter_mut().zip(gains) {
                *c *= *g;
            }
        }
        Ok(out)
    }
}

fn check_gains(gains: &[f64]) -> Result<()> {
    match gains.iter().position(|g| !(*g >= 0.0) || !g.is_finite()) {
        Some(index) => Err(Error::NegativeGain {
            index,
            value: gains[index],
        }),
        None => Ok(()),
    }
}

/// Frame-wise one-sided DFT of the windowed signal.
pub fn analyze(signal: &TimeSignal, params: &StftParams) -> Result<Spectrogram> {
    params.validate()?;
    if signal.len() < params.window_length {
        return Err(Error::InsufficientSamples {
            needed: params.window_length,
            got: signal.len(),
        });
    }
    let num_frames = params.num_frames(signal.len());
    let mut spec = Spectrogram::zeros(params.clone(), num_frames, signal.len(), signal.sample_rate);

    let mut planner = RealFftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(params.fft_size);
    let mut input = fft.make_input_vec();
    let mut scratch = fft.make_scratch_vec();

    for i in 0..num_frames {
        let start = i * params.hop;
        let frame = &signal.samples[start..start + params.window_length];
        input.iter_mut().for_each(|x| *x = 0.0);
        for ((dst, x), w) in input.iter_mut().zip(frame).zip(&params.window) {
            *dst = x * w;
        }
        fft.process_with_scratch(&mut input, spec.frame_mut(i), &mut scratch)
            .expect("buffer sizes come from the planner");
    }
    Ok(spec)
}

/// Weighted overlap-add resynthesis.
///
/// Samples not covered by any frame (a tail shorter than one hop) are zero.
pub fn synthesize(spec: &Spectrogram) -> Result<TimeSignal> {
    let params = &spec.params;
    params.validate()?;
    if spec.num_bins != params.num_bins() {
        return Err(Error::DimensionMismatch {
            context: "synthesize",
            expected: params.num_bins(),
            got: spec.num_bins,
        });
    }
    if spec.num_frames == 0 {
        return Err(Error::EmptySpectrogram);
    }
    let covered = (spec.num_frames - 1) * params.hop + params.window_length;
    if covered > spec.signal_len {
        return Err(Error::InvalidParams(format!(
            "{} frames cover {} samples but the signal has {}",
            spec.num_frames, covered, spec.signal_len
        )));
    }

    let mut planner = RealFftPlanner::<f64>::new();
    let ifft = planner.plan_fft_inverse(params.fft_size);
    let mut bins = ifft.make_input_vec();
    let mut output = ifft.make_output_vec();
    let mut scratch = ifft.make_scratch_vec();
    let norm = 1.0 / params.fft_size as f64;

    let mut samples = vec![0.0; spec.signal_len];
    let mut envelope = vec![0.0; spec.signal_len];
    let last = bins.len() - 1;
    for (i, frame) in spec.frames().enumerate() {
        bins.copy_from_slice(frame);
        // a real signal has purely real DC and Nyquist terms
        bins[0].im = 0.0;
        bins[last].im = 0.0;
        ifft.process_with_scratch(&mut bins, &mut output, &mut scratch)
            .expect("buffer sizes come from the planner");
        let start = i * params.hop;
        for (n, w) in params.window.iter().enumerate() {
            samples[start + n] += output[n] * norm * w;
            envelope[start + n] += w * w;
        }
    }
    for (x, e) in samples.iter_mut().zip(&envelope) {
        if *e > 1e-12 {
            *x /= e;
        } else {
            *x = 0.0;
        }
    }
    Ok(TimeSignal::new(samples, spec.sample_rate))
}

/// Shifted-window sums `sum_i window[n - i*hop]^power` over one hop period.
pub fn overlap_sum(params: &StftParams, power: i32) -> Vec<f64> {
    let mut sums = vec![0.0; params.hop];
    for (n, w) in params.window.iter().enumerate() {
        sums[n % params.hop] += w.powi(power);
    }
    sums
}
