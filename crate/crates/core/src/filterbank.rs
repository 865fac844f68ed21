//! ERB-spaced gammatone subband weights.
//!
//! Each band's raw weight is a fourth-order gammatone magnitude-squared
//! approximation evaluated at the STFT bin frequencies. Columns are then
//! normalized so that the weights of every bin sum to one across bands, which
//! makes the total subband power equal the total bin power.

use std::io::Write;

use crate::error::{Error, Result};

/// ERB-rate (Cams) of a frequency in Hz.
pub fn erb_rate(freq_hz: f64) -> f64 {
    21.4 * (4.37 * freq_hz / 1000.0 + 1.0).log10()
}

/// Inverse of [`erb_rate`].
pub fn erb_rate_to_hz(rate: f64) -> f64 {
    (10f64.powf(rate / 21.4) - 1.0) * 1000.0 / 4.37
}

/// Equivalent rectangular bandwidth in Hz at `freq_hz`.
pub fn erb_bandwidth(freq_hz: f64) -> f64 {
    24.7 * (4.37 * freq_hz / 1000.0 + 1.0)
}

/// Bandwidth scale `c` for which `[1 + (df / (c ERB))^2]^-4` is 3 dB down at
/// `df = ERB / 2`.
pub fn gammatone_bandwidth_factor() -> f64 {
    1.0 / (2.0 * (2f64.powf(0.25) - 1.0).sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandLayout {
    pub center_freqs: Vec<f64>,
    pub erb_bandwidths: Vec<f64>,
}

impl BandLayout {
    pub fn num_bands(&self) -> usize {
        self.center_freqs.len()
    }
}

/// `num_bands` centers equally spaced on the ERB-rate scale from `f_lo` to
/// `f_hi` inclusive. A single band sits at `f_lo`.
pub fn erb_layout(num_bands: usize, f_lo: f64, f_hi: f64) -> Result<BandLayout> {
    if num_bands == 0 {
        return Err(Error::InvalidRange("need at least one band".into()));
    }
    if !(f_lo > 0.0 && f_lo < f_hi && f_hi.is_finite()) {
        return Err(Error::InvalidRange(format!(
            "require 0 < f_lo < f_hi, got {f_lo}..{f_hi}"
        )));
    }
    let lo = erb_rate(f_lo);
    let hi = erb_rate(f_hi);
    let center_freqs: Vec<f64> = (0..num_bands)
        .map(|j| {
            if j == 0 {
                f_lo
            } else if j == num_bands - 1 {
                f_hi
            } else {
                erb_rate_to_hz(lo + (hi - lo) * j as f64 / (num_bands - 1) as f64)
            }
        })
        .collect();
    let erb_bandwidths = center_freqs.iter().map(|f| erb_bandwidth(*f)).collect();
    Ok(BandLayout {
        center_freqs,
        erb_bandwidths,
    })
}

/// Unnormalized `|H_j(f)|^2` of the gammatone magnitude model.
pub fn gammatone_power_response(center_hz: f64, erb_hz: f64, freq_hz: f64) -> f64 {
    let x = (freq_hz - center_hz) / (gammatone_bandwidth_factor() * erb_hz);
    (1.0 + x * x).powi(-4)
}

/// Normalized weights `omega[j][k]`, stored band-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SubbandWeights {
    omega: Vec<f64>,
    num_bins: usize,
    pub layout: BandLayout,
}

/// Per-band powers.
#[derive(Debug, Clone, PartialEq)]
pub struct BandPowers(pub Vec<f64>);

impl BandPowers {
    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }
}

impl std::ops::Deref for BandPowers {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl SubbandWeights {
    /// Builds weights from a raw band-major matrix, normalizing each column.
    ///
    /// A column whose raw weights are all zero is assigned entirely to the
    /// band with the nearest center frequency, so normalization holds at
    /// every bin.
    pub fn from_raw(
        mut raw: Vec<f64>,
        num_bins: usize,
        layout: BandLayout,
        bin_freqs: &[f64],
    ) -> Result<Self> {
        let num_bands = layout.num_bands();
        if raw.len() != num_bands * num_bins || bin_freqs.len() != num_bins {
            return Err(Error::DimensionMismatch {
                context: "SubbandWeights::from_raw",
                expected: num_bands * num_bins,
                got: raw.len(),
            });
        }
        if raw.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(Error::InvalidConfig("subband weights must be finite and non-negative".into()));
        }
        for k in 0..num_bins {
            let sum: f64 = (0..num_bands).map(|j| raw[j * num_bins + k]).sum();
            if sum > 0.0 {
                for j in 0..num_bands {
                    raw[j * num_bins + k] /= sum;
                }
            } else {
                let nearest = nearest_band(&layout, bin_freqs[k]);
                raw[nearest * num_bins + k] = 1.0;
            }
        }
        Ok(Self {
            omega: raw,
            num_bins,
            layout,
        })
    }

    pub fn num_bands(&self) -> usize {
        self.layout.num_bands()
    }

    pub fn num_bins(&self) -> usize {
        self.num_bins
    }

    pub fn weight(&self, band: usize, bin: usize) -> f64 {
        self.omega[band * self.num_bins + bin]
    }

    /// Weights of one band across all bins.
    pub fn band(&self, band: usize) -> &[f64] {
        &self.omega[band * self.num_bins..(band + 1) * self.num_bins]
    }

    pub fn column_sum(&self, bin: usize) -> f64 {
        (0..self.num_bands()).map(|j| self.weight(j, bin)).sum()
    }

    /// `values[j] = sum_k omega[j][k] * bin_powers[k]`.
    pub fn band_power(&self, bin_powers: &[f64]) -> Result<BandPowers> {
        if bin_powers.len() != self.num_bins {
            return Err(Error::DimensionMismatch {
                context: "band_power",
                expected: self.num_bins,
                got: bin_powers.len(),
            });
        }
        Ok(BandPowers(
            (0..self.num_bands())
                .map(|j| self.band(j).iter().zip(bin_powers).map(|(w, p)| w * p).sum())
                .collect(),
        ))
    }

    /// Writes the matrix as CSV, one band per row.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        let mut header = vec!["center_hz".to_string()];
        header.extend((0..self.num_bins).map(|k| format!("bin{k}")));
        writer.write_record(&header)?;
        for j in 0..self.num_bands() {
            let mut row = vec![self.layout.center_freqs[j].to_string()];
            row.extend(self.band(j).iter().map(|w| w.to_string()));
            writer.write_record(&row)?;
        }
        writer.flush()?;
        Ok(())
    }
}

fn nearest_band(layout: &BandLayout, freq: f64) -> usize {
    layout
        .center_freqs
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - freq).abs().total_cmp(&(b.1 - freq).abs()))
        .map(|(j, _)| j)
        .unwrap_or(0)
}

/// Raw (unnormalized) gammatone power responses, band-major.
pub fn gammatone_raw(layout: &BandLayout, bin_freqs: &[f64]) -> Vec<f64> {
    let mut raw = Vec::with_capacity(layout.num_bands() * bin_freqs.len());
    for (fc, erb) in layout.center_freqs.iter().zip(&layout.erb_bandwidths) {
        raw.extend(bin_freqs.iter().map(|f| gammatone_power_response(*fc, *erb, *f)));
    }
    raw
}

/// Normalized gammatone weights for a one-sided spectrum of `num_bins` bins.
pub fn gammatone_weights(layout: &BandLayout, num_bins: usize, sample_rate: f64) -> Result<SubbandWeights> {
    if num_bins < 2 {
        return Err(Error::InvalidParams(format!(
            "bin frequency grid needs at least 2 bins, got {num_bins}"
        )));
    }
    let nyquist = sample_rate / 2.0;
    if let Some(f) = layout.center_freqs.iter().find(|f| !(**f > 0.0 && **f <= nyquist)) {
        return Err(Error::InvalidRange(format!(
            "center frequency {f} Hz outside (0, {nyquist}]"
        )));
    }
    if layout.center_freqs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidRange("center frequencies must increase".into()));
    }
    let fft_size = 2 * (num_bins - 1);
    let bin_freqs: Vec<f64> = (0..num_bins)
        .map(|k| k as f64 * sample_rate / fft_size as f64)
        .collect();
    let raw = gammatone_raw(layout, &bin_freqs);
    SubbandWeights::from_raw(raw, num_bins, layout.clone(), &bin_freqs)
}
