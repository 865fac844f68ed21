//! Objective scores for a processed trial.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::filterbank::SubbandWeights;
use crate::stft::TimeSignal;

/// Seg-SNR frame length in samples (32 ms at 16 kHz).
pub const SEG_SNR_FRAME: usize = 512;
pub const SEG_SNR_HOP: usize = 256;
pub const SEG_SNR_FLOOR_DB: f64 = -10.0;
pub const SEG_SNR_CEIL_DB: f64 = 35.0;

/// Sigmoidal band audibility `xi / (xi + 1)`, with `f(inf) = 1`.
pub fn audibility(snr: f64) -> f64 {
    if snr.is_infinite() {
        1.0
    } else {
        snr / (snr + 1.0)
    }
}

/// Approximated speech intelligibility index from long-term band powers.
///
/// `importance` is renormalized to sum to one. A band with no noise scores 1
/// if it carries speech and 0 if it is empty.
pub fn asii(speech_band_power: &[f64], noise_band_power: &[f64], importance: &[f64]) -> Result<f64> {
    if noise_band_power.len() != speech_band_power.len() || importance.len() != speech_band_power.len() {
        return Err(Error::DimensionMismatch {
            context: "asii",
            expected: speech_band_power.len(),
            got: noise_band_power.len().min(importance.len()),
        });
    }
    let total: f64 = importance.iter().sum();
    if !(total > 0.0) {
        return Err(Error::InvalidConfig("band importance sums to zero".into()));
    }
    Ok(speech_band_power
        .iter()
        .zip(noise_band_power)
        .zip(importance)
        .map(|((s, n), g)| {
            let f = if *n > 0.0 {
                audibility(s / n)
            } else if *s > 0.0 {
                1.0
            } else {
                0.0
            };
            g / total * f
        })
        .sum())
}

#[derive(Debug, Clone, PartialEq)]
pub struct MsePenalty {
    pub per_band: Vec<f64>,
    pub total: f64,
}

/// Subband MSE penalty `D_j = sum_k omega[j][k] (1 - v_k)^2 sigma_k^2`.
pub fn mse_penalty(clean_bin_power: &[f64], bin_gains: &[f64], weights: &SubbandWeights) -> Result<MsePenalty> {
    for (len, context) in [(clean_bin_power.len(), "mse_penalty powers"), (bin_gains.len(), "mse_penalty gains")] {
        if len != weights.num_bins() {
            return Err(Error::DimensionMismatch {
                context,
                expected: weights.num_bins(),
                got: len,
            });
        }
    }
    let err: Vec<f64> = clean_bin_power
        .iter()
        .zip(bin_gains)
        .map(|(p, v)| (1.0 - v).powi(2) * p)
        .collect();
    let per_band: Vec<f64> = (0..weights.num_bands())
        .map(|j| weights.band(j).iter().zip(&err).map(|(w, e)| w * e).sum())
        .collect();
    let total = per_band.iter().sum();
    Ok(MsePenalty { per_band, total })
}

/// `10 log10(sum v_k^2 sigma_k^2 / sum sigma_k^2)`.
pub fn power_increase_db(clean_bin_power: &[f64], bin_gains: &[f64]) -> Result<f64> {
    if bin_gains.len() != clean_bin_power.len() {
        return Err(Error::DimensionMismatch {
            context: "power_increase_db",
            expected: clean_bin_power.len(),
            got: bin_gains.len(),
        });
    }
    let before: f64 = clean_bin_power.iter().sum();
    if !(before > 0.0) {
        return Err(Error::SilentSignal);
    }
    let after: f64 = clean_bin_power
        .iter()
        .zip(bin_gains)
        .map(|(p, v)| v * v * p)
        .sum();
    Ok(10.0 * (after / before).log10())
}

/// Mean per-frame SNR in dB, each frame clamped to `[-10, 35]` dB.
///
/// Frames are 512 samples with a 256-sample hop. A frame with zero error
/// scores the ceiling; a frame with silent reference and nonzero error scores
/// the floor.
pub fn segmental_snr(reference: &TimeSignal, degraded: &TimeSignal) -> Result<f64> {
    if reference.len() != degraded.len() {
        return Err(Error::LengthMismatch {
            reference: reference.len(),
            degraded: degraded.len(),
        });
    }
    if reference.samples.iter().all(|x| *x == 0.0) {
        return Err(Error::SilentSignal);
    }
    if reference.len() < SEG_SNR_FRAME {
        return Err(Error::InsufficientSamples {
            needed: SEG_SNR_FRAME,
            got: reference.len(),
        });
    }
    let num_frames = (reference.len() - SEG_SNR_FRAME) / SEG_SNR_HOP + 1;
    let mut sum = 0.0;
    for i in 0..num_frames {
        let range = i * SEG_SNR_HOP..i * SEG_SNR_HOP + SEG_SNR_FRAME;
        let r = &reference.samples[range.clone()];
        let d = &degraded.samples[range];
        let signal: f64 = r.iter().map(|x| x * x).sum();
        let noise: f64 = r.iter().zip(d).map(|(x, y)| (x - y).powi(2)).sum();
        let db = if noise == 0.0 {
            SEG_SNR_CEIL_DB
        } else if signal == 0.0 {
            SEG_SNR_FLOOR_DB
        } else {
            10.0 * (signal / noise).log10()
        };
        sum += db.clamp(SEG_SNR_FLOOR_DB, SEG_SNR_CEIL_DB);
    }
    Ok(sum / num_frames as f64)
}

/// Scores of one processed trial.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricReport {
    /// ASII of the processed speech, from band gains times band powers.
    pub asii: f64,
    /// ASII of the unprocessed speech in the same noise.
    pub asii_unprocessed: f64,
    /// ASII recomputed from the projected bin gains filtered back into bands.
    pub asii_bin_projected: f64,
    pub mse_penalty: f64,
    pub power_increase_db: f64,
    pub seg_snr_db: f64,
    #[serde(skip)]
    pub per_band_snr: Vec<f64>,
    pub limiter_bands: usize,
    pub infeasible_bands: usize,
}
