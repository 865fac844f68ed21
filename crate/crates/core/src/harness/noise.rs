use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::wav::load_wav;
use crate::error::{Error, Result};
use crate::gain::long_term_power;
use crate::stft::{analyze, synthesize, StftParams, TimeSignal};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum NoiseKind {
    White,
    /// White noise shaped to the long-term spectrum of the trial's speech.
    SpeechShaped,
    /// Random excerpts of a recording.
    File(PathBuf),
}

impl NoiseKind {
    /// Short label used in file names and CSV rows.
    pub fn label(&self) -> String {
        match self {
            NoiseKind::White => "white".into(),
            NoiseKind::SpeechShaped => "speech_shaped".into(),
            NoiseKind::File(path) => path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "file".into()),
        }
    }
}

impl fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoiseKind::File(path) => write!(f, "file:{}", path.display()),
            other => f.write_str(&other.label()),
        }
    }
}

impl FromStr for NoiseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "white" => Ok(NoiseKind::White),
            "speech_shaped" | "ssn" => Ok(NoiseKind::SpeechShaped),
            _ => match s.strip_prefix("file:") {
                Some(path) if !path.is_empty() => Ok(NoiseKind::File(PathBuf::from(path))),
                _ => Err(Error::InvalidConfig(format!(
                    "unknown noise kind {s:?}; expected white, speech_shaped or file:<path>"
                ))),
            },
        }
    }
}

fn white(len: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..len).map(|_| StandardNormal.sample(rng)).collect()
}

/// Generates `len` samples of noise.
///
/// White noise is unit-variance Gaussian. Speech-shaped noise scales every
/// STFT bin of a white realization by the ratio of long-term magnitudes and
/// resynthesizes; it is normalized to unit power. File noise is a random
/// contiguous excerpt.
pub fn make_noise(
    kind: &NoiseKind,
    len: usize,
    seed: u64,
    speech: Option<&TimeSignal>,
    params: &StftParams,
) -> Result<TimeSignal> {
    if len == 0 {
        return Err(Error::InsufficientSamples { needed: 1, got: 0 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sample_rate = speech.map_or(super::HARNESS_SAMPLE_RATE, |s| s.sample_rate);
    match kind {
        NoiseKind::White => Ok(TimeSignal::new(white(len, &mut rng), sample_rate)),
        NoiseKind::SpeechShaped => {
            let speech = speech.ok_or_else(|| {
                Error::InvalidConfig("speech-shaped noise needs a speech signal".into())
            })?;
            let target = long_term_power(&analyze(speech, params)?)?;
            // margins on both sides keep the excerpt clear of the OLA edges
            let margin = params.window_length;
            let raw = TimeSignal::new(white(len + 2 * margin, &mut rng), sample_rate);
            let spec = analyze(&raw, params)?;
            let measured = long_term_power(&spec)?;
            let gains: Vec<f64> = target
                .iter()
                .zip(&measured)
                .map(|(t, m)| if *m > 0.0 { (t / m).sqrt() } else { 0.0 })
                .collect();
            let shaped = synthesize(&spec.apply_bin_gains(&gains)?)?;
            let mut samples = shaped.samples[margin..margin + len].to_vec();
            let power = samples.iter().map(|x| x * x).sum::<f64>() / len as f64;
            if !(power > 0.0) {
                return Err(Error::SilentSignal);
            }
            let norm = power.sqrt().recip();
            samples.iter_mut().for_each(|x| *x *= norm);
            Ok(TimeSignal::new(samples, sample_rate))
        }
        NoiseKind::File(path) => {
            let recording = load_wav(path)?;
            if recording.len() < len {
                return Err(Error::RecordingTooShort {
                    path: path.clone(),
                    available: recording.len(),
                    requested: len,
                });
            }
            let start = rng.random_range(0..=recording.len() - len);
            Ok(TimeSignal::new(
                recording.samples[start..start + len].to_vec(),
                recording.sample_rate,
            ))
        }
    }
}

/// Scales `noise` so that `10 log10(P_speech / P_noise) = snr_db`, with both
/// powers measured over the full signals. Returns the scaled noise and the
/// SNR remeasured after scaling.
pub fn mix_at_snr(speech: &TimeSignal, noise: &TimeSignal, snr_db: f64) -> Result<(TimeSignal, f64)> {
    if !snr_db.is_finite() {
        return Err(Error::InvalidConfig(format!("SNR must be finite, got {snr_db}")));
    }
    let speech_power = speech.power();
    let noise_power = noise.power();
    if !(speech_power > 0.0) || !(noise_power > 0.0) {
        return Err(Error::SilentSignal);
    }
    let scale = (speech_power / (noise_power * 10f64.powf(snr_db / 10.0))).sqrt();
    let scaled = TimeSignal::new(noise.samples.iter().map(|x| x * scale).collect(), noise.sample_rate);
    let achieved = 10.0 * (speech_power / scaled.power()).log10();
    Ok((scaled, achieved))
}
