use std::path::{Path, PathBuf};

use super::noise::{make_noise, mix_at_snr, NoiseKind};
use super::wav::save_wav;
use crate::config::NleConfig;
use crate::error::Result;
use crate::filterbank::SubbandWeights;
use crate::gain::{plan_gains, GainPlan};
use crate::metrics::{asii, mse_penalty, power_increase_db, segmental_snr, MetricReport};
use crate::stft::{analyze, synthesize, StftParams, TimeSignal};

/// Leading silence, 0.5 s at 16 kHz.
pub const LEAD_SILENCE: usize = 8000;
/// Trailing silence, 0.125 s at 16 kHz.
pub const TRAIL_SILENCE: usize = 2000;

pub fn pad_speech(signal: &TimeSignal) -> TimeSignal {
    let mut samples = Vec::with_capacity(signal.len() + LEAD_SILENCE + TRAIL_SILENCE);
    samples.resize(LEAD_SILENCE, 0.0);
    samples.extend_from_slice(&signal.samples);
    samples.resize(samples.len() + TRAIL_SILENCE, 0.0);
    TimeSignal::new(samples, signal.sample_rate)
}

/// Analysis settings shared by all trials of a run.
#[derive(Debug, Clone)]
pub struct Pipeline {
    pub config: NleConfig,
    pub params: StftParams,
    pub weights: SubbandWeights,
}

impl Pipeline {
    pub fn new(config: NleConfig) -> Result<Self> {
        config.validate()?;
        let params = config.stft_params()?;
        let weights = config.subband_weights()?;
        Ok(Self {
            config,
            params,
            weights,
        })
    }

    /// Gain plan and processed speech for a clean speech signal and the noise
    /// it will be played into. The noise is only analyzed, never modified.
    pub fn enhance(&self, speech: &TimeSignal, noise: &TimeSignal, config: &NleConfig) -> Result<(GainPlan, TimeSignal)> {
        let speech_spec = analyze(speech, &self.params)?;
        let noise_spec = analyze(noise, &self.params)?;
        let plan = plan_gains(&speech_spec, &noise_spec, config, &self.weights)?;
        let processed = synthesize(&speech_spec.apply_bin_gains(&plan.bin_gains)?)?;
        Ok((plan, processed))
    }
}

/// One condition of the experiment grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialSpec {
    pub noise: NoiseKind,
    pub snr_db: f64,
    pub target_asii: f64,
    /// Seeds the noise realization.
    pub seed: u64,
    pub trial_index: usize,
}

#[derive(Debug, Clone)]
pub struct TrialOutput {
    pub report: MetricReport,
    pub plan: GainPlan,
    /// Padded clean speech.
    pub clean: TimeSignal,
    /// Processed speech as played out.
    pub processed: TimeSignal,
    pub scaled_noise: TimeSignal,
    /// Processed speech plus noise, as heard by the listener.
    pub listener: TimeSignal,
}

/// `<noise>_<snr>dB_<A*>_<trial>.wav`
pub fn wav_name(noise: &NoiseKind, snr_db: f64, target_asii: f64, trial: usize) -> String {
    format!("{}_{}dB_{}_{}.wav", noise.label(), snr_db, target_asii, trial)
}

/// Pads `speech`, generates and mixes noise, processes, and scores.
///
/// With `out_dir`, writes the processed speech as `wav_name(..)` and the
/// listener mixture with a `_mix` suffix.
pub fn run_trial(pipeline: &Pipeline, speech: &TimeSignal, spec: &TrialSpec, out_dir: Option<&Path>) -> Result<TrialOutput> {
    let config = pipeline.config.clone().with_target(spec.target_asii);
    config.validate()?;
    let clean = pad_speech(speech);
    let noise = make_noise(&spec.noise, clean.len(), spec.seed, Some(&clean), &pipeline.params)?;
    let (scaled_noise, _) = mix_at_snr(&clean, &noise, spec.snr_db)?;

    let (plan, processed) = pipeline.enhance(&clean, &scaled_noise, &config)?;
    let listener = TimeSignal::new(
        processed
            .samples
            .iter()
            .zip(&scaled_noise.samples)
            .map(|(s, n)| s + n)
            .collect(),
        clean.sample_rate,
    );

    let importance = config.importance();
    let weights = &pipeline.weights;
    let projected_power: Vec<f64> = plan
        .speech_bin_power
        .iter()
        .zip(&plan.bin_gains)
        .map(|(p, v)| v * v * p)
        .collect();
    let report = MetricReport {
        asii: asii(&plan.processed_band_power(), &plan.noise_band_power, &importance)?,
        asii_unprocessed: asii(&plan.speech_band_power, &plan.noise_band_power, &importance)?,
        asii_bin_projected: asii(&weights.band_power(&projected_power)?, &plan.noise_band_power, &importance)?,
        mse_penalty: mse_penalty(&plan.speech_bin_power, &plan.bin_gains, weights)?.total,
        power_increase_db: power_increase_db(&plan.speech_bin_power, &plan.bin_gains)?,
        seg_snr_db: segmental_snr(&clean, &listener)?,
        per_band_snr: plan.processed_band_snr(),
        limiter_bands: plan.limiter_active.iter().filter(|a| **a).count(),
        infeasible_bands: plan.infeasible_bands().len(),
    };

    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir)?;
        let name = wav_name(&spec.noise, spec.snr_db, spec.target_asii, spec.trial_index);
        save_wav(dir.join(&name), &processed)?;
        let mix: PathBuf = dir.join(name.replace(".wav", "_mix.wav"));
        save_wav(mix, &listener)?;
    }

    Ok(TrialOutput {
        report,
        plan,
        clean,
        processed,
        scaled_noise,
        listener,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{load_wav, synthetic_utterance};

    #[test]
    fn padding() {
        let sig = TimeSignal::new(vec![0.5; 300], 16000);
        let padded = pad_speech(&sig);
        assert_eq!(padded.len(), 300 + 10_000);
        assert!(padded.samples[..LEAD_SILENCE].iter().all(|x| *x == 0.0));
        assert!(padded.samples[LEAD_SILENCE + 300..].iter().all(|x| *x == 0.0));
        assert_eq!(padded.samples[LEAD_SILENCE], 0.5);
        let zeros = pad_speech(&TimeSignal::zeros(50, 16000));
        assert!(zeros.samples.iter().all(|x| *x == 0.0));
    }

    #[test]
    fn wav_names() {
        assert_eq!(wav_name(&NoiseKind::White, -30.0, 0.7, 2), "white_-30dB_0.7_2.wav");
        assert_eq!(wav_name(&NoiseKind::SpeechShaped, 5.0, 0.0, 0), "speech_shaped_5dB_0_0.wav");
    }

    fn spec(snr_db: f64, target_asii: f64) -> TrialSpec {
        TrialSpec {
            noise: NoiseKind::White,
            snr_db,
            target_asii,
            seed: 11,
            trial_index: 0,
        }
    }

    #[test]
    fn zero_target_is_round_trip() {
        let pipeline = Pipeline::new(NleConfig::default()).unwrap();
        let speech = synthetic_utterance(3, 1.5, 0.05);
        let out = run_trial(&pipeline, &speech, &spec(-10.0, 0.0), None).unwrap();
        let round_trip = synthesize(&analyze(&out.clean, &pipeline.params).unwrap()).unwrap();
        assert_eq!(out.processed, round_trip);
        assert_eq!(out.report.mse_penalty, 0.0);
        assert_eq!(out.report.power_increase_db, 0.0);
        assert_eq!(out.report.asii, out.report.asii_unprocessed);
    }

    #[test]
    fn noise_component_is_untouched() {
        let pipeline = Pipeline::new(NleConfig::default()).unwrap();
        let speech = synthetic_utterance(3, 1.5, 0.05);
        let out = run_trial(&pipeline, &speech, &spec(-20.0, 0.7), None).unwrap();
        for ((l, s), n) in out.listener.samples.iter().zip(&out.processed.samples).zip(&out.scaled_noise.samples) {
            assert_eq!(*l, s + n);
        }
        assert!(out.report.asii >= 0.7 - 1e-12);
        assert!(out.report.asii > out.report.asii_unprocessed);
    }

    #[test]
    fn writes_named_wavs() {
        let dir = tempfile::tempdir().unwrap();
        let pipeline = Pipeline::new(NleConfig::default()).unwrap();
        let speech = synthetic_utterance(3, 1.0, 0.05);
        let out = run_trial(&pipeline, &speech, &spec(0.0, 0.5), Some(dir.path())).unwrap();
        let written = load_wav(dir.path().join("white_0dB_0.5_0.wav")).unwrap();
        assert_eq!(written.len(), out.processed.len());
        for (a, b) in written.samples.iter().zip(&out.processed.samples) {
            assert_eq!(*a, f64::from(*b as f32));
        }
        assert!(dir.path().join("white_0dB_0.5_0_mix.wav").exists());
    }
}
