//! Minimum-processing gain rule.
//!
//! For every subband the speech is left alone if its long-term SNR already
//! meets the band's SNR target, and otherwise amplified by exactly the factor
//! that brings the band SNR up to the target:
//!
//! ```text
//! v_j = 1                                  if S_j >= N_j * T_j
//! v_j = sqrt(N_j * T_j / S_j)              otherwise
//! ```
//!
//! where `S_j`, `N_j` are long-term speech and noise band powers and
//! `T_j = I_j / (1 - I_j)` is the SNR equivalent of the band audibility target
//! `I_j`. The same gain applies to every bin of the band. Gains are capped so
//! that no band exceeds `P_max`, then projected onto STFT bins as the
//! weight-averaged RMS of the contributing band gains.

use std::io::Write;

use serde::Serialize;

use crate::config::NleConfig;
use crate::error::{Error, Result};
use crate::filterbank::{BandPowers, SubbandWeights};
use crate::stft::Spectrogram;

/// Per-bin mean of `|S_{k,i}|^2` over all frames.
pub fn long_term_power(spec: &Spectrogram) -> Result<Vec<f64>> {
    if spec.num_frames() == 0 || spec.num_bins() == 0 {
        return Err(Error::EmptySpectrogram);
    }
    let mut acc = vec![0.0; spec.num_bins()];
    for frame in spec.frames() {
        for (a, c) in acc.iter_mut().zip(frame) {
            *a += c.norm_sqr();
        }
    }
    let inv = 1.0 / spec.num_frames() as f64;
    acc.iter_mut().for_each(|a| *a *= inv);
    Ok(acc)
}

/// [`long_term_power`] scaled to mean-square signal units, see
/// [`crate::stft::StftParams::bin_power_scale`].
pub fn calibrated_power(spec: &Spectrogram) -> Result<Vec<f64>> {
    let raw = long_term_power(spec)?;
    Ok(raw
        .into_iter()
        .zip(spec.params.bin_power_scale())
        .map(|(p, s)| p * s)
        .collect())
}

/// Band audibility targets `I_j = A* gamma_j / sum_i gamma_i^2`.
///
/// These satisfy `sum_j gamma_j I_j = A*`; every `I_j` must stay below one.
pub fn weight_audibility_limits(target: f64, importance: &[f64]) -> Result<Vec<f64>> {
    if !(0.0..1.0).contains(&target) {
        return Err(Error::InvalidConfig(format!(
            "target intelligibility must lie in [0, 1), got {target}"
        )));
    }
    let energy: f64 = importance.iter().map(|g| g * g).sum();
    if importance.iter().any(|g| !(*g >= 0.0)) || energy <= 0.0 {
        return Err(Error::InvalidConfig(
            "band importance must be non-negative and not all zero".into(),
        ));
    }
    importance
        .iter()
        .enumerate()
        .map(|(band, g)| {
            let value = target * g / energy;
            if value >= 1.0 {
                Err(Error::InfeasibleTarget { band, value })
            } else {
                Ok(value)
            }
        })
        .collect()
}

/// Minimum processed band SNR `I / (1 - I)` that meets audibility `I`.
pub fn snr_limit(audibility: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&audibility) {
        return Err(Error::InfeasibleTarget {
            band: 0,
            value: audibility,
        });
    }
    Ok(audibility / (1.0 - audibility))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BandState {
    /// Target already met; gain is one.
    Passive,
    /// Gain raises the band SNR exactly to the target.
    Active,
    /// Target is positive but the band has no speech power to amplify.
    Infeasible,
}

/// Closed-form optimal band gain and which case produced it.
pub fn optimal_gain(speech_power: f64, noise_power: f64, snr_target: f64) -> (f64, BandState) {
    let required = noise_power * snr_target;
    if speech_power >= required {
        (1.0, BandState::Passive)
    } else if speech_power <= 0.0 {
        (1.0, BandState::Infeasible)
    } else {
        ((required / speech_power).sqrt(), BandState::Active)
    }
}

/// `min(gain, sqrt(P_max / S_j))`; a silent band is never limited.
pub fn limit_gain(gain: f64, speech_power: f64, max_power: f64) -> f64 {
    if speech_power <= 0.0 {
        return gain;
    }
    gain.min((max_power / speech_power).sqrt())
}

/// `v_k = sqrt(sum_j omega[j][k] * band_gains[j]^2)`.
///
/// Columns of `omega` sum to one, so this is evaluated as
/// `sqrt(1 + sum_j omega[j][k] (g_j^2 - 1))`, which is exactly one when every
/// band gain is one.
pub fn project_gains_to_bins(band_gains: &[f64], weights: &SubbandWeights) -> Result<Vec<f64>> {
    if band_gains.len() != weights.num_bands() {
        return Err(Error::DimensionMismatch {
            context: "project_gains_to_bins",
            expected: weights.num_bands(),
            got: band_gains.len(),
        });
    }
    let mut acc = vec![0.0; weights.num_bins()];
    for (j, g) in band_gains.iter().enumerate() {
        let g2 = g * g - 1.0;
        if g2 == 0.0 {
            continue;
        }
        for (a, w) in acc.iter_mut().zip(weights.band(j)) {
            *a += w * g2;
        }
    }
    Ok(acc.into_iter().map(|a| (1.0 + a).max(0.0).sqrt()).collect())
}

/// Per-band audibility and SNR targets.
#[derive(Debug, Clone, PartialEq)]
pub struct BandTargets {
    pub audibility: Vec<f64>,
    pub snr_limit: Vec<f64>,
}

impl BandTargets {
    pub fn new(target: f64, importance: &[f64]) -> Result<Self> {
        let audibility = weight_audibility_limits(target, importance)?;
        let snr_limit = audibility
            .iter()
            .enumerate()
            .map(|(band, i)| {
                snr_limit(*i).map_err(|_| Error::InfeasibleTarget { band, value: *i })
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            audibility,
            snr_limit,
        })
    }
}

/// All stages of the gain computation for one speech/noise pair.
#[derive(Debug, Clone, PartialEq)]
pub struct GainPlan {
    /// Long-term per-bin powers in mean-square units.
    pub speech_bin_power: Vec<f64>,
    pub noise_bin_power: Vec<f64>,
    pub speech_band_power: BandPowers,
    pub noise_band_power: BandPowers,
    pub targets: BandTargets,
    /// One optimal gain per band, shared by all bins of that band.
    pub band_gains: Vec<f64>,
    pub states: Vec<BandState>,
    pub limited_gains: Vec<f64>,
    pub limiter_active: Vec<bool>,
    pub bin_gains: Vec<f64>,
}

impl GainPlan {
    pub fn num_bands(&self) -> usize {
        self.band_gains.len()
    }

    pub fn any_limiter_active(&self) -> bool {
        self.limiter_active.iter().any(|a| *a)
    }

    pub fn infeasible_bands(&self) -> Vec<usize> {
        self.states
            .iter()
            .enumerate()
            .filter(|(_, s)| **s == BandState::Infeasible)
            .map(|(j, _)| j)
            .collect()
    }

    /// Processed band speech power `limited_gain_j^2 * S_j`.
    pub fn processed_band_power(&self) -> BandPowers {
        BandPowers(
            self.limited_gains
                .iter()
                .zip(self.speech_band_power.iter())
                .map(|(g, s)| g * g * s)
                .collect(),
        )
    }

    /// Processed band SNR `xi_j`; infinite where the band has no noise.
    pub fn processed_band_snr(&self) -> Vec<f64> {
        band_snr(&self.processed_band_power(), &self.noise_band_power)
    }

    pub fn unprocessed_band_snr(&self) -> Vec<f64> {
        band_snr(&self.speech_band_power, &self.noise_band_power)
    }

    pub fn write_diagnostics_csv<W: Write>(&self, out: W) -> Result<()> {
        #[derive(Serialize)]
        struct Row {
            band: usize,
            speech_power: f64,
            noise_power: f64,
            audibility_target: f64,
            snr_target: f64,
            state: BandState,
            gain: f64,
            limited_gain: f64,
            limiter_active: bool,
            processed_snr: f64,
        }
        let mut writer = csv::Writer::from_writer(out);
        let snr = self.processed_band_snr();
        for j in 0..self.num_bands() {
            writer.serialize(Row {
                band: j,
                speech_power: self.speech_band_power[j],
                noise_power: self.noise_band_power[j],
                audibility_target: self.targets.audibility[j],
                snr_target: self.targets.snr_limit[j],
                state: self.states[j],
                gain: self.band_gains[j],
                limited_gain: self.limited_gains[j],
                limiter_active: self.limiter_active[j],
                processed_snr: snr[j],
            })?;
        }
        writer.flush()?;
        Ok(())
    }
}

fn band_snr(speech: &[f64], noise: &[f64]) -> Vec<f64> {
    speech
        .iter()
        .zip(noise)
        .map(|(s, n)| if *n > 0.0 { s / n } else if *s > 0.0 { f64::INFINITY } else { 0.0 })
        .collect()
}

/// Runs the gain rule on long-term per-bin powers.
pub fn plan_from_bin_powers(
    speech_bin_power: Vec<f64>,
    noise_bin_power: Vec<f64>,
    config: &NleConfig,
    weights: &SubbandWeights,
) -> Result<GainPlan> {
    config.validate()?;
    if noise_bin_power.len() != speech_bin_power.len() {
        return Err(Error::DimensionMismatch {
            context: "plan_gains noise powers",
            expected: speech_bin_power.len(),
            got: noise_bin_power.len(),
        });
    }
    let importance = config.importance();
    if importance.len() != weights.num_bands() {
        return Err(Error::DimensionMismatch {
            context: "plan_gains band importance",
            expected: weights.num_bands(),
            got: importance.len(),
        });
    }
    let speech_band_power = weights.band_power(&speech_bin_power)?;
    let noise_band_power = weights.band_power(&noise_bin_power)?;
    let targets = BandTargets::new(config.target_asii, &importance)?;
    let max_power = config.max_band_power();

    let num_bands = weights.num_bands();
    let mut band_gains = Vec::with_capacity(num_bands);
    let mut states = Vec::with_capacity(num_bands);
    let mut limited_gains = Vec::with_capacity(num_bands);
    let mut limiter_active = Vec::with_capacity(num_bands);
    for j in 0..num_bands {
        let (gain, state) = optimal_gain(speech_band_power[j], noise_band_power[j], targets.snr_limit[j]);
        let limited = limit_gain(gain, speech_band_power[j], max_power);
        band_gains.push(gain);
        states.push(state);
        limited_gains.push(limited);
        limiter_active.push(limited < gain);
    }
    let bin_gains = project_gains_to_bins(&limited_gains, weights)?;
    Ok(GainPlan {
        speech_bin_power,
        noise_bin_power,
        speech_band_power,
        noise_band_power,
        targets,
        band_gains,
        states,
        limited_gains,
        limiter_active,
        bin_gains,
    })
}

/// Full gain computation from speech and noise spectrograms.
///
/// The returned `bin_gains` are time-invariant: the same vector applies to
/// every frame.
pub fn plan_gains(
    speech: &Spectrogram,
    noise: &Spectrogram,
    config: &NleConfig,
    weights: &SubbandWeights,
) -> Result<GainPlan> {
    if speech.params != noise.params {
        return Err(Error::InvalidParams(
            "speech and noise use different STFT parameters".into(),
        ));
    }
    if speech.num_bins() != weights.num_bins() {
        return Err(Error::DimensionMismatch {
            context: "plan_gains weights",
            expected: speech.num_bins(),
            got: weights.num_bins(),
        });
    }
    plan_from_bin_powers(calibrated_power(speech)?, calibrated_power(noise)?, config, weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filterbank::{erb_layout, gammatone_weights, BandLayout};
    use crate::stft::{analyze, StftParams, TimeSignal};
    use num_complex::Complex64;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn weights() -> SubbandWeights {
        NleConfig::default().subband_weights().unwrap()
    }

    fn one_hot_weights(num_bands: usize, bins_per_band: usize) -> SubbandWeights {
        let num_bins = num_bands * bins_per_band;
        let mut raw = vec![0.0; num_bands * num_bins];
        for k in 0..num_bins {
            raw[(k / bins_per_band) * num_bins + k] = 1.0;
        }
        let layout = BandLayout {
            center_freqs: (0..num_bands).map(|j| 100.0 * (j + 1) as f64).collect(),
            erb_bandwidths: vec![50.0; num_bands],
        };
        let freqs: Vec<f64> = (0..num_bins).map(|k| k as f64).collect();
        SubbandWeights::from_raw(raw, num_bins, layout, &freqs).unwrap()
    }

    #[test]
    fn long_term_power_cases() {
        let params = StftParams::speech_16k();
        let mut spec = Spectrogram::zeros(params.clone(), 4, 512 + 3 * 256, 16000);
        for i in 0..4 {
            for k in 0..spec.num_bins() {
                *spec.coeff_mut(k, i) = Complex64::from_polar(2.0, (i * k) as f64);
            }
        }
        for p in long_term_power(&spec).unwrap() {
            assert!((p - 4.0).abs() < 1e-12);
        }

        let mut single = Spectrogram::zeros(params.clone(), 1, 512, 16000);
        *single.coeff_mut(5, 0) = Complex64::new(3.0, 4.0);
        let p = long_term_power(&single).unwrap();
        assert_eq!(p[5], 25.0);
        assert_eq!(p[6], 0.0);

        let empty = Spectrogram::zeros(params, 0, 0, 16000);
        assert!(matches!(long_term_power(&empty), Err(Error::EmptySpectrogram)));
    }

    #[test]
    fn long_term_power_matches_naive_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let x: Vec<f64> = (0..9000).map(|_| rng.random_range(-1.0..1.0)).collect();
        let spec = analyze(&TimeSignal::new(x, 16000), &StftParams::speech_16k()).unwrap();
        let fast = long_term_power(&spec).unwrap();
        for k in 0..spec.num_bins() {
            let mut acc = 0.0;
            for i in 0..spec.num_frames() {
                let c = spec.coeff(k, i);
                acc += c.re * c.re + c.im * c.im;
            }
            acc /= spec.num_frames() as f64;
            assert!((fast[k] - acc).abs() <= 1e-12 * acc.max(1e-300));
        }
    }

    #[test]
    fn calibrated_white_noise_sums_to_variance() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let x: Vec<f64> = (0..160_000).map(|_| rng.random_range(-1.0..1.0)).collect();
        let spec = analyze(&TimeSignal::new(x, 16000), &StftParams::speech_16k()).unwrap();
        let total: f64 = calibrated_power(&spec).unwrap().iter().sum();
        // variance of U(-1, 1) is 1/3
        assert!((total - 1.0 / 3.0).abs() < 0.01);
    }

    #[test]
    fn audibility_limits() {
        let uniform = vec![1.0 / 30.0; 30];
        for a in [0.0, 0.3, 0.7, 0.9] {
            for i in weight_audibility_limits(a, &uniform).unwrap() {
                assert!((i - a).abs() < 1e-12);
            }
        }
        let mut first = vec![0.0; 5];
        first[0] = 1.0;
        let i = weight_audibility_limits(0.4, &first).unwrap();
        assert_eq!(i, vec![0.4, 0.0, 0.0, 0.0, 0.0]);

        let gamma = [0.3, 0.1, 0.25, 0.05, 0.3];
        let i = weight_audibility_limits(0.6, &gamma).unwrap();
        let weighted: f64 = gamma.iter().zip(&i).map(|(g, i)| g * i).sum();
        assert!((weighted - 0.6).abs() < 1e-12);

        // a dominant band pushes I_j past one
        let err = weight_audibility_limits(0.9, &[0.5, 0.25, 0.25]).unwrap_err();
        assert!(err.to_string().contains("infeasible per-band target"));
        assert!(weight_audibility_limits(1.0, &uniform).is_err());
        assert!(weight_audibility_limits(0.5, &[0.0, 0.0]).is_err());
    }

    #[test]
    fn snr_limit_values() {
        assert_eq!(snr_limit(0.5).unwrap(), 1.0);
        assert_eq!(snr_limit(0.0).unwrap(), 0.0);
        assert!((snr_limit(0.7).unwrap() - 0.7 / 0.3).abs() < 1e-15);
        assert!((snr_limit(0.7).unwrap() - 2.333_333_333_333_333).abs() < 1e-12);
        assert!(snr_limit(1.0).is_err());
    }

    #[test]
    fn optimal_gain_cases() {
        assert_eq!(optimal_gain(5.0, 4.0, 1.0), (1.0, BandState::Passive));
        assert_eq!(optimal_gain(1.0, 4.0, 1.0), (2.0, BandState::Active));
        assert_eq!(optimal_gain(0.0, 4.0, 1.0), (1.0, BandState::Infeasible));
        assert_eq!(optimal_gain(0.0, 4.0, 0.0), (1.0, BandState::Passive));
        assert_eq!(optimal_gain(0.0, 0.0, 3.0), (1.0, BandState::Passive));
    }

    #[test]
    fn limiter_cases() {
        assert_eq!(limit_gain(3.0, 0.25, 1.0), 2.0);
        assert_eq!(limit_gain(1.0, 0.5, 1.0), 1.0);
        assert_eq!(limit_gain(7.0, 0.0, 1.0), 7.0);
    }

    #[test]
    fn projection_cases() {
        let w = weights();
        for v in project_gains_to_bins(&[1.0; 30], &w).unwrap() {
            assert!((v - 1.0).abs() < 1e-12);
        }

        let layout = BandLayout {
            center_freqs: vec![100.0, 200.0],
            erb_bandwidths: vec![50.0, 50.0],
        };
        let half = SubbandWeights::from_raw(vec![0.5, 0.5], 1, layout, &[150.0]).unwrap();
        let v = project_gains_to_bins(&[1.0, 3f64.sqrt()], &half).unwrap();
        assert!((v[0] - 2f64.sqrt()).abs() < 1e-15);

        let hot = one_hot_weights(3, 4);
        let v = project_gains_to_bins(&[1.5, 2.0, 3.0], &hot).unwrap();
        for (k, g) in v.iter().enumerate() {
            assert_eq!(*g, [1.5, 2.0, 3.0][k / 4]);
        }
        assert!(project_gains_to_bins(&[1.0; 3], &w).is_err());
    }

    fn spectrogram_from_power(power: &[f64], frames: usize, seed: u64) -> Spectrogram {
        let params = StftParams::speech_16k();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut spec = Spectrogram::zeros(params, frames, 512 + (frames - 1) * 256, 16000);
        for i in 0..frames {
            for (k, p) in power.iter().enumerate() {
                let phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                *spec.coeff_mut(k, i) = Complex64::from_polar(p.sqrt(), phase);
            }
        }
        spec
    }

    fn speechy_profile() -> Vec<f64> {
        (0..257)
            .map(|k| {
                let f = k as f64 * 31.25;
                1e4 / (1.0 + (f / 500.0).powi(2)) + 10.0
            })
            .collect()
    }

    #[test]
    fn zero_target_is_identity() {
        let w = weights();
        let config = NleConfig::default().with_target(0.0);
        let speech = spectrogram_from_power(&speechy_profile(), 10, 1);
        let noise = spectrogram_from_power(&vec![1e6; 257], 10, 2);
        let plan = plan_gains(&speech, &noise, &config, &w).unwrap();
        assert!(plan.bin_gains.iter().all(|g| *g == 1.0));
        let out = speech.apply_bin_gains(&plan.bin_gains).unwrap();
        assert_eq!(out, speech);
    }

    #[test]
    fn high_snr_switches_off() {
        let w = weights();
        let config = NleConfig::default();
        let speech = spectrogram_from_power(&speechy_profile(), 10, 1);
        let noise = spectrogram_from_power(&vec![1e-6; 257], 10, 2);
        let plan = plan_gains(&speech, &noise, &config, &w).unwrap();
        assert!(plan.states.iter().all(|s| *s == BandState::Passive));
        assert!(plan.bin_gains.iter().all(|g| *g == 1.0));
    }

    #[test]
    fn low_snr_meets_targets_exactly() {
        let w = weights();
        let config = NleConfig::default();
        // flat noise about 30 dB above the speech, scaled to stay under P_max
        let speech_power: Vec<f64> = speechy_profile().iter().map(|p| p * 1e-9).collect();
        let speech = spectrogram_from_power(&speech_power, 20, 3);
        let noise = spectrogram_from_power(&vec![1e-3; 257], 20, 4);
        let plan = plan_gains(&speech, &noise, &config, &w).unwrap();
        assert!(plan.states.iter().all(|s| *s == BandState::Active));
        assert!(!plan.any_limiter_active());
        for (xi, t) in plan.processed_band_snr().iter().zip(&plan.targets.snr_limit) {
            assert!((xi - t).abs() <= 1e-9 * t);
        }
    }

    #[test]
    fn limiter_caps_band_power() {
        let w = weights();
        let config = NleConfig::default();
        let speech = spectrogram_from_power(&vec![1.0; 257], 4, 5);
        let noise = spectrogram_from_power(&vec![1e6; 257], 4, 6);
        let plan = plan_gains(&speech, &noise, &config, &w).unwrap();
        assert!(plan.limiter_active.iter().all(|a| *a));
        for p in plan.processed_band_power().iter() {
            assert!((p - config.max_band_power()).abs() <= 1e-12);
        }
    }

    #[test]
    fn silent_speech_band_is_flagged() {
        let w = one_hot_weights(3, 2);
        let mut config = NleConfig::default();
        config.num_bands = 3;
        let plan = plan_from_bin_powers(
            vec![1.0, 1.0, 0.0, 0.0, 1.0, 1.0],
            vec![10.0; 6],
            &config,
            &w,
        )
        .unwrap();
        assert_eq!(plan.infeasible_bands(), vec![1]);
        assert_eq!(plan.band_gains[1], 1.0);
    }

    #[test]
    fn mismatched_inputs() {
        let w = weights();
        let config = NleConfig::default();
        let speech = spectrogram_from_power(&vec![1.0; 257], 4, 5);
        let mut noise = speech.clone();
        noise.params = StftParams::hann(256, 128, 512).unwrap();
        assert!(plan_gains(&speech, &noise, &config, &w).is_err());
        assert!(plan_from_bin_powers(vec![1.0; 257], vec![1.0; 256], &config, &w).is_err());
        let layout = erb_layout(30, 150.0, 4000.0).unwrap();
        let small = gammatone_weights(&layout, 129, 8000.0).unwrap();
        assert!(plan_gains(&speech, &speech, &config, &small).is_err());
    }

    #[test]
    fn diagnostics_csv_has_row_per_band() {
        let w = weights();
        let plan = plan_from_bin_powers(vec![1e-4; 257], vec![1e-3; 257], &NleConfig::default(), &w).unwrap();
        let mut buf = Vec::new();
        plan.write_diagnostics_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 31);
        assert!(text.starts_with("band,speech_power,noise_power,audibility_target,snr_target,state,"));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn gains_never_increase_as_noise_drops(
            seed in any::<u64>(),
            scale in 1e-4f64..1.0,
            target in 0.0f64..0.95,
        ) {
            let w = weights();
            let config = NleConfig::default().with_target(target);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let speech: Vec<f64> = (0..257).map(|_| 10f64.powf(rng.random_range(-8.0..-3.0))).collect();
            let noise: Vec<f64> = (0..257).map(|_| 10f64.powf(rng.random_range(-6.0..-2.0))).collect();
            let quieter: Vec<f64> = noise.iter().map(|n| n * scale).collect();
            let loud = plan_from_bin_powers(speech.clone(), noise, &config, &w).unwrap();
            let quiet = plan_from_bin_powers(speech, quieter, &config, &w).unwrap();
            for (a, b) in quiet.band_gains.iter().zip(&loud.band_gains) {
                prop_assert!(a <= b);
            }
            for (a, b) in quiet.bin_gains.iter().zip(&loud.bin_gains) {
                prop_assert!(a <= b);
            }
            prop_assert!(loud.band_gains.iter().all(|g| *g >= 1.0));
            for (j, xi) in loud.processed_band_snr().iter().enumerate() {
                if !loud.limiter_active[j] {
                    let t = loud.targets.snr_limit[j];
                    prop_assert!(*xi >= t * (1.0 - 1e-12));
                    if loud.states[j] == BandState::Active {
                        prop_assert!((xi - t).abs() <= 1e-9 * t);
                    }
                }
            }
        }
    }
}
