use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::wav::HARNESS_SAMPLE_RATE;
use crate::stft::TimeSignal;

/// Formant resonance magnitude, a single-pole peak.
fn resonance(freq: f64, center: f64, bandwidth: f64) -> f64 {
    let x = (freq - center) / bandwidth;
    (1.0 + x * x).sqrt().recip()
}

/// A speech-like test signal at 16 kHz with overall RMS `rms`.
///
/// Syllables of 150-350 ms alternate between voiced segments (harmonics of a
/// gliding 100-200 Hz fundamental under three formant peaks and a spectral
/// tilt) and unvoiced high-passed noise bursts, separated by short pauses.
/// A low aspiration noise floor keeps every frequency band populated.
/// Substitutes for recorded speech when no corpus is available.
pub fn synthetic_utterance(seed: u64, duration_s: f64, rms: f64) -> TimeSignal {
    let fs = f64::from(HARNESS_SAMPLE_RATE);
    let len = (duration_s * fs).round().max(1.0) as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![0.0; len];

    let mut start = 0usize;
    while start < len {
        let syllable = ((rng.random_range(0.15..0.35)) * fs) as usize;
        let end = (start + syllable).min(len);
        let ramp = (0.02 * fs) as usize;
        let envelope = |n: usize| {
            let from_start = n - start;
            let to_end = end - n;
            let edge = from_start.min(to_end).min(ramp) as f64 / ramp as f64;
            0.5 - 0.5 * (std::f64::consts::PI * edge).cos()
        };

        if rng.random_bool(0.75) {
            let f0_start: f64 = rng.random_range(100.0..200.0);
            let f0_end = f0_start * rng.random_range(0.8..1.2);
            let formants = [
                (rng.random_range(300.0..800.0), 80.0),
                (rng.random_range(900.0..2300.0), 120.0),
                (rng.random_range(2400.0..3400.0), 200.0),
            ];
            let num_harmonics = (7900.0 / f0_start.max(f0_end)) as usize;
            let mut phases: Vec<f64> = (0..num_harmonics).map(|_| rng.random_range(0.0..TAU)).collect();
            for n in start..end {
                let progress = (n - start) as f64 / (end - start) as f64;
                let f0 = f0_start + (f0_end - f0_start) * progress;
                let mut sample = 0.0;
                for (h, phase) in phases.iter_mut().enumerate() {
                    let f = f0 * (h + 1) as f64;
                    let peaks: f64 = formants.iter().map(|(c, b)| resonance(f, *c, *b)).sum();
                    let tilt = (f / 200.0).max(1.0).powf(-1.0);
                    sample += (peaks + 0.02) * tilt * phase.sin();
                    *phase = (*phase + TAU * f / fs) % TAU;
                }
                let breath: f64 = StandardNormal.sample(&mut rng);
                out[n] = envelope(n) * (sample + 0.01 * breath);
            }
        } else {
            let mut prev = 0.0;
            for n in start..end {
                let x: f64 = StandardNormal.sample(&mut rng);
                out[n] = envelope(n) * 0.15 * (x - 0.9 * prev);
                prev = x;
            }
        }
        let pause = ((rng.random_range(0.03..0.12)) * fs) as usize;
        start = end + pause;
    }

    // aspiration floor, 40 dB below the active level
    let active = (out.iter().map(|x| x * x).sum::<f64>() / len as f64).sqrt();
    for x in out.iter_mut() {
        let floor: f64 = StandardNormal.sample(&mut rng);
        *x += 0.01 * active * floor;
    }

    let current = (out.iter().map(|x| x * x).sum::<f64>() / len as f64).sqrt();
    if current > 0.0 {
        let scale = rms / current;
        out.iter_mut().for_each(|x| *x *= scale);
    }
    TimeSignal::new(out, HARNESS_SAMPLE_RATE)
}
