//! Experiment harness: audio I/O, noise generation, single trials and
//! parameter sweeps.

mod noise;
mod sweep;
mod synth;
mod trial;
mod wav;

pub use noise::{make_noise, mix_at_snr, NoiseKind};
pub use sweep::{run_sweep, CellMean, SweepGrid, SweepResult, SweepRow, CSV_SCHEMA};
pub use synth::synthetic_utterance;
pub use trial::{pad_speech, run_trial, wav_name, Pipeline, TrialOutput, TrialSpec, LEAD_SILENCE, TRAIL_SILENCE};
pub use wav::{load_wav, save_wav, HARNESS_SAMPLE_RATE};
