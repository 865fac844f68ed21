use std::path::PathBuf;

/// Errors produced anywhere in the enhancement pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("insufficient samples: need at least {needed}, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("invalid STFT parameters: {0}")]
    InvalidParams(String),

    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("negative gain {value} at index {index}")]
    NegativeGain { index: usize, value: f64 },

    #[error("invalid band range: {0}")]
    InvalidRange(String),

    #[error("empty spectrogram")]
    EmptySpectrogram,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("infeasible per-band target: I[{band}] = {value} >= 1")]
    InfeasibleTarget { band: usize, value: f64 },

    #[error("infeasible band instance: {0}")]
    InfeasibleInstance(String),

    #[error("band too large for exhaustive search: {0} bins (max 3)")]
    BandTooLarge(usize),

    #[error("length mismatch: reference {reference}, degraded {degraded}")]
    LengthMismatch { reference: usize, degraded: usize },

    #[error("signal is silent")]
    SilentSignal,

    #[error("expected 16000 Hz, got {0} Hz")]
    WrongSampleRate(u32),

    #[error("unsupported WAV format: {0}")]
    UnsupportedFormat(String),

    #[error("noise recording {path} has {available} samples, {requested} requested")]
    RecordingTooShort {
        path: PathBuf,
        available: usize,
        requested: usize,
    },

    #[error(transparent)]
    Wav(#[from] hound::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
