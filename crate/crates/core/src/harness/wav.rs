use std::path::Path;

use hound::{SampleFormat, WavSpec};

use crate::error::{Error, Result};
use crate::stft::TimeSignal;

pub const HARNESS_SAMPLE_RATE: u32 = 16000;

/// Reads a mono 16 kHz WAV as samples in `[-1, 1]`.
///
/// Integer PCM is scaled by `2^-(bits-1)`; float data is taken as is. No
/// resampling is done.
pub fn load_wav(path: impl AsRef<Path>) -> Result<TimeSignal> {
    let mut reader = hound::WavReader::open(path)?;
    let spec = reader.spec();
    if spec.channels != 1 {
        return Err(Error::UnsupportedFormat(format!(
            "{} channels, expected mono",
            spec.channels
        )));
    }
    if spec.sample_rate != HARNESS_SAMPLE_RATE {
        return Err(Error::WrongSampleRate(spec.sample_rate));
    }
    let samples = match (spec.sample_format, spec.bits_per_sample) {
        (SampleFormat::Float, 32) => reader
            .samples::<f32>()
            .map(|s| s.map(f64::from))
            .collect::<std::result::Result<Vec<_>, _>>()?,
        (SampleFormat::Int, bits @ (8 | 16 | 24 | 32)) => {
            let scale = 1.0 / f64::from(1u32 << (bits - 1));
            reader
                .samples::<i32>()
                .map(|s| s.map(|v| f64::from(v) * scale))
                .collect::<std::result::Result<Vec<_>, _>>()?
        }
        (format, bits) => {
            return Err(Error::UnsupportedFormat(format!("{format:?} with {bits} bits")));
        }
    };
    Ok(TimeSignal::new(samples, spec.sample_rate))
}

/// Writes a mono 32-bit float WAV.
pub fn save_wav(path: impl AsRef<Path>, signal: &TimeSignal) -> Result<()> {
    let spec = WavSpec {
        channels: 1,
        sample_rate: signal.sample_rate,
        bits_per_sample: 32,
        sample_format: SampleFormat::Float,
    };
    let mut writer = hound::WavWriter::create(path, spec)?;
    for s in &signal.samples {
        writer.write_sample(*s as f32)?;
    }
    writer.finalize()?;
    Ok(())
}
