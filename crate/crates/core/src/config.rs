use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filterbank::{erb_layout, gammatone_weights, SubbandWeights};
use crate::stft::StftParams;

/// Gain rule and analysis settings. Field names are the JSON config keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NleConfig {
    /// Target total intelligibility `A*` in `[0, 1)`.
    pub target_asii: f64,
    /// Band importance `gamma_j`; uniform `1/J` when absent.
    pub band_importance: Option<Vec<f64>>,
    /// Per-band power cap in dB SPL.
    pub max_band_power_dbspl: f64,
    /// Level in dB SPL of the digital reference power `P_0`; a signal of
    /// power `P_0 = 10^(-level/10)` sits at 0 dB SPL, so the cap in digital
    /// power units is `P_0 * 10^(max_band_power_dbspl / 10)`.
    pub reference_level_dbspl: f64,
    pub num_bands: usize,
    pub f_lo_hz: f64,
    pub f_hi_hz: f64,
    pub sample_rate: u32,
    pub window_length: usize,
    pub hop: usize,
    pub fft_size: usize,
}

impl Default for NleConfig {
    fn default() -> Self {
        Self {
            target_asii: 0.7,
            band_importance: None,
            max_band_power_dbspl: 100.0,
            reference_level_dbspl: 100.0,
            num_bands: 30,
            f_lo_hz: 150.0,
            f_hi_hz: 8000.0,
            sample_rate: 16000,
            window_length: 512,
            hop: 256,
            fft_size: 512,
        }
    }
}

impl NleConfig {
    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let config: Self = serde_json::from_str(&text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn with_target(mut self, target_asii: f64) -> Self {
        self.target_asii = target_asii;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.target_asii) {
            return Err(Error::InvalidConfig(format!(
                "target_asii must lie in [0, 1), got {}",
                self.target_asii
            )));
        }
        if self.num_bands == 0 {
            return Err(Error::InvalidConfig("num_bands must be positive".into()));
        }
        if let Some(gamma) = &self.band_importance {
            if gamma.len() != self.num_bands {
                return Err(Error::DimensionMismatch {
                    context: "band_importance",
                    expected: self.num_bands,
                    got: gamma.len(),
                });
            }
            if gamma.iter().any(|g| !(*g >= 0.0) || !g.is_finite()) {
                return Err(Error::InvalidConfig("band_importance must be finite and >= 0".into()));
            }
            if gamma.iter().sum::<f64>() <= 0.0 {
                return Err(Error::InvalidConfig("band_importance must not be all zero".into()));
            }
        }
        if !self.max_band_power_dbspl.is_finite() || !self.reference_level_dbspl.is_finite() {
            return Err(Error::InvalidConfig("sound levels must be finite".into()));
        }
        Ok(())
    }

    /// Digital reference power `P_0`.
    pub fn reference_power(&self) -> f64 {
        10f64.powf(-self.reference_level_dbspl / 10.0)
    }

    /// Maximum processed band power `P_max` in digital power units.
    pub fn max_band_power(&self) -> f64 {
        self.reference_power() * 10f64.powf(self.max_band_power_dbspl / 10.0)
    }

    /// `gamma_j`, uniform when not configured.
    pub fn importance(&self) -> Vec<f64> {
        match &self.band_importance {
            Some(g) => g.clone(),
            None => vec![1.0 / self.num_bands as f64; self.num_bands],
        }
    }

    pub fn stft_params(&self) -> Result<StftParams> {
        StftParams::hann(self.window_length, self.hop, self.fft_size)
    }

    pub fn subband_weights(&self) -> Result<SubbandWeights> {
        let layout = erb_layout(self.num_bands, self.f_lo_hz, self.f_hi_hz)?;
        let params = self.stft_params()?;
        gammatone_weights(&layout, params.num_bins(), self.sample_rate as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_cap_is_unit_power() {
        let c = NleConfig::default();
        assert!((c.reference_power() - 1e-10).abs() < 1e-24);
        assert!((c.max_band_power() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn json_round_trip_and_partial() {
        let c: NleConfig = serde_json::from_str(r#"{"target_asii": 0.5}"#).unwrap();
        assert_eq!(c.target_asii, 0.5);
        assert_eq!(c.num_bands, 30);
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<NleConfig>(&text).unwrap(), c);
        assert!(serde_json::from_str::<NleConfig>(r#"{"target": 0.5}"#).is_err());
    }

    #[test]
    fn validation() {
        assert!(NleConfig::default().with_target(1.0).validate().is_err());
        assert!(NleConfig::default().with_target(-0.1).validate().is_err());
        let mut c = NleConfig::default();
        c.band_importance = Some(vec![0.0; 30]);
        assert!(c.validate().is_err());
        c.band_importance = Some(vec![1.0; 29]);
        assert!(c.validate().is_err());
    }
}
