use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use super::noise::NoiseKind;
use super::trial::{run_trial, Pipeline, TrialSpec};
use crate::error::{Error, Result};
use crate::metrics::MetricReport;
use crate::stft::TimeSignal;

/// First line of every results CSV. Bump the version when columns change.
pub const CSV_SCHEMA: &str =
    "# nle-sweep v1; snr_db measured over the full padded utterance; asii from band gains, asii_bin_projected from bin gains";

/// Noise kinds x SNRs x targets x trials.
#[derive(Debug, Clone)]
pub struct SweepGrid {
    pub noises: Vec<NoiseKind>,
    pub snrs_db: Vec<f64>,
    pub targets: Vec<f64>,
    pub trials: usize,
}

impl SweepGrid {
    pub fn specs(&self, master_seed: u64) -> Vec<TrialSpec> {
        let mut specs = Vec::new();
        for noise in &self.noises {
            for snr in &self.snrs_db {
                for target in &self.targets {
                    for trial in 0..self.trials {
                        specs.push(TrialSpec {
                            noise: noise.clone(),
                            snr_db: *snr,
                            target_asii: *target,
                            seed: noise_seed(master_seed, noise, trial),
                            trial_index: trial,
                        });
                    }
                }
            }
        }
        specs
    }
}

/// Noise seed for one trial. It depends only on the noise kind and the trial
/// index, so every SNR and target of a trial sees the same realization.
fn noise_seed(master: u64, noise: &NoiseKind, trial: usize) -> u64 {
    // FNV-1a over the noise descriptor, then a splitmix64 finalizer
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in noise.to_string().bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    let mut z = master ^ h ^ (trial as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub noise: String,
    pub snr_db: f64,
    pub target_asii: f64,
    pub trial: usize,
    pub asii: f64,
    pub asii_unprocessed: f64,
    pub asii_bin_projected: f64,
    pub mse_penalty: f64,
    pub power_increase_db: f64,
    pub seg_snr_db: f64,
    pub limiter_bands: usize,
    pub infeasible_bands: usize,
}

impl SweepRow {
    fn new(spec: &TrialSpec, report: &MetricReport) -> Self {
        Self {
            noise: spec.noise.label(),
            snr_db: spec.snr_db,
            target_asii: spec.target_asii,
            trial: spec.trial_index,
            asii: report.asii,
            asii_unprocessed: report.asii_unprocessed,
            asii_bin_projected: report.asii_bin_projected,
            mse_penalty: report.mse_penalty,
            power_increase_db: report.power_increase_db,
            seg_snr_db: report.seg_snr_db,
            limiter_bands: report.limiter_bands,
            infeasible_bands: report.infeasible_bands,
        }
    }
}

/// Mean metrics over the trials of one (noise, SNR, target) cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellMean {
    pub noise: String,
    pub snr_db: f64,
    pub target_asii: f64,
    pub trials: usize,
    pub asii: f64,
    pub asii_unprocessed: f64,
    pub asii_bin_projected: f64,
    pub mse_penalty: f64,
    pub power_increase_db: f64,
    pub seg_snr_db: f64,
}

#[derive(Debug, Clone, Default)]
pub struct SweepResult {
    /// Successful trials in grid order.
    pub rows: Vec<SweepRow>,
    /// Error messages of failed trials.
    pub failures: Vec<String>,
}

impl SweepResult {
    pub fn means(&self) -> Vec<CellMean> {
        let mut cells: Vec<(CellMean, usize)> = Vec::new();
        for row in &self.rows {
            let same_cell = |c: &CellMean| {
                c.noise == row.noise && c.snr_db == row.snr_db && c.target_asii == row.target_asii
            };
            let idx = match cells.iter().position(|(c, _)| same_cell(c)) {
                Some(i) => i,
                None => {
                    cells.push((
                        CellMean {
                            noise: row.noise.clone(),
                            snr_db: row.snr_db,
                            target_asii: row.target_asii,
                            trials: 0,
                            asii: 0.0,
                            asii_unprocessed: 0.0,
                            asii_bin_projected: 0.0,
                            mse_penalty: 0.0,
                            power_increase_db: 0.0,
                            seg_snr_db: 0.0,
                        },
                        0,
                    ));
                    cells.len() - 1
                }
            };
            let (cell, count) = &mut cells[idx];
            *count += 1;
            cell.asii += row.asii;
            cell.asii_unprocessed += row.asii_unprocessed;
            cell.asii_bin_projected += row.asii_bin_projected;
            cell.mse_penalty += row.mse_penalty;
            cell.power_increase_db += row.power_increase_db;
            cell.seg_snr_db += row.seg_snr_db;
        }
        cells
            .into_iter()
            .map(|(mut cell, count)| {
                let n = count as f64;
                cell.trials = count;
                cell.asii /= n;
                cell.asii_unprocessed /= n;
                cell.asii_bin_projected /= n;
                cell.mse_penalty /= n;
                cell.power_increase_db /= n;
                cell.seg_snr_db /= n;
                cell
            })
            .collect()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{CSV_SCHEMA}")?;
        let mut writer = csv::Writer::from_writer(out);
        for row in &self.rows {
            writer.serialize(row)?;
        }
        writer.flush()?;
        Ok(())
    }

    pub fn write_means_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{CSV_SCHEMA}")?;
        let mut writer = csv::Writer::from_writer(out);
        for cell in self.means() {
            writer.serialize(cell)?;
        }
        writer.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::InvalidConfig(e.to_string()))
    }
}

/// Runs every trial of `grid` in parallel.
///
/// Trial `t` uses `speech[t % speech.len()]`. Failed trials are recorded in
/// `failures` while the remaining rows are kept.
pub fn run_sweep(
    pipeline: &Pipeline,
    speech: &[TimeSignal],
    grid: &SweepGrid,
    master_seed: u64,
    wav_dir: Option<&Path>,
) -> Result<SweepResult> {
    if speech.is_empty() {
        return Err(Error::InvalidConfig("sweep needs at least one speech signal".into()));
    }
    if grid.trials == 0 || grid.noises.is_empty() || grid.snrs_db.is_empty() || grid.targets.is_empty() {
        return Err(Error::InvalidConfig("sweep grid is empty".into()));
    }
    let specs = grid.specs(master_seed);
    let outcomes: Vec<std::result::Result<SweepRow, String>> = specs
        .par_iter()
        .map(|spec| {
            let clip = &speech[spec.trial_index % speech.len()];
            run_trial(pipeline, clip, spec, wav_dir)
                .map(|out| SweepRow::new(spec, &out.report))
                .map_err(|e| {
                    format!(
                        "{} at {} dB, A* {}, trial {}: {e}",
                        spec.noise, spec.snr_db, spec.target_asii, spec.trial_index
                    )
                })
        })
        .collect();
    let mut result = SweepResult::default();
    for outcome in outcomes {
        match outcome {
            Ok(row) => result.rows.push(row),
            Err(msg) => result.failures.push(msg),
        }
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::synthetic_utterance;
    use crate::NleConfig;

    #[test]
    fn seeds_ignore_snr_and_target() {
        let grid = SweepGrid {
            noises: vec![NoiseKind::White, NoiseKind::SpeechShaped],
            snrs_db: vec![-10.0, 0.0],
            targets: vec![0.3, 0.7],
            trials: 2,
        };
        let specs = grid.specs(5);
        assert_eq!(specs.len(), 16);
        for a in &specs {
            for b in &specs {
                let same = a.noise == b.noise && a.trial_index == b.trial_index;
                assert_eq!(same, a.seed == b.seed);
            }
        }
        assert_ne!(grid.specs(6)[0].seed, specs[0].seed);
    }

    #[test]
    fn single_cell_matches_direct_trial() {
        let pipeline = Pipeline::new(NleConfig::default()).unwrap();
        let speech = vec![synthetic_utterance(1, 1.0, 0.05)];
        let grid = SweepGrid {
            noises: vec![NoiseKind::White],
            snrs_db: vec![-5.0],
            targets: vec![0.7],
            trials: 1,
        };
        let result = run_sweep(&pipeline, &speech, &grid, 77, None).unwrap();
        assert_eq!(result.rows.len(), 1);
        let spec = &grid.specs(77)[0];
        let direct = run_trial(&pipeline, &speech[0], spec, None).unwrap();
        assert_eq!(result.rows[0], SweepRow::new(spec, &direct.report));
    }

    #[test]
    fn means_average_raw_rows() {
        let pipeline = Pipeline::new(NleConfig::default()).unwrap();
        let speech = vec![synthetic_utterance(1, 1.0, 0.05), synthetic_utterance(2, 1.2, 0.05)];
        let grid = SweepGrid {
            noises: vec![NoiseKind::White],
            snrs_db: vec![-10.0, 10.0],
            targets: vec![0.5],
            trials: 3,
        };
        let result = run_sweep(&pipeline, &speech, &grid, 1, None).unwrap();
        let means = result.means();
        assert_eq!(means.len(), 2);
        for cell in &means {
            let rows: Vec<&SweepRow> = result.rows.iter().filter(|r| r.snr_db == cell.snr_db).collect();
            assert_eq!(cell.trials, 3);
            let mean = rows.iter().map(|r| r.mse_penalty).sum::<f64>() / 3.0;
            assert!((cell.mse_penalty - mean).abs() <= 1e-15 * mean.abs().max(1.0));
            let mean = rows.iter().map(|r| r.asii).sum::<f64>() / 3.0;
            assert!((cell.asii - mean).abs() <= 1e-15);
        }
    }

    #[test]
    fn failures_keep_partial_rows() {
        let pipeline = Pipeline::new(NleConfig::default()).unwrap();
        let speech = vec![synthetic_utterance(1, 1.0, 0.05)];
        let grid = SweepGrid {
            noises: vec![NoiseKind::White, NoiseKind::File("/nonexistent/noise.wav".into())],
            snrs_db: vec![0.0],
            targets: vec![0.5],
            trials: 1,
        };
        let result = run_sweep(&pipeline, &speech, &grid, 1, None).unwrap();
        assert_eq!(result.rows.len(), 1);
        assert_eq!(result.failures.len(), 1);
        let csv = result.to_csv_string().unwrap();
        assert!(csv.starts_with(CSV_SCHEMA));
        assert_eq!(csv.lines().count(), 3);
    }
}
