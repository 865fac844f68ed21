use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use nle_core::gain::optimal_gain;
use nle_core::harness::{
    load_wav, run_sweep, run_trial, synthetic_utterance, NoiseKind, Pipeline, SweepGrid, SweepResult, TrialSpec,
};
use nle_core::oracle::{random_instance, solve_numeric};
use nle_core::{NleConfig, Result, TimeSignal};

/// Near-end listening enhancement: closed-form minimum-processing gains.
#[derive(Parser)]
#[command(name = "nle", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON config file; missing keys take defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct SpeechArgs {
    /// Clean speech WAV (mono, 16 kHz), or `synthetic`. Repeatable.
    #[arg(long, default_values_t = vec!["synthetic".to_string()])]
    speech: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Process one utterance at one condition.
    Trial {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        speech: SpeechArgs,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        snr: f64,
        /// Target intelligibility A*; defaults to the config value.
        #[arg(long)]
        astar: Option<f64>,
        /// `white`, `speech_shaped`, or `file:<path>`.
        #[arg(long, default_value = "white")]
        noise: NoiseKind,
        /// Also write per-band diagnostics CSV.
        #[arg(long)]
        diagnostics: bool,
    },
    /// Run a grid of conditions and write per-trial and mean CSVs.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        speech: SpeechArgs,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true,
              default_values_t = vec![-30.0, -25.0, -20.0, -15.0, -10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0])]
        snr: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.0, 0.3, 0.5, 0.7, 0.9])]
        astar: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = vec![NoiseKind::White])]
        noise: Vec<NoiseKind>,
        #[arg(long, default_value_t = 3)]
        trials: usize,
        /// Write processed and mixture WAVs for every trial.
        #[arg(long)]
        wavs: bool,
    },
    /// Write the subband weight matrix as CSV.
    DumpWeights {
        #[command(flatten)]
        common: Common,
    },
    /// Compare closed-form gains with the numeric optimum on random instances.
    OracleCheck {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1000)]
        instances: usize,
        #[arg(long, default_value_t = 8)]
        max_bins: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn load_config(common: &Common) -> Result<NleConfig> {
    let config = match &common.config {
        Some(path) => NleConfig::from_json_file(path)?,
        None => NleConfig::default(),
    };
    config.validate()?;
    Ok(config)
}

fn load_speech(args: &SpeechArgs, seed: u64) -> Result<Vec<TimeSignal>> {
    args.speech
        .iter()
        .enumerate()
        .map(|(i, s)| {
            if s == "synthetic" {
                Ok(synthetic_utterance(seed.wrapping_add(i as u64), 2.5, 0.05))
            } else {
                load_wav(s)
            }
        })
        .collect()
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Trial {
            common,
            speech,
            snr,
            astar,
            noise,
            diagnostics,
        } => {
            let config = load_config(&common)?;
            let target = astar.unwrap_or(config.target_asii);
            let pipeline = Pipeline::new(config)?;
            let clip = load_speech(&speech, common.seed)?.remove(0);
            let spec = TrialSpec {
                noise,
                snr_db: snr,
                target_asii: target,
                seed: common.seed,
                trial_index: 0,
            };
            let out = run_trial(&pipeline, &clip, &spec, Some(&common.out_dir))?;
            if diagnostics {
                let path = common.out_dir.join("bands.csv");
                out.plan.write_diagnostics_csv(create(&path)?)?;
            }
            let r = &out.report;
            println!(
                "asii {:.4} (unprocessed {:.4}, bin-projected {:.4})  power +{:.2} dB  mse {:.4e}  segsnr {:.2} dB  limiter bands {}  infeasible bands {}",
                r.asii,
                r.asii_unprocessed,
                r.asii_bin_projected,
                r.power_increase_db,
                r.mse_penalty,
                r.seg_snr_db,
                r.limiter_bands,
                r.infeasible_bands
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep {
            common,
            speech,
            snr,
            astar,
            noise,
            trials,
            wavs,
        } => {
            let config = load_config(&common)?;
            let pipeline = Pipeline::new(config)?;
            let clips = load_speech(&speech, common.seed)?;
            let grid = SweepGrid {
                noises: noise,
                snrs_db: snr,
                targets: astar,
                trials,
            };
            let wav_dir = common.out_dir.join("wav");
            let start = Instant::now();
            let result = run_sweep(&pipeline, &clips, &grid, common.seed, wavs.then_some(wav_dir.as_path()))?;
            write_sweep(&result, &common.out_dir)?;
            eprintln!(
                "{} trials in {:.1} s, {} failed; results in {}",
                result.rows.len() + result.failures.len(),
                start.elapsed().as_secs_f64(),
                result.failures.len(),
                common.out_dir.display()
            );
            for f in &result.failures {
                eprintln!("failed: {f}");
            }
            Ok(if result.failures.is_empty() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            })
        }
        Command::DumpWeights { common } => {
            let config = load_config(&common)?;
            let weights = config.subband_weights()?;
            let path = common.out_dir.join("weights.csv");
            let mut out = create(&path)?;
            weights.write_csv(&mut out)?;
            out.flush()?;
            println!("{} bands x {} bins -> {}", weights.num_bands(), weights.num_bins(), path.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::OracleCheck {
            common,
            instances,
            max_bins,
            tol,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(common.seed);
            let start = Instant::now();
            let mut worst = 0.0f64;
            let mut failures = 0usize;
            for _ in 0..instances {
                let inst = random_instance(&mut rng, max_bins);
                let numeric = solve_numeric(&inst, tol * 1e-3)?;
                let (closed, _) = optimal_gain(inst.speech_band_power(), inst.noise_power, inst.snr_target);
                let dev = numeric.iter().map(|v| (v - closed).abs() / closed).fold(0.0, f64::max);
                worst = worst.max(dev);
                if dev > tol {
                    failures += 1;
                }
            }
            println!(
                "{instances} instances, worst relative deviation {worst:.3e}, {failures} above {tol:e}, {:.2} s",
                start.elapsed().as_secs_f64()
            );
            Ok(if failures == 0 { ExitCode::SUCCESS } else { ExitCode::from(2) })
        }
    }
}

fn write_sweep(result: &SweepResult, dir: &Path) -> Result<()> {
    let mut out = create(&dir.join("sweep.csv"))?;
    result.write_csv(&mut out)?;
    out.flush()?;
    let mut means = create(&dir.join("sweep_means.csv"))?;
    result.write_means_csv(&mut means)?;
    means.flush()?;
    Ok(())
}
