use std::path::PathBuf;
use std::process::ExitCode;

use bdcn_cli::{config::RunConfig, error::CliError};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bdcn", about = "Multi-scale edge detection: train, predict, evaluate, inspect")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a network and write checkpoints plus a training log.
    Train {
        /// Run configuration (TOML; every field optional).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Dataset manifest; overrides the config file.
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Output directory; overrides the config file.
        #[arg(long)]
        out: Option<PathBuf>,
        /// RNG seed; overrides the config file.
        #[arg(long)]
        seed: Option<u64>,
        /// Iteration count; overrides the config file.
        #[arg(long)]
        iterations: Option<usize>,
    },
    /// Run inference and write probability-map rasters and float dumps.
    Predict {
        #[arg(long)]
        checkpoint: PathBuf,
        /// A manifest file or a directory of PNG/PNM images.
        #[arg(long)]
        images: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Comma-separated scale factors for multi-scale fusion, e.g. "0.5,1.0,1.5".
        #[arg(long)]
        scales: Option<String>,
        /// Also write the 2S per-block side maps.
        #[arg(long)]
        emit_side_maps: bool,
    },
    /// Score predictions against ground truth (ODS/OIS/AP + PR CSV).
    Eval {
        /// Directory of <id>.f32 / <id>.png prediction maps.
        #[arg(long)]
        pred: PathBuf,
        /// Ground-truth manifest.
        #[arg(long)]
        gt: PathBuf,
        /// Match tolerance as a fraction of the image diagonal.
        #[arg(long, default_value_t = 0.0075)]
        tolerance: f64,
        #[arg(long, default_value = "eval_out")]
        out: PathBuf,
        /// Also write per-image best thresholds.
        #[arg(long)]
        per_image: bool,
    },
    /// Print the architecture report for a config file or a checkpoint.
    Inspect {
        #[arg(long, conflicts_with = "checkpoint")]
        config: Option<PathBuf>,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
    /// Generate a synthetic shape dataset with exact boundary ground truth.
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[arg(long, default_value_t = 64)]
        size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn run() -> Result<(), CliError> {
    match Cli::parse().command {
        Command::Train {
            config,
            manifest,
            out,
            seed,
            iterations,
        } => {
            let mut cfg = match config {
                Some(path) => RunConfig::load(&path)?,
                None => RunConfig::default(),
            };
            if let Some(m) = manifest {
                cfg.data.manifest = m;
            }
            if let Some(o) = out {
                cfg.output.dir = o;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(i) = iterations {
                cfg.optim.iterations = i;
            }
            let outcome = bdcn_cli::cmd_train(&cfg)?;
            println!(
                "trained {} iterations; final checkpoint {}",
                outcome.iterations,
                outcome.final_checkpoint.display()
            );
        }
        Command::Predict {
            checkpoint,
            images,
            out,
            scales,
            emit_side_maps,
        } => {
            let scale_vec: Option<Vec<f64>> = match scales {
                None => None,
                Some(s) => Some(
                    s.split(',')
                        .map(|v| v.trim().parse::<f64>())
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(|_| CliError::Usage(format!("bad --scales '{s}'")))?,
                ),
            };
            let n = bdcn_cli::cmd_predict(&checkpoint, &images, &out, scale_vec.as_deref(), emit_side_maps)?;
            println!("wrote predictions for {n} images to {}", out.display());
        }
        Command::Eval {
            pred,
            gt,
            tolerance,
            out,
            per_image,
        } => {
            let summary = bdcn_cli::cmd_eval(&pred, &gt, tolerance, &out, per_image)?;
            print!("{}", bdcn_eval::summary_text(&summary));
        }
        Command::Inspect { config, checkpoint } => {
            let text = match (config, checkpoint) {
                (Some(c), None) => bdcn_cli::cmd_inspect_config(&c)?,
                (None, Some(k)) => bdcn_cli::cmd_inspect_checkpoint(&k)?,
                _ => return Err(CliError::Usage("inspect needs --config or --checkpoint".into())),
            };
            print!("{text}");
        }
        Command::Synth { out, count, size, seed } => {
            let n = bdcn_cli::cmd_synth(&out, count, size, seed)?;
            println!("wrote {n} synthetic samples to {}", out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
