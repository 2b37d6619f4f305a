use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nft_core::{NftError, Preset};
use serde::Serialize;

mod commands;
mod output;

/// Fourier-collocation nonlinear Fourier transform with first-order noise statistics
#[derive(Parser, Debug)]
#[command(name = "nft", version, about)]
struct Cli {
    /// Directory for all outputs
    #[arg(long, global = true, env = "NFT_OUT_DIR", default_value = ".")]
    out_dir: PathBuf,

    /// Maximum number of Monte-Carlo worker threads
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Print progress to stderr
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Synthesize a pulse from a discrete spectrum, a preset, or a sech amplitude
    Synth(SynthArgs),
    /// Discrete spectrum of a sampled pulse
    Nft(NftArgs),
    /// Analytic first-order covariances for a list of SNRs
    Stats(StatsArgs),
    /// Monte-Carlo covariances compared against the analytic prediction
    Mc(McArgs),
    /// Relative errors of FC and the transfer-matrix oracle versus sample count
    Sweep(SweepArgs),
}

#[derive(Args, Debug, Serialize)]
struct PulseInput {
    /// Pulse file written by `synth`
    #[arg(long, conflicts_with = "preset")]
    pulse: Option<PathBuf>,

    /// Built-in pulse: 2sol, 5sol or sech22
    #[arg(long)]
    preset: Option<Preset>,

    /// Sample count for presets (odd)
    #[arg(long, requires = "preset")]
    samples: Option<usize>,

    /// Phase of b_2 relative to b_1 for the 2sol preset, in radians
    #[arg(long, requires = "preset")]
    alpha: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum WindowChoice {
    Hann,
    Rect,
}

#[derive(Args, Debug, Serialize)]
struct FcArgs {
    /// Window applied to both eigenvector halves when reading b
    #[arg(long, value_enum, default_value = "hann")]
    window: WindowChoice,

    /// Read b at the interval edges instead of at the truncation times
    #[arg(long)]
    no_truncate: bool,

    /// Eigenvalues with Im(lambda) at or below this are discarded
    #[arg(long, default_value_t = 1e-2)]
    tau: f64,

    /// Keep exactly this many modes (error if fewer are found)
    #[arg(long)]
    expected: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum NoiseChoice {
    White,
    Colored,
}

#[derive(Args, Debug, Serialize)]
struct NoiseArgs {
    #[arg(long, value_enum, default_value = "white")]
    noise: NoiseChoice,

    /// Real 2M x 2M shaping matrix G as CSV, required for colored noise
    #[arg(long)]
    shaping: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct SynthArgs {
    /// Spectrum file (`# nft-spectrum v1` format)
    #[arg(long, conflicts_with_all = ["preset", "sech"])]
    spectrum: Option<PathBuf>,

    #[arg(long, conflicts_with = "sech")]
    preset: Option<Preset>,

    /// Amplitude of an A sech(t) pulse
    #[arg(long)]
    sech: Option<f64>,

    /// Interval length T
    #[arg(long)]
    duration: Option<f64>,

    /// Sample count M (odd)
    #[arg(long)]
    samples: Option<usize>,

    /// Phase of b_2 relative to b_1 for the 2sol preset, in radians
    #[arg(long, requires = "preset")]
    alpha: Option<f64>,

    /// Also write the normalized Jost solutions (multi-solitons only)
    #[arg(long)]
    jost: bool,
}

#[derive(Args, Debug, Serialize)]
struct NftArgs {
    #[command(flatten)]
    input: PulseInput,
    #[command(flatten)]
    fc: FcArgs,
}

#[derive(Args, Debug, Serialize)]
struct StatsArgs {
    #[command(flatten)]
    input: PulseInput,
    #[command(flatten)]
    fc: FcArgs,
    #[command(flatten)]
    noise: NoiseArgs,

    /// Comma-separated SNR values in dB
    #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
    snr: Vec<f64>,
}

#[derive(Args, Debug, Serialize)]
struct McArgs {
    #[command(flatten)]
    input: PulseInput,
    #[command(flatten)]
    fc: FcArgs,
    #[command(flatten)]
    noise: NoiseArgs,

    /// SNR in dB
    #[arg(long)]
    snr: f64,

    /// Base seed; realization i uses seed + i
    #[arg(long)]
    seed: u64,

    #[arg(long, default_value_t = 1024)]
    realizations: usize,

    /// Match radius as a fraction of min Im(lambda_k)
    #[arg(long, default_value_t = 0.5)]
    radius_factor: f64,

    /// Outlier fraction above which the run is flagged
    #[arg(long, default_value_t = 0.1)]
    max_outlier_fraction: f64,
}

#[derive(Args, Debug, Serialize)]
struct SweepArgs {
    #[arg(long, required_unless_present = "spectrum")]
    preset: Option<Preset>,

    /// Spectrum file for a multi-soliton sweep
    #[arg(long, conflicts_with = "preset", requires = "duration")]
    spectrum: Option<PathBuf>,

    #[arg(long)]
    duration: Option<f64>,

    /// Comma-separated sample counts
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    samples: Option<Vec<usize>>,

    /// Skip the transfer-matrix oracle rows
    #[arg(long)]
    no_oracle: bool,

    #[command(flatten)]
    fc: FcArgs,
}

/// Usage mistakes not caught by argument parsing.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// 1 for numerical failures, 2 for bad input or configuration.
fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<NftError>() {
        Some(
            NftError::EigenNonConvergence(_)
            | NftError::InsufficientModes { .. }
            | NftError::UnstableNormalization { .. }
            | NftError::NearDefective { .. }
            | NftError::SingularResolvent(_)
            | NftError::EvaluationAtPole(_)
            | NftError::DegenerateSpectrum(_),
        ) => 1,
        Some(NftError::Io(_)) => 1,
        Some(_) => 2,
        None if err.downcast_ref::<UsageError>().is_some() => 2,
        None => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
