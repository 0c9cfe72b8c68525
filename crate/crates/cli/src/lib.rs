//! `stochmoments` command line. Every subcommand is a pure function of its
//! flags (and seed), writing CSV or JSON to stdout or `--output`.

mod commands;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use commands::parse_sampler;

/// Exit code for a successful run.
pub const EXIT_OK: i32 = 0;
/// Exit code when a computation fails.
pub const EXIT_FAILURE: i32 = 1;
/// Exit code for malformed command lines.
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "stochmoments", version, about = "Exact Wiener/Levy-area moments, Magnus-type stability and Monte Carlo checks")]
pub struct Cli {
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    pub format: Format,
    /// Write to this file instead of stdout
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Working precision in bits for floating-point output
    #[arg(long, default_value_t = 256, global = true, value_parser = clap::value_parser!(u32).range(64..))]
    pub precision_bits: u32,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// One moment gamma(n,k,l) = E[dW1^2n A^2k dW2^2l] on the unit interval
    Gamma(GammaArgs),
    /// All gamma(n,k,l) up to the given orders
    GammaTable(GammaTableArgs),
    /// E[dW1^2a dW2^2b (I12 I21)^c] on the unit interval
    MixedMoment(MixedMomentArgs),
    /// Exact coefficients a(n,0..n) of U_n
    UnCoeffs(UnCoeffsArgs),
    /// (1/n) ln|U_n(1)| and the sign of U_n(1)
    Lyapunov(LyapunovArgs),
    /// Mean-square stability region on a (p, q1) grid
    StabilityRegion(RegionArgs),
    /// Second moment of the test system at t_end
    Simulate(SimulateArgs),
    /// Strong errors against a fine classical Milstein reference
    StrongError(StrongErrorArgs),
    /// Monte Carlo estimate of gamma(n,k,l) with its z-score
    EstimateGamma(EstimateGammaArgs),
}

#[derive(Debug, Args)]
pub struct GammaArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub k: u32,
    #[arg(long)]
    pub l: u32,
    /// Print the exact rational (default)
    #[arg(long, conflicts_with = "decimal")]
    pub exact: bool,
    /// Print the correctly rounded decimal
    #[arg(long)]
    pub decimal: bool,
    #[arg(long, value_enum, default_value_t = BackendArg::Mgf)]
    pub backend: BackendArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    Recursive,
    Explicit,
    Mgf,
}

#[derive(Debug, Args)]
pub struct GammaTableArgs {
    #[arg(long)]
    pub max_n: u32,
    #[arg(long)]
    pub max_k: u32,
    #[arg(long)]
    pub max_l: u32,
}

#[derive(Debug, Args)]
pub struct MixedMomentArgs {
    #[arg(long)]
    pub a: u32,
    #[arg(long)]
    pub b: u32,
    #[arg(long)]
    pub c: u32,
    #[arg(long)]
    pub decimal: bool,
}

#[derive(Debug, Args)]
pub struct UnCoeffsArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub n: u32,
}

#[derive(Debug, Args)]
pub struct LyapunovArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub n_max: u32,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub n_min: u32,
}

#[derive(Debug, Args)]
pub struct RegionArgs {
    #[arg(long, value_enum, default_value_t = MethodArg::Milstein)]
    pub method: MethodArg,
    #[arg(long)]
    pub x: f64,
    #[arg(long, default_value_t = -4.0, allow_negative_numbers = true)]
    pub p_min: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub p_max: f64,
    /// Excluded from the grid
    #[arg(long, default_value_t = 0.0)]
    pub q_min: f64,
    #[arg(long, default_value_t = 4.0)]
    pub q_max: f64,
    #[arg(long, default_value_t = 81)]
    pub grid_p: usize,
    #[arg(long, default_value_t = 80)]
    pub grid_q: usize,
    #[arg(long, default_value_t = 256)]
    pub n_terms: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Euler,
    Milstein,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    MagnusEuler,
    MagnusMilstein,
    ClassicalMilstein,
}

#[derive(Debug, Args)]
pub struct TestSystemArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub sigma1: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub sigma2: f64,
    #[arg(long, default_value_t = 1000)]
    pub paths: u32,
    #[arg(long, default_value_t = 1)]
    pub batches: u32,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// subdiv:<substeps> | fourier:<terms> | fourier:<terms>:notail
    #[arg(long, default_value = "fourier:8", value_parser = parse_sampler)]
    pub sampler: stochmoments::sde::LevySampler,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum, default_value_t = SchemeArg::MagnusMilstein)]
    pub method: SchemeArg,
    #[command(flatten)]
    pub system: TestSystemArgs,
    #[arg(long)]
    pub h: f64,
    #[arg(long)]
    pub t_end: f64,
}

#[derive(Debug, Args)]
pub struct StrongErrorArgs {
    #[arg(long, value_enum, default_value_t = SchemeArg::MagnusMilstein)]
    pub method: SchemeArg,
    #[command(flatten)]
    pub system: TestSystemArgs,
    /// Comma-separated step sizes; `2^-3` style is accepted
    #[arg(long, value_delimiter = ',', value_parser = commands::parse_step)]
    pub h_list: Vec<f64>,
    #[arg(long, value_parser = commands::parse_step)]
    pub ref_h: f64,
    #[arg(long, default_value_t = 1.0)]
    pub t_end: f64,
    #[arg(long, value_enum, default_value_t = MetricArg::RssPerPath)]
    pub metric: MetricArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MetricArg {
    Mse,
    Rms,
    MeanNorm,
    RssPerPath,
}

#[derive(Debug, Args)]
pub struct EstimateGammaArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub k: u32,
    #[arg(long)]
    pub l: u32,
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 10)]
    pub batches: u32,
    #[arg(long, default_value_t = 1024)]
    pub substeps: u32,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

/// Parse `argv` (program name first), run the subcommand, and return the
/// process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    stochmoments::mc::configure_threads_from_env();
    match commands::execute(&cli).and_then(|text| emit(&cli, &text)) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_FAILURE
        }
    }
}

fn emit(cli: &Cli, text: &str) -> anyhow::Result<()> {
    match &cli.output {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}
