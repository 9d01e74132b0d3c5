use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use scalefisher::fisher::FisherMethod;
use scalefisher::{EstimatorKind, NoiseConvention, Preset};

#[derive(Debug, Parser)]
#[command(name = "scalefisher", version, about = "Fisher information and efficient estimation of σ² in Z = σ n^(−β) X + Y")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact, spectral-integral and closed-form Fisher information.
    Fisher(FisherArgs),
    /// Estimate σ² from a file of observations.
    Estimate(EstimateArgs),
    /// Draw observation vectors from the model.
    Simulate(SimulateArgs),
    /// Replicated estimation study at the model's true σ.
    McStudy(McStudyArgs),
    /// Spectral-integral Fisher information over a grid of n.
    RateScan(RateScanArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Model parameters. Flags override the preset's defaults.
#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// fbm-wn, large-error, integrated-fbm or user.
    #[arg(long, default_value = "fbm-wn")]
    pub preset: Preset,
    /// Hurst index of the signal.
    #[arg(long = "H")]
    pub hurst: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 1.0)]
    pub tau: f64,
    #[arg(long)]
    pub beta: Option<f64>,
    /// Order of the difference noise.
    #[arg(long = "K")]
    pub k: Option<u32>,
    /// Spectral exponent of the signal at zero frequency.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Constant of the slowly varying factor.
    #[arg(long)]
    pub ell: Option<f64>,
    /// Log power of the slowly varying factor, ℓ(x) = ell · log(x)^rho.
    #[arg(long = "ell-rho")]
    pub ell_rho: Option<f64>,
    /// Leading autocovariances γ₀, γ₁, … for the user preset, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub gammas: Option<Vec<f64>>,
    /// delta_deltaT or deltaT_delta.
    #[arg(long = "noise-convention")]
    pub noise_convention: Option<NoiseConvention>,
    /// Truncation of the cosine series for non-fGn spectra.
    #[arg(long = "k-max", value_parser = parse_count)]
    pub k_max: Option<usize>,
    /// Read the full model from a JSON file instead of a preset.
    #[arg(long = "spec", conflicts_with_all = ["hurst", "gammas"])]
    pub spec_file: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file; stdout when omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct FisherArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Sample size (accepts 1e6 style).
    #[arg(long, value_parser = parse_count)]
    pub n: usize,
    /// exact, integral, closed-form or all.
    #[arg(long, default_value = "all")]
    pub method: FisherMethod,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Newline-delimited observations.
    #[arg(long, short)]
    pub input: PathBuf,
    /// Expected number of observations; defaults to the file's length.
    #[arg(long, value_parser = parse_count)]
    pub n: Option<usize>,
    /// Fixed truncation level in (0, 1] for the preliminary estimate.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Smallest total information I₁ⁿ for which a split is attempted.
    #[arg(long = "min-information")]
    pub min_information: Option<f64>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SimulateFormat {
    Json,
    Csv,
    /// One value per line; only for a single replicate.
    Text,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_parser = parse_count)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub reps: usize,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = SimulateFormat::Csv)]
    pub format: SimulateFormat,
}

#[derive(Debug, Args)]
pub struct McStudyArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_parser = parse_count)]
    pub n: usize,
    #[arg(long)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "efficient")]
    pub estimator: EstimatorKind,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct RateScanArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// "lo:hi:logsteps=k" or a comma-separated list of sample sizes.
    #[arg(long = "n-grid", value_parser = parse_grid)]
    pub n_grid: Grid,
    #[command(flatten)]
    pub out: OutputArgs,
}

/// A positive integer, also written as 1e6.
pub fn parse_count(s: &str) -> Result<usize, String> {
    if let Ok(v) = s.parse::<usize>() {
        return if v > 0 { Ok(v) } else { Err("must be positive".into()) };
    }
    let v: f64 = s.parse().map_err(|_| format!("not a number: {s:?}"))?;
    if v >= 1.0 && v.fract() == 0.0 && v <= 1e18 {
        Ok(v as usize)
    } else {
        Err(format!("expected a positive integer, got {s}"))
    }
}

/// Strictly increasing sample sizes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grid(pub Vec<usize>);

/// Grid of sample sizes: "lo:hi:logsteps=k" (k log-spaced points including
/// both ends) or "a,b,c".
pub fn parse_grid(s: &str) -> Result<Grid, String> {
    let grid = if let Some((range, steps)) = s.rsplit_once(':') {
        let (lo, hi) = range.split_once(':').ok_or_else(|| format!("malformed grid {s:?}"))?;
        let (lo, hi) = (parse_count(lo)?, parse_count(hi)?);
        let k: usize = steps
            .strip_prefix("logsteps=")
            .ok_or_else(|| format!("expected logsteps=k in {s:?}"))?
            .parse()
            .map_err(|_| format!("bad step count in {s:?}"))?;
        if k < 2 || lo >= hi {
            return Err(format!("need lo < hi and at least 2 steps in {s:?}"));
        }
        let (a, b) = ((lo as f64).ln(), (hi as f64).ln());
        (0..k)
            .map(|i| (a + (b - a) * i as f64 / (k - 1) as f64).exp().round() as usize)
            .collect()
    } else {
        s.split(',').map(|t| parse_count(t.trim())).collect::<Result<Vec<_>, _>>()?
    };
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(format!("grid {s:?} is not strictly increasing"));
    }
    Ok(Grid(grid))
}
