use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rmflab_core::experiments::HSpec;
use rmflab_core::{ArithSet, EquationKind, PolySpec, RmfModel, TopPrimeConstraint, Twist};

#[derive(Parser, Debug)]
#[command(
    name = "rmflab",
    version,
    about = "Exact counts and Monte Carlo experiments for random multiplicative functions"
)]
pub struct Cli {
    /// Plain `key=value` file; command-line flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Worker threads (results do not depend on it).
    #[arg(long, global = true)]
    pub workers: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build the factor sieve and write the cache file.
    Sieve(SieveCmd),
    /// Fourth-moment solution tallies and the off-diagonal ratios.
    Count(CountCmd),
    /// Distance of S_N to the normal law, with the exact A, B and bound.
    Clt(CltCmd),
    /// Maxima of S_N over geometric scales of a polynomial image.
    FluctPoly(FluctPolyCmd),
    /// Maxima over prime-multiple short intervals, with the pruning split.
    FluctShort(FluctShortCmd),
    /// Increments of the partial sums between slowly growing scales.
    Slowvar(SlowvarCmd),
    /// P(max Y_l <= t) for an equicorrelated Gaussian vector.
    Gaussmax(GaussmaxCmd),
    /// Exact solution counts for every pair of short-interval scales.
    VerifyScales(VerifyScalesCmd),
}

#[derive(Args, Debug, Default)]
pub struct OutputArgs {
    /// Primary output file (CSV or JSON); standard output when absent.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// JSON summary file.
    #[arg(long, value_name = "FILE")]
    pub summary: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
pub struct SieveArgs {
    /// Sieve limit; by default the smallest one the run needs.
    #[arg(long = "sieve-limit")]
    pub sieve_limit: Option<u64>,
}

#[derive(Args, Debug, Default)]
pub struct RunArgs {
    #[arg(long)]
    pub model: Option<RmfModel>,
    /// identity (Rademacher), sqrt2-re or sqrt2-im (Steinhaus).
    #[arg(long)]
    pub twist: Option<Twist>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<u64>,
}

#[derive(Args, Debug, Default)]
pub struct ShortFamilyArgs {
    #[arg(long = "X")]
    pub x: Option<f64>,
    /// pow:ALPHA, logpow:A or subexp.
    #[arg(long)]
    pub hspec: Option<HSpec>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub eps0: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    /// Number of scales, instead of the one derived from eps0.
    #[arg(long)]
    pub k: Option<usize>,
}

#[derive(Args, Debug)]
pub struct SieveCmd {
    #[command(flatten)]
    pub sieve: SieveArgs,
    /// Cache file; defaults to $RMFLAB_SIEVE_CACHE.
    #[arg(long, value_name = "FILE")]
    pub cache: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct CountCmd {
    /// A set per tuple position; give it four times.
    #[arg(long)]
    pub set: Vec<ArithSet>,
    /// One set for all four positions.
    #[arg(long = "set-all")]
    pub set_all: Option<ArithSet>,
    /// square or ratio.
    #[arg(long)]
    pub eq: Option<EquationKind>,
    /// none, paired, cross or all-equal.
    #[arg(long)]
    pub constraint: Option<TopPrimeConstraint>,
    /// Model used to pick the default equation.
    #[arg(long)]
    pub model: Option<RmfModel>,
    /// Cap on pair-enumeration work.
    #[arg(long)]
    pub budget: Option<u128>,
    #[command(flatten)]
    pub sieve: SieveArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct CltCmd {
    #[command(flatten)]
    pub run: RunArgs,
    /// Set to sample; repeat for a multi-scale run.
    #[arg(long)]
    pub set: Vec<ArithSet>,
    /// Cap on pair-enumeration work for the exact moments.
    #[arg(long)]
    pub budget: Option<u128>,
    #[command(flatten)]
    pub sieve: SieveArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct FluctPolyCmd {
    #[command(flatten)]
    pub run: RunArgs,
    /// Ascending coefficients, e.g. 0,1,1 for x + x^2.
    #[arg(long)]
    pub poly: Option<PolySpec>,
    #[arg(long = "X")]
    pub x: Option<f64>,
    #[arg(long)]
    pub eps0: Option<f64>,
    /// Number of scales, instead of floor(sqrt(ln X)).
    #[arg(long)]
    pub k: Option<usize>,
    #[command(flatten)]
    pub sieve: SieveArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct FluctShortCmd {
    #[command(flatten)]
    pub run: RunArgs,
    #[command(flatten)]
    pub family: ShortFamilyArgs,
    #[command(flatten)]
    pub sieve: SieveArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct SlowvarCmd {
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long)]
    pub poly: Option<PolySpec>,
    /// Exponent in N_l = floor(exp(l^c)).
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long = "l-max")]
    pub l_max: Option<u64>,
    /// Grid points per gap.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Power of ln N in the normalizer.
    #[arg(long = "log-power")]
    pub log_power: Option<f64>,
    #[command(flatten)]
    pub sieve: SieveArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct GaussmaxCmd {
    /// Dimension.
    #[arg(long)]
    pub k: Option<usize>,
    /// Threshold.
    #[arg(long)]
    pub t: Option<f64>,
    /// Common off-diagonal correlation.
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct VerifyScalesCmd {
    #[command(flatten)]
    pub family: ShortFamilyArgs,
    /// Restrict to one equation; both by default.
    #[arg(long)]
    pub eq: Option<EquationKind>,
    /// First scale prime; with --l2, count only that pair.
    #[arg(long)]
    pub l1: Option<u64>,
    #[arg(long)]
    pub l2: Option<u64>,
    #[command(flatten)]
    pub sieve: SieveArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}
