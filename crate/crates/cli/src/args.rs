use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use randsing::concentration::{ProbRule, WeightRule};
use randsing::distributions::DistributionSpec;
use randsing::exact_linalg::Axis;
use randsing::montecarlo::SamplingMode;
use randsing::rational::{parse_rational, Rational};
use randsing::Variant;

#[derive(Debug, Parser)]
#[command(name = "randsing", version, about = "Exact decompositions, strong rank and singularity bounds for random matrices")]
#[command(after_help = "Any flag may also come from `--config FILE` (lines of `key = value`). \
Without --out, reports go to $RANDSING_OUT_DIR/<subcommand>.<ext> when that variable is set, else stdout.")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the Bernoulli decomposition of one entry law.
    Decompose(DecomposeArgs),
    /// Witness and decomposition diagnostics for one entry law.
    CheckLaw(CheckLawArgs),
    /// Largest atom of Σ αᵢεᵢ over a range of sizes.
    LoSweep(LoSweepArgs),
    /// Three-term singularity bound.
    Bound(BoundArgs),
    /// Strong rank of a matrix read from a file.
    StrongRank(StrongRankArgs),
    /// Monte Carlo singularity estimate for one matrix size.
    Simulate(SimulateArgs),
    /// Estimates and bounds over several matrix sizes.
    Scaling(ScalingArgs),
}

pub fn rational(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

/// A list of sizes given as `2..8`, `10..100:10`, or `2,3,5`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sizes(pub Vec<u64>);

pub fn sizes(s: &str) -> Result<Sizes, String> {
    size_list(s).map(Sizes)
}

fn size_list(s: &str) -> Result<Vec<u64>, String> {
    let s = s.trim();
    let bad = || format!("expected `a..b`, `a..b:step` or a comma list, got `{s}`");
    if let Some((lo, rest)) = s.split_once("..") {
        let (hi, step) = rest.split_once(':').unwrap_or((rest, "1"));
        let lo: u64 = lo.trim().parse().map_err(|_| bad())?;
        let hi: u64 = hi.trim().parse().map_err(|_| bad())?;
        let step: usize = step.trim().parse().map_err(|_| bad())?;
        if step == 0 || lo > hi {
            return Err(bad());
        }
        return Ok((lo..=hi).step_by(step).collect());
    }
    s.split(',').map(|t| t.trim().parse().map_err(|_| bad())).collect()
}

/// `n=…` followed by a size list.
fn scan_spec(s: &str) -> Result<Sizes, String> {
    sizes(s.strip_prefix("n=").unwrap_or(s))
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum VariantArg {
    Unshifted,
    Shifted,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Unshifted => Variant::Unshifted,
            VariantArg::Shifted => Variant::Shifted,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum AxisArg {
    Rows,
    Columns,
}

impl From<AxisArg> for Axis {
    fn from(a: AxisArg) -> Self {
        match a {
            AxisArg::Rows => Axis::Rows,
            AxisArg::Columns => Axis::Columns,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Direct,
    Decomposed,
}

impl From<ModeArg> for SamplingMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Direct => SamplingMode::Direct,
            ModeArg::Decomposed => SamplingMode::Decomposed,
        }
    }
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output file; see the note on RANDSING_OUT_DIR.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LawArgs {
    /// Entry law, e.g. `discrete{0:1/2, 1:1/2}` or `uniform{(0,1):1}`.
    #[arg(long)]
    pub dist: DistributionSpec,
    /// Non-degeneracy level ρ in ]0, 1/2[.
    #[arg(long, value_parser = rational)]
    pub rho: Rational,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    #[command(flatten)]
    pub law: LawArgs,
    #[arg(long, value_enum, default_value = "unshifted")]
    pub variant: VariantArg,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CheckLawArgs {
    #[command(flatten)]
    pub law: LawArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct LoSweepArgs {
    /// Sizes, e.g. `4,16,64` or `1..64`.
    #[arg(long, value_parser = sizes, default_value = "4,16,64")]
    pub s: Sizes,
    /// ones, ramp, alternating or dyadic.
    #[arg(long, default_value = "ones")]
    pub weights: WeightRule,
    /// `1/2`, `const:1/2`, `alternating:3/5` or `ramp:2/5..3/5`.
    #[arg(long, default_value = "1/2")]
    pub probs: ProbRule,
    /// Every parameter must lie in ]1 − p₀, p₀[.
    #[arg(long, value_parser = rational, default_value = "3/4")]
    pub p0: Rational,
    /// Envelope constant; defaults to √(2/π)/(2·min(p₀, 1 − p₀)).
    #[arg(long)]
    pub c: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[arg(long, required_unless_present = "scan")]
    pub n: Option<u64>,
    #[arg(long, value_parser = rational)]
    pub p0: Rational,
    #[arg(long, required_unless_present = "auto_thresholds", conflicts_with = "auto_thresholds")]
    pub alpha: Option<f64>,
    #[arg(long, required_unless_present = "auto_thresholds", conflicts_with = "auto_thresholds")]
    pub beta: Option<f64>,
    /// Choose α and β so both exponents are negative.
    #[arg(long)]
    pub auto_thresholds: bool,
    /// Concentration constant; defaults to the calibrated value for p₀.
    #[arg(long)]
    pub c: Option<f64>,
    /// CSV of `n,total,total_sqrt_n` for e.g. `n=10..1000:10`.
    #[arg(long, value_parser = scan_spec, conflicts_with = "n")]
    pub scan: Option<Sizes>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct StrongRankArgs {
    /// Whitespace-separated rationals, one row per line.
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long, value_enum, default_value = "columns")]
    pub axis: AxisArg,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct EnsembleArgs {
    /// Law shared by every entry.
    #[arg(long, required_unless_present = "grid", conflicts_with = "grid")]
    pub dist: Option<DistributionSpec>,
    /// File with one law per line, row-major, one per entry.
    #[arg(long)]
    pub grid: Option<PathBuf>,
    #[arg(long, value_parser = rational, default_value = "1/10")]
    pub rho: Rational,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "direct")]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    /// Worker threads; 0 uses all cores. Output does not depend on it.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    /// Concentration constant for the bound column.
    #[arg(long)]
    pub c: Option<f64>,
    /// Run manifest path; defaults to the CSV path with `.manifest.json`.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub n: u64,
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
}

#[derive(Debug, Args)]
pub struct ScalingArgs {
    /// Sizes, e.g. `2..8` or `10,20,40`.
    #[arg(long, value_parser = sizes, default_value = "2..8")]
    pub n_values: Sizes,
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn size_lists() {
        assert_eq!(size_list("2..5").unwrap(), vec![2, 3, 4, 5]);
        assert_eq!(size_list("10..40:10").unwrap(), vec![10, 20, 30, 40]);
        assert_eq!(size_list("4, 16,64").unwrap(), vec![4, 16, 64]);
        assert_eq!(scan_spec("n=1..3").unwrap(), Sizes(vec![1, 2, 3]));
        assert!(size_list("5..2").is_err());
        assert!(size_list("a").is_err());
    }

    #[test]
    fn cli_is_well_formed() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
