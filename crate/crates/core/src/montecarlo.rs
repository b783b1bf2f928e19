//! Random matrices with independent, per-entry laws: sampling, Monte Carlo
//! estimates, exact enumeration, and comparison against the bounds.
//!
//! Trial `i` always draws from the stream keyed by `(seed, i)`, and hit
//! counts are plain sums, so results do not depend on the worker count.

use std::io::{self, Write};

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bernoulli_decomp::{decompose, Decomposition, DecompositionError, Variant};
use crate::bounds::{optimize_thresholds, singularity_bound, strong_rank_tail, BoundParams, BoundReport, BoundsError};
use crate::concentration::default_lo_constant;
use crate::distributions::{DistributionError, DistributionKind, DistributionSpec, NonDegeneracyWitness};
use crate::exact_linalg::{is_singular, smallest_circuit, Axis, RationalMatrix};
use crate::rational::{format_rational, serde_exact, Rational};
use crate::rng;
use crate::stats::{wilson_interval, Z95};

/// Default cap on the number of outcomes [`exact_singular_prob`] will enumerate.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MonteCarloError {
    #[error("entry ({row}, {col}): {source}")]
    Witness { row: usize, col: usize, source: DistributionError },
    #[error("entry ({row}, {col}): {source}")]
    Decomposition { row: usize, col: usize, source: DecompositionError },
    #[error("grid has {got} laws, expected {expected}")]
    GridSize { expected: usize, got: usize },
    #[error("matrix dimensions must be positive")]
    EmptyShape,
    #[error("ensemble is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("at least one trial is required")]
    NoTrials,
    #[error("{outcomes} outcomes exceed the enumeration budget {budget}")]
    BudgetExceeded { outcomes: String, budget: u64 },
    #[error("exact enumeration needs discrete entry laws")]
    NotDiscrete,
    #[error("k = {k} must lie in [1, {max}]")]
    BadK { k: usize, max: usize },
    #[error("worker pool: {0}")]
    Pool(String),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplingMode {
    /// Each entry is drawn from its law.
    #[default]
    Direct,
    /// All `w` first, then all `ε`, assembled as `f(w) + δ(w)·ε`.
    Decomposed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EntryLaws {
    Shared(DistributionSpec),
    /// Row-major, one law per entry.
    Grid(Vec<DistributionSpec>),
}

/// A validated ensemble: every entry law has a witness at level `rho`,
/// and in decomposed mode a certified decomposition.
#[derive(Debug, Clone)]
pub struct EnsembleSpec {
    rows: usize,
    cols: usize,
    laws: Vec<DistributionSpec>,
    law_index: Vec<usize>,
    witnesses: Vec<NonDegeneracyWitness>,
    decompositions: Vec<Decomposition>,
    rho: Rational,
    seed: u64,
    mode: SamplingMode,
}

impl EnsembleSpec {
    pub fn new(
        rows: usize,
        cols: usize,
        entry_laws: EntryLaws,
        rho: Rational,
        seed: u64,
        mode: SamplingMode,
    ) -> Result<Self, MonteCarloError> {
        if rows == 0 || cols == 0 {
            return Err(MonteCarloError::EmptyShape);
        }
        let (laws, law_index) = match entry_laws {
            EntryLaws::Shared(law) => (vec![law], vec![0; rows * cols]),
            EntryLaws::Grid(grid) => {
                if grid.len() != rows * cols {
                    return Err(MonteCarloError::GridSize { expected: rows * cols, got: grid.len() });
                }
                let mut distinct: Vec<DistributionSpec> = Vec::new();
                let mut index = Vec::with_capacity(grid.len());
                for law in grid {
                    let i = distinct.iter().position(|d| d == &law).unwrap_or_else(|| {
                        distinct.push(law);
                        distinct.len() - 1
                    });
                    index.push(i);
                }
                (distinct, index)
            }
        };
        let first_entry = |law: usize| {
            let pos = law_index.iter().position(|&i| i == law).unwrap_or(0);
            (pos / cols, pos % cols)
        };
        let witnesses = laws
            .iter()
            .enumerate()
            .map(|(i, law)| {
                law.find_witness(&rho).map_err(|source| {
                    let (row, col) = first_entry(i);
                    MonteCarloError::Witness { row, col, source }
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let decompositions = match mode {
            SamplingMode::Direct => Vec::new(),
            SamplingMode::Decomposed => laws
                .iter()
                .zip(&witnesses)
                .enumerate()
                .map(|(i, (law, w))| {
                    decompose(law, w, Variant::Unshifted).map_err(|source| {
                        let (row, col) = first_entry(i);
                        MonteCarloError::Decomposition { row, col, source }
                    })
                })
                .collect::<Result<Vec<_>, _>>()?,
        };
        Ok(EnsembleSpec { rows, cols, laws, law_index, witnesses, decompositions, rho, seed, mode })
    }

    /// Square ensemble with one shared law.
    pub fn square(n: usize, law: DistributionSpec, rho: Rational, seed: u64, mode: SamplingMode) -> Result<Self, MonteCarloError> {
        Self::new(n, n, EntryLaws::Shared(law), rho, seed, mode)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn mode(&self) -> SamplingMode {
        self.mode
    }

    pub fn rho(&self) -> &Rational {
        &self.rho
    }

    /// `p₀ = 1 − ρ`.
    pub fn p0(&self) -> Rational {
        Rational::one() - &self.rho
    }

    pub fn law(&self, row: usize, col: usize) -> &DistributionSpec {
        &self.laws[self.law_index[row * self.cols + col]]
    }

    pub fn witness(&self, row: usize, col: usize) -> &NonDegeneracyWitness {
        &self.witnesses[self.law_index[row * self.cols + col]]
    }

    pub fn decomposition(&self, row: usize, col: usize) -> Option<&Decomposition> {
        self.decompositions.get(self.law_index[row * self.cols + col])
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        EnsembleSpec { seed, ..self.clone() }
    }

    fn require_square(&self) -> Result<usize, MonteCarloError> {
        if self.rows != self.cols {
            return Err(MonteCarloError::NotSquare { rows: self.rows, cols: self.cols });
        }
        Ok(self.rows)
    }
}

/// The matrix for `trial_index`; identical across runs and worker counts.
pub fn sample_matrix(spec: &EnsembleSpec, trial_index: u64) -> RationalMatrix {
    let mut rng = rng::trial_rng(spec.seed, trial_index);
    let entries: Vec<Rational> = match spec.mode {
        SamplingMode::Direct => spec
            .law_index
            .iter()
            .map(|&i| spec.laws[i].sample(&mut rng))
            .collect(),
        SamplingMode::Decomposed => {
            let ws: Vec<Rational> = spec.law_index.iter().map(|_| rng::uniform_open(&mut rng)).collect();
            let eps: Vec<bool> = spec
                .law_index
                .iter()
                .map(|&i| rng::bernoulli(&mut rng, &spec.decompositions[i].p))
                .collect();
            spec.law_index
                .iter()
                .zip(ws.iter().zip(eps))
                .map(|(&i, (w, e))| spec.decompositions[i].realize(w, e))
                .collect()
        }
    };
    RationalMatrix::new(spec.rows, spec.cols, entries).expect("shape matches entry count")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateResult {
    pub trials: u64,
    pub hits: u64,
    pub p_hat: f64,
    /// 95% Wilson interval.
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: u64,
}

impl EstimateResult {
    pub fn from_counts(hits: u64, trials: u64, seed: u64) -> Self {
        let (ci_low, ci_high) = wilson_interval(hits, trials, Z95);
        EstimateResult { trials, hits, p_hat: hits as f64 / trials as f64, ci_low, ci_high, seed }
    }

    pub fn ci_width(&self) -> f64 {
        self.ci_high - self.ci_low
    }

    /// Wilson interval at another normal quantile.
    pub fn interval(&self, z: f64) -> (f64, f64) {
        wilson_interval(self.hits, self.trials, z)
    }
}

/// Runs `body` on a pool of `workers` threads; `0` means the rayon default.
fn with_workers<T: Send>(workers: usize, body: impl FnOnce() -> T + Send) -> Result<T, MonteCarloError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| MonteCarloError::Pool(e.to_string()))?;
    Ok(pool.install(body))
}

/// Frequency of `event` over `trials` sampled matrices.
pub fn estimate_event<F>(spec: &EnsembleSpec, trials: u64, workers: usize, event: F) -> Result<EstimateResult, MonteCarloError>
where
    F: Fn(&RationalMatrix) -> bool + Sync,
{
    if trials == 0 {
        return Err(MonteCarloError::NoTrials);
    }
    let hits = with_workers(workers, || {
        (0..trials)
            .into_par_iter()
            .filter(|&i| event(&sample_matrix(spec, i)))
            .count() as u64
    })?;
    Ok(EstimateResult::from_counts(hits, trials, spec.seed))
}

/// Monte Carlo estimate of `P(M singular)` with exact rank per trial.
pub fn estimate_singular_prob(spec: &EnsembleSpec, trials: u64, workers: usize) -> Result<EstimateResult, MonteCarloError> {
    spec.require_square()?;
    estimate_event(spec, trials, workers, |m| is_singular(m).unwrap_or(false))
}

/// Exact probability of `event` by weighted enumeration of every outcome.
pub fn exact_event_prob<F>(spec: &EnsembleSpec, budget: u64, event: F) -> Result<Rational, MonteCarloError>
where
    F: Fn(&RationalMatrix) -> bool,
{
    if spec.laws.iter().any(|l| l.kind() != DistributionKind::Discrete) {
        return Err(MonteCarloError::NotDiscrete);
    }
    let radices: Vec<usize> = spec.law_index.iter().map(|&i| spec.laws[i].atoms().len()).collect();
    let outcomes = radices
        .iter()
        .try_fold(1u64, |acc, &r| acc.checked_mul(r as u64).filter(|&v| v <= budget));
    if outcomes.is_none() {
        let total: num_bigint::BigUint = radices.iter().map(|&r| num_bigint::BigUint::from(r)).product();
        return Err(MonteCarloError::BudgetExceeded { outcomes: total.to_string(), budget });
    }
    let mut digits = vec![0usize; radices.len()];
    let mut total = Rational::zero();
    loop {
        let mut mass = Rational::one();
        let mut entries = Vec::with_capacity(digits.len());
        for (pos, &d) in digits.iter().enumerate() {
            let atom = &spec.laws[spec.law_index[pos]].atoms()[d];
            mass *= &atom.mass;
            entries.push(atom.value.clone());
        }
        let m = RationalMatrix::new(spec.rows, spec.cols, entries).expect("shape matches entry count");
        if event(&m) {
            total += mass;
        }
        // mixed-radix increment
        let mut pos = 0;
        loop {
            if pos == digits.len() {
                return Ok(total);
            }
            digits[pos] += 1;
            if digits[pos] < radices[pos] {
                break;
            }
            digits[pos] = 0;
            pos += 1;
        }
    }
}

/// `P(M singular)` by full enumeration of a discrete ensemble.
pub fn exact_singular_prob(spec: &EnsembleSpec, budget: u64) -> Result<Rational, MonteCarloError> {
    spec.require_square()?;
    exact_event_prob(spec, budget, |m| is_singular(m).unwrap_or(false))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrongRankExperiment {
    pub k: usize,
    pub estimate: EstimateResult,
    /// `C(n,k)·p₀^(m−k+1)/(1 − p₀)` for an `m × n` ensemble.
    pub bound: f64,
}

impl StrongRankExperiment {
    /// Frequency minus CI width does not exceed the bound.
    pub fn dominated(&self) -> bool {
        self.estimate.p_hat - self.estimate.ci_width() <= self.bound
    }
}

/// Frequency of `sr_c(A) < k`, i.e. some `k` columns are dependent, next to
/// the strong-rank tail bound.
pub fn strong_rank_experiment(spec: &EnsembleSpec, k: usize, trials: u64, workers: usize) -> Result<StrongRankExperiment, MonteCarloError> {
    let max = spec.rows.min(spec.cols);
    if k < 1 || k > max {
        return Err(MonteCarloError::BadK { k, max });
    }
    let estimate = estimate_event(spec, trials, workers, |m| smallest_circuit(m, Axis::Columns, k).is_some())?;
    let bound = strong_rank_tail(spec.cols as u64, spec.rows as u64, k as u64, &spec.p0())?;
    Ok(StrongRankExperiment { k, estimate, bound })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// `p_hat − ci_width ≤ bound_total < 1`.
    Dominated,
    /// `bound_total ≥ 1`; nothing to check.
    Vacuous,
    Violated,
}

impl Verdict {
    pub fn judge(estimate: &EstimateResult, bound_total: f64) -> Self {
        if bound_total >= 1.0 {
            Verdict::Vacuous
        } else if estimate.p_hat - estimate.ci_width() <= bound_total {
            Verdict::Dominated
        } else {
            Verdict::Violated
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Dominated => "dominated",
            Verdict::Vacuous => "vacuous",
            Verdict::Violated => "violated",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub n: usize,
    pub estimate: EstimateResult,
    pub bound: BoundReport,
    pub verdict: Verdict,
}

/// Shared settings for a family of square ensembles of varying size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnsembleTemplate {
    pub law: DistributionSpec,
    pub rho: Rational,
    pub seed: u64,
    pub mode: SamplingMode,
}

impl EnsembleTemplate {
    pub fn instantiate(&self, n: usize) -> Result<EnsembleSpec, MonteCarloError> {
        EnsembleSpec::square(n, self.law.clone(), self.rho.clone(), self.seed, self.mode)
    }
}

/// Three-term bound for an `n × n` ensemble at level `rho`, with optimized
/// thresholds and the default concentration constant unless `c` is given.
pub fn ensemble_bound(n: usize, rho: &Rational, c: Option<f64>) -> Result<BoundReport, MonteCarloError> {
    let p0 = Rational::one() - rho;
    let t = optimize_thresholds(&p0)?;
    let c = c.unwrap_or_else(|| default_lo_constant(&p0));
    Ok(singularity_bound(&BoundParams { n: n as u64, p0, alpha: t.alpha, beta: t.beta, c })?)
}

/// Estimate and bound for each `n`.
pub fn scaling_study(
    template: &EnsembleTemplate,
    n_values: &[usize],
    trials: u64,
    workers: usize,
    c: Option<f64>,
) -> Result<Vec<ScalingRow>, MonteCarloError> {
    n_values
        .iter()
        .map(|&n| {
            let spec = template.instantiate(n)?;
            let estimate = estimate_singular_prob(&spec, trials, workers)?;
            let bound = ensemble_bound(n, &template.rho, c)?;
            let verdict = Verdict::judge(&estimate, bound.total);
            Ok(ScalingRow { n, estimate, bound, verdict })
        })
        .collect()
}

pub const ESTIMATE_CSV_HEADER: &str = "n,trials,hits,p_hat,ci_low,ci_high,bound_total,bound_total_sqrt_n,check";

/// CSV rows for simulation and scaling output.
pub fn write_estimates_csv<W: Write>(rows: &[ScalingRow], mut out: W) -> io::Result<()> {
    writeln!(out, "{ESTIMATE_CSV_HEADER}")?;
    for r in rows {
        let e = &r.estimate;
        writeln!(
            out,
            "{},{},{},{:.6},{:.6},{:.6},{:.6e},{:.6e},{}",
            r.n,
            e.trials,
            e.hits,
            e.p_hat,
            e.ci_low,
            e.ci_high,
            r.bound.total,
            r.bound.total_sqrt_n(),
            r.verdict.as_str()
        )?;
    }
    Ok(())
}

/// Structured record of everything that determines a run's output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    pub seed: u64,
    /// The shared law, or the first entry's law when `grid` is set.
    pub law: DistributionSpec,
    /// Row-major per-entry laws, when they differ.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Vec<DistributionSpec>>,
    #[serde(with = "serde_exact")]
    pub rho: Rational,
    pub mode: SamplingMode,
    pub n_values: Vec<usize>,
    pub trials: u64,
}

impl RunManifest {
    pub fn new(subcommand: &str, template: &EnsembleTemplate, n_values: &[usize], trials: u64) -> Self {
        RunManifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            subcommand: subcommand.to_string(),
            seed: template.seed,
            law: template.law.clone(),
            grid: None,
            rho: template.rho.clone(),
            mode: template.mode,
            n_values: n_values.to_vec(),
            trials,
        }
    }
}

impl std::fmt::Display for RunManifest {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} {} seed={} rho={}", self.subcommand, self.law, self.seed, format_rational(&self.rho))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn fair_bit() -> DistributionSpec {
        DistributionSpec::discrete(vec![(qi(0), q(1, 2)), (qi(1), q(1, 2))]).unwrap()
    }

    fn fair_sign() -> DistributionSpec {
        DistributionSpec::discrete(vec![(qi(-1), q(1, 2)), (qi(1), q(1, 2))]).unwrap()
    }

    #[test]
    fn sampling_is_deterministic() {
        let spec = EnsembleSpec::square(2, fair_bit(), q(1, 4), 11, SamplingMode::Direct).unwrap();
        let a = sample_matrix(&spec, 5);
        assert_eq!(a, sample_matrix(&spec, 5));
        assert!(a.entries().iter().all(|v| v.is_zero() || v.is_one()));
        let other: Vec<_> = (0..20).map(|i| sample_matrix(&spec, i)).collect();
        assert!(other.iter().any(|m| m != &a));
    }

    #[test]
    fn decomposed_bit_matrix_is_pure_bernoulli() {
        let spec = EnsembleSpec::square(3, fair_bit(), q(1, 4), 3, SamplingMode::Decomposed).unwrap();
        let d = spec.decomposition(0, 0).unwrap();
        assert!(d.f.segments().iter().all(|s| s.slope.is_zero() && s.intercept.is_zero()));
        for i in 0..10 {
            assert!(sample_matrix(&spec, i).entries().iter().all(|v| v.is_zero() || v.is_one()));
        }
    }

    #[test]
    fn constant_law_fails_at_build_time() {
        let constant = DistributionSpec::discrete(vec![(qi(5), qi(1))]).unwrap();
        assert!(matches!(
            EnsembleSpec::square(1, constant, q(1, 10), 0, SamplingMode::Direct),
            Err(MonteCarloError::Witness { row: 0, col: 0, .. })
        ));
    }

    #[test]
    fn exact_enumeration_examples() {
        let bits = EnsembleSpec::square(2, fair_bit(), q(1, 4), 0, SamplingMode::Direct).unwrap();
        assert_eq!(exact_singular_prob(&bits, DEFAULT_ENUMERATION_BUDGET).unwrap(), q(5, 8));
        let signs = EnsembleSpec::square(2, fair_sign(), q(1, 4), 0, SamplingMode::Direct).unwrap();
        assert_eq!(exact_singular_prob(&signs, DEFAULT_ENUMERATION_BUDGET).unwrap(), q(1, 2));
        let biased = DistributionSpec::discrete(vec![(qi(0), q(1, 3)), (qi(1), q(2, 3))]).unwrap();
        let one = EnsembleSpec::square(1, biased, q(1, 4), 0, SamplingMode::Direct).unwrap();
        assert_eq!(exact_singular_prob(&one, DEFAULT_ENUMERATION_BUDGET).unwrap(), q(1, 3));
        assert!(matches!(
            exact_singular_prob(&bits, 15),
            Err(MonteCarloError::BudgetExceeded { .. })
        ));
        let uniform = DistributionSpec::piecewise_uniform(vec![(qi(0), qi(1), qi(1))]).unwrap();
        let cont = EnsembleSpec::square(2, uniform, q(1, 4), 0, SamplingMode::Direct).unwrap();
        assert_eq!(exact_singular_prob(&cont, 100), Err(MonteCarloError::NotDiscrete));
    }

    #[test]
    fn single_trial_interval() {
        let spec = EnsembleSpec::square(1, fair_bit(), q(1, 4), 9, SamplingMode::Direct).unwrap();
        let e = estimate_singular_prob(&spec, 1, 1).unwrap();
        assert!(e.p_hat == 0.0 || e.p_hat == 1.0);
        assert!(e.ci_low < e.ci_high);
        assert!(e.ci_low <= e.p_hat && e.p_hat <= e.ci_high);
        assert_eq!(estimate_singular_prob(&spec, 0, 1), Err(MonteCarloError::NoTrials));
    }

    #[test]
    fn strong_rank_k_range() {
        let spec = EnsembleSpec::new(4, 3, EntryLaws::Shared(fair_bit()), q(1, 4), 0, SamplingMode::Direct).unwrap();
        assert_eq!(strong_rank_experiment(&spec, 4, 10, 1).unwrap_err(), MonteCarloError::BadK { k: 4, max: 3 });
        assert!(strong_rank_experiment(&spec, 0, 10, 1).is_err());
    }

    #[test]
    fn grid_laws_are_per_entry() {
        let grid = vec![fair_bit(), fair_sign(), fair_sign(), fair_bit()];
        let spec = EnsembleSpec::new(2, 2, EntryLaws::Grid(grid), q(1, 4), 1, SamplingMode::Direct).unwrap();
        assert_eq!(spec.law(0, 1), &fair_sign());
        assert_eq!(spec.law(1, 1), &fair_bit());
        // singular iff ad = bc; enumerate with exact weights
        let p = exact_singular_prob(&spec, 1 << 10).unwrap();
        // a,d ∈ {0,1}, b,c ∈ {±1}: bc = ±1, ad ∈ {0,1}; singular iff ad = 1 = bc
        assert_eq!(p, q(1, 4) * q(1, 2));
        assert!(matches!(
            EnsembleSpec::new(2, 2, EntryLaws::Grid(vec![fair_bit()]), q(1, 4), 1, SamplingMode::Direct),
            Err(MonteCarloError::GridSize { .. })
        ));
    }

    #[test]
    fn verdicts() {
        let e = EstimateResult::from_counts(10, 100, 0);
        assert_eq!(Verdict::judge(&e, 2.0), Verdict::Vacuous);
        assert_eq!(Verdict::judge(&e, 0.5), Verdict::Dominated);
        let high = EstimateResult::from_counts(90, 100, 0);
        assert_eq!(Verdict::judge(&high, 0.1), Verdict::Violated);
    }
}
