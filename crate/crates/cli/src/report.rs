//! Machine-readable records emitted by the subcommands. Every exact value
//! is an `"a/b"` string; every record parses back into the same type.

use randsing::bernoulli_decomp::{Decomposition, DeltaLowerBound};
use randsing::bounds::BoundReport;
use randsing::distributions::{DistributionKind, DistributionSpec, NonDegeneracyWitness};
use randsing::exact_linalg::Axis;
use randsing::rational::{serde_exact, serde_exact_opt, Rational};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecomposeReport {
    pub dist: DistributionSpec,
    pub decomposition: Decomposition,
    /// Exact law of `f(w) + δ(w)·ε`.
    pub pushforward: Option<DistributionSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckLawReport {
    pub dist: DistributionSpec,
    pub kind: DistributionKind,
    pub witness: NonDegeneracyWitness,
    #[serde(with = "serde_exact")]
    pub p: Rational,
    #[serde(with = "serde_exact")]
    pub p0: Rational,
    pub gap_case: bool,
    #[serde(with = "serde_exact")]
    pub gap: Rational,
    pub delta_lower_bound: DeltaLowerBound,
    pub reconstructs_law: bool,
    /// Whether the shifted upper branch also reproduces the law.
    pub shifted_reconstructs_law: bool,
    #[serde(with = "serde_exact_opt")]
    pub t1: Option<Rational>,
    #[serde(with = "serde_exact_opt")]
    pub t2: Option<Rational>,
    #[serde(with = "serde_exact")]
    pub t2_bound: Rational,
    pub t2_within_bound: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Given,
    Default,
    Optimized,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundRecord {
    #[serde(flatten)]
    pub report: BoundReport,
    pub thresholds: Provenance,
    pub c_source: Provenance,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrongRankRecord {
    pub rows: usize,
    pub cols: usize,
    pub axis: Axis,
    pub rank: usize,
    pub strong_rank: usize,
    /// 0-based indices of the first minimal dependent set.
    pub witness_circuit: Option<Vec<usize>>,
}
