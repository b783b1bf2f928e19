//! Exact tools for the singularity of random matrices with independent,
//! non-identically distributed entries.
//!
//! Every entry law is split as `X = f(W) + δ(W)·ε` with `W` uniform and
//! `ε` Bernoulli independent of `W`; the modules below build that split
//! exactly, measure strong rank and anti-concentration, evaluate the
//! resulting singularity bound and check it by simulation.

pub mod battery;
pub mod bernoulli_decomp;
pub mod bounds;
pub mod concentration;
pub mod distributions;
pub mod exact_linalg;
pub mod montecarlo;
pub mod piecewise;
pub mod rational;
pub mod rng;
pub mod stats;

pub use bernoulli_decomp::{decompose, Decomposition, DecompositionError, Variant};
pub use bounds::{singularity_bound, BoundParams, BoundReport, BoundsError, Thresholds};
pub use concentration::{atom_table, AtomTable, ConcentrationError};
pub use distributions::{DistributionError, DistributionKind, DistributionSpec, NonDegeneracyWitness};
pub use exact_linalg::{rank, strong_rank, Axis, LinalgError, RationalMatrix, StrongRankResult};
pub use montecarlo::{EnsembleSpec, EstimateResult, MonteCarloError, SamplingMode};
pub use piecewise::PiecewiseFn;
pub use rational::{format_rational, parse_rational, Rational};
