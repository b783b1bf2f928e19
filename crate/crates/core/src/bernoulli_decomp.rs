//! Bernoulli decomposition `a = f(w) + δ(w)·ε` of a non-degenerate law.
//!
//! With `p₋ = μ(]−∞, x⁻[)` and `p = 1 − p₋`, the two branches are
//!
//! ```text
//! Y₁(t) = G((1 − p)·t)            lower branch, f = Y₁
//! Y₂(t) = G(1 − p + p·t)          upper branch, δ = Y₂ − Y₁
//! ```
//!
//! where `G` is the generalized quantile. For `w` uniform on `]0,1[` and
//! `ε ~ Bernoulli(p)` independent, `f(w) + δ(w)·ε` has exactly the law of `a`.
//! The [`Variant::Shifted`] form adds `x⁻ − G(p₋)` to `Y₂`; it keeps `δ > 0`
//! but changes the law whenever `G(p₋) < x⁻`.

use num_traits::{One, Signed, Zero};
use rand::RngCore;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distributions::{DistributionError, DistributionSpec, NonDegeneracyWitness};
use crate::piecewise::PiecewiseFn;
use crate::rational::{serde_exact, serde_exact_opt, Exact, Rational};
use crate::rng;

pub use crate::piecewise::{Infimum, PiecewiseError, Segment};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecompositionError {
    #[error("witness is not valid for this law")]
    InvalidWitness,
    #[error("delta is not strictly positive: infimum {0}")]
    DegenerateDecomposition(String),
    #[error("Bernoulli parameter {p} outside ]1 - p0, p0[ with p0 = {p0}")]
    ParameterOutOfRange { p: String, p0: String },
    #[error("gap case: G(p-) = {g} < x- = {x_minus}; delta >= x- - G(p-) > 0 already")]
    GapCase { g: String, x_minus: String },
    #[error("pushforward mixes atoms and continuous pieces")]
    MixedLaw,
    #[error(transparent)]
    Distribution(#[from] DistributionError),
    #[error(transparent)]
    Piecewise(#[from] PiecewiseError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// `Y₂(t) = G(1 − p + p·t)`; reproduces the law exactly.
    #[default]
    Unshifted,
    /// `Y₂(t) = x⁻ − G(p₋) + G(1 − p + p·t)`.
    Shifted,
}

/// Certified lower bound of `δ` over `]0, 1[`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DeltaLowerBound {
    /// `inf δ` equals this strictly positive value.
    Positive {
        #[serde(with = "serde_exact")]
        value: Rational,
    },
    /// `δ > 0` everywhere but its infimum over the open interval is 0.
    Vanishing,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub variant: Variant,
    pub witness: NonDegeneracyWitness,
    /// Bernoulli parameter of `ε`.
    #[serde(with = "serde_exact")]
    pub p: Rational,
    #[serde(with = "serde_exact")]
    pub p_minus: Rational,
    /// `G(p₋)`.
    #[serde(with = "serde_exact")]
    pub quantile_at_p_minus: Rational,
    /// `x⁻ − G(p₋)`; positive exactly in the gap case.
    #[serde(with = "serde_exact")]
    pub gap: Rational,
    pub f: PiecewiseFn,
    pub delta: PiecewiseFn,
    pub delta_inf: DeltaLowerBound,
    /// Arrival time of `Y₁`; `None` in the gap case.
    #[serde(with = "serde_exact_opt")]
    pub t1: Option<Rational>,
    /// Departure time of `Y₂`; `None` in the gap case.
    #[serde(with = "serde_exact_opt")]
    pub t2: Option<Rational>,
    /// `(1 − p₋ − p₊)/(1 − p₋)`.
    #[serde(with = "serde_exact")]
    pub t2_bound: Rational,
    /// Whether the pushforward law equals the input law.
    pub reconstructs_law: bool,
}

struct Branches {
    quantile: PiecewiseFn,
    lower: PiecewiseFn,
    upper: PiecewiseFn,
    p: Rational,
    g_at_p_minus: Rational,
}

fn branches(dist: &DistributionSpec, w: &NonDegeneracyWitness) -> Result<Branches, DecompositionError> {
    if !w.is_valid_for(dist) {
        return Err(DecompositionError::InvalidWitness);
    }
    let p_minus = &w.p_lower;
    let p = Rational::one() - p_minus;
    let quantile = dist.quantile_fn();
    let lower = quantile.compose_affine(&Rational::zero(), p_minus)?;
    let upper = quantile.compose_affine(p_minus, &p)?;
    let g_at_p_minus = quantile.eval(p_minus);
    Ok(Branches { quantile, lower, upper, p, g_at_p_minus })
}

/// Builds the decomposition for a valid witness and certifies `δ > 0` on
/// every exact piece.
pub fn decompose(
    dist: &DistributionSpec,
    witness: &NonDegeneracyWitness,
    variant: Variant,
) -> Result<Decomposition, DecompositionError> {
    let Branches { lower, upper, p, g_at_p_minus, .. } = branches(dist, witness)?;
    let p0 = witness.p0();
    if !(p > Rational::one() - &p0 && p < p0) {
        return Err(DecompositionError::ParameterOutOfRange {
            p: Exact(&p).to_string(),
            p0: Exact(&p0).to_string(),
        });
    }
    let gap = &witness.x_minus - &g_at_p_minus;
    let upper = match variant {
        Variant::Unshifted => upper,
        Variant::Shifted => upper.add_constant(&gap),
    };
    let delta = upper.sub(&lower);
    let inf = delta.infimum();
    let delta_inf = if inf.value.is_positive() {
        DeltaLowerBound::Positive { value: inf.value }
    } else if inf.value.is_zero() && !inf.attained {
        DeltaLowerBound::Vanishing
    } else {
        return Err(DecompositionError::DegenerateDecomposition(Exact(&inf.value).to_string()));
    };
    let (t1, t2) = match arrival_departure_times(dist, witness) {
        Ok((a, b)) => (Some(a), Some(b)),
        Err(DecompositionError::GapCase { .. }) => (None, None),
        Err(e) => return Err(e),
    };
    let t2_bound = (Rational::one() - &witness.p_lower - &witness.p_upper) / (Rational::one() - &witness.p_lower);
    let mut decomposition = Decomposition {
        variant,
        witness: witness.clone(),
        p_minus: witness.p_lower.clone(),
        p,
        quantile_at_p_minus: g_at_p_minus,
        gap,
        f: lower,
        delta,
        delta_inf,
        t1,
        t2,
        t2_bound,
        reconstructs_law: false,
    };
    decomposition.reconstructs_law = pushforward_law(&decomposition).is_ok_and(|law| &law == dist);
    Ok(decomposition)
}

/// Arrival time `T₁ = inf{t : Y₁(t) = G(p₋)}` and departure time
/// `T₂ = sup{t : Y₂(t) = G(p₋ + 0)}`, with `inf ∅ = 1` and `sup ∅ = 0`.
/// Defined only when `G(p₋) = x⁻`.
pub fn arrival_departure_times(
    dist: &DistributionSpec,
    witness: &NonDegeneracyWitness,
) -> Result<(Rational, Rational), DecompositionError> {
    let b = branches(dist, witness)?;
    if b.g_at_p_minus < witness.x_minus {
        return Err(DecompositionError::GapCase {
            g: Exact(&b.g_at_p_minus).to_string(),
            x_minus: Exact(&witness.x_minus).to_string(),
        });
    }
    debug_assert_eq!(b.quantile.eval(&witness.p_lower), witness.x_minus);
    let t1 = b.lower.level_set_inf(&b.g_at_p_minus).unwrap_or_else(Rational::one);
    // Y₂(0+) is the right limit of G at 1 − p = p₋.
    let right_limit = b.upper.segments()[0].intercept.clone();
    let t2 = b.upper.level_set_sup(&right_limit).unwrap_or_else(Rational::zero);
    Ok((t1, t2))
}

impl Decomposition {
    /// `Y₂ = f + δ`.
    pub fn upper_branch(&self) -> PiecewiseFn {
        self.f.add(&self.delta)
    }

    /// `f(w) + δ(w)·ε`.
    pub fn realize(&self, w: &Rational, epsilon: bool) -> Rational {
        let base = self.f.eval(w);
        if epsilon {
            base + self.delta.eval(w)
        } else {
            base
        }
    }

    /// Draws `w` then `ε` from `rng` and returns `f(w) + δ(w)·ε`.
    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> Rational {
        let w = rng::uniform_open(rng);
        let epsilon = rng::bernoulli(rng, &self.p);
        self.realize(&w, epsilon)
    }

    /// Certified strict lower bound on `δ`: the exact infimum, or in the
    /// gap case at least `x⁻ − G(p₋)`.
    pub fn certified_lower_bound(&self) -> Rational {
        match &self.delta_inf {
            DeltaLowerBound::Positive { value } => value.clone(),
            DeltaLowerBound::Vanishing => Rational::zero(),
        }
    }

    pub fn is_gap_case(&self) -> bool {
        self.gap.is_positive()
    }

    /// `T₂ ≤ (1 − p₋ − p₊)/(1 − p₋)`, when `T₂` is defined.
    pub fn t2_within_bound(&self) -> Option<bool> {
        self.t2.as_ref().map(|t2| t2 <= &self.t2_bound)
    }
}

/// Exact law of `f(w) + δ(w)·ε`: the mixture `(1 − p)·law(Y₁(w)) + p·law(Y₂(w))`.
pub fn pushforward_law(decomp: &Decomposition) -> Result<DistributionSpec, DecompositionError> {
    let one = Rational::one();
    let lower_weight = &one - &decomp.p;
    let upper = decomp.upper_branch();
    let mut atoms = Vec::new();
    let mut pieces = Vec::new();
    for (branch, weight) in [(&decomp.f, &lower_weight), (&upper, &decomp.p)] {
        for (lo, hi, seg) in branch.pieces() {
            let mass = weight * (hi - lo);
            if seg.is_flat() {
                atoms.push((seg.intercept.clone(), mass));
            } else {
                let (a, b) = (seg.at(lo), seg.at(hi));
                let (a, b) = if a < b { (a, b) } else { (b, a) };
                pieces.push((a, b, mass));
            }
        }
    }
    match (atoms.is_empty(), pieces.is_empty()) {
        (false, true) => Ok(DistributionSpec::discrete_mixture(atoms)?),
        (true, false) => Ok(DistributionSpec::piecewise_mixture(pieces)?),
        _ => Err(DecompositionError::MixedLaw),
    }
}
