//! Exact laws of weighted Bernoulli sums `Σ αᵢ εᵢ` and their largest atom.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::{in_open_unit, parse_rational, qi, serde_exact, to_f64, Exact, Rational};

/// Generic (non-integer) weights have up to `2^s` atoms; refuse beyond this.
pub const MAX_GENERIC_SUMMANDS: usize = 30;
/// Integer weights are allowed while `Σ|αᵢ|` stays below this.
pub const MAX_INTEGER_SPAN: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConcentrationError {
    #[error("weight {index} is zero")]
    ZeroWeight { index: usize },
    #[error("parameter {index} = {value} outside ]{low}, {high}[")]
    BadParameter { index: usize, value: String, low: String, high: String },
    #[error("{weights} weights for {probs} parameters")]
    LengthMismatch { weights: usize, probs: usize },
    #[error("support of {s} summands would exceed the enumeration guard")]
    SupportTooLarge { s: usize },
    #[error("unknown rule `{0}`")]
    UnknownRule(String),
}

/// Exact law of `Σ αᵢ εᵢ` with `εᵢ ~ Bernoulli(pᵢ)` independent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomTable {
    entries: BTreeMap<Rational, Rational>,
    alphas: Vec<Rational>,
    probs: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationReport {
    pub s: usize,
    #[serde(with = "serde_exact")]
    pub max_atom: Rational,
    /// Smallest value carrying `max_atom`.
    #[serde(with = "serde_exact")]
    pub location: Rational,
    /// `max_atom·√s`, approximate.
    pub scaled: f64,
}

fn check_weights(alphas: &[Rational]) -> Result<(), ConcentrationError> {
    if let Some(index) = alphas.iter().position(Zero::is_zero) {
        return Err(ConcentrationError::ZeroWeight { index });
    }
    if alphas.len() <= MAX_GENERIC_SUMMANDS {
        return Ok(());
    }
    let integral = alphas.iter().all(|a| a.is_integer());
    let span: Rational = alphas.iter().map(|a| a.abs()).sum();
    let within = span.to_integer().to_u64().is_some_and(|s| s <= MAX_INTEGER_SPAN);
    if integral && within {
        Ok(())
    } else {
        Err(ConcentrationError::SupportTooLarge { s: alphas.len() })
    }
}

/// Sequential convolution of the summands, keyed on exact sums.
pub fn atom_table(alphas: &[Rational], probs: &[Rational]) -> Result<AtomTable, ConcentrationError> {
    if alphas.len() != probs.len() {
        return Err(ConcentrationError::LengthMismatch { weights: alphas.len(), probs: probs.len() });
    }
    check_weights(alphas)?;
    if let Some(index) = probs.iter().position(|p| !in_open_unit(p)) {
        return Err(ConcentrationError::BadParameter {
            index,
            value: Exact(&probs[index]).to_string(),
            low: "0/1".into(),
            high: "1/1".into(),
        });
    }
    // Masses are numerators over the running denominator Π den(pᵢ); reduced once at the end.
    let mut numerators = BTreeMap::from([(Rational::zero(), BigInt::one())]);
    let mut denominator = BigInt::one();
    for (alpha, p) in alphas.iter().zip(probs) {
        let (hit, den) = (p.numer(), p.denom());
        let miss = den - hit;
        let mut next = BTreeMap::new();
        for (value, mass) in &numerators {
            *next.entry(value.clone()).or_insert_with(BigInt::zero) += mass * &miss;
            *next.entry(value + alpha).or_insert_with(BigInt::zero) += mass * hit;
        }
        numerators = next;
        denominator *= den;
    }
    let entries = numerators
        .into_iter()
        .map(|(value, mass)| (value, Rational::new(mass, denominator.clone())))
        .collect();
    Ok(AtomTable { entries, alphas: alphas.to_vec(), probs: probs.to_vec() })
}

impl AtomTable {
    pub fn s(&self) -> usize {
        self.alphas.len()
    }

    pub fn alphas(&self) -> &[Rational] {
        &self.alphas
    }

    pub fn probs(&self) -> &[Rational] {
        &self.probs
    }

    pub fn entries(&self) -> &BTreeMap<Rational, Rational> {
        &self.entries
    }

    /// `P(Σ αᵢ εᵢ = b)`.
    pub fn atom_at(&self, b: &Rational) -> Rational {
        self.entries.get(b).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn max_atom(&self) -> ConcentrationReport {
        let (location, max_atom) = self
            .entries
            .iter()
            .fold(None::<(&Rational, &Rational)>, |best, (v, m)| match best {
                Some((_, bm)) if bm >= m => best,
                _ => Some((v, m)),
            })
            .expect("table is never empty");
        ConcentrationReport {
            s: self.s(),
            scaled: to_f64(max_atom) * (self.s() as f64).sqrt(),
            max_atom: max_atom.clone(),
            location: location.clone(),
        }
    }
}

/// Weights `α₁..α_s` as a function of `s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WeightRule {
    /// All weights equal to one.
    Ones,
    /// `αᵢ = i` for `i = 1..s`.
    Ramp,
    /// `+1, −1, +1, ...`
    Alternating,
    /// `αᵢ = 2^(i−1)`; every sign pattern gives a distinct sum.
    Dyadic,
}

impl WeightRule {
    pub fn generate(&self, s: usize) -> Vec<Rational> {
        (0..s)
            .map(|i| match self {
                WeightRule::Ones => qi(1),
                WeightRule::Ramp => qi(i as i64 + 1),
                WeightRule::Alternating => qi(if i % 2 == 0 { 1 } else { -1 }),
                WeightRule::Dyadic => Rational::from_integer(BigInt::one() << i),
            })
            .collect()
    }
}

impl FromStr for WeightRule {
    type Err = ConcentrationError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ones" => Ok(WeightRule::Ones),
            "ramp" => Ok(WeightRule::Ramp),
            "alternating" => Ok(WeightRule::Alternating),
            "dyadic" => Ok(WeightRule::Dyadic),
            other => Err(ConcentrationError::UnknownRule(other.to_string())),
        }
    }
}

impl fmt::Display for WeightRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WeightRule::Ones => "ones",
            WeightRule::Ramp => "ramp",
            WeightRule::Alternating => "alternating",
            WeightRule::Dyadic => "dyadic",
        })
    }
}

/// Parameters `p₁..p_s` as a function of `s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProbRule {
    Constant(Rational),
    /// `p, 1 − p, p, ...`
    Alternating(Rational),
    /// Evenly spaced from `lo` to `hi` inclusive.
    Ramp(Rational, Rational),
}

impl ProbRule {
    pub fn generate(&self, s: usize) -> Vec<Rational> {
        (0..s)
            .map(|i| match self {
                ProbRule::Constant(p) => p.clone(),
                ProbRule::Alternating(p) if i % 2 == 0 => p.clone(),
                ProbRule::Alternating(p) => Rational::one() - p,
                ProbRule::Ramp(lo, _) if s == 1 => lo.clone(),
                ProbRule::Ramp(lo, hi) => lo + (hi - lo) * qi(i as i64) / qi(s as i64 - 1),
            })
            .collect()
    }
}

impl FromStr for ProbRule {
    type Err = ConcentrationError;

    /// `1/2`, `const:1/2`, `alternating:3/5`, or `ramp:2/5..3/5`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ConcentrationError::UnknownRule(s.to_string());
        let rat = |t: &str| parse_rational(t).map_err(|_| bad());
        match s.split_once(':') {
            None => Ok(ProbRule::Constant(rat(s)?)),
            Some(("const", v)) => Ok(ProbRule::Constant(rat(v)?)),
            Some(("alternating", v)) => Ok(ProbRule::Alternating(rat(v)?)),
            Some(("ramp", v)) => {
                let (lo, hi) = v.split_once("..").ok_or_else(bad)?;
                Ok(ProbRule::Ramp(rat(lo)?, rat(hi)?))
            }
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for ProbRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProbRule::Constant(p) => write!(f, "const:{}", Exact(p)),
            ProbRule::Alternating(p) => write!(f, "alternating:{}", Exact(p)),
            ProbRule::Ramp(lo, hi) => write!(f, "ramp:{}..{}", Exact(lo), Exact(hi)),
        }
    }
}

/// Default concentration constant `√(2/π) / (2·min(p₀, 1 − p₀))`.
///
/// `√(2/π)` is the limit of `√s·C(s, s/2)/2^s`; the denominator inflates it
/// for biased parameters, since `p(1 − p) ≥ p₀(1 − p₀) ≥ (1 − p₀)²` on `]1 − p₀, p₀[`.
pub fn default_lo_constant(p0: &Rational) -> f64 {
    let p0 = to_f64(p0);
    (2.0 / std::f64::consts::PI).sqrt() / (2.0 * p0.min(1.0 - p0))
}

/// One report per `s`, computed in parallel, returned in input order.
/// Every generated parameter must lie in `]1 − p₀, p₀[`.
pub fn sweep(
    s_values: &[usize],
    weights: &WeightRule,
    probs: &ProbRule,
    p0: &Rational,
) -> Result<Vec<ConcentrationReport>, ConcentrationError> {
    let low = Rational::one() - p0;
    let (lo, hi) = if &low < p0 { (low, p0.clone()) } else { (p0.clone(), low) };
    s_values
        .par_iter()
        .map(|&s| {
            let ps = probs.generate(s);
            if let Some(index) = ps.iter().position(|p| p <= &lo || p >= &hi) {
                return Err(ConcentrationError::BadParameter {
                    index,
                    value: Exact(&ps[index]).to_string(),
                    low: Exact(&lo).to_string(),
                    high: Exact(&hi).to_string(),
                });
            }
            Ok(atom_table(&weights.generate(s), &ps)?.max_atom())
        })
        .collect()
}

/// Reports violating `max_atom ≤ c/√s`.
pub fn envelope_violations(reports: &[ConcentrationReport], c: f64) -> Vec<&ConcentrationReport> {
    reports.iter().filter(|r| r.scaled > c).collect()
}

/// CSV with columns `s,max_atom,scaled_approx`.
pub fn write_sweep_csv<W: Write>(reports: &[ConcentrationReport], mut out: W) -> io::Result<()> {
    writeln!(out, "s,max_atom,scaled_approx")?;
    for r in reports {
        writeln!(out, "{},{},{:.6}", r.s, Exact(&r.max_atom), r.scaled)?;
    }
    Ok(())
}
