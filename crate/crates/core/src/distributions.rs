//! Exactly representable probability laws.
//!
//! Two families are supported: finitely many atoms, and finitely many
//! uniform pieces on disjoint open intervals. Both keep the distribution
//! function `F`, the generalized quantile `G(t) = inf{u : F(u) ≥ t}` and all
//! the tail masses used by the decomposition in exact rational arithmetic.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use rand::RngCore;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::piecewise::{PiecewiseFn, Segment};
use crate::rational::{parse_rational, q, serde_exact, Exact, Rational};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DistributionError {
    #[error("a law needs at least one atom or piece")]
    Empty,
    #[error("mass {0} is not strictly positive")]
    NonPositiveMass(String),
    #[error("total mass is {0}, expected exactly 1")]
    MassNotOne(String),
    #[error("atom {0} listed twice")]
    DuplicateAtom(String),
    #[error("piece ]{0}, {1}[ is empty")]
    EmptyPiece(String, String),
    #[error("pieces overlap near {0}")]
    OverlappingPieces(String),
    #[error("quantile level {0} outside ]0,1[")]
    LevelOutOfRange(String),
    #[error("rho = {0} outside ]0,1/2[")]
    RhoOutOfRange(String),
    #[error("no non-degeneracy witness at rho = {rho}: law too concentrated")]
    NoWitness { rho: String },
    #[error("cannot parse distribution literal: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistributionKind {
    Discrete,
    PiecewiseUniform,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Atom {
    #[serde(with = "serde_exact")]
    pub value: Rational,
    #[serde(with = "serde_exact")]
    pub mass: Rational,
}

/// Uniform mass on the open interval `]lo, hi[`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Piece {
    #[serde(with = "serde_exact")]
    pub lo: Rational,
    #[serde(with = "serde_exact")]
    pub hi: Rational,
    #[serde(with = "serde_exact")]
    pub mass: Rational,
}

impl Piece {
    pub fn density(&self) -> Rational {
        &self.mass / (&self.hi - &self.lo)
    }

    /// Mass of `]lo, u]` (equivalently `]lo, u[`).
    fn mass_below(&self, u: &Rational) -> Rational {
        if u <= &self.lo {
            Rational::zero()
        } else if u >= &self.hi {
            self.mass.clone()
        } else {
            &self.mass * (u - &self.lo) / (&self.hi - &self.lo)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Law {
    Discrete(Vec<Atom>),
    PiecewiseUniform(Vec<Piece>),
}

/// A validated probability law in canonical form: atoms sorted with
/// distinct values, pieces sorted, disjoint, and adjacent pieces of equal
/// density merged. Structural equality is therefore equality in law.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct DistributionSpec {
    law: Law,
}

/// Points `x⁻ < x⁺` with strictly more than `rho` mass on either outer side.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonDegeneracyWitness {
    #[serde(with = "serde_exact")]
    pub rho: Rational,
    #[serde(with = "serde_exact")]
    pub x_minus: Rational,
    #[serde(with = "serde_exact")]
    pub x_plus: Rational,
    /// `μ(]−∞, x⁻[)`
    #[serde(with = "serde_exact")]
    pub p_lower: Rational,
    /// `μ(]x⁺, +∞[)`
    #[serde(with = "serde_exact")]
    pub p_upper: Rational,
}

impl NonDegeneracyWitness {
    /// Re-derives the tails from `dist` and checks every invariant.
    pub fn is_valid_for(&self, dist: &DistributionSpec) -> bool {
        self.x_minus < self.x_plus
            && self.p_lower == dist.cdf(&self.x_minus, true)
            && self.p_upper == dist.upper_tail(&self.x_plus)
            && self.p_lower > self.rho
            && self.p_upper > self.rho
    }

    /// `p₀ = 1 − ρ`.
    pub fn p0(&self) -> Rational {
        Rational::one() - &self.rho
    }
}

fn check_masses<'a>(masses: impl Iterator<Item = &'a Rational>) -> Result<(), DistributionError> {
    let mut total = Rational::zero();
    for m in masses {
        if !m.is_positive() {
            return Err(DistributionError::NonPositiveMass(Exact(m).to_string()));
        }
        total += m;
    }
    if !total.is_one() {
        return Err(DistributionError::MassNotOne(Exact(&total).to_string()));
    }
    Ok(())
}

impl DistributionSpec {
    /// Finite-atom law from `(value, mass)` pairs in any order.
    pub fn discrete(atoms: Vec<(Rational, Rational)>) -> Result<Self, DistributionError> {
        if atoms.is_empty() {
            return Err(DistributionError::Empty);
        }
        check_masses(atoms.iter().map(|(_, m)| m))?;
        let mut atoms: Vec<Atom> = atoms
            .into_iter()
            .map(|(value, mass)| Atom { value, mass })
            .collect();
        atoms.sort_by(|a, b| a.value.cmp(&b.value));
        if let Some(w) = atoms.windows(2).find(|w| w[0].value == w[1].value) {
            return Err(DistributionError::DuplicateAtom(Exact(&w[0].value).to_string()));
        }
        Ok(DistributionSpec { law: Law::Discrete(atoms) })
    }

    /// Piecewise-uniform law from `(lo, hi, mass)` triples on disjoint open intervals.
    pub fn piecewise_uniform(pieces: Vec<(Rational, Rational, Rational)>) -> Result<Self, DistributionError> {
        if pieces.is_empty() {
            return Err(DistributionError::Empty);
        }
        check_masses(pieces.iter().map(|(_, _, m)| m))?;
        let mut pieces: Vec<Piece> = pieces
            .into_iter()
            .map(|(lo, hi, mass)| Piece { lo, hi, mass })
            .collect();
        if let Some(p) = pieces.iter().find(|p| p.lo >= p.hi) {
            return Err(DistributionError::EmptyPiece(Exact(&p.lo).to_string(), Exact(&p.hi).to_string()));
        }
        pieces.sort_by(|a, b| a.lo.cmp(&b.lo));
        if let Some(w) = pieces.windows(2).find(|w| w[0].hi > w[1].lo) {
            return Err(DistributionError::OverlappingPieces(Exact(&w[1].lo).to_string()));
        }
        Ok(DistributionSpec { law: Law::PiecewiseUniform(merge_adjacent(pieces)) })
    }

    /// Sum of weighted atom lists; equal values are merged and zero masses dropped.
    pub(crate) fn discrete_mixture(atoms: Vec<(Rational, Rational)>) -> Result<Self, DistributionError> {
        let mut atoms: Vec<(Rational, Rational)> = atoms.into_iter().filter(|(_, m)| !m.is_zero()).collect();
        atoms.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<(Rational, Rational)> = Vec::with_capacity(atoms.len());
        for (v, m) in atoms {
            match merged.last_mut() {
                Some((lv, lm)) if *lv == v => *lm += m,
                _ => merged.push((v, m)),
            }
        }
        Self::discrete(merged)
    }

    /// Superposition of uniform pieces that may overlap; densities add on
    /// the common refinement.
    pub(crate) fn piecewise_mixture(pieces: Vec<(Rational, Rational, Rational)>) -> Result<Self, DistributionError> {
        let pieces: Vec<Piece> = pieces
            .into_iter()
            .filter(|(_, _, m)| !m.is_zero())
            .map(|(lo, hi, mass)| Piece { lo, hi, mass })
            .collect();
        if let Some(p) = pieces.iter().find(|p| p.lo >= p.hi) {
            return Err(DistributionError::EmptyPiece(Exact(&p.lo).to_string(), Exact(&p.hi).to_string()));
        }
        let mut cuts: Vec<Rational> = pieces.iter().flat_map(|p| [p.lo.clone(), p.hi.clone()]).collect();
        cuts.sort();
        cuts.dedup();
        let mut refined = Vec::new();
        for w in cuts.windows(2) {
            let density: Rational = pieces
                .iter()
                .filter(|p| p.lo <= w[0] && p.hi >= w[1])
                .map(Piece::density)
                .sum();
            if density.is_positive() {
                refined.push((w[0].clone(), w[1].clone(), density * (&w[1] - &w[0])));
            }
        }
        Self::piecewise_uniform(refined)
    }

    pub fn kind(&self) -> DistributionKind {
        match self.law {
            Law::Discrete(_) => DistributionKind::Discrete,
            Law::PiecewiseUniform(_) => DistributionKind::PiecewiseUniform,
        }
    }

    /// Atoms of a discrete law; empty for piecewise-uniform laws.
    pub fn atoms(&self) -> &[Atom] {
        match &self.law {
            Law::Discrete(a) => a,
            Law::PiecewiseUniform(_) => &[],
        }
    }

    /// Pieces of a piecewise-uniform law; empty for discrete laws.
    pub fn pieces(&self) -> &[Piece] {
        match &self.law {
            Law::Discrete(_) => &[],
            Law::PiecewiseUniform(p) => p,
        }
    }

    /// `μ(]−∞, u])`, or `μ(]−∞, u[)` when `strict`.
    pub fn cdf(&self, u: &Rational, strict: bool) -> Rational {
        match &self.law {
            Law::Discrete(atoms) => atoms
                .iter()
                .take_while(|a| if strict { &a.value < u } else { &a.value <= u })
                .map(|a| &a.mass)
                .sum(),
            Law::PiecewiseUniform(pieces) => pieces.iter().map(|p| p.mass_below(u)).sum(),
        }
    }

    /// `μ(]u, +∞[)`.
    pub fn upper_tail(&self, u: &Rational) -> Rational {
        Rational::one() - self.cdf(u, false)
    }

    /// Generalized quantile `G(t) = inf{u : F(u) ≥ t}` for `t ∈ ]0, 1[`.
    pub fn quantile(&self, t: &Rational) -> Result<Rational, DistributionError> {
        if !crate::rational::in_open_unit(t) {
            return Err(DistributionError::LevelOutOfRange(Exact(t).to_string()));
        }
        Ok(self.quantile_fn().eval(t))
    }

    /// `G` as an exact piecewise-affine function of the level.
    pub fn quantile_fn(&self) -> PiecewiseFn {
        let mut breakpoints = vec![Rational::zero()];
        let mut segments = Vec::new();
        let mut cum = Rational::zero();
        match &self.law {
            Law::Discrete(atoms) => {
                for a in atoms {
                    cum += &a.mass;
                    breakpoints.push(cum.clone());
                    segments.push(Segment::constant(a.value.clone()));
                }
            }
            Law::PiecewiseUniform(pieces) => {
                for p in pieces {
                    // G(s) = lo + (s − c)·(hi − lo)/m on ]c, c + m]
                    let slope = (&p.hi - &p.lo) / &p.mass;
                    let intercept = &p.lo - &slope * &cum;
                    cum += &p.mass;
                    breakpoints.push(cum.clone());
                    segments.push(Segment::new(slope, intercept));
                }
            }
        }
        PiecewiseFn::new(breakpoints, segments).expect("cumulative masses increase to 1")
    }

    /// `inf{u : F(u) > s}` for `s ∈ [0, 1[`; equals `sup{u : F(u) ≤ s}`.
    pub fn level_crossing(&self, s: &Rational) -> Rational {
        let mut cum = Rational::zero();
        match &self.law {
            Law::Discrete(atoms) => {
                for a in atoms {
                    cum += &a.mass;
                    if &cum > s {
                        return a.value.clone();
                    }
                }
                atoms.last().expect("non-empty").value.clone()
            }
            Law::PiecewiseUniform(pieces) => {
                for p in pieces {
                    let next = &cum + &p.mass;
                    if &next > s {
                        return &p.lo + (s - &cum) / &p.mass * (&p.hi - &p.lo);
                    }
                    cum = next;
                }
                pieces.last().expect("non-empty").hi.clone()
            }
        }
    }

    /// Canonical non-degeneracy witness at level `rho`.
    ///
    /// Valid lower points form the ray `]a, ∞[` with `a = inf{u : F(u) > ρ}`
    /// and valid upper points the ray `]−∞, b[` with `b = G(1 − ρ)`; a
    /// witness exists iff `a < b`. The quantile pair at level
    /// `q = (ρ + 1/2)/2`, namely `G(q)` and `inf{u : F(u) > 1 − q}`, is used
    /// when it lies in `]a, b[` in increasing order; otherwise the witness
    /// falls back to the trisection points of `]a, b[`.
    pub fn find_witness(&self, rho: &Rational) -> Result<NonDegeneracyWitness, DistributionError> {
        if !rho.is_positive() || rho >= &q(1, 2) {
            return Err(DistributionError::RhoOutOfRange(Exact(rho).to_string()));
        }
        let one = Rational::one();
        let a = self.level_crossing(rho);
        let b = self.quantile_fn().eval(&(&one - rho));
        if a >= b {
            return Err(DistributionError::NoWitness { rho: Exact(rho).to_string() });
        }
        let level = (rho + q(1, 2)) / q(2, 1);
        let lower = self.quantile_fn().eval(&level);
        let upper = self.level_crossing(&(&one - &level));
        let (x_minus, x_plus) = if a < lower && lower < upper && upper < b {
            (lower, upper)
        } else {
            let third = (&b - &a) / q(3, 1);
            (&a + &third, &b - &third)
        };
        let witness = NonDegeneracyWitness {
            rho: rho.clone(),
            p_lower: self.cdf(&x_minus, true),
            p_upper: self.upper_tail(&x_plus),
            x_minus,
            x_plus,
        };
        debug_assert!(witness.is_valid_for(self));
        Ok(witness)
    }

    /// Every atom value and piece endpoint, sorted.
    pub fn support_points(&self) -> Vec<Rational> {
        match &self.law {
            Law::Discrete(atoms) => atoms.iter().map(|a| a.value.clone()).collect(),
            Law::PiecewiseUniform(pieces) => {
                let mut pts: Vec<Rational> = pieces.iter().flat_map(|p| [p.lo.clone(), p.hi.clone()]).collect();
                pts.dedup();
                pts
            }
        }
    }

    /// One exact draw. Atoms and pieces are selected with exact integer
    /// arithmetic; the position inside a piece uses a 53-bit dyadic uniform.
    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> Rational {
        match &self.law {
            Law::Discrete(atoms) => {
                let masses: Vec<Rational> = atoms.iter().map(|a| a.mass.clone()).collect();
                atoms[rng::weighted_index(rng, &masses)].value.clone()
            }
            Law::PiecewiseUniform(pieces) => {
                let masses: Vec<Rational> = pieces.iter().map(|p| p.mass.clone()).collect();
                let p = &pieces[rng::weighted_index(rng, &masses)];
                let w = rng::uniform_open(rng);
                &p.lo + (&p.hi - &p.lo) * w
            }
        }
    }
}

fn merge_adjacent(pieces: Vec<Piece>) -> Vec<Piece> {
    let mut out: Vec<Piece> = Vec::with_capacity(pieces.len());
    for p in pieces {
        match out.last_mut() {
            Some(last) if last.hi == p.lo && last.density() == p.density() => {
                last.hi = p.hi;
                last.mass += p.mass;
            }
            _ => out.push(p),
        }
    }
    out
}

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.law {
            Law::Discrete(atoms) => {
                let body: Vec<String> = atoms
                    .iter()
                    .map(|a| format!("{}:{}", Exact(&a.value), Exact(&a.mass)))
                    .collect();
                write!(f, "discrete{{{}}}", body.join(", "))
            }
            Law::PiecewiseUniform(pieces) => {
                let body: Vec<String> = pieces
                    .iter()
                    .map(|p| format!("({},{}):{}", Exact(&p.lo), Exact(&p.hi), Exact(&p.mass)))
                    .collect();
                write!(f, "uniform{{{}}}", body.join(", "))
            }
        }
    }
}

impl FromStr for DistributionSpec {
    type Err = DistributionError;

    /// Parses `discrete{v:m, ...}` or `uniform{(lo,hi):m, ...}`.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let perr = |msg: &str| DistributionError::Parse(format!("{msg} in `{text}`"));
        let s = text.trim();
        let open = s.find('{').ok_or_else(|| perr("missing `{`"))?;
        if !s.ends_with('}') {
            return Err(perr("missing `}`"));
        }
        let head = s[..open].trim();
        let body = &s[open + 1..s.len() - 1];
        let rat = |t: &str| parse_rational(t).map_err(|e| perr(&e.to_string()));
        match head {
            "discrete" => {
                let mut atoms = Vec::new();
                for entry in body.split(',').map(str::trim).filter(|e| !e.is_empty()) {
                    let (v, m) = entry.split_once(':').ok_or_else(|| perr("atom needs `value:mass`"))?;
                    atoms.push((rat(v)?, rat(m)?));
                }
                Self::discrete(atoms)
            }
            "uniform" => {
                let mut pieces = Vec::new();
                let mut rest = body.trim();
                while !rest.is_empty() {
                    let inner_start = rest.strip_prefix('(').ok_or_else(|| perr("piece needs `(lo,hi):mass`"))?;
                    let close = inner_start.find(')').ok_or_else(|| perr("unclosed `(`"))?;
                    let (lo, hi) = inner_start[..close]
                        .split_once(',')
                        .ok_or_else(|| perr("interval needs `lo,hi`"))?;
                    let after = inner_start[close + 1..].trim_start();
                    let after = after.strip_prefix(':').ok_or_else(|| perr("piece needs `:mass`"))?;
                    let (mass, tail) = match after.find(',') {
                        Some(i) => (&after[..i], &after[i + 1..]),
                        None => (after, ""),
                    };
                    pieces.push((rat(lo)?, rat(hi)?, rat(mass)?));
                    rest = tail.trim();
                }
                Self::piecewise_uniform(pieces)
            }
            _ => Err(perr("expected `discrete` or `uniform`")),
        }
    }
}

impl TryFrom<String> for DistributionSpec {
    type Error = DistributionError;
    fn try_from(value: String) -> Result<Self, Self::Error> {
        value.parse()
    }
}

impl From<DistributionSpec> for String {
    fn from(value: DistributionSpec) -> Self {
        value.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qi;

    fn unit_uniform() -> DistributionSpec {
        DistributionSpec::piecewise_uniform(vec![(qi(0), qi(1), qi(1))]).unwrap()
    }

    fn fair_bit() -> DistributionSpec {
        DistributionSpec::discrete(vec![(qi(0), q(1, 2)), (qi(1), q(1, 2))]).unwrap()
    }

    fn three_point() -> DistributionSpec {
        DistributionSpec::discrete(vec![(qi(-1), q(1, 4)), (qi(0), q(1, 2)), (qi(1), q(1, 4))]).unwrap()
    }

    #[test]
    fn cdf_examples() {
        assert_eq!(unit_uniform().cdf(&q(3, 10), false), q(3, 10));
        assert_eq!(fair_bit().cdf(&qi(0), false), q(1, 2));
        assert_eq!(fair_bit().cdf(&qi(0), true), qi(0));
        assert_eq!(three_point().cdf(&q(1, 2), false), q(3, 4));
    }

    #[test]
    fn quantile_examples() {
        assert_eq!(unit_uniform().quantile(&q(3, 10)).unwrap(), q(3, 10));
        assert_eq!(fair_bit().quantile(&q(1, 2)).unwrap(), qi(0));
        assert_eq!(fair_bit().quantile(&q(3, 5)).unwrap(), qi(1));
        let d = three_point();
        assert_eq!(d.quantile(&q(1, 4)).unwrap(), qi(-1));
        assert_eq!(d.quantile(&q(3, 10)).unwrap(), qi(0));
        assert_eq!(d.quantile(&q(4, 5)).unwrap(), qi(1));
        assert!(d.quantile(&qi(0)).is_err());
        assert!(d.quantile(&qi(1)).is_err());
    }

    #[test]
    fn witness_examples() {
        let w = fair_bit().find_witness(&q(1, 4)).unwrap();
        assert_eq!((w.x_minus.clone(), w.x_plus.clone()), (q(1, 3), q(2, 3)));
        assert_eq!((w.p_lower.clone(), w.p_upper.clone()), (q(1, 2), q(1, 2)));

        let constant = DistributionSpec::discrete(vec![(qi(5), qi(1))]).unwrap();
        assert!(matches!(
            constant.find_witness(&q(1, 10)),
            Err(DistributionError::NoWitness { .. })
        ));

        let w = unit_uniform().find_witness(&q(1, 4)).unwrap();
        assert_eq!((w.x_minus.clone(), w.x_plus.clone()), (q(3, 8), q(5, 8)));
        assert_eq!((w.p_lower.clone(), w.p_upper.clone()), (q(3, 8), q(3, 8)));
    }

    #[test]
    fn witness_falls_back_when_quantile_pair_fails() {
        // upper tail mass 3/10 is below the quantile level 3/8 but above rho
        let d = DistributionSpec::discrete(vec![(qi(0), q(7, 10)), (qi(1), q(3, 10))]).unwrap();
        let w = d.find_witness(&q(1, 4)).unwrap();
        assert!(w.is_valid_for(&d));
        assert_eq!((w.x_minus, w.x_plus), (q(1, 3), q(2, 3)));
        // an atom of mass ≥ 1 − rho kills every witness
        let heavy = DistributionSpec::discrete(vec![(qi(0), q(4, 5)), (qi(1), q(1, 5))]).unwrap();
        assert!(heavy.find_witness(&q(1, 4)).is_err());
        assert!(fair_bit().find_witness(&q(1, 2)).is_err());
        assert!(fair_bit().find_witness(&qi(0)).is_err());
    }

    #[test]
    fn construction_errors() {
        assert_eq!(DistributionSpec::discrete(vec![]), Err(DistributionError::Empty));
        assert!(matches!(
            DistributionSpec::discrete(vec![(qi(0), q(1, 2)), (qi(0), q(1, 2))]),
            Err(DistributionError::DuplicateAtom(_))
        ));
        assert!(matches!(
            DistributionSpec::discrete(vec![(qi(0), q(1, 2))]),
            Err(DistributionError::MassNotOne(_))
        ));
        assert!(matches!(
            DistributionSpec::discrete(vec![(qi(0), qi(0)), (qi(1), qi(1))]),
            Err(DistributionError::NonPositiveMass(_))
        ));
        assert!(matches!(
            DistributionSpec::piecewise_uniform(vec![(qi(0), qi(2), q(1, 2)), (qi(1), qi(3), q(1, 2))]),
            Err(DistributionError::OverlappingPieces(_))
        ));
        assert!(matches!(
            DistributionSpec::piecewise_uniform(vec![(qi(1), qi(1), qi(1))]),
            Err(DistributionError::EmptyPiece(..))
        ));
    }

    #[test]
    fn adjacent_equal_density_pieces_merge() {
        let split = DistributionSpec::piecewise_uniform(vec![(q(1, 4), qi(1), q(3, 4)), (qi(0), q(1, 4), q(1, 4))]).unwrap();
        assert_eq!(split, unit_uniform());
        let mixed = DistributionSpec::piecewise_mixture(vec![(qi(0), qi(1), q(1, 2)), (qi(0), qi(1), q(1, 2))]).unwrap();
        assert_eq!(mixed, unit_uniform());
    }

    #[test]
    fn literal_round_trip() {
        for text in ["discrete{-1:1/4, 0:1/2, 1:1/4}", "uniform{(0,1/4):1/2, (3/4,1):1/2}", "discrete{0.5:0.6,2:2/5}"] {
            let d: DistributionSpec = text.parse().unwrap();
            let again: DistributionSpec = d.to_string().parse().unwrap();
            assert_eq!(d, again);
        }
        assert!("binomial{1:1}".parse::<DistributionSpec>().is_err());
        assert!("discrete{1}".parse::<DistributionSpec>().is_err());
        assert!("uniform{(0,1)}".parse::<DistributionSpec>().is_err());
    }

    #[test]
    fn level_crossing_matches_definition() {
        let d = three_point();
        assert_eq!(d.level_crossing(&q(1, 4)), qi(0));
        assert_eq!(d.level_crossing(&q(1, 5)), qi(-1));
        let u = unit_uniform();
        assert_eq!(u.level_crossing(&q(1, 4)), q(1, 4));
    }
}
