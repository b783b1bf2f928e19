//! Exact piecewise-affine functions on `]0, 1[`.
//!
//! Segment `i` covers `]b_i, b_{i+1}]`, so evaluation is left-continuous at
//! interior breakpoints. That matches generalized quantiles, which are
//! left-continuous, so compositions with them evaluate exactly everywhere.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::{serde_exact, serde_exact_vec, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    #[serde(with = "serde_exact")]
    pub slope: Rational,
    #[serde(with = "serde_exact")]
    pub intercept: Rational,
}

impl Segment {
    pub fn new(slope: Rational, intercept: Rational) -> Self {
        Segment { slope, intercept }
    }

    pub fn constant(value: Rational) -> Self {
        Segment::new(Rational::zero(), value)
    }

    pub fn at(&self, t: &Rational) -> Rational {
        &self.slope * t + &self.intercept
    }

    pub fn is_flat(&self) -> bool {
        self.slope.is_zero()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PiecewiseError {
    #[error("breakpoints must start at 0, end at 1 and strictly increase")]
    BadBreakpoints,
    #[error("expected {expected} segments, got {got}")]
    SegmentCount { expected: usize, got: usize },
    #[error("affine reparametrization must map [0,1] into [0,1] with positive scale")]
    BadReparametrization,
}

/// Certified infimum of a piecewise-affine function over `]0, 1[`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Infimum {
    pub value: Rational,
    /// `false` when the infimum is only approached at an excluded endpoint.
    pub attained: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PiecewiseFn {
    #[serde(with = "serde_exact_vec")]
    breakpoints: Vec<Rational>,
    segments: Vec<Segment>,
}

impl PiecewiseFn {
    pub fn new(breakpoints: Vec<Rational>, segments: Vec<Segment>) -> Result<Self, PiecewiseError> {
        let well_formed = breakpoints.len() >= 2
            && breakpoints[0].is_zero()
            && breakpoints.last().is_some_and(One::is_one)
            && breakpoints.windows(2).all(|w| w[0] < w[1]);
        if !well_formed {
            return Err(PiecewiseError::BadBreakpoints);
        }
        if segments.len() + 1 != breakpoints.len() {
            return Err(PiecewiseError::SegmentCount {
                expected: breakpoints.len() - 1,
                got: segments.len(),
            });
        }
        Ok(PiecewiseFn { breakpoints, segments }.simplified())
    }

    pub fn constant(value: Rational) -> Self {
        PiecewiseFn {
            breakpoints: vec![Rational::zero(), Rational::one()],
            segments: vec![Segment::constant(value)],
        }
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// `(left, right, segment)` for every piece.
    pub fn pieces(&self) -> impl Iterator<Item = (&Rational, &Rational, &Segment)> {
        self.segments
            .iter()
            .enumerate()
            .map(move |(i, s)| (&self.breakpoints[i], &self.breakpoints[i + 1], s))
    }

    fn segment_index(&self, t: &Rational) -> usize {
        let ends = &self.breakpoints[1..];
        ends.partition_point(|b| b < t).min(self.segments.len() - 1)
    }

    /// Exact value at `t`; `t` is clamped to the first/last segment outside `]0, 1]`.
    pub fn eval(&self, t: &Rational) -> Rational {
        self.segments[self.segment_index(t)].at(t)
    }

    /// `t ↦ self(offset + scale·t)`.
    pub fn compose_affine(&self, offset: &Rational, scale: &Rational) -> Result<Self, PiecewiseError> {
        let end = offset + scale;
        if !scale.is_positive() || offset.is_negative() || end > Rational::one() {
            return Err(PiecewiseError::BadReparametrization);
        }
        let mut breakpoints = vec![Rational::zero()];
        for b in &self.breakpoints {
            if b > offset && b < &end {
                breakpoints.push((b - offset) / scale);
            }
        }
        breakpoints.push(Rational::one());
        let segments = breakpoints[1..]
            .iter()
            .map(|t| {
                let source = &self.segments[self.segment_index(&(offset + scale * t))];
                Segment::new(&source.slope * scale, &source.slope * offset + &source.intercept)
            })
            .collect();
        Ok(PiecewiseFn { breakpoints, segments }.simplified())
    }

    pub fn add_constant(&self, c: &Rational) -> Self {
        let segments = self
            .segments
            .iter()
            .map(|s| Segment::new(s.slope.clone(), &s.intercept + c))
            .collect();
        PiecewiseFn { breakpoints: self.breakpoints.clone(), segments }
    }

    /// Pointwise difference `self − other` on the common refinement.
    pub fn sub(&self, other: &PiecewiseFn) -> Self {
        self.combine(other, |a, b| a - b)
    }

    /// Pointwise sum.
    pub fn add(&self, other: &PiecewiseFn) -> Self {
        self.combine(other, |a, b| a + b)
    }

    fn combine(&self, other: &PiecewiseFn, op: impl Fn(&Rational, &Rational) -> Rational) -> Self {
        let mut breakpoints: Vec<Rational> = self
            .breakpoints
            .iter()
            .chain(other.breakpoints.iter())
            .cloned()
            .collect();
        breakpoints.sort();
        breakpoints.dedup();
        let segments = breakpoints[1..]
            .iter()
            .map(|t| {
                let a = &self.segments[self.segment_index(t)];
                let b = &other.segments[other.segment_index(t)];
                Segment::new(op(&a.slope, &b.slope), op(&a.intercept, &b.intercept))
            })
            .collect();
        PiecewiseFn { breakpoints, segments }.simplified()
    }

    /// Exact infimum over `]0, 1[`, read off the segment endpoints.
    pub fn infimum(&self) -> Infimum {
        let last = self.segments.len() - 1;
        let mut best: Option<Infimum> = None;
        let mut offer = |value: Rational, attained: bool| match &mut best {
            Some(b) if value > b.value => {}
            Some(b) if value == b.value => b.attained |= attained,
            _ => best = Some(Infimum { value, attained }),
        };
        for (i, (lo, hi, seg)) in self.pieces().enumerate() {
            if seg.is_flat() {
                offer(seg.intercept.clone(), true);
            } else {
                offer(seg.at(lo), false);
                offer(seg.at(hi), i < last);
            }
        }
        best.expect("at least one segment")
    }

    /// `inf {t ∈ ]0,1[ : f(t) = level}`, or `None` for an empty level set.
    pub fn level_set_inf(&self, level: &Rational) -> Option<Rational> {
        self.level_set_bounds(level).map(|(lo, _)| lo)
    }

    /// `sup {t ∈ ]0,1[ : f(t) = level}`, or `None` for an empty level set.
    pub fn level_set_sup(&self, level: &Rational) -> Option<Rational> {
        self.level_set_bounds(level).map(|(_, hi)| hi)
    }

    fn level_set_bounds(&self, level: &Rational) -> Option<(Rational, Rational)> {
        let one = Rational::one();
        let mut bounds: Option<(Rational, Rational)> = None;
        for (lo, hi, seg) in self.pieces() {
            let hit = if seg.is_flat() {
                (&seg.intercept == level).then(|| (lo.clone(), hi.clone()))
            } else {
                let t = (level - &seg.intercept) / &seg.slope;
                (&t > lo && &t <= hi && t < one).then(|| (t.clone(), t))
            };
            if let Some((a, b)) = hit {
                bounds = Some(match bounds {
                    None => (a, b),
                    Some((x, y)) => (x.min(a), y.max(b)),
                });
            }
        }
        bounds
    }

    fn simplified(mut self) -> Self {
        let mut breakpoints = vec![self.breakpoints[0].clone()];
        let mut segments: Vec<Segment> = Vec::with_capacity(self.segments.len());
        for (i, seg) in self.segments.drain(..).enumerate() {
            if segments.last() == Some(&seg) {
                *breakpoints.last_mut().unwrap() = self.breakpoints[i + 1].clone();
            } else {
                segments.push(seg);
                breakpoints.push(self.breakpoints[i + 1].clone());
            }
        }
        PiecewiseFn { breakpoints, segments }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn step() -> PiecewiseFn {
        // 0 on ]0,1/2], 1 on ]1/2,1[
        PiecewiseFn::new(
            vec![qi(0), q(1, 2), qi(1)],
            vec![Segment::constant(qi(0)), Segment::constant(qi(1))],
        )
        .unwrap()
    }

    #[test]
    fn left_continuous_evaluation() {
        let f = step();
        assert_eq!(f.eval(&q(1, 2)), qi(0));
        assert_eq!(f.eval(&q(501, 1000)), qi(1));
    }

    #[test]
    fn rejects_malformed() {
        assert_eq!(
            PiecewiseFn::new(vec![qi(0), q(1, 2)], vec![Segment::constant(qi(0))]),
            Err(PiecewiseError::BadBreakpoints)
        );
        assert!(matches!(
            PiecewiseFn::new(vec![qi(0), qi(1)], vec![]),
            Err(PiecewiseError::SegmentCount { .. })
        ));
    }

    #[test]
    fn composition_rescales_breakpoints() {
        let g = step().compose_affine(&q(1, 4), &q(1, 2)).unwrap();
        // g(t) = step(1/4 + t/2): jump where 1/4 + t/2 = 1/2, i.e. t = 1/2
        assert_eq!(g.breakpoints(), &[qi(0), q(1, 2), qi(1)]);
        let h = step().compose_affine(&qi(0), &q(2, 5)).unwrap();
        assert_eq!(h, PiecewiseFn::constant(qi(0)));
        assert!(step().compose_affine(&q(3, 4), &q(1, 2)).is_err());
    }

    #[test]
    fn difference_and_infimum() {
        let id = PiecewiseFn::new(vec![qi(0), qi(1)], vec![Segment::new(qi(1), qi(0))]).unwrap();
        let d = step().sub(&id);
        // 0 - t on ]0,1/2], 1 - t on ]1/2,1[
        let inf = d.infimum();
        assert_eq!(inf.value, q(-1, 2));
        assert!(inf.attained);
        let open = id.infimum();
        assert_eq!(open, Infimum { value: qi(0), attained: false });
    }

    #[test]
    fn level_sets() {
        let f = step();
        assert_eq!(f.level_set_inf(&qi(1)), Some(q(1, 2)));
        assert_eq!(f.level_set_sup(&qi(0)), Some(q(1, 2)));
        assert_eq!(f.level_set_inf(&qi(7)), None);
        let ramp = PiecewiseFn::new(vec![qi(0), qi(1)], vec![Segment::new(q(1, 4), qi(0))]).unwrap();
        assert_eq!(ramp.level_set_inf(&q(1, 8)), Some(q(1, 2)));
        assert_eq!(ramp.level_set_inf(&q(1, 4)), None);
    }
}
