//! The inequality chain behind the `O(1/√n)` singularity bound.
//!
//! ```text
//! P(sr_c(A) < k)           ≤ C(n,k)·p₀^(m−k+1)/(1 − p₀)          strong-rank tail
//! P(X ∈ span{v₁..v_k})     ≤ C·p₀^(n−k−1)/√s                     rank improvement
//! P(M_n singular)          ≤ C(n,a)·p₀^(n−a+1)/(1 − p₀)
//!                           + C(n,b)·p₀^(a−b+1)/(1 − p₀)²
//!                           + C/((1 − p₀)·√(βn))                  a = ⌈αn⌉, b = ⌈βn⌉
//! ```
//!
//! The first two terms decay like `exp(n·(h(α) + (1−α)ln p₀))` and
//! `exp(n·(h(β) + (α−β)ln p₀))`, so thresholds with both exponents negative
//! leave only the `1/√n` term.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::{ln_biguint, q, serde_exact, to_f64, Rational};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundsError {
    #[error("entropy argument {0} outside [0,1]")]
    OutOfRange(f64),
    #[error("invalid indices: {0}")]
    BadIndices(String),
    #[error("invalid thresholds: {0}")]
    InvalidThresholds(String),
    #[error("p0 = {0} outside ]1/2, 1[")]
    BadP0(String),
    #[error("no feasible thresholds for p0 = {0}")]
    Infeasible(String),
}

/// `h(x) = −x ln x − (1 − x) ln(1 − x)`, with `h(0) = h(1) = 0`.
pub fn entropy(x: f64) -> Result<f64, BoundsError> {
    if !(0.0..=1.0).contains(&x) {
        return Err(BoundsError::OutOfRange(x));
    }
    let term = |t: f64| if t > 0.0 { -t * t.ln() } else { 0.0 };
    Ok(term(x) + term(1.0 - x))
}

/// Exact binomial coefficient.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    (0..k).fold(BigUint::one(), |acc, i| acc * (n - i) / (i + 1))
}

fn check_p0(p0: &Rational) -> Result<(), BoundsError> {
    if p0 <= &q(1, 2) || p0 >= &Rational::one() {
        return Err(BoundsError::BadP0(crate::rational::format_rational(p0)));
    }
    Ok(())
}

fn ln_rational(x: &Rational) -> f64 {
    ln_biguint(x.numer().magnitude()) - ln_biguint(x.denom().magnitude())
}

/// `C(n,k)·p₀^(m−k+1)/(1 − p₀)`, evaluated exactly then rounded.
/// The row version is the same call with `n` and `m` swapped.
pub fn strong_rank_tail(n: u64, m: u64, k: u64, p0: &Rational) -> Result<f64, BoundsError> {
    if k < 1 || k > n.min(m) {
        return Err(BoundsError::BadIndices(format!("need 1 <= k <= min(n, m), got n={n} m={m} k={k}")));
    }
    let exact = Rational::from_integer(BigInt::from(binomial(n, k)))
        * num_traits::pow(p0.clone(), (m - k + 1) as usize)
        / (Rational::one() - p0);
    Ok(to_f64(&exact))
}

/// `C·p₀^(n−k−1)/√s`.
pub fn rank_improvement_bound(n: u64, k: u64, s: u64, p0: &Rational, c: f64) -> Result<f64, BoundsError> {
    if s < 1 || k >= n {
        return Err(BoundsError::BadIndices(format!("need s >= 1 and k < n, got n={n} k={k} s={s}")));
    }
    let power = to_f64(&num_traits::pow(p0.clone(), (n - k - 1) as usize));
    Ok(c * power / (s as f64).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    pub n: u64,
    #[serde(with = "serde_exact")]
    pub p0: Rational,
    pub alpha: f64,
    pub beta: f64,
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub n: u64,
    #[serde(with = "serde_exact")]
    pub p0: Rational,
    pub alpha: f64,
    pub beta: f64,
    /// Concentration constant used for the third term.
    pub c: f64,
    /// `⌈αn⌉`
    pub alpha_index: u64,
    /// `⌈βn⌉`
    pub beta_index: u64,
    pub term_sr: f64,
    pub term_rows: f64,
    pub term_lo: f64,
    pub total: f64,
    pub exp_alpha: f64,
    pub exp_beta: f64,
    /// `e^(n·exp_alpha) + e^(n·exp_beta) + 1/√n`, the form up to an unspecified constant.
    pub asymptotic: f64,
}

impl BoundReport {
    pub fn total_sqrt_n(&self) -> f64 {
        self.total * (self.n as f64).sqrt()
    }

    pub fn is_vacuous(&self) -> bool {
        self.total >= 1.0
    }
}

/// `⌈x·n⌉`, ignoring floating noise below 1e-9.
fn ceil_index(x: f64, n: u64) -> u64 {
    (x * n as f64 - 1e-9).ceil().max(0.0) as u64
}

fn validate(params: &BoundParams) -> Result<(u64, u64), BoundsError> {
    check_p0(&params.p0)?;
    let BoundParams { n, alpha, beta, .. } = *params;
    if n < 1 {
        return Err(BoundsError::BadIndices("n must be positive".into()));
    }
    if !(0.0 < beta && beta < alpha && alpha < 1.0) {
        return Err(BoundsError::InvalidThresholds(format!("need 0 < beta < alpha < 1, got alpha={alpha} beta={beta}")));
    }
    let a = ceil_index(alpha, n);
    let b = ceil_index(beta, n);
    if b == 0 || a > n {
        return Err(BoundsError::InvalidThresholds(format!("rounded indices a={a} b={b} for n={n}")));
    }
    Ok((a, b))
}

/// Exponents `h(α) + (1−α) ln p₀` and `h(β) + (α−β) ln p₀`.
pub fn exponents(p0: &Rational, alpha: f64, beta: f64) -> (f64, f64) {
    let ln_p0 = ln_rational(p0);
    let h = |x: f64| entropy(x).unwrap_or(f64::NAN);
    (h(alpha) + (1.0 - alpha) * ln_p0, h(beta) + (alpha - beta) * ln_p0)
}

/// Exact `C(n, k)` that can be walked to neighbouring `(n, k)` cheaply.
#[derive(Debug, Clone)]
struct BinomialWalker {
    n: u64,
    k: u64,
    value: BigUint,
}

impl BinomialWalker {
    fn new(n: u64, k: u64) -> Self {
        BinomialWalker { n, k, value: binomial(n, k) }
    }

    fn move_to(&mut self, n: u64, k: u64) -> &BigUint {
        let steps = n.abs_diff(self.n) + k.abs_diff(self.k);
        if n < self.n || k < self.k || steps > k.min(n - k) || self.value.is_zero() {
            *self = Self::new(n, k);
            return &self.value;
        }
        while self.n < n {
            // C(n+1, k) = C(n, k)·(n+1)/(n+1−k)
            self.value = &self.value * (self.n + 1) / (self.n + 1 - self.k);
            self.n += 1;
        }
        while self.k < k {
            // C(n, k+1) = C(n, k)·(n−k)/(k+1)
            self.value = &self.value * (self.n - self.k) / (self.k + 1);
            self.k += 1;
        }
        &self.value
    }
}

struct Evaluator {
    sr: BinomialWalker,
    rows: BinomialWalker,
}

impl Evaluator {
    fn new() -> Self {
        Evaluator { sr: BinomialWalker::new(0, 0), rows: BinomialWalker::new(0, 0) }
    }

    fn report(&mut self, params: &BoundParams) -> Result<BoundReport, BoundsError> {
        let (a, b) = validate(params)?;
        let n = params.n;
        let p0 = &params.p0;
        let ln_p0 = ln_rational(p0);
        let ln_q0 = ln_rational(&(Rational::one() - p0));
        let ln_sr = ln_biguint(self.sr.move_to(n, a));
        let ln_rows = ln_biguint(self.rows.move_to(n, b));
        let term_sr = (ln_sr + (n - a + 1) as f64 * ln_p0 - ln_q0).exp();
        let term_rows = (ln_rows + (a - b + 1) as f64 * ln_p0 - 2.0 * ln_q0).exp();
        let q0 = to_f64(&(Rational::one() - p0));
        let term_lo = params.c / (q0 * (params.beta * n as f64).sqrt());
        let (exp_alpha, exp_beta) = exponents(p0, params.alpha, params.beta);
        let nf = n as f64;
        Ok(BoundReport {
            n,
            p0: p0.clone(),
            alpha: params.alpha,
            beta: params.beta,
            c: params.c,
            alpha_index: a,
            beta_index: b,
            term_sr,
            term_rows,
            term_lo,
            total: term_sr + term_rows + term_lo,
            exp_alpha,
            exp_beta,
            asymptotic: (nf * exp_alpha).exp() + (nf * exp_beta).exp() + nf.sqrt().recip(),
        })
    }
}

/// All three terms of the bound with `a = ⌈αn⌉`, `b = ⌈βn⌉`.
pub fn singularity_bound(params: &BoundParams) -> Result<BoundReport, BoundsError> {
    Evaluator::new().report(params)
}

/// [`singularity_bound`] for each `n`, sharing binomial state between
/// consecutive sizes.
pub fn singularity_bound_scan(
    template: &BoundParams,
    ns: impl IntoIterator<Item = u64>,
) -> Result<Vec<BoundReport>, BoundsError> {
    let mut eval = Evaluator::new();
    ns.into_iter()
        .map(|n| eval.report(&BoundParams { n, ..template.clone() }))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub alpha: f64,
    pub beta: f64,
    pub exp_alpha: f64,
    pub exp_beta: f64,
}

fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    // f(lo) > 0 > f(hi)
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Thresholds with both exponents strictly negative.
///
/// Outer search: with `L = −ln p₀`, letting `β → 0` gives margin
/// `min((1−α)L − h(α), αL)`; `α` is the unique crossing of the two, which
/// maximizes it. Inner search: `β` is the largest value keeping
/// `−exp_beta` at half that margin, so the `1/√(βn)` term stays as small as
/// possible while both exponents remain negative.
pub fn optimize_thresholds(p0: &Rational) -> Result<Thresholds, BoundsError> {
    if p0 >= &Rational::one() {
        return Err(BoundsError::Infeasible(crate::rational::format_rational(p0)));
    }
    check_p0(p0)?;
    let big_l = -ln_rational(p0);
    let h = |x: f64| entropy(x).unwrap_or(f64::NAN);
    let alpha = bisect(0.0, 0.5, |a| (1.0 - 2.0 * a) * big_l - h(a));
    let margin = alpha * big_l;
    let mut beta = bisect(0.0, alpha, |b| (alpha - b) * big_l - h(b) - 0.5 * margin);
    let (exp_alpha, mut exp_beta) = exponents(p0, alpha, beta);
    while exp_beta >= 0.0 && beta > 0.0 {
        beta *= 0.5;
        exp_beta = exponents(p0, alpha, beta).1;
    }
    if !(exp_alpha < 0.0 && exp_beta < 0.0 && 0.0 < beta && beta < alpha) {
        return Err(BoundsError::Infeasible(crate::rational::format_rational(p0)));
    }
    Ok(Thresholds { alpha, beta, exp_alpha, exp_beta })
}

/// `(n, total, total·√n)` rows.
pub fn scan_rows(reports: &[BoundReport]) -> Vec<(u64, f64, f64)> {
    reports.iter().map(|r| (r.n, r.total, r.total_sqrt_n())).collect()
}

/// Largest `n` where `√n·e^(n·e)` still increases for either exponent,
/// i.e. `max(1/(2|exp_alpha|), 1/(2|exp_beta|))`, rounded up.
pub fn crossover_n(t: &Thresholds) -> u64 {
    let peak = |e: f64| (0.5 / e.abs()).ceil();
    peak(t.exp_alpha).max(peak(t.exp_beta)).to_u64().unwrap_or(u64::MAX)
}
