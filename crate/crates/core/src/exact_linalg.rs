//! Exact dense linear algebra over the rationals.
//!
//! Rank uses fraction-free (Bareiss) elimination on rows scaled to integers,
//! which keeps every intermediate entry a minor of the input. Strong rank is
//! `spark − 1`, found by enumerating subsets in increasing size with an
//! incremental integer echelon basis; the first dependent subset found is a
//! minimal circuit.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::{common_denominator, parse_rational, Exact, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("vector of length {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("{rows}x{cols} matrix needs {expected} entries, got {got}")]
    EntryCount { rows: usize, cols: usize, expected: usize, got: usize },
    #[error("row {row} has {got} entries, expected {expected}")]
    RaggedRows { row: usize, expected: usize, got: usize },
    #[error("cannot parse matrix: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axis {
    Rows,
    Columns,
}

/// Dense row-major matrix of exact rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrongRankResult {
    pub value: usize,
    /// Lexicographically first minimal dependent index set (0-based), of size `value + 1`.
    pub witness_circuit: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanMembership {
    pub member: bool,
    /// `u` with `Σ uᵢ vᵢ = x`, free coordinates set to zero.
    pub coefficients: Option<Vec<Rational>>,
}

impl RationalMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Rational>) -> Result<Self, LinalgError> {
        if entries.len() != rows * cols {
            return Err(LinalgError::EntryCount { rows, cols, expected: rows * cols, got: entries.len() });
        }
        Ok(RationalMatrix { rows, cols, entries })
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, LinalgError> {
        let cols = rows.first().map_or(0, Vec::len);
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * cols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != cols {
                return Err(LinalgError::RaggedRows { row: i, expected: cols, got: row.len() });
            }
            entries.extend(row);
        }
        Ok(RationalMatrix { rows: n, cols, entries })
    }

    /// Convenience for tests and fixtures: integer entries.
    pub fn from_i64(rows: &[&[i64]]) -> Result<Self, LinalgError> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| Rational::from_integer(v.into())).collect())
                .collect(),
        )
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix { rows, cols, entries: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = Rational::one();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.cols + j]
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut entries = Vec::with_capacity(self.entries.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                entries.push(self.get(i, j).clone());
            }
        }
        RationalMatrix { rows: self.cols, cols: self.rows, entries }
    }

    /// Vectors along `axis`: the rows, or the columns.
    pub fn vectors(&self, axis: Axis) -> Vec<Vec<Rational>> {
        match axis {
            Axis::Rows => (0..self.rows).map(|i| self.row(i).to_vec()).collect(),
            Axis::Columns => (0..self.cols).map(|j| self.column(j)).collect(),
        }
    }

    /// Keeps the listed columns, in order.
    pub fn select_columns(&self, columns: &[usize]) -> Self {
        let mut entries = Vec::with_capacity(self.rows * columns.len());
        for i in 0..self.rows {
            entries.extend(columns.iter().map(|&j| self.get(i, j).clone()));
        }
        RationalMatrix { rows: self.rows, cols: columns.len(), entries }
    }
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let line: Vec<String> = self.row(i).iter().map(|v| Exact(v).to_string()).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

impl FromStr for RationalMatrix {
    type Err = LinalgError;

    /// Whitespace-separated rationals, one row per line; blank lines and
    /// `#` comments are skipped.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let rows = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty())
            .map(|l| {
                l.split_whitespace()
                    .map(|tok| parse_rational(tok).map_err(|e| LinalgError::Parse(e.to_string())))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_rows(rows)
    }
}

/// Scales a rational vector by the lcm of its denominators.
fn to_integer_vector(v: &[Rational]) -> Vec<BigInt> {
    let den = common_denominator(v);
    v.iter().map(|x| x.numer() * (&den / x.denom())).collect()
}

/// Exact rank by Bareiss elimination.
pub fn rank(m: &RationalMatrix) -> usize {
    let mut a: Vec<Vec<BigInt>> = (0..m.rows).map(|i| to_integer_vector(m.row(i))).collect();
    bareiss_rank(&mut a, m.cols)
}

fn bareiss_rank(a: &mut [Vec<BigInt>], cols: usize) -> usize {
    let rows = a.len();
    let mut prev = BigInt::one();
    let mut r = 0;
    for col in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let (head, tail) = a.split_at_mut(r + 1);
        let pivot_row = &head[r];
        let pivot = &pivot_row[col];
        for row in tail.iter_mut() {
            let factor = std::mem::take(&mut row[col]);
            for j in col + 1..cols {
                let t = pivot * &row[j] - &factor * &pivot_row[j];
                row[j] = t / &prev;
            }
        }
        prev = head[r][col].clone();
        r += 1;
    }
    r
}

/// `true` iff the square matrix has rank below its size.
pub fn is_singular(m: &RationalMatrix) -> Result<bool, LinalgError> {
    if m.rows != m.cols {
        return Err(LinalgError::NotSquare { rows: m.rows, cols: m.cols });
    }
    Ok(rank(m) < m.rows)
}

/// Decides `x ∈ span(vectors)`; on success returns coefficients by solving
/// the invertible pivot block of the reduced system.
pub fn span_membership(vectors: &[Vec<Rational>], x: &[Rational]) -> Result<SpanMembership, LinalgError> {
    let dim = x.len();
    if let Some(v) = vectors.iter().find(|v| v.len() != dim) {
        return Err(LinalgError::DimensionMismatch { expected: dim, got: v.len() });
    }
    let k = vectors.len();
    // augmented dim × (k + 1) system [V | x]
    let mut a: Vec<Vec<Rational>> = (0..dim)
        .map(|i| vectors.iter().map(|v| v[i].clone()).chain(std::iter::once(x[i].clone())).collect())
        .collect();
    let pivots = reduced_row_echelon(&mut a, k + 1);
    if pivots.last() == Some(&k) {
        return Ok(SpanMembership { member: false, coefficients: None });
    }
    let mut coefficients = vec![Rational::zero(); k];
    for (row, &col) in pivots.iter().enumerate() {
        coefficients[col] = a[row][k].clone();
    }
    Ok(SpanMembership { member: true, coefficients: Some(coefficients) })
}

/// Gauss–Jordan in place; returns the pivot columns.
fn reduced_row_echelon(a: &mut [Vec<Rational>], cols: usize) -> Vec<usize> {
    let rows = a.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][col].recip();
        for v in a[r].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i != r && !row[col].is_zero() {
                let factor = row[col].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x -= &factor * y;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    pivots
}

/// Incremental echelon basis of integer vectors.
#[derive(Clone, Default)]
struct EchelonBasis {
    rows: Vec<(usize, Vec<BigInt>)>,
}

impl EchelonBasis {
    /// Reduces `v` against the basis; `None` when it lies in the span.
    fn reduce(&self, v: &[BigInt]) -> Option<(usize, Vec<BigInt>)> {
        let mut v = v.to_vec();
        for (pc, b) in &self.rows {
            if v[*pc].is_zero() {
                continue;
            }
            let (bp, vp) = (b[*pc].clone(), v[*pc].clone());
            for (x, y) in v.iter_mut().zip(b) {
                *x = &bp * &*x - &vp * y;
            }
            let content = v.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
            if content > BigInt::one() {
                for x in v.iter_mut() {
                    *x /= &content;
                }
            }
        }
        let pivot = v.iter().position(|x| !x.is_zero())?;
        Some((pivot, v))
    }
}

fn circuit_of_size(vectors: &[Vec<BigInt>], size: usize) -> Option<Vec<usize>> {
    fn dfs(
        vectors: &[Vec<BigInt>],
        size: usize,
        start: usize,
        chosen: &mut Vec<usize>,
        basis: &mut EchelonBasis,
    ) -> Option<Vec<usize>> {
        let remaining = size - chosen.len();
        for j in start..=vectors.len() - remaining {
            match basis.reduce(&vectors[j]) {
                None if remaining == 1 => {
                    let mut circuit = chosen.clone();
                    circuit.push(j);
                    return Some(circuit);
                }
                // A smaller dependent set would already have been reported.
                None => continue,
                Some(_) if remaining == 1 => continue,
                Some(reduced) => {
                    chosen.push(j);
                    basis.rows.push(reduced);
                    let found = dfs(vectors, size, j + 1, chosen, basis);
                    basis.rows.pop();
                    chosen.pop();
                    if found.is_some() {
                        return found;
                    }
                }
            }
        }
        None
    }
    if size == 0 || size > vectors.len() {
        return None;
    }
    dfs(vectors, size, 0, &mut Vec::new(), &mut EchelonBasis::default())
}

/// Smallest dependent subset along `axis` with at most `max_size` members.
/// `strong rank < k` iff this returns `Some` for `max_size = k`.
pub fn smallest_circuit(m: &RationalMatrix, axis: Axis, max_size: usize) -> Option<Vec<usize>> {
    let vectors: Vec<Vec<BigInt>> = m.vectors(axis).iter().map(|v| to_integer_vector(v)).collect();
    let ceiling = max_size.min(vectors.len());
    (1..=ceiling).find_map(|k| circuit_of_size(&vectors, k))
}

/// Largest `k` such that every `k` vectors along `axis` are independent.
pub fn strong_rank(m: &RationalMatrix, axis: Axis) -> StrongRankResult {
    let count = match axis {
        Axis::Rows => m.rows,
        Axis::Columns => m.cols,
    };
    // any rank + 1 vectors are dependent, so the spark never exceeds it
    let r = rank(m);
    match smallest_circuit(m, axis, r + 1) {
        Some(circuit) => StrongRankResult { value: circuit.len() - 1, witness_circuit: Some(circuit) },
        None => StrongRankResult { value: count, witness_circuit: None },
    }
}
