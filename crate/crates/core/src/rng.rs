//! Per-trial random streams and exact draws.
//!
//! Every trial gets its own ChaCha8 stream keyed by `(seed, trial_index)`.
//! ChaCha is counter based, so the stream for trial `i` never depends on how
//! many other trials ran before it or on which worker ran them.

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::rational::{common_denominator, Rational};

/// Number of random bits in a draw from [`uniform_open`].
pub const UNIFORM_BITS: u32 = 53;

/// Independent stream for one trial.
pub fn trial_rng(seed: u64, trial_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial_index);
    rng
}

/// Dyadic draw `(2k + 1) / 2^54` with `k` uniform on `[0, 2^53)`.
/// Always strictly inside `]0, 1[` and exact.
pub fn uniform_open<R: RngCore + ?Sized>(rng: &mut R) -> Rational {
    let k = rng.next_u64() >> (64 - UNIFORM_BITS);
    let num = BigInt::from(2 * k + 1);
    let den = BigInt::from(1u64) << (UNIFORM_BITS + 1);
    // odd over a power of two is already in lowest terms
    Rational::new_raw(num, den)
}

/// Exact uniform integer on `[0, bound)` by rejection sampling.
pub fn uniform_below<R: RngCore + ?Sized>(rng: &mut R, bound: &BigUint) -> BigUint {
    assert!(!bound.is_zero(), "empty range");
    if let Some(b) = bound.to_u64() {
        return BigUint::from(rng.random_range(0..b));
    }
    let bits = bound.bits();
    let bytes = bits.div_ceil(8) as usize;
    let excess = (bytes as u64) * 8 - bits;
    let mut buf = vec![0u8; bytes];
    loop {
        rng.fill_bytes(&mut buf);
        buf[0] &= 0xffu8 >> excess;
        let candidate = BigUint::from_bytes_be(&buf);
        if &candidate < bound {
            return candidate;
        }
    }
}

/// Exact Bernoulli draw with rational parameter `p` in `[0, 1]`.
pub fn bernoulli<R: RngCore + ?Sized>(rng: &mut R, p: &Rational) -> bool {
    let den = p.denom().magnitude();
    let k = uniform_below(rng, den);
    match p.numer().sign() {
        Sign::Minus | Sign::NoSign => false,
        Sign::Plus => &k < p.numer().magnitude(),
    }
}

/// Index drawn with probability proportional to the exact rational weights.
pub fn weighted_index<R: RngCore + ?Sized>(rng: &mut R, weights: &[Rational]) -> usize {
    let den = common_denominator(weights);
    let scaled: Vec<BigInt> = weights
        .iter()
        .map(|w| w.numer() * (&den / w.denom()))
        .collect();
    let total: BigInt = scaled.iter().sum();
    let mut k = BigInt::from(uniform_below(rng, total.magnitude()));
    for (i, w) in scaled.iter().enumerate() {
        if &k < w {
            return i;
        }
        k -= w;
    }
    weights.len() - 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = (0..4).map(|_| trial_rng(7, 3).next_u64()).collect();
        assert!(a.windows(2).all(|w| w[0] == w[1]));
        assert_ne!(trial_rng(7, 3).next_u64(), trial_rng(7, 4).next_u64());
        assert_ne!(trial_rng(7, 3).next_u64(), trial_rng(8, 3).next_u64());
    }

    #[test]
    fn uniform_open_stays_inside() {
        let mut rng = trial_rng(1, 0);
        for _ in 0..1000 {
            let u = uniform_open(&mut rng);
            assert!(crate::rational::in_open_unit(&u));
        }
    }

    #[test]
    fn big_bound_rejection() {
        let bound = BigUint::from(3u32) << 100;
        let mut rng = trial_rng(2, 0);
        for _ in 0..200 {
            assert!(uniform_below(&mut rng, &bound) < bound);
        }
    }

    #[test]
    fn bernoulli_extremes() {
        let mut rng = trial_rng(3, 0);
        assert!((0..100).all(|_| !bernoulli(&mut rng, &q(0, 1))));
        assert!((0..100).all(|_| bernoulli(&mut rng, &q(1, 1))));
        let hits = (0..20_000).filter(|_| bernoulli(&mut rng, &q(2, 5))).count();
        assert!((hits as f64 / 20_000.0 - 0.4).abs() < 0.02);
    }

    #[test]
    fn weighted_index_frequencies() {
        let mut rng = trial_rng(4, 0);
        let w = [q(1, 4), q(1, 2), q(1, 4)];
        let mut counts = [0usize; 3];
        for _ in 0..20_000 {
            counts[weighted_index(&mut rng, &w)] += 1;
        }
        assert!((counts[1] as f64 / 20_000.0 - 0.5).abs() < 0.02);
    }
}
