//! A fixed set of entry laws spanning the supported families: asymmetric
//! discrete laws with two to five atoms, the unit uniform, and gapped or
//! unevenly weighted piecewise-uniform laws.

use crate::distributions::DistributionSpec;
use crate::rational::{q, Rational};

/// Level at which every battery law has a witness.
pub fn battery_rho() -> Rational {
    q(1, 10)
}

const LITERALS: &[&str] = &[
    "discrete{0:3/5, 1:2/5}",
    "discrete{0:1/2, 1:1/2}",
    "discrete{-1:1/2, 1:1/2}",
    "discrete{1/3:2/3, 2:1/3}",
    "discrete{0:1/6, 1:1/3, 5/2:1/2}",
    "discrete{-2:1/10, 0:2/5, 3:1/5, 7:3/10}",
    "discrete{-3:1/8, -1:1/4, 0:1/8, 2:3/8, 9:1/8}",
    "uniform{(0,1):1}",
    "uniform{(0,1/4):1/2, (3/4,1):1/2}",
    "uniform{(-1,0):1/5, (2,5):4/5}",
    "uniform{(0,1):1/3, (1,3):2/3}",
    "uniform{(-2,-1):3/10, (0,1/2):1/5, (4,6):1/2}",
];

/// `(literal, law)` pairs.
pub fn battery() -> Vec<(&'static str, DistributionSpec)> {
    LITERALS
        .iter()
        .map(|&s| (s, s.parse().expect("battery literal parses")))
        .collect()
}
