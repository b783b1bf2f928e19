//! Wilson score intervals and the one-sample Kolmogorov–Smirnov statistic.

use crate::distributions::DistributionSpec;
use crate::rational::{to_f64, Rational};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;
/// Two-sided 99% normal quantile.
pub const Z99: f64 = 2.575_829_303_548_900_4;

/// Wilson score interval for `hits` successes out of `trials`.
pub fn wilson_interval(hits: u64, trials: u64, z: f64) -> (f64, f64) {
    assert!(trials > 0, "Wilson interval needs at least one trial");
    let n = trials as f64;
    let p = hits as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Survival function of the Kolmogorov distribution,
/// `P(K > x) = 2 Σ_{k≥1} (−1)^(k−1) e^(−2k²x²)`.
pub fn kolmogorov_sf(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * x * x).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-18 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Asymptotic critical value of `D_n` at significance `alpha`.
pub fn ks_critical_value(n: usize, alpha: f64) -> f64 {
    let (mut lo, mut hi) = (0.1, 5.0);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if kolmogorov_sf(mid) > alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi / (n as f64).sqrt()
}

/// `sup_u |F_n(u) − F(u)|` against an exact law. Jumps are checked from
/// both sides at every sample value and every support point. Sample counts
/// are exact; the law's CDF is evaluated exactly on atoms and in `f64`
/// inside uniform pieces.
pub fn ks_statistic(samples: &[Rational], dist: &DistributionSpec) -> f64 {
    let n = samples.len();
    assert!(n > 0, "KS statistic of an empty sample");
    let mut sorted: Vec<&Rational> = samples.iter().collect();
    sorted.sort_unstable();
    let support = dist.support_points();
    let nf = n as f64;
    let mut cdf = CdfWalker::new(dist);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < n || j < support.len() {
        let u: &Rational = match (sorted.get(i), support.get(j)) {
            (Some(&x), Some(y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(y)) => y,
            (None, None) => unreachable!(),
        };
        let below = i;
        while i < n && sorted[i] == u {
            i += 1;
        }
        while j < support.len() && &support[j] == u {
            j += 1;
        }
        let (f_left, f_right) = cdf.at(u);
        d = d
            .max((below as f64 / nf - f_left).abs())
            .max((i as f64 / nf - f_right).abs());
    }
    d
}

/// Left and right CDF limits at non-decreasing query points.
struct CdfWalker<'a> {
    dist: &'a DistributionSpec,
    /// `(lo, hi, mass before lo, density)` per uniform piece.
    pieces: Vec<(f64, f64, f64, f64)>,
    ends: Vec<&'a Rational>,
    next: usize,
}

impl<'a> CdfWalker<'a> {
    fn new(dist: &'a DistributionSpec) -> Self {
        let mut cum = 0.0;
        let pieces = dist
            .pieces()
            .iter()
            .map(|p| {
                let entry = (to_f64(&p.lo), to_f64(&p.hi), cum, to_f64(&p.density()));
                cum += to_f64(&p.mass);
                entry
            })
            .collect();
        let ends = dist.pieces().iter().map(|p| &p.hi).collect();
        CdfWalker { dist, pieces, ends, next: 0 }
    }

    fn at(&mut self, u: &Rational) -> (f64, f64) {
        if self.pieces.is_empty() {
            return (to_f64(&self.dist.cdf(u, true)), to_f64(&self.dist.cdf(u, false)));
        }
        while self.next < self.ends.len() && self.ends[self.next] <= u {
            self.next += 1;
        }
        let f = match self.pieces.get(self.next) {
            None => 1.0,
            Some(&(lo, hi, before, density)) => {
                let x = to_f64(u);
                if x <= lo {
                    before
                } else {
                    before + density * (x.min(hi) - lo)
                }
            }
        };
        (f, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    #[test]
    fn wilson_brackets_estimate() {
        let (lo, hi) = wilson_interval(50, 100, Z95);
        assert!(lo < 0.5 && 0.5 < hi);
        assert!((lo - 0.403_8).abs() < 1e-3 && (hi - 0.596_2).abs() < 1e-3);
        let (lo, hi) = wilson_interval(0, 1, Z95);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.5 && hi < 1.0);
        let (lo, hi) = wilson_interval(1, 1, Z95);
        assert!(lo > 0.0 && lo < 0.5);
        assert_eq!(hi, 1.0);
    }

    #[test]
    fn ks_critical_matches_tables() {
        // 99.9%: 1.9495, 95%: 1.3581
        assert!((ks_critical_value(1, 0.001) - 1.949_5).abs() < 1e-3);
        assert!((ks_critical_value(100, 0.05) - 0.135_81).abs() < 1e-4);
    }

    #[test]
    fn ks_of_exact_discrete_sample_is_small() {
        let d = DistributionSpec::discrete(vec![(qi(0), q(1, 2)), (qi(1), q(1, 2))]).unwrap();
        let s = vec![qi(0), qi(1), qi(0), qi(1)];
        assert!(ks_statistic(&s, &d) < 1e-12);
        let skewed = vec![qi(0), qi(0), qi(0), qi(1)];
        assert!((ks_statistic(&skewed, &d) - 0.25).abs() < 1e-12);
        // an atom never sampled still counts
        let t = DistributionSpec::discrete(vec![(qi(0), q(1, 2)), (qi(1), q(1, 4)), (qi(2), q(1, 4))]).unwrap();
        assert!((ks_statistic(&[qi(0), qi(2)], &t) - 0.25).abs() < 1e-12);
    }

    /// Two-sided check at every candidate point with exact CDF values.
    fn brute_ks(samples: &[Rational], dist: &DistributionSpec) -> f64 {
        let mut points: Vec<Rational> = samples.to_vec();
        points.extend(dist.support_points());
        let n = samples.len() as f64;
        points
            .iter()
            .map(|u| {
                let below = samples.iter().filter(|x| *x < u).count() as f64 / n;
                let upto = samples.iter().filter(|x| *x <= u).count() as f64 / n;
                (below - to_f64(&dist.cdf(u, true))).abs().max((upto - to_f64(&dist.cdf(u, false))).abs())
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn ks_walk_matches_brute_force() {
        let d = DistributionSpec::piecewise_uniform(vec![(q(-2, 1), qi(-1), q(3, 10)), (qi(0), q(1, 2), q(1, 5)), (qi(4), qi(6), q(1, 2))])
            .unwrap();
        let samples = vec![qi(-3), q(-3, 2), qi(-1), q(-1, 2), qi(0), q(1, 4), q(1, 4), qi(5), qi(6), qi(7)];
        assert!((ks_statistic(&samples, &d) - brute_ks(&samples, &d)).abs() < 1e-12);
        let t = DistributionSpec::discrete(vec![(qi(0), q(1, 3)), (q(1, 2), q(1, 3)), (qi(2), q(1, 3))]).unwrap();
        let samples = vec![qi(-1), qi(0), qi(0), q(1, 2), qi(3)];
        assert!((ks_statistic(&samples, &t) - brute_ks(&samples, &t)).abs() < 1e-12);
    }
}
