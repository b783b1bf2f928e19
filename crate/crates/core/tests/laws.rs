use num_traits::{One, Zero};
use proptest::prelude::*;
use randsing::bernoulli_decomp::{arrival_departure_times, decompose, pushforward_law, DecompositionError, Variant};
use randsing::battery::{battery, battery_rho};
use randsing::distributions::DistributionSpec;
use randsing::rational::{q, Rational};

/// Discrete laws on small rationals with integer weights, normalized.
fn discrete_law() -> impl Strategy<Value = DistributionSpec> {
    prop::collection::btree_map(-12i64..12, 1i64..9, 1..6).prop_map(|atoms| {
        let total: i64 = atoms.values().sum();
        DistributionSpec::discrete(atoms.into_iter().map(|(v, w)| (q(v, 2), q(w, total))).collect()).unwrap()
    })
}

/// Piecewise-uniform laws on disjoint intervals, possibly touching.
fn uniform_law() -> impl Strategy<Value = DistributionSpec> {
    prop::collection::btree_set(-10i64..10, 2..8)
        .prop_flat_map(|cuts| {
            let cuts: Vec<i64> = cuts.into_iter().collect();
            let n = cuts.len() - 1;
            (Just(cuts), prop::collection::vec(0i64..6, n))
        })
        .prop_filter("some mass", |(_, w)| w.iter().any(|&x| x > 0))
        .prop_map(|(cuts, weights)| {
            let total: i64 = weights.iter().sum();
            let pieces = cuts
                .windows(2)
                .zip(&weights)
                .filter(|(_, &w)| w > 0)
                .map(|(c, &w)| (q(c[0], 3), q(c[1], 3), q(w, total)))
                .collect();
            DistributionSpec::piecewise_uniform(pieces).unwrap()
        })
}

fn any_law() -> impl Strategy<Value = DistributionSpec> {
    prop_oneof![discrete_law(), uniform_law()]
}

fn level() -> impl Strategy<Value = Rational> {
    (1i64..64).prop_map(|k| q(k, 64))
}

fn rho() -> impl Strategy<Value = Rational> {
    (1i64..12).prop_map(|k| q(k, 48))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn quantile_is_galois_inverse(d in any_law(), t in level(), u in (-24i64..24).prop_map(|k| q(k, 6))) {
        let g = d.quantile(&t).unwrap();
        prop_assert_eq!(g <= u, d.cdf(&u, false) >= t);
    }

    #[test]
    fn strict_cdf_differs_only_at_atoms(d in any_law(), u in (-24i64..24).prop_map(|k| q(k, 6))) {
        let strict = d.cdf(&u, true);
        let closed = d.cdf(&u, false);
        prop_assert!(strict <= closed);
        let is_atom = d.atoms().iter().any(|a| a.value == u);
        prop_assert_eq!(strict == closed, !is_atom);
    }

    #[test]
    fn witness_tails_exceed_rho(d in any_law(), rho in rho()) {
        if let Ok(w) = d.find_witness(&rho) {
            prop_assert!(w.x_minus < w.x_plus);
            prop_assert_eq!(&w.p_lower, &d.cdf(&w.x_minus, true));
            prop_assert_eq!(&w.p_upper, &d.upper_tail(&w.x_plus));
            prop_assert!(w.p_lower > rho && w.p_upper > rho);
        }
    }

    #[test]
    fn witness_is_deterministic(d in any_law(), rho in rho()) {
        prop_assert_eq!(d.find_witness(&rho), d.find_witness(&rho));
    }

    #[test]
    fn unshifted_decomposition_reconstructs_law(d in any_law(), rho in rho()) {
        let Ok(w) = d.find_witness(&rho) else { return Ok(()) };
        let dec = decompose(&d, &w, Variant::Unshifted).unwrap();
        prop_assert_eq!(pushforward_law(&dec).unwrap(), d.clone());
        prop_assert!(dec.reconstructs_law);
        prop_assert_eq!(&dec.p, &(Rational::one() - &w.p_lower));
        let p0 = w.p0();
        prop_assert!(dec.p > Rational::one() - &p0 && dec.p < p0);
    }

    #[test]
    fn delta_is_certified_positive(d in any_law(), rho in rho()) {
        let Ok(w) = d.find_witness(&rho) else { return Ok(()) };
        for variant in [Variant::Unshifted, Variant::Shifted] {
            let dec = decompose(&d, &w, variant).unwrap();
            // every piece endpoint, approached from inside, stays positive
            for (lo, hi, seg) in dec.delta.pieces() {
                let mid = (lo + hi) / Rational::from_integer(2.into());
                prop_assert!(seg.at(&mid) > Rational::zero());
                prop_assert!(seg.at(lo) >= Rational::zero() && seg.at(hi) >= Rational::zero());
            }
            if dec.is_gap_case() {
                prop_assert!(dec.certified_lower_bound() >= dec.gap);
            }
        }
    }

    #[test]
    fn arrival_precedes_departure_outside_gap_case(d in any_law(), rho in rho()) {
        let Ok(w) = d.find_witness(&rho) else { return Ok(()) };
        match arrival_departure_times(&d, &w) {
            Ok((t1, t2)) => prop_assert!(t2 < t1),
            Err(DecompositionError::GapCase { .. }) => {
                prop_assert!(d.quantile(&w.p_lower).unwrap() < w.x_minus);
            }
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn literal_round_trips(d in any_law()) {
        let text = d.to_string();
        prop_assert_eq!(text.parse::<DistributionSpec>().unwrap(), d);
    }
}

#[test]
fn battery_reconstructs_and_stays_positive() {
    let rho = battery_rho();
    for (name, law) in battery() {
        let w = law.find_witness(&rho).unwrap();
        let dec = decompose(&law, &w, Variant::Unshifted).unwrap();
        assert_eq!(pushforward_law(&dec).unwrap(), law, "{name}");
        assert!(dec.certified_lower_bound() > Rational::zero() || !dec.is_gap_case(), "{name}");
        assert!(dec.certified_lower_bound() >= dec.gap, "{name}");
    }
}

/// The printed bound on the departure time, checked on every battery law
/// where it is defined. Violations would be listed, not hidden.
#[test]
fn departure_time_bound_on_battery() {
    let rho = battery_rho();
    let mut violations = Vec::new();
    for (name, law) in battery() {
        let w = law.find_witness(&rho).unwrap();
        let dec = decompose(&law, &w, Variant::Unshifted).unwrap();
        if dec.t2_within_bound() == Some(false) {
            violations.push(name);
        }
    }
    assert!(violations.is_empty(), "T2 bound violated for {violations:?}");
}
