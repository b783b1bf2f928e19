//! Deterministic inputs shared by the benchmarks.

use randsing::distributions::DistributionSpec;
use randsing::exact_linalg::RationalMatrix;
use randsing::montecarlo::{sample_matrix, EnsembleSpec, SamplingMode};
use randsing::rational::q;

/// Entries drawn from `{-2, -1, 0, 1/2, 3}` with a fixed seed.
pub fn small_rational_matrix(rows: usize, cols: usize, seed: u64) -> RationalMatrix {
    let law: DistributionSpec = "discrete{-2:1/5, -1:1/5, 0:1/5, 1/2:1/5, 3:1/5}".parse().expect("valid literal");
    let spec = EnsembleSpec::new(rows, cols, randsing::montecarlo::EntryLaws::Shared(law), q(1, 10), seed, SamplingMode::Direct)
        .expect("law has a witness");
    sample_matrix(&spec, 0)
}

pub fn fair_bit_ensemble(n: usize, mode: SamplingMode) -> EnsembleSpec {
    let law: DistributionSpec = "discrete{0:1/2, 1:1/2}".parse().expect("valid literal");
    EnsembleSpec::square(n, law, q(1, 4), 1, mode).expect("law has a witness")
}
