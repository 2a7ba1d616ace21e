//! Shared workloads for the criterion benchmarks.

use hfk_core::{make_staircase, random_symmetric_complex, KnotComplex, StaircaseSpec};

/// Staircases with steps `1..=g`, the densest staircase of each genus.
pub fn full_staircases(max_genus: i64) -> Vec<KnotComplex> {
    (1..=max_genus)
        .map(|g| make_staircase(&StaircaseSpec::new((1..=g).collect(), 0).unwrap()))
        .collect()
}

/// A fixed batch of random complexes.
pub fn random_batch(count: u64, levels: u32, dim: usize) -> Vec<KnotComplex> {
    (0..count).map(|seed| random_symmetric_complex(levels, dim, seed)).collect()
}
