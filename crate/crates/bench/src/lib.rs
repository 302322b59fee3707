//! Fixtures shared by the benchmarks.

use leibnizlab::automorphism::{build_aut, random_params};
use leibnizlab::catalog::{build, Family, FamilySpec};
use leibnizlab::local::sample_in_pattern;
use leibnizlab::{Algebra, Matrix};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const SEED: u64 = 42;

/// Representative sizes: the smallest member, a mid-size one, and the
/// largest point of the default grid.
pub fn sizes(family: Family) -> Vec<FamilySpec> {
    let smallest = if family == Family::Mu3 { 7 } else { 6 };
    [(smallest, 1), (12, 2), (20, 3)]
        .into_iter()
        .map(|(n, k)| FamilySpec::new(family, n, k).expect("admissible"))
        .collect()
}

pub fn algebra(spec: &FamilySpec) -> Algebra {
    build(spec)
}

pub fn automorphism(spec: &FamilySpec) -> Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    build_aut(spec, &random_params(spec, 5, &mut rng)).expect("nondegenerate").m
}

pub fn local_operator(spec: &FamilySpec) -> Matrix {
    sample_in_pattern(spec, &mut ChaCha8Rng::seed_from_u64(SEED))
}
