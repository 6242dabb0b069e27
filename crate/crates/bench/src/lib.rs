//! Shared fixtures for the benchmark targets.

use resgen_core::generators::{build, Generated};
use resgen_core::{Family, GeneratorSpec};

/// The parameter grid the benchmarks exercise.
pub fn standard_cases() -> Vec<GeneratorSpec> {
    [
        (Family::ClassicMersenne, 32, 4),
        (Family::ClassicFermat, 32, 4),
        (Family::UniversalD1, 64, 4),
        (Family::BiResidue, 64, 4),
    ]
    .into_iter()
    .map(|(family, p, n)| GeneratorSpec::new(family, p, n).expect("valid fixture"))
    .collect()
}

pub fn build_case(spec: &GeneratorSpec) -> Generated {
    build(spec).expect("fixtures build")
}
