//! Bundled example groups.

use crate::error::{Error, Result};
use crate::group::{enumerate_closure, FiniteMatrixGroup, GeneratorSet, DEFAULT_MAX_ORDER};
use crate::io::parse_group_str;

/// `(name, file contents)` for every bundled group file.
pub const FIXTURES: &[(&str, &str)] = &[
    ("c2_antipodal", include_str!("../fixtures/c2_antipodal.json")),
    ("c4", include_str!("../fixtures/c4.json")),
    ("c4_double", include_str!("../fixtures/c4_double.json")),
    ("s3_standard", include_str!("../fixtures/s3_standard.json")),
    ("s3_permutation", include_str!("../fixtures/s3_permutation.json")),
    ("s3_regular", include_str!("../fixtures/s3_regular.json")),
    ("q8", include_str!("../fixtures/q8.json")),
    ("dic3", include_str!("../fixtures/dic3.json")),
    ("icosahedral", include_str!("../fixtures/icosahedral.json")),
];

pub fn fixture_generators(name: &str) -> Result<GeneratorSet> {
    let (_, text) = FIXTURES
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| Error::Invalid(format!("unknown fixture {name:?}")))?;
    parse_group_str(text)
}

pub fn fixture_group(name: &str) -> Result<FiniteMatrixGroup> {
    enumerate_closure(&fixture_generators(name)?, DEFAULT_MAX_ORDER)
}
