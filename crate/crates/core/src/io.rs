//! Group file format.
//!
//! ```json
//! { "dim": 2, "tol": 1e-9, "generators": [ [[0, -1], [1, 0]] ] }
//! ```
//!
//! Entries are JSON numbers or strings of the form `"p/q"` (or a bare
//! integer string). `tol` is optional.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{GeneratorSet, DEFAULT_TOL};
use crate::linalg::RealMatrix;

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(untagged)]
pub enum Entry {
    Number(f64),
    Text(String),
}

impl Entry {
    pub fn value(&self) -> Result<f64> {
        match self {
            Entry::Number(x) => Ok(*x),
            Entry::Text(s) => parse_rational(s),
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GroupFile {
    pub dim: usize,
    #[serde(default)]
    pub tol: Option<f64>,
    pub generators: Vec<Vec<Vec<Entry>>>,
}

/// Parses `"p/q"` or `"p"` with integer `p`, `q`.
pub fn parse_rational(s: &str) -> Result<f64> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s, "1"),
    };
    let p: i64 = num
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational numerator in {s:?}")))?;
    let q: i64 = den
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational denominator in {s:?}")))?;
    if q == 0 {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(p as f64 / q as f64)
}

impl GroupFile {
    pub fn into_generators(self) -> Result<GeneratorSet> {
        let dim = self.dim;
        let mut gens = Vec::with_capacity(self.generators.len());
        for (gi, rows) in self.generators.iter().enumerate() {
            if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
                return Err(Error::Parse(format!("generator {gi} is not {dim}x{dim}")));
            }
            let mut m = RealMatrix::zeros(dim, dim);
            for (i, row) in rows.iter().enumerate() {
                for (j, e) in row.iter().enumerate() {
                    m[(i, j)] = e.value()?;
                }
            }
            gens.push(m);
        }
        GeneratorSet::new(dim, gens, self.tol.unwrap_or(DEFAULT_TOL))
    }
}

pub fn parse_group_str(text: &str) -> Result<GeneratorSet> {
    let file: GroupFile = serde_json::from_str(text)?;
    file.into_generators()
}

pub fn read_group_file(path: impl AsRef<Path>) -> Result<GeneratorSet> {
    let text = std::fs::read_to_string(path)?;
    parse_group_str(&text)
}
