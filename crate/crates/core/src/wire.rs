//! JSON file formats.
//!
//! ```text
//! index map   {"n": 4, "map": [1, 2, 3, 0]}
//! dense op    {"n": 2, "dense": [[[re, im], [re, im]], [[re, im], [re, im]]]}
//! shift op    {"n": 3, "r": [[re, im], …], "phi": [1, 2, 0]}
//! vector      [[re, im], …]
//! ```
//!
//! Complex scalars may also be written as bare reals. The `parse_*` helpers
//! report malformed JSON as [`Error::Parse`] and well-formed but invalid
//! content (out-of-range images, inconsistent `n`) as a semantic error.

use num_complex::Complex64;
use serde::de::{self, Deserializer};
use serde::ser::{SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seqalg::{JsonScalar, SeqVector};
use crate::shiftop::{DenseMatrix, IndexMap, LinOp};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawIndexMap {
    n: usize,
    map: Vec<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawLinOp {
    Dense { n: usize, dense: Vec<Vec<JsonScalar>> },
    Shift { n: usize, r: Vec<JsonScalar>, phi: Vec<usize> },
}

fn check_n(declared: usize, actual: usize) -> Result<()> {
    if declared == actual {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("declared n = {declared} but found {actual} entries")))
    }
}

impl TryFrom<RawIndexMap> for IndexMap {
    type Error = Error;

    fn try_from(raw: RawIndexMap) -> Result<Self> {
        check_n(raw.n, raw.map.len())?;
        IndexMap::new(raw.map)
    }
}

impl TryFrom<RawLinOp> for LinOp {
    type Error = Error;

    fn try_from(raw: RawLinOp) -> Result<Self> {
        match raw {
            RawLinOp::Dense { n, dense } => {
                check_n(n, dense.len())?;
                let rows = dense.into_iter().map(|row| row.into_iter().map(Complex64::from).collect()).collect();
                Ok(LinOp::Dense(DenseMatrix::from_rows(rows)?))
            }
            RawLinOp::Shift { n, r, phi } => {
                check_n(n, r.len())?;
                check_n(n, phi.len())?;
                let r = SeqVector::new(r.into_iter().map(Complex64::from).collect())?;
                LinOp::multiplier_shift(r, IndexMap::new(phi)?)
            }
        }
    }
}

pub fn parse_index_map(text: &str) -> Result<IndexMap> {
    let raw: RawIndexMap = serde_json::from_str(text)?;
    raw.try_into()
}

pub fn parse_linop(text: &str) -> Result<LinOp> {
    let raw: RawLinOp = serde_json::from_str(text)?;
    raw.try_into()
}

pub fn parse_vector(text: &str) -> Result<SeqVector> {
    let raw: Vec<JsonScalar> = serde_json::from_str(text)?;
    SeqVector::new(raw.into_iter().map(Complex64::from).collect())
}

impl Serialize for IndexMap {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("IndexMap", 2)?;
        s.serialize_field("n", &self.n())?;
        s.serialize_field("map", self.image())?;
        s.end()
    }
}

impl<'de> Deserialize<'de> for IndexMap {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        RawIndexMap::deserialize(deserializer)?.try_into().map_err(de::Error::custom)
    }
}

impl Serialize for LinOp {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            LinOp::Dense(m) => {
                let rows: Vec<Vec<[f64; 2]>> = m.rows().map(|row| row.iter().map(|z| [z.re, z.im]).collect()).collect();
                let mut s = serializer.serialize_struct("LinOp", 2)?;
                s.serialize_field("n", &m.n())?;
                s.serialize_field("dense", &rows)?;
                s.end()
            }
            LinOp::MultiplierShift { r, phi } => {
                let mut s = serializer.serialize_struct("LinOp", 3)?;
                s.serialize_field("n", &phi.n())?;
                s.serialize_field("r", r)?;
                s.serialize_field("phi", phi.image())?;
                s.end()
            }
        }
    }
}

impl<'de> Deserialize<'de> for LinOp {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        RawLinOp::deserialize(deserializer)?.try_into().map_err(de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_map_format() {
        let phi = parse_index_map(r#"{"n": 4, "map": [1, 2, 3, 0]}"#).unwrap();
        assert_eq!(phi.image(), &[1, 2, 3, 0]);
        assert_eq!(serde_json::to_string(&phi).unwrap(), r#"{"n":4,"map":[1,2,3,0]}"#);
    }

    #[test]
    fn parse_and_semantic_errors_are_distinguished() {
        assert!(matches!(parse_index_map("{\"n\": 3, "), Err(Error::Parse(_))));
        assert!(matches!(parse_index_map(r#"{"n": "x", "map": []}"#), Err(Error::Parse(_))));
        assert!(matches!(
            parse_index_map(r#"{"n": 3, "map": [0, 5, 1]}"#),
            Err(Error::IndexOutOfRange { index: 5, n: 3 })
        ));
        assert!(matches!(parse_index_map(r#"{"n": 2, "map": [0, 1, 1]}"#), Err(Error::InvalidInput(_))));
        assert!(matches!(parse_linop(r#"{"n": 2, "r": [1, 1], "phi": [0, 2]}"#), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(parse_linop(r#"{"n": 2}"#), Err(Error::Parse(_))));
    }

    #[test]
    fn linop_formats() {
        let op = parse_linop(r#"{"n": 3, "r": [1, 1, 1], "phi": [1, 2, 0]}"#).unwrap();
        assert_eq!(op, LinOp::shift(&IndexMap::new(vec![1, 2, 0]).unwrap()));
        let text = serde_json::to_string(&op).unwrap();
        assert_eq!(text, r#"{"n":3,"r":[[1.0,0.0],[1.0,0.0],[1.0,0.0]],"phi":[1,2,0]}"#);

        let dense = parse_linop(r#"{"n": 2, "dense": [[[0, 0], [1, 0]], [[1, 0], [0, 2]]]}"#).unwrap();
        assert_eq!(dense.entry(1, 1), Complex64::new(0.0, 2.0));
        assert_eq!(dense.entry(0, 1), Complex64::new(1.0, 0.0));
        let back: LinOp = serde_json::from_str(&serde_json::to_string(&dense).unwrap()).unwrap();
        assert_eq!(back, dense);

        assert!(parse_linop(r#"{"n": 2, "dense": [[[0, 0], [1, 0]]]}"#).is_err());
    }

    #[test]
    fn vector_format() {
        let v = parse_vector("[[1, 2], 3]").unwrap();
        assert_eq!(v.entries(), &[Complex64::new(1.0, 2.0), Complex64::new(3.0, 0.0)]);
        assert!(parse_vector("[]").is_err());
    }
}
