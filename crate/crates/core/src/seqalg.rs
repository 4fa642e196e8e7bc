//! The pointwise sequence algebra ℂⁿ with its ℓᵖ norms.
//!
//! Vectors are immutable once built. The checked free functions
//! ([`pointwise_mul`], [`add`], [`scale`]) return dimension errors; the
//! operator impls on references panic on mismatched lengths, the same way
//! dense array libraries treat shape errors.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

/// Exponent selecting an ℓᵖ norm, `p ∈ [1, ∞]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PExponent {
    Finite(f64),
    Infinity,
}

impl PExponent {
    pub fn finite(p: f64) -> Result<Self> {
        if p.is_finite() && p >= 1.0 {
            Ok(PExponent::Finite(p))
        } else if p == f64::INFINITY {
            Ok(PExponent::Infinity)
        } else {
            Err(Error::InvalidInput(format!("exponent must lie in [1, inf], got {p}")))
        }
    }

    /// `1/p`, with `1/∞ = 0`.
    pub fn reciprocal(self) -> f64 {
        match self {
            PExponent::Finite(p) => 1.0 / p,
            PExponent::Infinity => 0.0,
        }
    }
}

impl fmt::Display for PExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PExponent::Finite(p) => write!(f, "{p}"),
            PExponent::Infinity => f.write_str("inf"),
        }
    }
}

impl std::str::FromStr for PExponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("inf") || s.eq_ignore_ascii_case("infinity") {
            return Ok(PExponent::Infinity);
        }
        let p: f64 = s.parse().map_err(|_| Error::Parse(format!("not an exponent: {s:?}")))?;
        PExponent::finite(p)
    }
}

impl Serialize for PExponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            PExponent::Finite(p) => serializer.serialize_f64(*p),
            PExponent::Infinity => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for PExponent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Number(p) => PExponent::finite(p).map_err(de::Error::custom),
            Raw::Text(s) if s == "inf" => Ok(PExponent::Infinity),
            Raw::Text(s) => Err(de::Error::custom(format!("expected a number or \"inf\", got {s:?}"))),
        }
    }
}

/// A nonempty vector of finite complex entries.
#[derive(Debug, Clone, PartialEq)]
pub struct SeqVector {
    entries: Vec<Complex64>,
}

impl SeqVector {
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidInput("vector must have at least one entry".into()));
        }
        if let Some(pos) = entries.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidInput(format!("entry {pos} is not finite")));
        }
        Ok(SeqVector { entries })
    }

    pub fn from_reals(values: &[f64]) -> Result<Self> {
        SeqVector::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn zeros(n: usize) -> Self {
        assert!(n > 0, "dimension must be positive");
        SeqVector { entries: vec![Complex64::new(0.0, 0.0); n] }
    }

    /// The constant vector `(1, …, 1)`.
    pub fn ones(n: usize) -> Self {
        SeqVector::constant(n, Complex64::new(1.0, 0.0))
    }

    pub fn constant(n: usize, value: Complex64) -> Self {
        assert!(n > 0, "dimension must be positive");
        SeqVector { entries: vec![value; n] }
    }

    /// Standard basis vector `w^β`.
    pub fn basis(n: usize, beta: usize) -> Self {
        assert!(beta < n, "basis index {beta} out of range for n = {n}");
        let mut v = SeqVector::zeros(n);
        v.entries[beta] = Complex64::new(1.0, 0.0);
        v
    }

    pub(crate) fn from_entries_unchecked(entries: Vec<Complex64>) -> Self {
        debug_assert!(!entries.is_empty());
        SeqVector { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<Complex64> {
        self.entries
    }

    pub fn coord(&self, alpha: usize) -> Result<Complex64> {
        self.entries.get(alpha).copied().ok_or(Error::IndexOutOfRange { index: alpha, n: self.len() })
    }

    pub fn pnorm(&self, p: PExponent) -> f64 {
        norm_of(&self.entries, p)
    }

    /// `max_α |x_α|`.
    pub fn max_abs(&self) -> f64 {
        self.pnorm(PExponent::Infinity)
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.entries.iter().all(|z| z.norm() <= tol)
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> SeqVector {
        SeqVector { entries: self.entries.iter().map(|&z| f(z)).collect() }
    }

    fn zip_with(&self, other: &SeqVector, f: impl Fn(Complex64, Complex64) -> Complex64) -> SeqVector {
        assert_eq!(self.len(), other.len(), "vector length mismatch");
        SeqVector { entries: self.entries.iter().zip(&other.entries).map(|(&a, &b)| f(a, b)).collect() }
    }

    fn check_len(&self, other: &SeqVector) -> Result<()> {
        if self.len() == other.len() {
            Ok(())
        } else {
            Err(Error::dims(self.len(), other.len()))
        }
    }
}

impl std::ops::Index<usize> for SeqVector {
    type Output = Complex64;

    fn index(&self, alpha: usize) -> &Complex64 {
        &self.entries[alpha]
    }
}

impl Add for &SeqVector {
    type Output = SeqVector;
    fn add(self, rhs: &SeqVector) -> SeqVector {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &SeqVector {
    type Output = SeqVector;
    fn sub(self, rhs: &SeqVector) -> SeqVector {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul for &SeqVector {
    type Output = SeqVector;
    fn mul(self, rhs: &SeqVector) -> SeqVector {
        self.zip_with(rhs, |a, b| a * b)
    }
}

impl Mul<&SeqVector> for Complex64 {
    type Output = SeqVector;
    fn mul(self, rhs: &SeqVector) -> SeqVector {
        rhs.map(|z| self * z)
    }
}

impl Neg for &SeqVector {
    type Output = SeqVector;
    fn neg(self) -> SeqVector {
        self.map(|z| -z)
    }
}

/// ℓᵖ norm of a raw slice. Empty slices are rejected.
pub fn pnorm_slice(entries: &[Complex64], p: PExponent) -> Result<f64> {
    if entries.is_empty() {
        return Err(Error::InvalidInput("norm of an empty vector".into()));
    }
    Ok(norm_of(entries, p))
}

pub fn pnorm(x: &SeqVector, p: PExponent) -> f64 {
    x.pnorm(p)
}

fn norm_of(entries: &[Complex64], p: PExponent) -> f64 {
    let largest = entries.iter().map(|z| z.norm()).fold(0.0_f64, f64::max);
    match p {
        PExponent::Infinity => largest,
        _ if largest == 0.0 => 0.0,
        PExponent::Finite(p) => {
            // Factor out the largest modulus so the powers cannot overflow.
            let sum: f64 = entries.iter().map(|z| z.norm()).filter(|&m| m > 0.0).map(|m| (m / largest).powf(p)).sum();
            largest * sum.powf(1.0 / p)
        }
    }
}

pub fn pointwise_mul(x: &SeqVector, y: &SeqVector) -> Result<SeqVector> {
    x.check_len(y)?;
    Ok(x * y)
}

pub fn add(x: &SeqVector, y: &SeqVector) -> Result<SeqVector> {
    x.check_len(y)?;
    Ok(x + y)
}

pub fn scale(c: Complex64, x: &SeqVector) -> SeqVector {
    c * x
}

/// Indicator vector `w^E` of an index set `E ⊆ {0, …, n-1}`.
pub fn indicator(set: &[usize], n: usize) -> Result<SeqVector> {
    if n == 0 {
        return Err(Error::InvalidInput("dimension must be positive".into()));
    }
    let mut v = SeqVector::zeros(n);
    for &alpha in set {
        if alpha >= n {
            return Err(Error::IndexOutOfRange { index: alpha, n });
        }
        v.entries[alpha] = Complex64::new(1.0, 0.0);
    }
    Ok(v)
}

pub fn coord(x: &SeqVector, alpha: usize) -> Result<Complex64> {
    x.coord(alpha)
}

impl Serialize for SeqVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.entries.iter().map(|z| [z.re, z.im]))
    }
}

impl<'de> Deserialize<'de> for SeqVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<JsonScalar>::deserialize(deserializer)?;
        SeqVector::new(raw.into_iter().map(Complex64::from).collect()).map_err(de::Error::custom)
    }
}

/// A complex scalar on the wire: `[re, im]`, or a bare real number.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
pub(crate) enum JsonScalar {
    Pair([f64; 2]),
    Real(f64),
}

impl From<JsonScalar> for Complex64 {
    fn from(s: JsonScalar) -> Self {
        match s {
            JsonScalar::Pair([re, im]) => Complex64::new(re, im),
            JsonScalar::Real(re) => Complex64::new(re, 0.0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn pnorm_examples() {
        let x = SeqVector::from_reals(&[3.0, 4.0, 0.0]).unwrap();
        assert!((x.pnorm(PExponent::Finite(2.0)) - 5.0).abs() < 1e-12);
        assert!((x.pnorm(PExponent::Finite(1.0)) - 7.0).abs() < 1e-12);
        let y = SeqVector::new(vec![c(1.0, 0.0), c(-2.0, 0.0), c(0.0, 2.0)]).unwrap();
        assert_eq!(y.pnorm(PExponent::Infinity), 2.0);
    }

    #[test]
    fn pnorm_of_zero_vector_is_zero() {
        let z = SeqVector::zeros(3);
        for p in [PExponent::Finite(1.0), PExponent::Finite(2.5), PExponent::Infinity] {
            assert_eq!(z.pnorm(p), 0.0);
        }
    }

    #[test]
    fn empty_inputs_are_rejected() {
        assert!(matches!(SeqVector::new(vec![]), Err(Error::InvalidInput(_))));
        assert!(pnorm_slice(&[], PExponent::Finite(2.0)).is_err());
        assert!(SeqVector::new(vec![c(f64::NAN, 0.0)]).is_err());
    }

    #[test]
    fn exponent_validation() {
        assert!(PExponent::finite(0.5).is_err());
        assert!(PExponent::finite(f64::NAN).is_err());
        assert_eq!(PExponent::finite(f64::INFINITY).unwrap(), PExponent::Infinity);
        assert_eq!("inf".parse::<PExponent>().unwrap(), PExponent::Infinity);
        assert_eq!("1.5".parse::<PExponent>().unwrap(), PExponent::Finite(1.5));
    }

    #[test]
    fn pointwise_product_examples() {
        let x = SeqVector::from_reals(&[1.0, 2.0]).unwrap();
        let y = SeqVector::from_reals(&[3.0, 4.0]).unwrap();
        assert_eq!(pointwise_mul(&x, &y).unwrap(), SeqVector::from_reals(&[3.0, 8.0]).unwrap());
        assert_eq!(pointwise_mul(&x, &SeqVector::ones(2)).unwrap(), x);
        let w0 = SeqVector::basis(2, 0);
        let w1 = SeqVector::basis(2, 1);
        assert_eq!(pointwise_mul(&w0, &w1).unwrap(), SeqVector::zeros(2));
        assert!(matches!(
            pointwise_mul(&x, &SeqVector::zeros(3)),
            Err(Error::DimensionMismatch { expected: 2, found: 3 })
        ));
    }

    #[test]
    fn linear_structure_examples() {
        let x = SeqVector::from_reals(&[1.0, 2.0]).unwrap();
        let y = SeqVector::from_reals(&[3.0, 4.0]).unwrap();
        assert_eq!(add(&x, &y).unwrap(), SeqVector::from_reals(&[4.0, 6.0]).unwrap());
        assert_eq!(scale(c(0.0, 0.0), &x), SeqVector::zeros(2));
        let e = SeqVector::from_reals(&[1.0, 0.0]).unwrap();
        assert_eq!(scale(c(0.0, 1.0), &e).entries(), &[c(0.0, 1.0), c(0.0, 0.0)]);
        assert!(add(&x, &SeqVector::zeros(1)).is_err());
    }

    #[test]
    fn indicator_examples() {
        assert_eq!(indicator(&[1], 3).unwrap(), SeqVector::from_reals(&[0.0, 1.0, 0.0]).unwrap());
        assert_eq!(indicator(&[], 2).unwrap(), SeqVector::zeros(2));
        assert_eq!(indicator(&[0, 1], 3).unwrap(), SeqVector::from_reals(&[1.0, 1.0, 0.0]).unwrap());
        assert!(matches!(indicator(&[3], 3), Err(Error::IndexOutOfRange { index: 3, n: 3 })));
    }

    #[test]
    fn coord_examples() {
        let x = SeqVector::from_reals(&[5.0, 6.0, 7.0]).unwrap();
        assert_eq!(coord(&x, 1).unwrap(), c(6.0, 0.0));
        let w = SeqVector::basis(4, 2);
        assert_eq!(coord(&w, 2).unwrap(), c(1.0, 0.0));
        assert_eq!(coord(&w, 0).unwrap(), c(0.0, 0.0));
        assert!(coord(&x, 3).is_err());
    }

    #[test]
    fn json_wire_format() {
        let x = SeqVector::new(vec![c(1.0, -2.0), c(0.5, 0.0)]).unwrap();
        let text = serde_json::to_string(&x).unwrap();
        assert_eq!(text, "[[1.0,-2.0],[0.5,0.0]]");
        assert_eq!(serde_json::from_str::<SeqVector>(&text).unwrap(), x);
        let reals: SeqVector = serde_json::from_str("[1, 2.5]").unwrap();
        assert_eq!(reals, SeqVector::from_reals(&[1.0, 2.5]).unwrap());
        assert!(serde_json::from_str::<SeqVector>("[]").is_err());

        assert_eq!(serde_json::to_string(&PExponent::Infinity).unwrap(), "\"inf\"");
        assert_eq!(serde_json::from_str::<PExponent>("2").unwrap(), PExponent::Finite(2.0));
        assert!(serde_json::from_str::<PExponent>("0.5").is_err());
    }
}
