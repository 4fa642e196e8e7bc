//! Index self-maps, their fibers, the generalized shift `σ_φ` and linear
//! operators on ℂⁿ.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::seqalg::{PExponent, SeqVector};

/// A total self-map `φ` of `{0, …, n-1}`, stored as its image list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexMap {
    image: Vec<usize>,
}

impl IndexMap {
    pub fn new(image: Vec<usize>) -> Result<Self> {
        let n = image.len();
        if n == 0 {
            return Err(Error::InvalidInput("index map must have a nonempty domain".into()));
        }
        if let Some(&bad) = image.iter().find(|&&b| b >= n) {
            return Err(Error::IndexOutOfRange { index: bad, n });
        }
        Ok(IndexMap { image })
    }

    pub fn identity(n: usize) -> Self {
        assert!(n > 0);
        IndexMap { image: (0..n).collect() }
    }

    pub fn constant(n: usize, value: usize) -> Self {
        assert!(value < n);
        IndexMap { image: vec![value; n] }
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        assert!(n > 0);
        IndexMap { image: (0..n).map(|_| rng.gen_range(0..n)).collect() }
    }

    /// Every self-map of `{0, …, n-1}`, in lexicographic order of the image list.
    pub fn all(n: usize) -> AllMaps {
        assert!(n > 0);
        AllMaps { n, next: Some(vec![0; n]) }
    }

    pub fn n(&self) -> usize {
        self.image.len()
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn at(&self, alpha: usize) -> usize {
        self.image[alpha]
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(a, &b)| a == b)
    }

    pub fn is_injective(&self) -> bool {
        fibers(self).bound <= 1
    }

    pub fn is_surjective(&self) -> bool {
        fibers(self).empty_fibers.is_empty()
    }

    /// `φ⁻¹(β)` in increasing order.
    pub fn preimage(&self, beta: usize) -> Vec<usize> {
        self.image.iter().enumerate().filter_map(|(a, &b)| (b == beta).then_some(a)).collect()
    }

    /// `self ∘ inner`, i.e. `α ↦ self(inner(α))`.
    pub fn compose(&self, inner: &IndexMap) -> Result<IndexMap> {
        if self.n() != inner.n() {
            return Err(Error::dims(self.n(), inner.n()));
        }
        Ok(IndexMap { image: inner.image.iter().map(|&a| self.image[a]).collect() })
    }
}

/// Lexicographic odometer over image lists; the last position turns fastest.
#[derive(Debug, Clone)]
pub struct AllMaps {
    n: usize,
    next: Option<Vec<usize>>,
}

impl Iterator for AllMaps {
    type Item = IndexMap;

    fn next(&mut self) -> Option<IndexMap> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut pos = self.n;
        while pos > 0 {
            pos -= 1;
            if succ[pos] + 1 < self.n {
                succ[pos] += 1;
                self.next = Some(succ);
                break;
            }
            succ[pos] = 0;
        }
        Some(IndexMap { image: current })
    }
}

/// Fiber sizes `|φ⁻¹(β)|` of an index map.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct FiberReport {
    pub sizes: Vec<usize>,
    pub bound: usize,
    pub empty_fibers: Vec<usize>,
}

pub fn fibers(phi: &IndexMap) -> FiberReport {
    let mut sizes = vec![0usize; phi.n()];
    for &b in phi.image() {
        sizes[b] += 1;
    }
    let bound = sizes.iter().copied().max().unwrap_or(0);
    let empty_fibers = sizes.iter().enumerate().filter_map(|(b, &s)| (s == 0).then_some(b)).collect();
    FiberReport { sizes, bound, empty_fibers }
}

/// `(σ_φ x)_α = x_{φ(α)}`.
pub fn apply_shift(phi: &IndexMap, x: &SeqVector) -> Result<SeqVector> {
    if phi.n() != x.len() {
        return Err(Error::dims(phi.n(), x.len()));
    }
    Ok(shift_unchecked(phi, x))
}

fn shift_unchecked(phi: &IndexMap, x: &SeqVector) -> SeqVector {
    SeqVector::from_entries_unchecked(phi.image().iter().map(|&b| x[b]).collect())
}

/// Operator norm of `σ_φ` on ℓᵖ: `N^{1/p}` with `N` the largest fiber, and 1 for `p = ∞`.
pub fn shift_operator_norm(phi: &IndexMap, p: PExponent) -> f64 {
    match p {
        PExponent::Infinity => 1.0,
        PExponent::Finite(p) => (fibers(phi).bound as f64).powf(1.0 / p),
    }
}

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        assert!(n > 0);
        DenseMatrix { n, data: vec![Complex64::new(0.0, 0.0); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = DenseMatrix::zeros(n);
        for a in 0..n {
            m.data[a * n + a] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidInput("matrix must have at least one row".into()));
        }
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::dims(n, row.len()));
            }
            data.extend(row);
        }
        if data.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidInput("matrix entries must be finite".into()));
        }
        Ok(DenseMatrix { n, data })
    }

    /// Builds a matrix from `n²` row-major entries.
    pub fn from_flat(n: usize, data: Vec<Complex64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        if data.len() != n * n {
            return Err(Error::dims(n * n, data.len()));
        }
        if data.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidInput("matrix entries must be finite".into()));
        }
        Ok(DenseMatrix { n, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.n + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.data[row * self.n + col] = value;
    }

    pub fn as_flat(&self) -> &[Complex64] {
        &self.data
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Complex64]> {
        self.data.chunks(self.n)
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.n != other.n {
            return Err(Error::dims(self.n, other.n));
        }
        let n = self.n;
        let mut out = DenseMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.get(k, j);
                }
            }
        }
        Ok(out)
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn mul_vec(&self, x: &SeqVector) -> SeqVector {
        let out = self.rows().map(|row| row.iter().zip(x.entries()).map(|(&a, &b)| a * b).sum()).collect();
        SeqVector::from_entries_unchecked(out)
    }
}

/// A linear operator on ℂⁿ.
#[derive(Debug, Clone, PartialEq)]
pub enum LinOp {
    Dense(DenseMatrix),
    /// `x ↦ (r_α · x_{φ(α)})_α`.
    MultiplierShift {
        r: SeqVector,
        phi: IndexMap,
    },
}

impl LinOp {
    pub fn multiplier_shift(r: SeqVector, phi: IndexMap) -> Result<Self> {
        if r.len() != phi.n() {
            return Err(Error::dims(phi.n(), r.len()));
        }
        Ok(LinOp::MultiplierShift { r, phi })
    }

    /// `σ_φ` itself.
    pub fn shift(phi: &IndexMap) -> Self {
        LinOp::MultiplierShift { r: SeqVector::ones(phi.n()), phi: phi.clone() }
    }

    pub fn identity(n: usize) -> Self {
        LinOp::shift(&IndexMap::identity(n))
    }

    pub fn zero(n: usize) -> Self {
        LinOp::Dense(DenseMatrix::zeros(n))
    }

    pub fn n(&self) -> usize {
        match self {
            LinOp::Dense(m) => m.n(),
            LinOp::MultiplierShift { phi, .. } => phi.n(),
        }
    }

    pub fn scaled(&self, c: Complex64) -> LinOp {
        match self {
            LinOp::Dense(m) => LinOp::Dense(DenseMatrix { n: m.n, data: m.data.iter().map(|&z| c * z).collect() }),
            LinOp::MultiplierShift { r, phi } => LinOp::MultiplierShift { r: c * r, phi: phi.clone() },
        }
    }

    /// Matrix entry `(α, β)`, i.e. coordinate α of the image of `w^β`.
    pub fn entry(&self, alpha: usize, beta: usize) -> Complex64 {
        match self {
            LinOp::Dense(m) => m.get(alpha, beta),
            LinOp::MultiplierShift { r, phi } => {
                if phi.at(alpha) == beta {
                    r[alpha]
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        match self {
            LinOp::Dense(m) => m.clone(),
            LinOp::MultiplierShift { r, phi } => {
                let mut m = DenseMatrix::zeros(phi.n());
                for (alpha, &beta) in phi.image().iter().enumerate() {
                    m.set(alpha, beta, r[alpha]);
                }
                m
            }
        }
    }

    pub fn apply(&self, x: &SeqVector) -> Result<SeqVector> {
        if self.n() != x.len() {
            return Err(Error::dims(self.n(), x.len()));
        }
        Ok(self.act(x))
    }

    /// Unchecked application; panics on a length mismatch.
    pub(crate) fn act(&self, x: &SeqVector) -> SeqVector {
        assert_eq!(self.n(), x.len(), "operator/vector dimension mismatch");
        match self {
            LinOp::Dense(m) => m.mul_vec(x),
            LinOp::MultiplierShift { r, phi } => r * &shift_unchecked(phi, x),
        }
    }

    pub(crate) fn require_dim(&self, n: usize) -> Result<()> {
        if self.n() == n {
            Ok(())
        } else {
            Err(Error::dims(n, self.n()))
        }
    }
}

pub fn to_matrix(op: &LinOp) -> LinOp {
    LinOp::Dense(op.to_dense())
}

pub fn apply_op(op: &LinOp, x: &SeqVector) -> Result<SeqVector> {
    op.apply(x)
}
