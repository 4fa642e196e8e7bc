//! Complex linear constraint systems: nullspaces and consistency by
//! Gaussian elimination with partial pivoting.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerance::RANK_THRESHOLD;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `rows · x = rhs` over `unknown_count` complex unknowns. A missing `rhs`
/// means the homogeneous system.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintSystem {
    unknown_count: usize,
    rows: Vec<Vec<Complex64>>,
    rhs: Option<Vec<Complex64>>,
}

impl ConstraintSystem {
    pub fn new(unknown_count: usize) -> Self {
        ConstraintSystem { unknown_count, rows: Vec::new(), rhs: None }
    }

    pub fn unknown_count(&self) -> usize {
        self.unknown_count
    }

    pub fn rows(&self) -> &[Vec<Complex64>] {
        &self.rows
    }

    pub fn rhs(&self) -> Option<&[Complex64]> {
        self.rhs.as_deref()
    }

    pub fn push_homogeneous(&mut self, coefficients: Vec<Complex64>) -> Result<()> {
        self.push(coefficients, ZERO)
    }

    pub fn push(&mut self, coefficients: Vec<Complex64>, rhs: Complex64) -> Result<()> {
        if coefficients.len() != self.unknown_count {
            return Err(Error::dims(self.unknown_count, coefficients.len()));
        }
        if rhs != ZERO && self.rhs.is_none() {
            self.rhs = Some(vec![ZERO; self.rows.len()]);
        }
        if let Some(b) = self.rhs.as_mut() {
            b.push(rhs);
        }
        self.rows.push(coefficients);
        Ok(())
    }

    /// Largest `|A x - b|` over all rows.
    pub fn residual(&self, x: &[Complex64]) -> f64 {
        self.rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let ax: Complex64 = row.iter().zip(x).map(|(&a, &v)| a * v).sum();
                (ax - self.rhs_at(i)).norm()
            })
            .fold(0.0, f64::max)
    }

    /// Largest `|A x|`, ignoring the right-hand side.
    pub fn homogeneous_residual(&self, x: &[Complex64]) -> f64 {
        self.rows
            .iter()
            .map(|row| row.iter().zip(x).map(|(&a, &v)| a * v).sum::<Complex64>().norm())
            .fold(0.0, f64::max)
    }

    fn rhs_at(&self, i: usize) -> Complex64 {
        self.rhs.as_ref().map_or(ZERO, |b| b[i])
    }

    fn eliminate(&self) -> Echelon {
        Echelon::reduce(self)
    }

    /// Orthonormal basis of `{x : A x = 0}`.
    pub fn nullspace(&self) -> Vec<Vec<Complex64>> {
        let ech = self.eliminate();
        let mut basis = Vec::new();
        for free in (0..self.unknown_count).filter(|c| !ech.pivot_cols.contains(c)) {
            let mut v = vec![ZERO; self.unknown_count];
            v[free] = Complex64::new(1.0, 0.0);
            for (r, &pc) in ech.pivot_cols.iter().enumerate() {
                v[pc] = -ech.rows[r][free];
            }
            basis.push(v);
        }
        orthonormalize(basis)
    }

    pub fn rank(&self) -> usize {
        self.eliminate().pivot_cols.len()
    }

    /// A solution of `A x = b` with every free unknown set to zero, or
    /// `None` when the system is inconsistent.
    pub fn particular_solution(&self) -> Option<Vec<Complex64>> {
        let ech = self.eliminate();
        if !ech.consistent {
            return None;
        }
        let mut x = vec![ZERO; self.unknown_count];
        for (r, &pc) in ech.pivot_cols.iter().enumerate() {
            x[pc] = ech.rhs[r];
        }
        Some(x)
    }
}

/// Reduced row echelon form of an augmented system.
struct Echelon {
    rows: Vec<Vec<Complex64>>,
    rhs: Vec<Complex64>,
    pivot_cols: Vec<usize>,
    consistent: bool,
}

impl Echelon {
    fn reduce(sys: &ConstraintSystem) -> Echelon {
        let mut rows = sys.rows.clone();
        let mut rhs: Vec<Complex64> = (0..rows.len()).map(|i| sys.rhs_at(i)).collect();
        let m = rows.len();
        let mut pivot_cols = Vec::new();
        let mut largest_pivot = 0.0_f64;
        let mut r = 0;
        for c in 0..sys.unknown_count {
            if r == m {
                break;
            }
            let (best, magnitude) =
                (r..m)
                    .map(|i| (i, rows[i][c].norm()))
                    .fold((r, -1.0), |acc, cand| if cand.1 > acc.1 { cand } else { acc });
            if magnitude <= RANK_THRESHOLD * largest_pivot.max(1.0) {
                continue;
            }
            largest_pivot = largest_pivot.max(magnitude);
            rows.swap(r, best);
            rhs.swap(r, best);
            let inv = rows[r][c].inv();
            for v in rows[r].iter_mut() {
                *v *= inv;
            }
            rhs[r] *= inv;
            let pivot_row = rows[r].clone();
            let pivot_rhs = rhs[r];
            for i in 0..m {
                if i == r {
                    continue;
                }
                let factor = rows[i][c];
                if factor == ZERO {
                    continue;
                }
                for (v, &p) in rows[i].iter_mut().zip(&pivot_row) {
                    *v -= factor * p;
                }
                rhs[i] -= factor * pivot_rhs;
            }
            pivot_cols.push(c);
            r += 1;
        }
        let cutoff = RANK_THRESHOLD * largest_pivot.max(1.0);
        let consistent = rhs[r..].iter().all(|b| b.norm() <= cutoff);
        rows.truncate(r);
        rhs.truncate(r);
        Echelon { rows, rhs, pivot_cols, consistent }
    }
}

/// Modified Gram-Schmidt under the standard Hermitian inner product.
fn orthonormalize(vectors: Vec<Vec<Complex64>>) -> Vec<Vec<Complex64>> {
    let mut out: Vec<Vec<Complex64>> = Vec::with_capacity(vectors.len());
    for mut v in vectors {
        for q in &out {
            let proj: Complex64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, qi) in v.iter_mut().zip(q) {
                *vi -= proj * qi;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > RANK_THRESHOLD {
            v.iter_mut().for_each(|z| *z /= norm);
            out.push(v);
        }
    }
    out
}
