//! Numerical tolerances shared across the crate.

use num_complex::Complex64;

/// Relative-absolute tolerance for scalar equality and identity checks.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Relative pivot threshold used when deciding rank during elimination.
pub const RANK_THRESHOLD: f64 = 1e-8;

/// Combined tolerance: `|a - b| <= tol * (1 + max(|a|, |b|))`.
pub fn approx_eq(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + a.norm().max(b.norm()))
}
