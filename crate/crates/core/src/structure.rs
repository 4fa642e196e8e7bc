//! Multiplier decompositions of `(ψ, λ)` pairs for a generalized shift, and
//! linear-constraint solvers for twisted, generalized and higher derivations.
//!
//! Unknown operators are flattened row-major: unknown `α·n + β` is the matrix
//! entry `(α, β)`, i.e. coordinate `α` of `d(w^β)`.

use num_complex::Complex64;
use serde::Serialize;

use crate::derivcheck::{basis_tuples, identities, Flavor};
use crate::error::{Error, Result};
use crate::linsys::ConstraintSystem;
use crate::seqalg::SeqVector;
use crate::shiftop::{DenseMatrix, IndexMap, LinOp};
use crate::tolerance::{approx_eq, DEFAULT_TOLERANCE};

/// `ψ = r·σ_φ` and `λ = (1 − r)·σ_φ`.
pub fn synthesize_pair(phi: &IndexMap, r: &SeqVector) -> Result<(LinOp, LinOp)> {
    if r.len() != phi.n() {
        return Err(Error::dims(phi.n(), r.len()));
    }
    let complement = &SeqVector::ones(phi.n()) - r;
    Ok((LinOp::multiplier_shift(r.clone(), phi.clone())?, LinOp::multiplier_shift(complement, phi.clone())?))
}

/// `r_α = π_α(ψ(w^{φ(α)}))`.
pub fn recover_r(phi: &IndexMap, psi: &LinOp) -> Result<SeqVector> {
    psi.require_dim(phi.n())?;
    let n = phi.n();
    let entries =
        (0..n).map(|alpha| psi.apply(&SeqVector::basis(n, phi.at(alpha)))?.coord(alpha)).collect::<Result<Vec<_>>>()?;
    SeqVector::new(entries)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Operand {
    Psi,
    Lambda,
}

/// First operator entry that disagrees with the multiplier-shift form.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntryDeviation {
    pub operator: Operand,
    pub row: usize,
    pub col: usize,
    pub expected: [f64; 2],
    pub found: [f64; 2],
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Accept(SeqVector),
    Reject(EntryDeviation),
}

impl Classification {
    pub fn is_accept(&self) -> bool {
        matches!(self, Classification::Accept(_))
    }
}

pub fn classify_psi_lambda(phi: &IndexMap, psi: &LinOp, lambda: &LinOp) -> Result<Classification> {
    classify_psi_lambda_with(phi, psi, lambda, DEFAULT_TOLERANCE)
}

/// Accepts exactly when `ψ` and `λ` coincide entrywise with the multiplier
/// shifts built from the recovered `r`.
pub fn classify_psi_lambda_with(phi: &IndexMap, psi: &LinOp, lambda: &LinOp, tol: f64) -> Result<Classification> {
    let n = phi.n();
    psi.require_dim(n)?;
    lambda.require_dim(n)?;
    let r = recover_r(phi, psi)?;
    let (want_psi, want_lambda) = synthesize_pair(phi, &r)?;
    for (operand, got, want) in [(Operand::Psi, psi, &want_psi), (Operand::Lambda, lambda, &want_lambda)] {
        let got = got.to_dense();
        let want = want.to_dense();
        for row in 0..n {
            for col in 0..n {
                let (g, w) = (got.get(row, col), want.get(row, col));
                if !approx_eq(g, w, tol) {
                    return Ok(Classification::Reject(EntryDeviation {
                        operator: operand,
                        row,
                        col,
                        expected: [w.re, w.im],
                        found: [g.re, g.im],
                        deviation: (g - w).norm(),
                    }));
                }
            }
        }
    }
    Ok(Classification::Accept(r))
}

/// Outcome of a solve: a nullspace dimension or a feasibility verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Dimension(usize),
    Feasible(bool),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    #[serde(flatten)]
    pub outcome: Outcome,
    /// Orthonormal basis of the homogeneous solution space.
    pub basis: Vec<LinOp>,
    /// One solution of the (possibly inhomogeneous) system, when it exists.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solution: Option<LinOp>,
    pub residual: f64,
}

impl SolveReport {
    pub fn dimension(&self) -> usize {
        match self.outcome {
            Outcome::Dimension(d) => d,
            Outcome::Feasible(_) => self.basis.len(),
        }
    }

    pub fn feasible(&self) -> bool {
        match self.outcome {
            Outcome::Dimension(_) => true,
            Outcome::Feasible(f) => f,
        }
    }
}

fn unknown(n: usize, alpha: usize, beta: usize) -> usize {
    alpha * n + beta
}

fn op_from_flat(n: usize, x: Vec<Complex64>) -> LinOp {
    LinOp::Dense(DenseMatrix::from_flat(n, x).expect("solver vectors have n² finite entries"))
}

/// Rows of `d(w^β w^γ) = d(w^β)ψ(w^γ) + λ(w^β)d(w^γ)` over `d`'s entries,
/// one per `(β, γ, α)` in lexicographic order.
///
/// For `β = γ` only the unknown `(α, β)` appears, with coefficient
/// `1 − ψ[α,β] − λ[α,β]`.
pub fn twisted_constraints(psi: &LinOp, lambda: &LinOp) -> Result<ConstraintSystem> {
    let n = psi.n();
    lambda.require_dim(n)?;
    let psi = psi.to_dense();
    let lambda = lambda.to_dense();
    let mut sys = ConstraintSystem::new(n * n);
    for beta in 0..n {
        for gamma in 0..n {
            for alpha in 0..n {
                let mut row = vec![Complex64::new(0.0, 0.0); n * n];
                if beta == gamma {
                    row[unknown(n, alpha, beta)] += 1.0;
                }
                row[unknown(n, alpha, beta)] -= psi.get(alpha, gamma);
                row[unknown(n, alpha, gamma)] -= lambda.get(alpha, beta);
                sys.push_homogeneous(row)?;
            }
        }
    }
    Ok(sys)
}

/// The space of all `d` with `d(ab) = d(a)ψ(b) + λ(a)d(b)`.
pub fn twisted_derivation_space(psi: &LinOp, lambda: &LinOp) -> Result<SolveReport> {
    let sys = twisted_constraints(psi, lambda)?;
    Ok(nullspace_report(&sys, psi.n()))
}

fn nullspace_report(sys: &ConstraintSystem, n: usize) -> SolveReport {
    let basis = sys.nullspace();
    let residual = basis.iter().map(|v| sys.homogeneous_residual(v)).fold(0.0, f64::max);
    SolveReport {
        outcome: Outcome::Dimension(basis.len()),
        basis: basis.into_iter().map(|v| op_from_flat(n, v)).collect(),
        solution: None,
        residual,
    }
}

/// Appends the rows of an identity that is affine in an unknown operator.
///
/// `residual(X)` must return `lhs − rhs` for a fixed input tuple. Its
/// coefficients are read off by evaluating at `X = 0` and at each matrix unit.
fn push_affine_rows(sys: &mut ConstraintSystem, n: usize, residual: &dyn Fn(&LinOp) -> SeqVector) -> Result<()> {
    let base = residual(&LinOp::zero(n));
    let mut columns = Vec::with_capacity(n * n);
    for u in 0..n * n {
        let mut unit = DenseMatrix::zeros(n);
        unit.set(u / n, u % n, Complex64::new(1.0, 0.0));
        columns.push(&residual(&LinOp::Dense(unit)) - &base);
    }
    for alpha in 0..n {
        let row = columns.iter().map(|col| col[alpha]).collect();
        sys.push(row, -base[alpha])?;
    }
    Ok(())
}

fn basis_inputs(n: usize, tuple: &[usize]) -> Vec<SeqVector> {
    tuple.iter().map(|&b| SeqVector::basis(n, b)).collect()
}

/// Constraints on `d` for `D = σ_φ` to satisfy the generalized identity of
/// `flavor`, together with the side conditions making `d` a derivation
/// (Jordan triple derivation for the triple flavor).
pub fn generalized_constraints(phi: &IndexMap, flavor: Flavor) -> Result<ConstraintSystem> {
    let n = phi.n();
    let sigma = LinOp::shift(phi);
    let mut sys = ConstraintSystem::new(n * n);
    for tuple in basis_tuples(n, flavor.arity()) {
        let v = basis_inputs(n, &tuple);
        let main = |x: &LinOp| {
            let (lhs, rhs) = match flavor {
                Flavor::Plain => identities::generalized(&sigma, x, &v[0], &v[1]),
                Flavor::Jordan => identities::jordan_polarized(&sigma, x, &v[0], &v[1]),
                Flavor::JordanTriple => identities::triple_polarized(&sigma, x, &v[0], &v[1], &v[2]),
            };
            &lhs - &rhs
        };
        push_affine_rows(&mut sys, n, &main)?;
    }
    let side_arity = if flavor == Flavor::JordanTriple { 3 } else { 2 };
    for tuple in basis_tuples(n, side_arity) {
        let v = basis_inputs(n, &tuple);
        let side = |x: &LinOp| {
            let (lhs, rhs) = match flavor {
                Flavor::Plain | Flavor::Jordan => identities::generalized(x, x, &v[0], &v[1]),
                Flavor::JordanTriple => identities::triple_polarized(x, x, &v[0], &v[1], &v[2]),
            };
            &lhs - &rhs
        };
        push_affine_rows(&mut sys, n, &side)?;
    }
    Ok(sys)
}

/// Decides whether some admissible `d` makes `σ_φ` a generalized derivation
/// of the given flavor.
pub fn generalized_derivation_feasible(phi: &IndexMap, flavor: Flavor) -> SolveReport {
    let sys = generalized_constraints(phi, flavor).expect("rows are built with n² coefficients");
    affine_report(&sys, phi.n(), true)
}

fn affine_report(sys: &ConstraintSystem, n: usize, as_feasibility: bool) -> SolveReport {
    let basis = sys.nullspace();
    let solution = sys.particular_solution();
    let mut residual = basis.iter().map(|v| sys.homogeneous_residual(v)).fold(0.0, f64::max);
    if let Some(x) = &solution {
        residual = residual.max(sys.residual(x));
    }
    let outcome = if as_feasibility { Outcome::Feasible(solution.is_some()) } else { Outcome::Dimension(basis.len()) };
    SolveReport {
        outcome,
        basis: basis.into_iter().map(|v| op_from_flat(n, v)).collect(),
        solution: solution.map(|x| op_from_flat(n, x)),
        residual,
    }
}

/// Level-by-level solution of a higher derivation starting at `d₀ = σ_φ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HigherTailReport {
    pub flavor: Flavor,
    /// `levels[k-1]` describes `d_k`.
    pub levels: Vec<SolveReport>,
}

impl HigherTailReport {
    pub fn dimensions(&self) -> Vec<usize> {
        self.levels.iter().map(SolveReport::dimension).collect()
    }

    /// The chosen `d_k` for each solved level.
    pub fn solutions(&self) -> Vec<&LinOp> {
        self.levels.iter().filter_map(|l| l.solution.as_ref()).collect()
    }
}

pub fn higher_derivation_tail_space(phi: &IndexMap, depth: usize) -> Result<HigherTailReport> {
    higher_tail_space_with_flavor(phi, depth, Flavor::Plain)
}

/// For `k = 1..=depth`, fixes `d₀ = σ_φ` and the previously chosen
/// `d₁, …, d_{k−1}`, then solves the level-`k` identity, which is affine in
/// `d_k`. Stops early if a level is inconsistent.
pub fn higher_tail_space_with_flavor(phi: &IndexMap, depth: usize, flavor: Flavor) -> Result<HigherTailReport> {
    if depth == 0 {
        return Err(Error::InvalidInput("depth must be at least 1".into()));
    }
    let n = phi.n();
    let mut ds = vec![LinOp::shift(phi)];
    let mut levels = Vec::with_capacity(depth);
    for level in 1..=depth {
        let mut sys = ConstraintSystem::new(n * n);
        for tuple in basis_tuples(n, flavor.arity()) {
            let v = basis_inputs(n, &tuple);
            let lower = &ds;
            let residual = |x: &LinOp| {
                let mut trial = lower.clone();
                trial.push(x.clone());
                let (lhs, rhs) = identities::higher_level(&trial, level, flavor, &v);
                &lhs - &rhs
            };
            push_affine_rows(&mut sys, n, &residual)?;
        }
        let report = affine_report(&sys, n, false);
        let next = report.solution.clone();
        levels.push(report);
        match next {
            Some(d) => ds.push(d),
            None => break,
        }
    }
    Ok(HigherTailReport { flavor, levels })
}
