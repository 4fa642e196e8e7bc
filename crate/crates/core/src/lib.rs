//! Generalized shift operators `σ_φ x = (x_{φ(α)})_α` on the pointwise
//! sequence algebra ℂⁿ with ℓᵖ norms.
//!
//! The crate builds `σ_φ` from a self-map of `{0, …, n-1}`, decides the
//! derivation-type identities it can satisfy, recovers and synthesizes the
//! multiplier pairs `(ψ, λ)` for which it is a `(ψ, λ)`-derivation, and
//! solves the linear systems describing twisted, generalized and higher
//! derivations. [`verify`] runs all of this exhaustively over small maps.

pub mod cli;
pub mod derivcheck;
pub mod error;
pub mod linsys;
pub mod seqalg;
pub mod shiftop;
pub mod structure;
pub mod tolerance;
pub mod verify;
pub mod wire;

pub use derivcheck::{CheckOptions, CheckResult, Checker, Flavor, Witness};
pub use error::{Error, Result};
pub use seqalg::{PExponent, SeqVector};
pub use shiftop::{DenseMatrix, FiberReport, IndexMap, LinOp};
pub use structure::{Classification, HigherTailReport, Outcome, SolveReport};

pub use num_complex::Complex64;
