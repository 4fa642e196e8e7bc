//! Decision procedures for the derivation flavors on the pointwise algebra ℂⁿ.
//!
//! Every defining identity is bilinear (or trilinear once the repeated
//! argument is polarized), so checking it on all tuples of standard basis
//! vectors is a complete test. The literal quadratic/cubic identity is also
//! spot-checked on seeded random vectors to catch polarization mistakes.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seqalg::SeqVector;
use crate::shiftop::LinOp;
use crate::tolerance::DEFAULT_TOLERANCE;

/// Which multiplicative identity a (higher / generalized) derivation satisfies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flavor {
    Plain,
    Jordan,
    JordanTriple,
}

impl Flavor {
    pub const ALL: [Flavor; 3] = [Flavor::Plain, Flavor::Jordan, Flavor::JordanTriple];

    /// Number of basis vectors in one polarized check.
    pub fn arity(self) -> usize {
        match self {
            Flavor::Plain | Flavor::Jordan => 2,
            Flavor::JordanTriple => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Flavor::Plain => "plain",
            Flavor::Jordan => "jordan",
            Flavor::JordanTriple => "jordan_triple",
        }
    }
}

impl std::fmt::Display for Flavor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A failing input tuple together with both sides of the identity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub context: String,
    pub inputs: Vec<SeqVector>,
    pub lhs: SeqVector,
    pub rhs: SeqVector,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub holds: bool,
    pub witness: Option<Witness>,
}

impl CheckResult {
    fn pass() -> Self {
        CheckResult { holds: true, witness: None }
    }

    fn fail(witness: Witness) -> Self {
        CheckResult { holds: false, witness: Some(witness) }
    }
}

/// Both sides of the defining identities, evaluated on concrete vectors.
///
/// Each function returns `(lhs, rhs)`. Generalized variants take the main
/// operator `big_d` and the auxiliary `d`; passing the same operator twice
/// gives the ordinary identity.
pub mod identities {
    use super::*;

    /// `d(ab)` against `d(a)ψ(b) + λ(a)d(b)`.
    pub fn psi_lambda(d: &LinOp, psi: &LinOp, lambda: &LinOp, a: &SeqVector, b: &SeqVector) -> (SeqVector, SeqVector) {
        let lhs = d.act(&(a * b));
        let rhs = &(&d.act(a) * &psi.act(b)) + &(&lambda.act(a) * &d.act(b));
        (lhs, rhs)
    }

    /// `D(ab)` against `D(a)b + a d(b)`.
    pub fn generalized(big_d: &LinOp, d: &LinOp, a: &SeqVector, b: &SeqVector) -> (SeqVector, SeqVector) {
        let lhs = big_d.act(&(a * b));
        let rhs = &(&big_d.act(a) * b) + &(a * &d.act(b));
        (lhs, rhs)
    }

    /// Polarized `D(a²) = D(a)a + a d(a)`:
    /// `D(ab+ba)` against `D(a)b + a d(b) + D(b)a + b d(a)`.
    pub fn jordan_polarized(big_d: &LinOp, d: &LinOp, a: &SeqVector, b: &SeqVector) -> (SeqVector, SeqVector) {
        let lhs = big_d.act(&(&(a * b) + &(b * a)));
        let t1 = &big_d.act(a) * b;
        let t2 = a * &d.act(b);
        let t3 = &big_d.act(b) * a;
        let t4 = b * &d.act(a);
        (lhs, &(&t1 + &t2) + &(&t3 + &t4))
    }

    pub fn jordan_literal(big_d: &LinOp, d: &LinOp, a: &SeqVector) -> (SeqVector, SeqVector) {
        let lhs = big_d.act(&(a * a));
        let rhs = &(&big_d.act(a) * a) + &(a * &d.act(a));
        (lhs, rhs)
    }

    /// `D(aba) = D(a)ba + a d(b) a + ab d(a)` polarized in `a`:
    /// `D(abc+cba)` against
    /// `D(a)bc + a d(b) c + ab d(c) + D(c)ba + c d(b) a + cb d(a)`.
    pub fn triple_polarized(
        big_d: &LinOp,
        d: &LinOp,
        a: &SeqVector,
        b: &SeqVector,
        c: &SeqVector,
    ) -> (SeqVector, SeqVector) {
        let abc = &(a * b) * c;
        let cba = &(c * b) * a;
        let lhs = big_d.act(&(&abc + &cba));
        let db = d.act(b);
        let forward = &(&(&big_d.act(a) * &(b * c)) + &(&(a * &db) * c)) + &(&(a * b) * &d.act(c));
        let backward = &(&(&big_d.act(c) * &(b * a)) + &(&(c * &db) * a)) + &(&(c * b) * &d.act(a));
        (lhs, &forward + &backward)
    }

    pub fn triple_literal(big_d: &LinOp, d: &LinOp, a: &SeqVector, b: &SeqVector) -> (SeqVector, SeqVector) {
        let lhs = big_d.act(&(&(a * b) * a));
        let rhs = &(&(&big_d.act(a) * &(b * a)) + &(&(a * &d.act(b)) * a)) + &(&(a * b) * &d.act(a));
        (lhs, rhs)
    }

    /// Level `k` of a higher derivation, polarized for the Jordan flavors.
    ///
    /// `args` holds two vectors for `Plain`/`Jordan` and three for `JordanTriple`.
    pub fn higher_level(ds: &[LinOp], level: usize, flavor: Flavor, args: &[SeqVector]) -> (SeqVector, SeqVector) {
        match flavor {
            Flavor::Plain => {
                let (a, b) = (&args[0], &args[1]);
                (ds[level].act(&(a * b)), cauchy2(ds, level, a, b))
            }
            Flavor::Jordan => {
                let (a, b) = (&args[0], &args[1]);
                let lhs = ds[level].act(&(&(a * b) + &(b * a)));
                (lhs, &cauchy2(ds, level, a, b) + &cauchy2(ds, level, b, a))
            }
            Flavor::JordanTriple => {
                let (a, b, c) = (&args[0], &args[1], &args[2]);
                let lhs = ds[level].act(&(&(&(a * b) * c) + &(&(c * b) * a)));
                (lhs, &cauchy3(ds, level, a, b, c) + &cauchy3(ds, level, c, b, a))
            }
        }
    }

    /// The unpolarized level identity: `d_k(ab)`, `d_k(a²)` or `d_k(aba)`.
    pub fn higher_literal(ds: &[LinOp], level: usize, flavor: Flavor, args: &[SeqVector]) -> (SeqVector, SeqVector) {
        match flavor {
            Flavor::Plain => higher_level(ds, level, flavor, args),
            Flavor::Jordan => {
                let a = &args[0];
                (ds[level].act(&(a * a)), cauchy2(ds, level, a, a))
            }
            Flavor::JordanTriple => {
                let (a, b) = (&args[0], &args[1]);
                (ds[level].act(&(&(a * b) * a)), cauchy3(ds, level, a, b, a))
            }
        }
    }

    /// `Σ_{i+j=k} d_i(a) d_j(b)`.
    fn cauchy2(ds: &[LinOp], k: usize, a: &SeqVector, b: &SeqVector) -> SeqVector {
        let mut acc = SeqVector::zeros(a.len());
        for i in 0..=k {
            acc = &acc + &(&ds[i].act(a) * &ds[k - i].act(b));
        }
        acc
    }

    /// `Σ_{i+j+l=k} d_i(a) d_j(b) d_l(c)`.
    fn cauchy3(ds: &[LinOp], k: usize, a: &SeqVector, b: &SeqVector, c: &SeqVector) -> SeqVector {
        let mut acc = SeqVector::zeros(a.len());
        for i in 0..=k {
            let da = ds[i].act(a);
            for j in 0..=(k - i) {
                let term = &(&da * &ds[j].act(b)) * &ds[k - i - j].act(c);
                acc = &acc + &term;
            }
        }
        acc
    }
}

/// Tolerance and random-guard configuration for the predicates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckOptions {
    pub tolerance: f64,
    pub random_samples: usize,
    pub seed: u64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { tolerance: DEFAULT_TOLERANCE, random_samples: 32, seed: 0x5eed }
    }
}

/// Evaluates derivation predicates under one set of [`CheckOptions`].
#[derive(Debug, Clone, Copy, Default)]
pub struct Checker {
    pub options: CheckOptions,
}

impl Checker {
    pub fn new(options: CheckOptions) -> Self {
        Checker { options }
    }

    pub fn psi_lambda(&self, d: &LinOp, psi: &LinOp, lambda: &LinOp) -> Result<CheckResult> {
        let n = d.n();
        psi.require_dim(n)?;
        lambda.require_dim(n)?;
        let scale = op_scale(&[d, psi, lambda]);
        let eval = |v: &[SeqVector]| identities::psi_lambda(d, psi, lambda, &v[0], &v[1]);
        Ok(self.decide(n, scale, 2, &eval, 2, &eval))
    }

    pub fn psi(&self, d: &LinOp, psi: &LinOp) -> Result<CheckResult> {
        self.psi_lambda(d, psi, psi)
    }

    pub fn derivation(&self, d: &LinOp) -> Result<CheckResult> {
        let id = LinOp::identity(d.n());
        self.psi_lambda(d, &id, &id)
    }

    pub fn jordan(&self, d: &LinOp) -> Result<CheckResult> {
        self.generalized_with(d, d, Flavor::Jordan)
    }

    pub fn jordan_triple(&self, d: &LinOp) -> Result<CheckResult> {
        self.generalized_with(d, d, Flavor::JordanTriple)
    }

    /// `D(ab) = D(a)b + a d(b)`; `d` must itself be a derivation.
    pub fn generalized(&self, big_d: &LinOp, d: &LinOp) -> Result<CheckResult> {
        self.generalized_flavor(big_d, d, Flavor::Plain)
    }

    pub fn generalized_jordan(&self, big_d: &LinOp, d: &LinOp) -> Result<CheckResult> {
        self.generalized_flavor(big_d, d, Flavor::Jordan)
    }

    pub fn generalized_jordan_triple(&self, big_d: &LinOp, d: &LinOp) -> Result<CheckResult> {
        self.generalized_flavor(big_d, d, Flavor::JordanTriple)
    }

    /// Generalized check for any flavor. The auxiliary map must be a
    /// derivation for `Plain`/`Jordan` and a Jordan triple derivation for
    /// `JordanTriple`.
    pub fn generalized_flavor(&self, big_d: &LinOp, d: &LinOp, flavor: Flavor) -> Result<CheckResult> {
        d.require_dim(big_d.n())?;
        let (aux, required) = match flavor {
            Flavor::Plain | Flavor::Jordan => (self.derivation(d)?, "derivation"),
            Flavor::JordanTriple => (self.jordan_triple(d)?, "jordan triple derivation"),
        };
        if let Some(witness) = aux.witness {
            return Err(Error::AuxiliaryCheckFailed { required, witness: Box::new(witness) });
        }
        self.generalized_with(big_d, d, flavor)
    }

    fn generalized_with(&self, big_d: &LinOp, d: &LinOp, flavor: Flavor) -> Result<CheckResult> {
        let n = big_d.n();
        d.require_dim(n)?;
        let scale = op_scale(&[big_d, d]);
        Ok(match flavor {
            Flavor::Plain => {
                let eval = |v: &[SeqVector]| identities::generalized(big_d, d, &v[0], &v[1]);
                self.decide(n, scale, 2, &eval, 2, &eval)
            }
            Flavor::Jordan => self.decide(
                n,
                scale,
                2,
                &|v: &[SeqVector]| identities::jordan_polarized(big_d, d, &v[0], &v[1]),
                1,
                &|v: &[SeqVector]| identities::jordan_literal(big_d, d, &v[0]),
            ),
            Flavor::JordanTriple => self.decide(
                n,
                scale,
                3,
                &|v: &[SeqVector]| identities::triple_polarized(big_d, d, &v[0], &v[1], &v[2]),
                2,
                &|v: &[SeqVector]| identities::triple_literal(big_d, d, &v[0], &v[1]),
            ),
        })
    }

    /// Checks every level `0..ds.len()` of a higher derivation.
    pub fn higher(&self, ds: &[LinOp], flavor: Flavor) -> Result<CheckResult> {
        let first = ds.first().ok_or_else(|| Error::InvalidInput("empty operator list".into()))?;
        let n = first.n();
        for op in ds {
            op.require_dim(n)?;
        }
        let refs: Vec<&LinOp> = ds.iter().collect();
        let scale = op_scale(&refs);
        let literal_arity = match flavor {
            Flavor::Plain => 2,
            Flavor::Jordan => 1,
            Flavor::JordanTriple => 2,
        };
        for level in 0..ds.len() {
            let polar = |v: &[SeqVector]| identities::higher_level(ds, level, flavor, v);
            let literal = |v: &[SeqVector]| identities::higher_literal(ds, level, flavor, v);
            let mut result = self.decide(n, scale, flavor.arity(), &polar, literal_arity, &literal);
            if let Some(w) = result.witness.as_mut() {
                w.context = format!("level {level}, {}", w.context);
                return Ok(result);
            }
        }
        Ok(CheckResult::pass())
    }

    /// Basis tuples in lexicographic order, then the seeded random guard.
    fn decide(
        &self,
        n: usize,
        scale: f64,
        arity: usize,
        polarized: &dyn Fn(&[SeqVector]) -> (SeqVector, SeqVector),
        literal_arity: usize,
        literal: &dyn Fn(&[SeqVector]) -> (SeqVector, SeqVector),
    ) -> CheckResult {
        let basis: Vec<SeqVector> = (0..n).map(|b| SeqVector::basis(n, b)).collect();
        for tuple in basis_tuples(n, arity) {
            let inputs: Vec<SeqVector> = tuple.iter().map(|&b| basis[b].clone()).collect();
            let (lhs, rhs) = polarized(&inputs);
            if let Some(w) = self.compare(format!("basis {tuple:?}"), inputs, lhs, rhs, scale) {
                return CheckResult::fail(w);
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.options.seed);
        for k in 0..self.options.random_samples {
            let inputs: Vec<SeqVector> = (0..literal_arity).map(|_| random_vector(&mut rng, n)).collect();
            let (lhs, rhs) = literal(&inputs);
            if let Some(w) = self.compare(format!("random sample {k}"), inputs, lhs, rhs, scale) {
                return CheckResult::fail(w);
            }
        }
        CheckResult::pass()
    }

    fn compare(
        &self,
        context: String,
        inputs: Vec<SeqVector>,
        lhs: SeqVector,
        rhs: SeqVector,
        scale: f64,
    ) -> Option<Witness> {
        let deviation = (&lhs - &rhs).max_abs();
        let magnitude = lhs.max_abs().max(rhs.max_abs()).max(scale);
        (deviation > self.options.tolerance * (1.0 + magnitude)).then_some(Witness {
            context,
            inputs,
            lhs,
            rhs,
            deviation,
        })
    }
}

fn op_scale(ops: &[&LinOp]) -> f64 {
    ops.iter()
        .map(|op| match op {
            LinOp::Dense(m) => m.max_abs(),
            LinOp::MultiplierShift { r, .. } => r.max_abs(),
        })
        .fold(0.0, f64::max)
}

/// All `arity`-tuples over `0..n` in lexicographic order.
pub(crate) fn basis_tuples(n: usize, arity: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = n.pow(arity as u32);
    (0..total).map(move |mut code| {
        let mut tuple = vec![0; arity];
        for slot in tuple.iter_mut().rev() {
            *slot = code % n;
            code /= n;
        }
        tuple
    })
}

/// Entries with real and imaginary parts uniform in `[-1, 1]`.
pub fn random_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> SeqVector {
    SeqVector::from_entries_unchecked(
        (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0))).collect(),
    )
}

pub fn is_psi_lambda_derivation(d: &LinOp, psi: &LinOp, lambda: &LinOp) -> Result<CheckResult> {
    Checker::default().psi_lambda(d, psi, lambda)
}

pub fn is_psi_derivation(d: &LinOp, psi: &LinOp) -> Result<CheckResult> {
    Checker::default().psi(d, psi)
}

pub fn is_derivation(d: &LinOp) -> Result<CheckResult> {
    Checker::default().derivation(d)
}

pub fn is_jordan_derivation(d: &LinOp) -> Result<CheckResult> {
    Checker::default().jordan(d)
}

pub fn is_jordan_triple_derivation(d: &LinOp) -> Result<CheckResult> {
    Checker::default().jordan_triple(d)
}

pub fn is_generalized_derivation(big_d: &LinOp, d: &LinOp) -> Result<CheckResult> {
    Checker::default().generalized(big_d, d)
}

pub fn is_generalized_jordan_derivation(big_d: &LinOp, d: &LinOp) -> Result<CheckResult> {
    Checker::default().generalized_jordan(big_d, d)
}

pub fn is_generalized_jordan_triple_derivation(big_d: &LinOp, d: &LinOp) -> Result<CheckResult> {
    Checker::default().generalized_jordan_triple(big_d, d)
}

pub fn is_higher_derivation(ds: &[LinOp], flavor: Flavor) -> Result<CheckResult> {
    Checker::default().higher(ds, flavor)
}
