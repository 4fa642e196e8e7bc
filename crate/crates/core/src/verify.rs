//! Exhaustive verification of the characterization results over small maps.
//!
//! Every self-map on `n ≤ 4` points is checked; for `4 < n ≤ n_max` a seeded
//! sample of maps is used instead. Reports are deterministic for a given
//! `(n_max, seed)`: maps are processed in lexicographic order and all
//! randomness is derived from the seed, the dimension and the map's position.

use std::fmt::Write as _;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::derivcheck::{random_vector, CheckOptions, Checker, Flavor};
use crate::error::{Error, Result};
use crate::seqalg::{PExponent, SeqVector};
use crate::shiftop::{fibers, shift_operator_norm, DenseMatrix, IndexMap, LinOp};
use crate::structure::{
    classify_psi_lambda_with, generalized_derivation_feasible, higher_derivation_tail_space, synthesize_pair,
    twisted_derivation_space, Classification,
};
use crate::tolerance::DEFAULT_TOLERANCE;

/// Largest `n` enumerated exhaustively.
pub const EXHAUSTIVE_LIMIT: usize = 4;
/// Largest accepted `n_max`.
pub const N_MAX_LIMIT: usize = 8;
/// Maps drawn per dimension above [`EXHAUSTIVE_LIMIT`].
pub const SAMPLED_MAPS: usize = 8;

const ROUND_TRIP_SAMPLES: usize = 16;
const RANDOM_PSI_SAMPLES: usize = 8;
const CHARACTERIZATION_SAMPLES: usize = 32;
const PERTURBATION: f64 = 1e-3;
const HIGHER_DEPTH: usize = 3;
const NORM_ORACLE_SAMPLES: usize = 1_000;
const SUBMULT_PAIRS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyConfig {
    pub n_max: usize,
    pub seed: u64,
    pub tolerance: f64,
}

impl VerifyConfig {
    pub fn new(n_max: usize, seed: u64) -> Self {
        VerifyConfig { n_max, seed, tolerance: DEFAULT_TOLERANCE }
    }
}

/// The per-map properties, in report order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    RoundTrip,
    HalfShift,
    JordanImpossible,
    ForcedZero,
    IdentityOnly,
    HigherTails,
    Characterization,
    NormFormula,
}

impl Property {
    pub const ALL: [Property; 8] = [
        Property::RoundTrip,
        Property::HalfShift,
        Property::JordanImpossible,
        Property::ForcedZero,
        Property::IdentityOnly,
        Property::HigherTails,
        Property::Characterization,
        Property::NormFormula,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Property::RoundTrip => "(psi,lambda) = (r.s, (1-r).s) round trip",
            Property::HalfShift => "psi-derivation only for psi = s/2",
            Property::JordanImpossible => "shift is not a (triple) Jordan derivation",
            Property::ForcedZero => "s-derivations vanish",
            Property::IdentityOnly => "generalized derivation iff phi = id",
            Property::HigherTails => "higher derivation tails vanish",
            Property::Characterization => "classifier agrees with predicate",
            Property::NormFormula => "operator norm = N^(1/p)",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cell {
    pub n: usize,
    pub exhaustive: bool,
    pub maps: usize,
    pub passed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub property: Property,
    pub map: IndexMap,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyRow {
    pub property: Property,
    pub label: &'static str,
    pub cells: Vec<Cell>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubmultiplicativityRow {
    pub exponents: Vec<PExponent>,
    pub pairs: usize,
    pub violations: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub n_max: usize,
    pub seed: u64,
    pub rows: Vec<PropertyRow>,
    pub submultiplicativity: SubmultiplicativityRow,
    /// The first failures, at most one per property.
    pub failures: Vec<Failure>,
    pub passed: bool,
}

/// Maps checked at dimension `n`: all of them up to [`EXHAUSTIVE_LIMIT`],
/// otherwise the identity plus a seeded sample, sorted and deduplicated.
pub fn maps_for(n: usize, seed: u64) -> (Vec<IndexMap>, bool) {
    if n <= EXHAUSTIVE_LIMIT {
        return (IndexMap::all(n).collect(), true);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(mix(seed, &[0x4d41_5053, n as u64]));
    let mut maps = vec![IndexMap::identity(n)];
    maps.extend((0..SAMPLED_MAPS).map(|_| IndexMap::random(n, &mut rng)));
    maps.sort();
    maps.dedup();
    (maps, false)
}

pub fn run(config: &VerifyConfig) -> Result<VerifyReport> {
    if config.n_max == 0 || config.n_max > N_MAX_LIMIT {
        return Err(Error::InvalidInput(format!("n_max must lie in 1..={N_MAX_LIMIT}, got {}", config.n_max)));
    }
    if !(config.tolerance.is_finite() && config.tolerance > 0.0) {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }

    let mut cells: Vec<Vec<Cell>> = vec![Vec::new(); Property::ALL.len()];
    let mut failures: Vec<Failure> = Vec::new();
    for n in 1..=config.n_max {
        let (maps, exhaustive) = maps_for(n, config.seed);
        let outcomes: Vec<Vec<Option<String>>> = maps
            .par_iter()
            .enumerate()
            .map(|(index, phi)| check_map(phi, config, mix(config.seed, &[n as u64, index as u64])))
            .collect();
        for (p, property) in Property::ALL.iter().enumerate() {
            let passed = outcomes.iter().filter(|o| o[p].is_none()).count();
            cells[p].push(Cell { n, exhaustive, maps: maps.len(), passed });
            if failures.iter().all(|f| f.property != *property) {
                if let Some((phi, detail)) =
                    maps.iter().zip(&outcomes).find_map(|(phi, o)| o[p].clone().map(|d| (phi, d)))
                {
                    failures.push(Failure { property: *property, map: phi.clone(), detail });
                }
            }
        }
    }

    let rows: Vec<PropertyRow> = Property::ALL
        .iter()
        .zip(cells)
        .map(|(&property, cells)| {
            let passed = cells.iter().all(|c| c.passed == c.maps);
            PropertyRow { property, label: property.label(), cells, passed }
        })
        .collect();
    let submultiplicativity = submultiplicativity(config.seed);
    failures.sort_by_key(|f| Property::ALL.iter().position(|&p| p == f.property));
    let passed = rows.iter().all(|r| r.passed) && submultiplicativity.passed;
    Ok(VerifyReport { n_max: config.n_max, seed: config.seed, rows, submultiplicativity, failures, passed })
}

fn check_map(phi: &IndexMap, config: &VerifyConfig, seed: u64) -> Vec<Option<String>> {
    let checker = Checker::new(CheckOptions { tolerance: config.tolerance, ..CheckOptions::default() });
    Property::ALL
        .iter()
        .enumerate()
        .map(|(i, &property)| {
            let mut rng = ChaCha8Rng::seed_from_u64(mix(seed, &[i as u64]));
            let outcome = match property {
                Property::RoundTrip => round_trip(phi, &checker, &mut rng),
                Property::HalfShift => half_shift(phi, &checker, &mut rng),
                Property::JordanImpossible => jordan_impossible(phi, &checker),
                Property::ForcedZero => forced_zero(phi),
                Property::IdentityOnly => identity_only(phi),
                Property::HigherTails => higher_tails(phi),
                Property::Characterization => characterization(phi, &checker, &mut rng),
                Property::NormFormula => norm_formula(phi, &mut rng),
            };
            outcome.err()
        })
        .collect()
}

type Check = std::result::Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn half() -> Complex64 {
    Complex64::new(0.5, 0.0)
}

fn round_trip(phi: &IndexMap, checker: &Checker, rng: &mut ChaCha8Rng) -> Check {
    let sigma = LinOp::shift(phi);
    for k in 0..ROUND_TRIP_SAMPLES {
        let r = random_vector(rng, phi.n());
        let (psi, lambda) = synthesize_pair(phi, &r).map_err(|e| e.to_string())?;
        let check = checker.psi_lambda(&sigma, &psi, &lambda).map_err(|e| e.to_string())?;
        ensure(check.holds, || format!("sample {k}: synthesized pair fails the (psi,lambda) identity"))?;
        match classify_psi_lambda_with(phi, &psi, &lambda, checker.options.tolerance).map_err(|e| e.to_string())? {
            Classification::Accept(found) => {
                let err = (&found - &r).max_abs();
                ensure(err <= checker.options.tolerance, || format!("sample {k}: recovered r off by {err:e}"))?;
            }
            Classification::Reject(dev) => return Err(format!("sample {k}: classifier rejected ({dev:?})")),
        }
    }
    Ok(())
}

fn half_shift(phi: &IndexMap, checker: &Checker, rng: &mut ChaCha8Rng) -> Check {
    let n = phi.n();
    let sigma = LinOp::shift(phi);
    let target = sigma.scaled(half()).to_dense();
    let holds = |psi: &LinOp| checker.psi(&sigma, psi).map(|c| c.holds).map_err(|e| e.to_string());
    ensure(holds(&LinOp::Dense(target.clone()))?, || "s/2 is rejected".into())?;
    for row in 0..n {
        for col in 0..n {
            let mut m = target.clone();
            m.set(row, col, m.get(row, col) + PERTURBATION);
            ensure(!holds(&LinOp::Dense(m))?, || format!("perturbation at ({row},{col}) accepted"))?;
        }
    }
    for k in 0..RANDOM_PSI_SAMPLES {
        let m = random_matrix(rng, n);
        let close = m
            .as_flat()
            .iter()
            .zip(target.as_flat())
            .all(|(a, b)| crate::tolerance::approx_eq(*a, *b, checker.options.tolerance));
        ensure(holds(&LinOp::Dense(m))? == close, || format!("random psi {k}: verdict disagrees with s/2 test"))?;
    }
    Ok(())
}

fn jordan_impossible(phi: &IndexMap, checker: &Checker) -> Check {
    let sigma = LinOp::shift(phi);
    let jordan = checker.jordan(&sigma).map_err(|e| e.to_string())?;
    ensure(!jordan.holds && jordan.witness.is_some(), || "shift passes the Jordan check".into())?;
    let triple = checker.jordan_triple(&sigma).map_err(|e| e.to_string())?;
    ensure(!triple.holds && triple.witness.is_some(), || "shift passes the Jordan triple check".into())
}

fn forced_zero(phi: &IndexMap) -> Check {
    let sigma = LinOp::shift(phi);
    let report = twisted_derivation_space(&sigma, &sigma).map_err(|e| e.to_string())?;
    ensure(report.dimension() == 0 && report.basis.is_empty(), || {
        format!("solution space has dimension {}", report.dimension())
    })
}

fn identity_only(phi: &IndexMap) -> Check {
    for flavor in Flavor::ALL {
        let report = generalized_derivation_feasible(phi, flavor);
        ensure(report.feasible() == phi.is_identity(), || {
            format!("{flavor}: feasible = {} for identity = {}", report.feasible(), phi.is_identity())
        })?;
        if let Some(d) = &report.solution {
            let size = d.to_dense().max_abs();
            ensure(size <= DEFAULT_TOLERANCE, || format!("{flavor}: certificate has entry of size {size:e}"))?;
        }
    }
    Ok(())
}

fn higher_tails(phi: &IndexMap) -> Check {
    let report = higher_derivation_tail_space(phi, HIGHER_DEPTH).map_err(|e| e.to_string())?;
    let dims = report.dimensions();
    ensure(dims == vec![0; HIGHER_DEPTH], || format!("level dimensions {dims:?}"))?;
    let solutions = report.solutions();
    ensure(
        solutions.len() == HIGHER_DEPTH && solutions.iter().all(|d| d.to_dense().max_abs() <= DEFAULT_TOLERANCE),
        || "nonzero tail".into(),
    )
}

/// A mix of synthesized pairs, perturbed synthesized pairs and random pairs.
pub fn random_pair(phi: &IndexMap, rng: &mut ChaCha8Rng, k: usize) -> (LinOp, LinOp) {
    let n = phi.n();
    match k % 4 {
        0 => synthesize_pair(phi, &random_vector(rng, n)).expect("lengths agree"),
        1 => {
            let (psi, lambda) = synthesize_pair(phi, &random_vector(rng, n)).expect("lengths agree");
            let mut m = if rng.gen_bool(0.5) { psi.to_dense() } else { lambda.to_dense() };
            let (row, col) = (rng.gen_range(0..n), rng.gen_range(0..n));
            m.set(row, col, m.get(row, col) + PERTURBATION);
            (LinOp::Dense(m), lambda)
        }
        _ => (LinOp::Dense(random_matrix(rng, n)), LinOp::Dense(random_matrix(rng, n))),
    }
}

fn characterization(phi: &IndexMap, checker: &Checker, rng: &mut ChaCha8Rng) -> Check {
    let sigma = LinOp::shift(phi);
    for k in 0..CHARACTERIZATION_SAMPLES {
        let (psi, lambda) = random_pair(phi, rng, k);
        let by_predicate = checker.psi_lambda(&sigma, &psi, &lambda).map_err(|e| e.to_string())?.holds;
        let by_classifier = classify_psi_lambda_with(phi, &psi, &lambda, checker.options.tolerance)
            .map_err(|e| e.to_string())?
            .is_accept();
        ensure(by_predicate == by_classifier, || {
            format!("sample {k}: predicate says {by_predicate}, classifier says {by_classifier}")
        })?;
    }
    Ok(())
}

fn norm_formula(phi: &IndexMap, rng: &mut ChaCha8Rng) -> Check {
    let bound = fibers(phi).bound as f64;
    for p in [PExponent::Finite(1.0), PExponent::Finite(2.0), PExponent::Finite(3.0), PExponent::Infinity] {
        let norm = shift_operator_norm(phi, p);
        let formula = bound.powf(p.reciprocal());
        ensure((norm - formula).abs() <= 1e-12, || format!("p = {p}: norm {norm} vs N^(1/p) = {formula}"))?;
        let sampled = sampled_norm(phi, p, NORM_ORACLE_SAMPLES, rng);
        ensure(sampled >= norm - 1e-6 && sampled <= norm + 1e-9, || {
            format!("p = {p}: sampled ratio {sampled} vs norm {norm}")
        })?;
    }
    Ok(())
}

/// `max ‖σ_φ x‖_p / ‖x‖_p` over the basis vectors and `samples` random vectors.
pub fn sampled_norm(phi: &IndexMap, p: PExponent, samples: usize, rng: &mut ChaCha8Rng) -> f64 {
    let n = phi.n();
    let ratio = |x: &SeqVector| {
        let image: Vec<Complex64> = phi.image().iter().map(|&b| x[b]).collect();
        crate::seqalg::pnorm_slice(&image, p).expect("nonempty") / x.pnorm(p)
    };
    let from_basis = (0..n).map(|b| ratio(&SeqVector::basis(n, b))).fold(0.0, f64::max);
    (0..samples)
        .map(|_| random_vector(rng, n))
        .filter(|x| x.max_abs() > 0.0)
        .map(|x| ratio(&x))
        .fold(from_basis, f64::max)
}

fn submultiplicativity(seed: u64) -> SubmultiplicativityRow {
    let exponents = vec![
        PExponent::Finite(1.0),
        PExponent::Finite(1.5),
        PExponent::Finite(2.0),
        PExponent::Finite(3.0),
        PExponent::Infinity,
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(mix(seed, &[0x5355_424d]));
    let mut violations = 0;
    for &p in &exponents {
        for _ in 0..SUBMULT_PAIRS {
            let n = rng.gen_range(1..=N_MAX_LIMIT);
            let x = random_vector(&mut rng, n);
            let y = random_vector(&mut rng, n);
            if (&x * &y).pnorm(p) > x.pnorm(p) * y.pnorm(p) + 1e-12 {
                violations += 1;
            }
        }
    }
    SubmultiplicativityRow { pairs: exponents.len() * SUBMULT_PAIRS, exponents, violations, passed: violations == 0 }
}

fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> DenseMatrix {
    let data = (0..n * n).map(|_| Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0))).collect();
    DenseMatrix::from_flat(n, data).expect("n² finite entries")
}

/// SplitMix64 folded over the parts.
fn mix(seed: u64, parts: &[u64]) -> u64 {
    let mut h = seed;
    for &p in parts {
        h ^= p.wrapping_add(0x9e37_79b9_7f4a_7c15).wrapping_add(h << 6).wrapping_add(h >> 2);
        h = h.wrapping_add(0x9e37_79b9_7f4a_7c15);
        h = (h ^ (h >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        h = (h ^ (h >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        h ^= h >> 31;
    }
    h
}

impl VerifyReport {
    /// Plain-text table: one row per property, one column per dimension.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "generalized shift verification  n_max={}  seed={}", self.n_max, self.seed);
        let _ = writeln!(out);
        let width = Property::ALL.iter().map(|p| p.label().len()).max().unwrap_or(0);
        let _ = write!(out, "{:<width$}", "property");
        for n in 1..=self.n_max {
            let _ = write!(out, "  {:>11}", format!("n={n}"));
        }
        let _ = writeln!(out, "  result");
        for row in &self.rows {
            let _ = write!(out, "{:<width$}", row.label);
            for c in &row.cells {
                let mark = if c.exhaustive { "" } else { "~" };
                let _ = write!(out, "  {:>11}", format!("{mark}{}/{}", c.passed, c.maps));
            }
            let _ = writeln!(out, "  {}", if row.passed { "PASS" } else { "FAIL" });
        }
        let s = &self.submultiplicativity;
        let _ = writeln!(
            out,
            "{:<width$}  {} random pairs, {} violations  {}",
            "norm submultiplicativity",
            s.pairs,
            s.violations,
            if s.passed { "PASS" } else { "FAIL" }
        );
        if self.n_max > EXHAUSTIVE_LIMIT {
            let _ = writeln!(out, "\n~ seeded sample of maps (exhaustive up to n={EXHAUSTIVE_LIMIT})");
        }
        for f in &self.failures {
            let _ = writeln!(out, "\nFAIL {}: map {:?}: {}", f.property.label(), f.map.image(), f.detail);
        }
        let _ = writeln!(out, "\noverall: {}", if self.passed { "PASS" } else { "FAIL" });
        out
    }
}
