//! End-to-end acceptance run. Each criterion prints one PASS/FAIL line;
//! run with `--nocapture` to see them.

use std::process::Command;
use std::time::{Duration, Instant};

use genshift::derivcheck::{identities, random_vector, Checker};
use genshift::shiftop::{fibers, shift_operator_norm};
use genshift::structure::{
    classify_psi_lambda, generalized_derivation_feasible, higher_derivation_tail_space, synthesize_pair,
    twisted_derivation_space, Classification,
};
use genshift::{Complex64, DenseMatrix, Flavor, IndexMap, LinOp, PExponent, SeqVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-9;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn maps_up_to(n_max: usize) -> impl Iterator<Item = IndexMap> {
    (1..=n_max).flat_map(IndexMap::all)
}

fn fail<T>(msg: impl Into<String>) -> Result<T, String> {
    Err(msg.into())
}

fn max_modulus_diff(a: &SeqVector, b: &SeqVector) -> f64 {
    a.entries().iter().zip(b.entries()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn half_shift(phi: &IndexMap) -> LinOp {
    LinOp::shift(phi).scaled(Complex64::new(0.5, 0.0))
}

fn random_dense(rng: &mut ChaCha8Rng, n: usize) -> LinOp {
    let data = (0..n * n).map(|_| Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0))).collect();
    LinOp::Dense(DenseMatrix::from_flat(n, data).unwrap())
}

/// Largest `|d(ab) − d(a)ψ(b) − λ(a)d(b)|` over basis pairs and `extra`
/// random pairs, computed straight from operator application.
fn twisted_deviation(d: &LinOp, psi: &LinOp, lambda: &LinOp, rng: &mut ChaCha8Rng, extra: usize) -> f64 {
    let n = d.n();
    let mut inputs: Vec<(SeqVector, SeqVector)> = Vec::new();
    for b in 0..n {
        for c in 0..n {
            inputs.push((SeqVector::basis(n, b), SeqVector::basis(n, c)));
        }
    }
    for _ in 0..extra {
        inputs.push((random_vector(rng, n), random_vector(rng, n)));
    }
    inputs
        .iter()
        .map(|(a, b)| {
            let lhs = d.apply(&(a * b)).unwrap();
            let rhs =
                &(&d.apply(a).unwrap() * &psi.apply(b).unwrap()) + &(&lambda.apply(a).unwrap() * &d.apply(b).unwrap());
            max_modulus_diff(&lhs, &rhs)
        })
        .fold(0.0, f64::max)
}

fn round_trip() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let checker = Checker::default();
    let mut maps = 0;
    let mut worst = 0.0f64;
    for phi in maps_up_to(4) {
        maps += 1;
        let sigma = LinOp::shift(&phi);
        for _ in 0..16 {
            let r = random_vector(&mut rng, phi.n());
            let (psi, lambda) = synthesize_pair(&phi, &r).unwrap();
            if !checker.psi_lambda(&sigma, &psi, &lambda).unwrap().holds {
                return fail(format!("predicate rejects synthesized pair for {:?}", phi.image()));
            }
            let dev = twisted_deviation(&sigma, &psi, &lambda, &mut rng, 4);
            worst = worst.max(dev);
            match classify_psi_lambda(&phi, &psi, &lambda).unwrap() {
                Classification::Accept(found) if max_modulus_diff(&found, &r) <= TOL => {}
                other => return fail(format!("classifier on {:?}: {other:?}", phi.image())),
            }
        }
    }
    let elapsed = start.elapsed();
    if maps != 288 {
        return fail(format!("enumerated {maps} maps"));
    }
    if worst > TOL {
        return fail(format!("max deviation {worst:e}"));
    }
    if elapsed > Duration::from_secs(10) {
        return fail(format!("took {elapsed:?}"));
    }
    Ok(format!("288 maps x 16 r, max deviation {worst:.1e}, {:.2}s", elapsed.as_secs_f64()))
}

fn half_shift_unique() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let checker = Checker::default();
    let mut perturbations = 0;
    for phi in maps_up_to(3) {
        let n = phi.n();
        let sigma = LinOp::shift(&phi);
        let half = half_shift(&phi);
        if !checker.psi(&sigma, &half).unwrap().holds {
            return fail(format!("half shift rejected for {:?}", phi.image()));
        }
        for row in 0..n {
            for col in 0..n {
                let mut m = half.to_dense();
                m.set(row, col, m.get(row, col) + 1e-3);
                perturbations += 1;
                if checker.psi(&sigma, &LinOp::Dense(m)).unwrap().holds {
                    return fail(format!("perturbation ({row},{col}) accepted for {:?}", phi.image()));
                }
            }
        }
        for _ in 0..8 {
            let psi = random_dense(&mut rng, n);
            let coincides = (0..n)
                .flat_map(|a| (0..n).map(move |b| (a, b)))
                .all(|(a, b)| (psi.entry(a, b) - half.entry(a, b)).norm() <= TOL);
            if checker.psi(&sigma, &psi).unwrap().holds != coincides {
                return fail(format!("random psi verdict wrong for {:?}", phi.image()));
            }
        }
    }
    Ok(format!("39 maps, {perturbations} perturbations rejected"))
}

/// `a = 1_{φ(0)}` breaks both Jordan identities for `σ_φ`: at coordinate 0
/// the left side is 1 while the right side is 2 (resp. 3) or 0.
fn indicator_breaks_jordan(phi: &IndexMap) -> bool {
    let n = phi.n();
    let sigma = LinOp::shift(phi);
    let a = SeqVector::basis(n, phi.at(0));
    let (lhs, rhs) = identities::jordan_literal(&sigma, &sigma, &a);
    let (tl, tr) = identities::triple_literal(&sigma, &sigma, &a, &a);
    (lhs[0] - rhs[0]).norm() > 0.5 && (tl[0] - tr[0]).norm() > 0.5
}

fn jordan_impossible() -> Outcome {
    let checker = Checker::default();
    let mut maps = 0;
    for phi in maps_up_to(4) {
        maps += 1;
        let sigma = LinOp::shift(&phi);
        for (name, result) in [("jordan", checker.jordan(&sigma)), ("jordan triple", checker.jordan_triple(&sigma))] {
            let result = result.unwrap();
            let Some(w) = result.witness.filter(|_| !result.holds) else {
                return fail(format!("{name} accepted {:?}", phi.image()));
            };
            let recomputed = max_modulus_diff(&w.lhs, &w.rhs);
            if (recomputed - w.deviation).abs() > 1e-12 || w.deviation <= TOL {
                return fail(format!("{name} witness inconsistent for {:?}", phi.image()));
            }
        }
        if !indicator_breaks_jordan(&phi) {
            return fail(format!("indicator oracle disagrees for {:?}", phi.image()));
        }
    }
    Ok(format!("{maps} maps rejected with witnesses"))
}

fn forced_zero() -> Outcome {
    for phi in maps_up_to(4) {
        let sigma = LinOp::shift(&phi);
        let report = twisted_derivation_space(&sigma, &sigma).unwrap();
        if report.dimension() != 0 || !report.basis.is_empty() {
            return fail(format!("dimension {} for {:?}", report.dimension(), phi.image()));
        }
    }
    Ok("288 maps, dimension 0".into())
}

fn identity_only() -> Outcome {
    let checker = Checker::default();
    let mut feasible_count = 0;
    for phi in maps_up_to(4) {
        for flavor in Flavor::ALL {
            let report = generalized_derivation_feasible(&phi, flavor);
            if report.feasible() != phi.is_identity() {
                return fail(format!("{} feasible={} for {:?}", flavor.name(), report.feasible(), phi.image()));
            }
            if phi.is_identity() {
                feasible_count += 1;
                let Some(d) = report.solution else { return fail("feasible without certificate") };
                if d.to_dense().max_abs() > TOL {
                    return fail(format!("nonzero certificate for n = {}", phi.n()));
                }
                let sigma = LinOp::shift(&phi);
                if !checker.generalized_flavor(&sigma, &LinOp::zero(phi.n()), flavor).unwrap().holds {
                    return fail("identity with zero auxiliary map rejected");
                }
            }
        }
    }
    Ok(format!("288 maps x 3 flavors, {feasible_count} feasible (identities)"))
}

fn higher_tails() -> Outcome {
    for phi in maps_up_to(4) {
        let report = higher_derivation_tail_space(&phi, 3).unwrap();
        if report.dimensions() != vec![0, 0, 0] {
            return fail(format!("dimensions {:?} for {:?}", report.dimensions(), phi.image()));
        }
        let sols = report.solutions();
        if sols.len() != 3 || sols.iter().any(|d| d.to_dense().max_abs() > TOL) {
            return fail(format!("nonzero tail for {:?}", phi.image()));
        }
    }
    Ok("288 maps, dimensions [0, 0, 0]".into())
}

fn naive_pnorm(x: &[Complex64], p: PExponent) -> f64 {
    match p {
        PExponent::Infinity => x.iter().map(|z| z.norm()).fold(0.0, f64::max),
        PExponent::Finite(p) => x.iter().map(|z| z.norm().powf(p)).sum::<f64>().powf(1.0 / p),
    }
}

/// Maximum of `‖σ_φ x‖_p / ‖x‖_p` over the basis and `samples − n` random
/// vectors, some of them supported on a single fiber target.
fn sampled_ratio(phi: &IndexMap, p: PExponent, samples: usize, rng: &mut ChaCha8Rng) -> f64 {
    let n = phi.n();
    let ratio = |x: &[Complex64]| {
        let image: Vec<Complex64> = (0..n).map(|a| x[phi.at(a)]).collect();
        naive_pnorm(&image, p) / naive_pnorm(x, p)
    };
    let mut best = 0.0f64;
    for k in 0..samples {
        let mut x = vec![Complex64::new(0.0, 0.0); n];
        if k < n {
            x[k] = Complex64::new(1.0, 0.0);
        } else if k % 2 == 0 {
            x[rng.gen_range(0..n)] = Complex64::new(rng.gen_range(0.1..2.0), rng.gen_range(-1.0..1.0));
        } else {
            for z in &mut x {
                *z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        if x.iter().any(|z| z.norm() > 0.0) {
            best = best.max(ratio(&x));
        }
    }
    best
}

fn norm_formula() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let exponents = [PExponent::Finite(1.0), PExponent::Finite(2.0), PExponent::Finite(3.0), PExponent::Infinity];
    for _ in 0..50 {
        let n = rng.gen_range(2..=8);
        let image: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
        let mut counts = vec![0usize; n];
        for &b in &image {
            counts[b] += 1;
        }
        let bound = *counts.iter().max().unwrap();
        let phi = IndexMap::new(image).unwrap();
        if fibers(&phi).bound != bound {
            return fail(format!("fiber bound for {:?}", phi.image()));
        }
        for p in exponents {
            let norm = shift_operator_norm(&phi, p);
            let expected = match p {
                PExponent::Infinity => 1.0,
                PExponent::Finite(q) => (bound as f64).powf(1.0 / q),
            };
            if (norm - expected).abs() > 1e-12 {
                return fail(format!("p = {p}: {norm} vs {expected} for {:?}", phi.image()));
            }
            let sampled = sampled_ratio(&phi, p, 10_000, &mut rng);
            if sampled < norm - 1e-6 || sampled > norm + 1e-9 {
                return fail(format!("p = {p}: oracle {sampled} vs norm {norm} for {:?}", phi.image()));
            }
        }
    }
    Ok("50 maps x 4 exponents".into())
}

fn submultiplicativity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let exponents = [
        PExponent::Finite(1.0),
        PExponent::Finite(1.5),
        PExponent::Finite(2.0),
        PExponent::Finite(3.0),
        PExponent::Infinity,
    ];
    let mut worst = f64::NEG_INFINITY;
    for p in exponents {
        for _ in 0..10_000 {
            let n = rng.gen_range(1..=8);
            let x = random_vector(&mut rng, n);
            let y = random_vector(&mut rng, n);
            let lhs = (&x * &y).pnorm(p);
            let rhs = x.pnorm(p) * y.pnorm(p);
            if (lhs - naive_pnorm((&x * &y).entries(), p)).abs() > 1e-12 * (1.0 + lhs) {
                return fail(format!("pnorm disagrees with direct sum at p = {p}"));
            }
            if lhs > rhs + 1e-12 {
                return fail(format!("p = {p}: {lhs} > {rhs}"));
            }
            worst = worst.max(lhs - rhs);
        }
    }
    Ok(format!("50000 pairs, max excess {worst:.2e}"))
}

fn characterization() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let checker = Checker::default();
    let (mut accepted, mut rejected) = (0, 0);
    for phi in maps_up_to(3) {
        let n = phi.n();
        let sigma = LinOp::shift(&phi);
        for k in 0..32 {
            let (psi, lambda) = match k % 4 {
                0 => synthesize_pair(&phi, &random_vector(&mut rng, n)).unwrap(),
                1 => {
                    let (psi, lambda) = synthesize_pair(&phi, &random_vector(&mut rng, n)).unwrap();
                    let mut m = lambda.to_dense();
                    let (row, col) = (rng.gen_range(0..n), rng.gen_range(0..n));
                    m.set(row, col, m.get(row, col) + 1e-3);
                    (psi, LinOp::Dense(m))
                }
                2 => {
                    // a pair sharing one multiplier: ψ = λ = ½σ_φ satisfies the identity too
                    (half_shift(&phi), half_shift(&phi))
                }
                _ => (random_dense(&mut rng, n), random_dense(&mut rng, n)),
            };
            let by_identity = checker.psi_lambda(&sigma, &psi, &lambda).unwrap().holds;
            let by_classifier = classify_psi_lambda(&phi, &psi, &lambda).unwrap().is_accept();
            if by_identity != by_classifier {
                return fail(format!(
                    "sample {k} on {:?}: identity {by_identity}, classifier {by_classifier}",
                    phi.image()
                ));
            }
            if by_identity {
                accepted += 1;
            } else {
                rejected += 1;
            }
        }
    }
    Ok(format!("39 maps x 32 pairs agree ({accepted} accepted, {rejected} rejected)"))
}

fn verify_reproducible() -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_genshift"))
            .args(["verify", "--n-max", "4", "--seed", "0"])
            .output()
            .map_err(|e| e.to_string())
    };
    let first = run()?;
    let second = run()?;
    if first.status.code() != Some(0) {
        return fail(format!("exit {:?}: {}", first.status.code(), String::from_utf8_lossy(&first.stdout)));
    }
    if first.stdout != second.stdout || second.status.code() != Some(0) {
        return fail("reports differ between runs");
    }
    Ok(format!("exit 0, {} identical bytes", first.stdout.len()))
}

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 10] = [
        ("multiplier pair round trip", round_trip),
        ("half shift is the only psi", half_shift_unique),
        ("no Jordan or Jordan triple shift", jordan_impossible),
        ("twisted derivations forced to zero", forced_zero),
        ("generalized shift only for identity", identity_only),
        ("higher derivation tails vanish", higher_tails),
        ("norm formula against sampling", norm_formula),
        ("lp submultiplicativity", submultiplicativity),
        ("classifier agrees with identity", characterization),
        ("verify run reproducible", verify_reproducible),
    ];
    let mut failures = Vec::new();
    for (i, (name, criterion)) in criteria.iter().enumerate() {
        match criterion() {
            Ok(detail) => println!("[{:>2}] PASS  {name}: {detail}", i + 1),
            Err(why) => {
                println!("[{:>2}] FAIL  {name}: {why}", i + 1);
                failures.push(i + 1);
            }
        }
    }
    assert!(failures.is_empty(), "failing criteria: {failures:?}");
}
