//! Command-line front end.
//!
//! Exit codes: 0 the property holds, 1 it fails, 2 unreadable or malformed
//! input, 3 well-formed input that makes no sense (bad map, wrong arity,
//! auxiliary operator of the wrong kind).

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::derivcheck::{CheckOptions, CheckResult, Checker, Flavor};
use crate::error::Error;
use crate::seqalg::{PExponent, SeqVector};
use crate::shiftop::{fibers, shift_operator_norm, IndexMap, LinOp};
use crate::structure::{
    classify_psi_lambda_with, generalized_derivation_feasible, higher_tail_space_with_flavor, synthesize_pair,
    twisted_derivation_space, Classification, SolveReport,
};
use crate::tolerance::DEFAULT_TOLERANCE;
use crate::verify::{self, VerifyConfig};
use crate::wire;

pub const EXIT_OK: i32 = 0;
pub const EXIT_PROPERTY_FAILS: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_SEMANTIC: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "genshift", version, about = "Generalized shift operators and their derivation identities")]
pub struct Cli {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    pub output: OutputFormat,

    /// Override the 1e-9 equality tolerance.
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,

    /// Seed for random guards and sampled maps.
    #[arg(long, global = true, env = "GENSHIFT_SEED", default_value_t = 0)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fibers, injectivity/surjectivity and operator norms of a map.
    Analyze {
        #[arg(long)]
        phi: PathBuf,
        /// Comma-separated exponents, e.g. `1,2,inf`.
        #[arg(long, value_delimiter = ',', default_value = "1,2,inf")]
        p: Vec<String>,
    },
    /// Decide a derivation identity for operators read from files.
    Check(CheckArgs),
    /// Build the pair (r·σ_φ, (1-r)·σ_φ).
    Synth {
        #[arg(long)]
        phi: PathBuf,
        #[arg(long)]
        r: PathBuf,
    },
    /// Decide whether σ_φ is a (ψ,λ)-derivation by recovering r.
    Classify {
        #[arg(long)]
        phi: PathBuf,
        #[arg(long)]
        psi: PathBuf,
        #[arg(long)]
        lambda: PathBuf,
    },
    /// Solve the linear systems for twisted, generalized or higher derivations.
    Solve(SolveArgs),
    /// Run the full property suite over all small maps.
    Verify {
        #[arg(long, default_value_t = 4)]
        n_max: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckFlavor {
    Derivation,
    Jordan,
    JordanTriple,
    Psi,
    PsiLambda,
    Generalized,
    GeneralizedJordan,
    GeneralizedJordanTriple,
    Higher,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FlavorArg {
    Plain,
    Jordan,
    JordanTriple,
}

impl From<FlavorArg> for Flavor {
    fn from(f: FlavorArg) -> Self {
        match f {
            FlavorArg::Plain => Flavor::Plain,
            FlavorArg::Jordan => Flavor::Jordan,
            FlavorArg::JordanTriple => Flavor::JordanTriple,
        }
    }
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long, value_enum)]
    pub flavor: CheckFlavor,
    /// Operator under test; repeat for the levels of a higher derivation.
    #[arg(long = "d")]
    pub d: Vec<PathBuf>,
    /// Main operator of a generalized derivation.
    #[arg(long = "D")]
    pub big_d: Option<PathBuf>,
    #[arg(long)]
    pub psi: Option<PathBuf>,
    #[arg(long)]
    pub lambda: Option<PathBuf>,
    /// Identity checked at each level of a higher derivation.
    #[arg(long, value_enum, default_value_t = FlavorArg::Plain)]
    pub higher_flavor: FlavorArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolveMode {
    Twisted,
    Generalized,
    Higher,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long, value_enum)]
    pub mode: SolveMode,
    #[arg(long)]
    pub phi: Option<PathBuf>,
    /// Twisted mode: ψ (defaults to σ_φ).
    #[arg(long)]
    pub psi: Option<PathBuf>,
    /// Twisted mode: λ (defaults to σ_φ).
    #[arg(long)]
    pub lambda: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FlavorArg::Plain)]
    pub flavor: FlavorArg,
    /// Higher mode: number of levels above d₀.
    #[arg(long, default_value_t = 3)]
    pub depth: usize,
}

/// A failure that ends the command with a specific exit code.
#[derive(Debug)]
struct Abort {
    code: i32,
    message: String,
}

impl From<Error> for Abort {
    fn from(err: Error) -> Self {
        let code = match err {
            Error::Parse(_) => EXIT_PARSE,
            _ => EXIT_SEMANTIC,
        };
        Abort { code, message: err.to_string() }
    }
}

fn semantic(message: impl Into<String>) -> Abort {
    Abort { code: EXIT_SEMANTIC, message: message.into() }
}

type Outcome = std::result::Result<i32, Abort>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(abort) => {
            let _ = writeln!(err, "error: {}", abort.message);
            abort.code
        }
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Outcome {
    let tolerance = match cli.tolerance {
        Some(t) if !(t.is_finite() && t > 0.0) => return Err(semantic("tolerance must be positive")),
        Some(t) => t,
        None => DEFAULT_TOLERANCE,
    };
    let ctx = Context { format: cli.output, tolerance, seed: cli.seed };
    match &cli.command {
        Command::Analyze { phi, p } => ctx.analyze(phi, p, out),
        Command::Check(args) => ctx.check(args, out),
        Command::Synth { phi, r } => ctx.synth(phi, r, out),
        Command::Classify { phi, psi, lambda } => ctx.classify(phi, psi, lambda, out),
        Command::Solve(args) => ctx.solve(args, out),
        Command::Verify { n_max } => ctx.verify(*n_max, out),
    }
}

struct Context {
    format: OutputFormat,
    tolerance: f64,
    seed: u64,
}

fn read(path: &Path) -> std::result::Result<String, Abort> {
    std::fs::read_to_string(path).map_err(|e| Abort { code: EXIT_PARSE, message: format!("{}: {e}", path.display()) })
}

fn load_map(path: &Path) -> std::result::Result<IndexMap, Abort> {
    Ok(wire::parse_index_map(&read(path)?)?)
}

fn load_op(path: &Path) -> std::result::Result<LinOp, Abort> {
    Ok(wire::parse_linop(&read(path)?)?)
}

fn load_vector(path: &Path) -> std::result::Result<SeqVector, Abort> {
    Ok(wire::parse_vector(&read(path)?)?)
}

fn io(e: std::io::Error) -> Abort {
    Abort { code: EXIT_SEMANTIC, message: format!("cannot write report: {e}") }
}

impl Context {
    fn checker(&self) -> Checker {
        Checker::new(CheckOptions { tolerance: self.tolerance, seed: self.seed, ..CheckOptions::default() })
    }

    fn emit_json<T: Serialize>(&self, value: &T, out: &mut dyn Write) -> std::result::Result<(), Abort> {
        let text = serde_json::to_string_pretty(value).map_err(|e| semantic(e.to_string()))?;
        writeln!(out, "{text}").map_err(io)
    }

    fn analyze(&self, phi_path: &Path, ps: &[String], out: &mut dyn Write) -> Outcome {
        let phi = load_map(phi_path)?;
        let exponents = ps
            .iter()
            .map(|s| s.parse::<PExponent>())
            .collect::<crate::Result<Vec<_>>>()
            .map_err(|e| semantic(e.to_string()))?;
        let report = fibers(&phi);
        let norms: Vec<(PExponent, f64)> = exponents.iter().map(|&p| (p, shift_operator_norm(&phi, p))).collect();
        match self.format {
            OutputFormat::Json => {
                let norms: Vec<_> = norms.iter().map(|(p, v)| json!({ "p": p, "norm": v })).collect();
                self.emit_json(
                    &json!({
                        "n": phi.n(),
                        "map": phi.image(),
                        "fibers": report,
                        "injective": phi.is_injective(),
                        "surjective": phi.is_surjective(),
                        "norms": norms,
                    }),
                    out,
                )?;
            }
            OutputFormat::Text => {
                let mut text = format!(
                    "n            {}\nmap          {:?}\nfiber sizes  {:?}\nbound N      {}\nempty fibers {:?}\ninjective    {}\nsurjective   {}\n",
                    phi.n(),
                    phi.image(),
                    report.sizes,
                    report.bound,
                    report.empty_fibers,
                    phi.is_injective(),
                    phi.is_surjective(),
                );
                for (p, v) in &norms {
                    text.push_str(&format!("norm p={p:<5}  {v:.8}\n"));
                }
                out.write_all(text.as_bytes()).map_err(io)?;
            }
        }
        Ok(EXIT_OK)
    }

    fn check(&self, args: &CheckArgs, out: &mut dyn Write) -> Outcome {
        let checker = self.checker();
        let single_d = || -> std::result::Result<LinOp, Abort> {
            match args.d.as_slice() {
                [one] => load_op(one),
                [] => Err(semantic("--d is required")),
                _ => Err(semantic("--d may be given more than once only for --flavor higher")),
            }
        };
        let required = |opt: &Option<PathBuf>, name: &str| -> std::result::Result<LinOp, Abort> {
            match opt {
                Some(p) => load_op(p),
                None => Err(semantic(format!("--flavor {:?} needs --{name}", args.flavor))),
            }
        };
        let forbid = |opt: &Option<PathBuf>, name: &str| -> std::result::Result<(), Abort> {
            match opt {
                Some(_) => Err(semantic(format!("--{name} does not apply to --flavor {:?}", args.flavor))),
                None => Ok(()),
            }
        };
        use CheckFlavor as F;
        let result: CheckResult = match args.flavor {
            F::Derivation | F::Jordan | F::JordanTriple => {
                forbid(&args.psi, "psi")?;
                forbid(&args.lambda, "lambda")?;
                forbid(&args.big_d, "D")?;
                let d = single_d()?;
                match args.flavor {
                    F::Derivation => checker.derivation(&d)?,
                    F::Jordan => checker.jordan(&d)?,
                    _ => checker.jordan_triple(&d)?,
                }
            }
            F::Psi => {
                forbid(&args.lambda, "lambda")?;
                forbid(&args.big_d, "D")?;
                checker.psi(&single_d()?, &required(&args.psi, "psi")?)?
            }
            F::PsiLambda => {
                forbid(&args.big_d, "D")?;
                let d = single_d()?;
                checker.psi_lambda(&d, &required(&args.psi, "psi")?, &required(&args.lambda, "lambda")?)?
            }
            F::Generalized | F::GeneralizedJordan | F::GeneralizedJordanTriple => {
                forbid(&args.psi, "psi")?;
                forbid(&args.lambda, "lambda")?;
                let big_d = required(&args.big_d, "D")?;
                let d = single_d()?;
                let flavor = match args.flavor {
                    F::Generalized => Flavor::Plain,
                    F::GeneralizedJordan => Flavor::Jordan,
                    _ => Flavor::JordanTriple,
                };
                checker.generalized_flavor(&big_d, &d, flavor)?
            }
            F::Higher => {
                forbid(&args.psi, "psi")?;
                forbid(&args.lambda, "lambda")?;
                forbid(&args.big_d, "D")?;
                if args.d.is_empty() {
                    return Err(semantic("--flavor higher needs at least one --d"));
                }
                let ds = args.d.iter().map(|p| load_op(p)).collect::<std::result::Result<Vec<_>, _>>()?;
                checker.higher(&ds, args.higher_flavor.into())?
            }
        };
        match self.format {
            OutputFormat::Json => self.emit_json(&result, out)?,
            OutputFormat::Text => {
                let mut text = format!("{}\n", if result.holds { "holds" } else { "fails" });
                if let Some(w) = &result.witness {
                    text.push_str(&format!("witness    {}\n", w.context));
                    text.push_str(&format!("lhs        {}\n", vector_text(&w.lhs)));
                    text.push_str(&format!("rhs        {}\n", vector_text(&w.rhs)));
                    text.push_str(&format!("deviation  {:e}\n", w.deviation));
                }
                out.write_all(text.as_bytes()).map_err(io)?;
            }
        }
        Ok(if result.holds { EXIT_OK } else { EXIT_PROPERTY_FAILS })
    }

    fn synth(&self, phi: &Path, r: &Path, out: &mut dyn Write) -> Outcome {
        let phi = load_map(phi)?;
        let r = load_vector(r)?;
        let (psi, lambda) = synthesize_pair(&phi, &r)?;
        let check = self.checker().psi_lambda(&LinOp::shift(&phi), &psi, &lambda)?;
        match self.format {
            OutputFormat::Json => self.emit_json(&json!({ "psi": psi, "lambda": lambda, "check": check }), out)?,
            OutputFormat::Text => {
                let text = format!(
                    "psi     {}\nlambda  {}\ncheck   {}\n",
                    serde_json::to_string(&psi).map_err(|e| semantic(e.to_string()))?,
                    serde_json::to_string(&lambda).map_err(|e| semantic(e.to_string()))?,
                    if check.holds { "holds" } else { "fails" },
                );
                out.write_all(text.as_bytes()).map_err(io)?;
            }
        }
        Ok(if check.holds { EXIT_OK } else { EXIT_PROPERTY_FAILS })
    }

    fn classify(&self, phi: &Path, psi: &Path, lambda: &Path, out: &mut dyn Write) -> Outcome {
        let phi = load_map(phi)?;
        let psi = load_op(psi)?;
        let lambda = load_op(lambda)?;
        let verdict = classify_psi_lambda_with(&phi, &psi, &lambda, self.tolerance)?;
        match self.format {
            OutputFormat::Json => self.emit_json(&verdict, out)?,
            OutputFormat::Text => {
                let text = match &verdict {
                    Classification::Accept(r) => format!("accept\nr  {}\n", vector_text(r)),
                    Classification::Reject(dev) => format!(
                        "reject\n{:?} entry ({}, {}): expected {:?}, found {:?}\n",
                        dev.operator, dev.row, dev.col, dev.expected, dev.found
                    ),
                };
                out.write_all(text.as_bytes()).map_err(io)?;
            }
        }
        Ok(if verdict.is_accept() { EXIT_OK } else { EXIT_PROPERTY_FAILS })
    }

    fn solve(&self, args: &SolveArgs, out: &mut dyn Write) -> Outcome {
        let phi = args.phi.as_deref().map(load_map).transpose()?;
        let need_phi = || phi.clone().ok_or_else(|| semantic("--phi is required for this mode"));
        match args.mode {
            SolveMode::Twisted => {
                let psi = match (&args.psi, &phi) {
                    (Some(p), _) => load_op(p)?,
                    (None, Some(phi)) => LinOp::shift(phi),
                    (None, None) => return Err(semantic("twisted mode needs --phi or both --psi and --lambda")),
                };
                let lambda = match (&args.lambda, &phi) {
                    (Some(p), _) => load_op(p)?,
                    (None, Some(phi)) => LinOp::shift(phi),
                    (None, None) => return Err(semantic("twisted mode needs --phi or both --psi and --lambda")),
                };
                let report = twisted_derivation_space(&psi, &lambda)?;
                self.emit_solve("twisted derivation space", &report, out)?;
            }
            SolveMode::Generalized => {
                let phi = need_phi()?;
                let report = generalized_derivation_feasible(&phi, args.flavor.into());
                let title = format!("generalized {} derivation with D = shift", Flavor::from(args.flavor));
                self.emit_solve(&title, &report, out)?;
            }
            SolveMode::Higher => {
                let phi = need_phi()?;
                let report = higher_tail_space_with_flavor(&phi, args.depth, args.flavor.into())?;
                match self.format {
                    OutputFormat::Json => self.emit_json(&report, out)?,
                    OutputFormat::Text => {
                        let mut text = format!("higher {} derivation tails with d0 = shift\n", report.flavor);
                        for (k, level) in report.levels.iter().enumerate() {
                            let size = level.solution.as_ref().map(|d| d.to_dense().max_abs());
                            text.push_str(&format!(
                                "level {}  dimension {}  solution {}\n",
                                k + 1,
                                level.dimension(),
                                match size {
                                    Some(0.0) => "zero".to_string(),
                                    Some(s) => format!("max entry {s:e}"),
                                    None => "inconsistent".to_string(),
                                }
                            ));
                        }
                        out.write_all(text.as_bytes()).map_err(io)?;
                    }
                }
            }
        }
        Ok(EXIT_OK)
    }

    fn emit_solve(&self, title: &str, report: &SolveReport, out: &mut dyn Write) -> std::result::Result<(), Abort> {
        match self.format {
            OutputFormat::Json => self.emit_json(report, out),
            OutputFormat::Text => {
                let mut text = format!("{title}\n");
                match report.outcome {
                    crate::structure::Outcome::Dimension(d) => text.push_str(&format!("dimension  {d}\n")),
                    crate::structure::Outcome::Feasible(f) => text.push_str(&format!("feasible   {f}\n")),
                }
                if let Some(d) = &report.solution {
                    text.push_str(&format!(
                        "solution   {}\n",
                        serde_json::to_string(d).map_err(|e| semantic(e.to_string()))?
                    ));
                }
                text.push_str(&format!("basis size {}\nresidual   {:e}\n", report.basis.len(), report.residual));
                out.write_all(text.as_bytes()).map_err(io)
            }
        }
    }

    fn verify(&self, n_max: usize, out: &mut dyn Write) -> Outcome {
        let config = VerifyConfig { n_max, seed: self.seed, tolerance: self.tolerance };
        let report = verify::run(&config)?;
        match self.format {
            OutputFormat::Json => self.emit_json(&report, out)?,
            OutputFormat::Text => out.write_all(report.to_text().as_bytes()).map_err(io)?,
        }
        Ok(if report.passed { EXIT_OK } else { EXIT_PROPERTY_FAILS })
    }
}

fn vector_text(v: &SeqVector) -> String {
    let parts: Vec<String> = v
        .entries()
        .iter()
        .map(|z| if z.im == 0.0 { format!("{}", z.re) } else { format!("{}{:+}i", z.re, z.im) })
        .collect();
    format!("({})", parts.join(", "))
}
