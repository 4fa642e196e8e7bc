use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

struct Scratch(PathBuf);

impl Scratch {
    fn new(name: &str) -> Self {
        let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(format!("cli-{name}"));
        let _ = std::fs::remove_dir_all(&dir);
        std::fs::create_dir_all(&dir).unwrap();
        Scratch(dir)
    }

    fn file(&self, name: &str, contents: &str) -> String {
        let path = self.0.join(name);
        std::fs::write(&path, contents).unwrap();
        path.to_string_lossy().into_owned()
    }
}

fn genshift(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_genshift")).args(args).env_remove("GENSHIFT_SEED").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const SHIFT3: &str = r#"{"n":3,"r":[1,1,1],"phi":[1,2,0]}"#;
const HALF3: &str = r#"{"n":3,"r":[0.5,0.5,0.5],"phi":[1,2,0]}"#;
const ZERO2: &str = r#"{"n":2,"dense":[[0,0],[0,0]]}"#;

#[test]
fn analyze_reports_fibers_and_norms() {
    let s = Scratch::new("analyze");
    let phi = s.file("phi.json", r#"{"n":3,"map":[0,0,1]}"#);
    let o = genshift(&["--output", "json", "analyze", "--phi", &phi, "--p", "1,2,inf"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["fibers"]["bound"], 2);
    assert_eq!(v["fibers"]["empty_fibers"], serde_json::json!([2]));
    let norms: Vec<f64> = v["norms"].as_array().unwrap().iter().map(|x| x["norm"].as_f64().unwrap()).collect();
    for (got, want) in norms.iter().zip([2.0, std::f64::consts::SQRT_2, 1.0]) {
        assert!((got - want).abs() < 1e-8, "{got} vs {want}");
    }
    assert_eq!(v["norms"][2]["p"], "inf");

    let text = genshift(&["analyze", "--phi", &phi]);
    assert_eq!(text.status.code(), Some(0));
    assert!(stdout(&text).contains("bound N      2"));

    let id = s.file("id.json", r#"{"n":1,"map":[0]}"#);
    let v: Value = serde_json::from_str(&stdout(&genshift(&["--output", "json", "analyze", "--phi", &id]))).unwrap();
    assert!(v["norms"].as_array().unwrap().iter().all(|x| x["norm"] == 1.0));
}

#[test]
fn exit_codes() {
    let s = Scratch::new("exit");
    let broken = s.file("broken.json", r#"{"n":3,"map":[0,0"#);
    let out_of_range = s.file("oor.json", r#"{"n":3,"map":[0,0,7]}"#);
    assert_eq!(genshift(&["analyze", "--phi", &broken]).status.code(), Some(2));
    assert_eq!(genshift(&["analyze", "--phi", &out_of_range]).status.code(), Some(3));
    assert_eq!(genshift(&["analyze", "--phi", "/nonexistent/phi.json"]).status.code(), Some(2));
    assert_eq!(genshift(&["frobnicate"]).status.code(), Some(2));
    let ok = s.file("ok.json", r#"{"n":2,"map":[0,1]}"#);
    assert_eq!(genshift(&["analyze", "--phi", &ok, "--p", "0.5"]).status.code(), Some(3));

    // flavor/arity mismatch
    let d = s.file("d.json", SHIFT3);
    assert_eq!(genshift(&["check", "--flavor", "psi", "--d", &d]).status.code(), Some(3));
    assert_eq!(genshift(&["check", "--flavor", "jordan", "--d", &d, "--psi", &d]).status.code(), Some(3));
    assert_eq!(genshift(&["check", "--flavor", "jordan", "--d", &d, "--d", &d]).status.code(), Some(3));
    let zero = s.file("zero.json", ZERO2);
    assert_eq!(genshift(&["check", "--flavor", "psi", "--d", &d, "--psi", &zero]).status.code(), Some(3));
}

#[test]
fn check_examples() {
    let s = Scratch::new("check");
    let zero = s.file("zero.json", ZERO2);
    assert_eq!(genshift(&["check", "--flavor", "derivation", "--d", &zero]).status.code(), Some(0));

    let sigma = s.file("sigma.json", SHIFT3);
    let o = genshift(&["--output", "json", "check", "--flavor", "jordan", "--d", &sigma]);
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["holds"], false);
    assert!(v["witness"]["deviation"].as_f64().unwrap() > 0.5);

    let half = s.file("half.json", HALF3);
    let o = genshift(&["check", "--flavor", "psi-lambda", "--d", &sigma, "--psi", &half, "--lambda", &half]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "holds\n");

    assert_eq!(genshift(&["check", "--flavor", "psi", "--d", &sigma, "--psi", &half]).status.code(), Some(0));
    assert_eq!(genshift(&["check", "--flavor", "psi", "--d", &sigma, "--psi", &sigma]).status.code(), Some(1));
}

#[test]
fn generalized_check_requires_a_derivation() {
    let s = Scratch::new("generalized");
    let id = s.file("id.json", r#"{"n":2,"r":[1,1],"phi":[0,1]}"#);
    let zero = s.file("zero.json", ZERO2);
    assert_eq!(genshift(&["check", "--flavor", "generalized", "--D", &id, "--d", &zero]).status.code(), Some(0));
    let o = genshift(&["check", "--flavor", "generalized", "--D", &id, "--d", &id]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("derivation"));
    let higher = genshift(&["check", "--flavor", "higher", "--d", &id, "--d", &zero]);
    assert_eq!(higher.status.code(), Some(0));
}

#[test]
fn synth_then_classify_round_trip() {
    let s = Scratch::new("synth");
    let phi = s.file("phi.json", r#"{"n":2,"map":[1,0]}"#);
    let r = s.file("r.json", "[2, -1]");
    let o = genshift(&["--output", "json", "synth", "--phi", &phi, "--r", &r]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["check"]["holds"], true);
    assert_eq!(v["lambda"]["r"], serde_json::json!([[-1.0, 0.0], [2.0, 0.0]]));

    let psi = s.file("psi.json", &v["psi"].to_string());
    let lambda = s.file("lambda.json", &v["lambda"].to_string());
    let o = genshift(&["--output", "json", "classify", "--phi", &phi, "--psi", &psi, "--lambda", &lambda]);
    assert_eq!(o.status.code(), Some(0));
    let verdict: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(verdict["accept"], serde_json::json!([[2.0, 0.0], [-1.0, 0.0]]));

    let o = genshift(&["classify", "--phi", &phi, "--psi", &psi, "--lambda", &psi]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("reject"));
}

#[test]
fn solve_modes() {
    let s = Scratch::new("solve");
    let phi = s.file("phi.json", r#"{"n":2,"map":[0,0]}"#);
    let id = s.file("id.json", r#"{"n":2,"map":[0,1]}"#);

    let v: Value =
        serde_json::from_str(&stdout(&genshift(&["--output", "json", "solve", "--mode", "twisted", "--phi", &phi])))
            .unwrap();
    assert_eq!(v["dimension"], 0);

    let o = genshift(&["--output", "json", "solve", "--mode", "generalized", "--phi", &phi]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(serde_json::from_str::<Value>(&stdout(&o)).unwrap()["feasible"], false);
    let o =
        genshift(&["--output", "json", "solve", "--mode", "generalized", "--phi", &id, "--flavor", "jordan-triple"]);
    assert_eq!(serde_json::from_str::<Value>(&stdout(&o)).unwrap()["feasible"], true);

    let o = genshift(&["solve", "--mode", "higher", "--phi", &phi, "--depth", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "higher plain derivation tails with d0 = shift\nlevel 1  dimension 0  solution zero\nlevel 2  dimension 0  solution zero\n"
    );
    assert_eq!(genshift(&["solve", "--mode", "generalized"]).status.code(), Some(3));
}

#[test]
fn verify_small_and_seed_sources() {
    let o = genshift(&["verify", "--n-max", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("seed=0"));

    let env = Command::new(env!("CARGO_BIN_EXE_genshift"))
        .args(["verify", "--n-max", "2"])
        .env("GENSHIFT_SEED", "11")
        .output()
        .unwrap();
    assert!(stdout(&env).contains("seed=11"));
    let flag = Command::new(env!("CARGO_BIN_EXE_genshift"))
        .args(["verify", "--n-max", "2", "--seed", "5"])
        .env("GENSHIFT_SEED", "11")
        .output()
        .unwrap();
    assert!(stdout(&flag).contains("seed=5"));

    let json: Value =
        serde_json::from_str(&stdout(&genshift(&["--output", "json", "verify", "--n-max", "1"]))).unwrap();
    assert_eq!(json["passed"], true);
    assert_eq!(genshift(&["verify", "--n-max", "0"]).status.code(), Some(3));
}

#[test]
fn tolerance_override_is_applied() {
    let s = Scratch::new("tolerance");
    let sigma = s.file("sigma.json", SHIFT3);
    let nearly = s.file("nearly.json", r#"{"n":3,"r":[0.5000001,0.5,0.5],"phi":[1,2,0]}"#);
    assert_eq!(genshift(&["check", "--flavor", "psi", "--d", &sigma, "--psi", &nearly]).status.code(), Some(1));
    assert_eq!(
        genshift(&["--tolerance", "1e-5", "check", "--flavor", "psi", "--d", &sigma, "--psi", &nearly]).status.code(),
        Some(0)
    );
}
