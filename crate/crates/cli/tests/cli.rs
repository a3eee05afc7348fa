//! End-to-end runs of the `fibermeasure` binary and file-format round trips.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use fibermeasure::determinize::{determinize_empirical, trivial_hv};
use fibermeasure::quantumgen::{singlet_model, SettingDistribution};
use fibermeasure::sample::{random_empirical, random_hv, Dims};
use fibermeasure_cli::format::{parse, serialize, Model};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn load(name: &str) -> Model {
    parse(&fs::read_to_string(fixture(name)).unwrap()).unwrap()
}

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_fibermeasure")).args(args).output().unwrap();
    Run {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn fixtures_round_trip() {
    for entry in fs::read_dir(fixture("")).unwrap() {
        let path = entry.unwrap().path();
        let m = parse(&fs::read_to_string(&path).unwrap()).unwrap();
        let text = serialize(&m);
        assert_eq!(parse(&text).unwrap(), m, "{}", path.display());
        assert_eq!(serialize(&parse(&text).unwrap()), text);
    }
}

#[test]
fn fixtures_match_their_constructions() {
    let Model::Empirical(pr) = load("pr_box.json") else { panic!() };
    assert_eq!(load("pr_box_singleton.json"), Model::Hidden(trivial_hv(&pr)));
    assert_eq!(load("pr_box_determinized.json"), Model::Hidden(determinize_empirical(&pr)));
    let singlet = singlet_model(&[0.0, 90.0], &[45.0, 135.0], &SettingDistribution::Uniform, 1_000_000).unwrap();
    assert_eq!(load("singlet_chsh.json"), Model::Empirical(singlet));
    let exact = singlet_model(&[0.0, 120.0], &[60.0, 180.0], &SettingDistribution::Uniform, 1_000_000).unwrap();
    assert_eq!(load("singlet_exact.json"), Model::Empirical(exact.clone()));
    assert_eq!(load("singlet_singleton.json"), Model::Hidden(trivial_hv(&exact)));
}

#[test]
fn check_exit_codes() {
    let r = run(&["check", path_str(&fixture("pr_box_singleton.json")), "--property", "lambda"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.starts_with("λ-independence: holds"));

    let r = run(&["check", path_str(&fixture("pr_box_singleton.json")), "--property", "locality"]);
    assert_eq!(r.code, 1);
    assert!(r.stdout.contains("at (xa=0, xb=0, ya=0, yb=0, lam=0): lhs 1/2 ≠ rhs 1/4"), "{}", r.stdout);

    let r = run(&["check", path_str(&fixture("pr_box.json"))]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("hidden-variable model"));

    let r = run(&["check", path_str(&fixture("pr_box_singleton.json")), "--property", "nonsense"]);
    assert_eq!(r.code, 2);
    let r = run(&["check", "/nonexistent/model.json"]);
    assert_eq!(r.code, 2);
}

#[test]
fn check_json_report() {
    let r = run(&["check", path_str(&fixture("signaling.json")), "--json"]);
    assert_eq!(r.code, 1);
    let v: Value = serde_json::from_str(&r.stdout).unwrap();
    let reports = v["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 6);
    assert_eq!(reports[1]["property"], "pi");
    assert_eq!(reports[1]["holds"], false);
    assert_eq!(reports[1]["witness"]["lhs"], "1/1");
    assert_eq!(reports[1]["witness"]["rhs"], "1/2");
    assert_eq!(reports[1]["witness"]["atom"]["yb"], "0");
    assert_eq!(reports[2]["holds"], true);
    assert!(reports[2]["witness"].is_null());
}

#[test]
fn malformed_files_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(fixture("pr_box_singleton.json")).unwrap();
    let cases = [
        ("zero_den.json", text.replacen("\"1/8\"", "\"1/0\"", 1), "weights[0].p"),
        ("short.json", text.replacen("\"1/8\"", "\"1/16\"", 1), "not 1"),
        ("syntax.json", text.replacen('}', "", 1), "line"),
    ];
    for (name, body, needle) in cases {
        let path = dir.path().join(name);
        fs::write(&path, body).unwrap();
        let r = run(&["check", path_str(&path)]);
        assert_eq!(r.code, 2, "{name}");
        assert!(r.stderr.contains(needle), "{name}: {}", r.stderr);
    }
}

#[test]
fn determinize_pipelines() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["pr_box.json", "singlet_chsh.json", "signaling.json", "fair_coins.json"] {
        let out = dir.path().join(format!("det_{name}"));
        let r = run(&["determinize", path_str(&fixture(name)), "--method", "empirical", "--out", path_str(&out)]);
        assert_eq!(r.code, 0, "{name}: {}", r.stderr);
        assert!(r.stdout.contains("strong determinism: yes"));
        let written = fs::read_to_string(&out).unwrap();
        assert_eq!(serialize(&parse(&written).unwrap()), written);
        let r = run(&["check", path_str(&out), "--property", "strongdet"]);
        assert_eq!(r.code, 0);
    }

    let out = dir.path().join("local.json");
    let r = run(&["determinize", path_str(&fixture("fair_coins.json")), "--method", "local", "--out", path_str(&out)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let Model::Hidden(p) = parse(&fs::read_to_string(&out).unwrap()).unwrap() else { panic!() };
    assert_eq!(
        p.space("lam").atoms(),
        &["0|a[0,1/2)|b[0,1/2)", "0|a[0,1/2)|b[1/2,1]", "0|a[1/2,1]|b[0,1/2)", "0|a[1/2,1]|b[1/2,1]"]
    );
    assert_eq!(run(&["check", path_str(&out), "--property", "strongdet"]).code, 0);
    assert_eq!(run(&["check", path_str(&out), "--property", "lambda"]).code, 0);

    let r = run(&[
        "determinize",
        path_str(&fixture("pr_box_singleton.json")),
        "--method",
        "local",
        "--out",
        path_str(&out),
    ]);
    assert_eq!(r.code, 1);
    assert!(r.stdout.contains("locality: FAILS"));
    let r = run(&["determinize", path_str(&fixture("pr_box.json")), "--method", "local", "--out", path_str(&out)]);
    assert_eq!(r.code, 2);
}

#[test]
fn realizability_and_chsh() {
    let r = run(&["realizability", path_str(&fixture("pr_box.json"))]);
    assert_eq!(r.code, 1);
    assert!(r.stdout.starts_with("INFEASIBLE\nclassical bound: 2/1\nachieved value: 4/1\n"), "{}", r.stdout);

    let r = run(&["realizability", path_str(&fixture("strategy.json")), "--json"]);
    assert_eq!(r.code, 0);
    let v: Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["feasible"], true);
    assert_eq!(v["weights"][0]["strategy"], "a(1,0)b(1,1)");
    assert_eq!(v["weights"][0]["p"], "1/1");

    let r = run(&["chsh", path_str(&fixture("pr_box.json")), "--json"]);
    assert_eq!(r.code, 0);
    let v: Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["chsh"], "4/1");

    let r = run(&["chsh", path_str(&fixture("signaling.json"))]);
    assert_eq!(r.code, 0);
    let r = run(&["chsh", path_str(&fixture("pr_box_determinized.json"))]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("CHSH S = 4/1"));
}

#[test]
fn generate_pipelines() {
    let dir = tempfile::tempdir().unwrap();
    let chsh = dir.path().join("chsh.json");
    let r = run(&["generate", "singlet", "--angles-a", "0,90", "--angles-b", "45,135", "--out", path_str(&chsh)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("CHSH S ="));
    assert_eq!(run(&["realizability", path_str(&chsh)]).code, 1);

    let optimal = dir.path().join("optimal.json");
    let r = run(&[
        "generate",
        "singlet",
        "--angles-a",
        "0,90",
        "--angles-b",
        "45,-45",
        "--out",
        path_str(&optimal),
        "--json",
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v: Value = serde_json::from_str(&r.stdout).unwrap();
    let s: fibermeasure::Rational = v["chsh"].as_str().unwrap().parse().unwrap();
    assert!((s.to_f64().abs() - 2.0 * std::f64::consts::SQRT_2).abs() < 1e-9);

    let same = dir.path().join("same.json");
    assert_eq!(run(&["generate", "singlet", "--angles-a", "0", "--angles-b", "0", "--out", path_str(&same)]).code, 0);
    let Model::Empirical(e) = parse(&fs::read_to_string(&same).unwrap()).unwrap() else { panic!() };
    let half = fibermeasure::Rational::new(1, 2).unwrap();
    assert_eq!(e.measure().weight(&[0, 1, 0, 0]), half);
    assert_eq!(e.measure().weight(&[1, 0, 0, 0]), half);

    let ortho = dir.path().join("ortho.json");
    assert_eq!(run(&["generate", "singlet", "--angles-a", "0", "--angles-b", "90", "--out", path_str(&ortho)]).code, 0);
    let Model::Empirical(e) = parse(&fs::read_to_string(&ortho).unwrap()).unwrap() else { panic!() };
    assert!(e.measure().weights().values().all(|w| *w == fibermeasure::Rational::new(1, 4).unwrap()));

    for bad in ["0,x", "", "0,0"] {
        let r = run(&["generate", "singlet", "--angles-a", bad, "--angles-b", "0", "--out", path_str(&same)]);
        assert_eq!(r.code, 2, "{bad:?}");
    }
}

#[test]
fn verify_reports_consistency() {
    for name in ["pr_box_singleton.json", "signaling.json", "fair_coins.json", "pr_box.json"] {
        let r = run(&["verify", path_str(&fixture(name)), "--json"]);
        assert_eq!(r.code, 0, "{name}");
        let v: Value = serde_json::from_str(&r.stdout).unwrap();
        assert_eq!(v["consistent"], true);
        assert_eq!(v["cross_checks"].as_array().unwrap().len(), 6);
        assert_eq!(v["relationships"].as_array().unwrap().len(), 5);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn random_models_round_trip(seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = if seed % 2 == 0 {
            Model::Hidden(random_hv(&mut rng, 3))
        } else {
            let dims = Dims::random(&mut rng, 3);
            Model::Empirical(random_empirical(&mut rng, dims, 0.3))
        };
        let text = serialize(&m);
        prop_assert_eq!(parse(&text).unwrap(), m);
    }
}
