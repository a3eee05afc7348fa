//! The subcommands, as functions from arguments to printed output and exit code.
//!
//! Exit codes: 0 when everything asked about holds (or the operation
//! succeeded), 1 when a property, precondition or realizability check fails,
//! 2 on input errors.

use std::fs;
use std::path::Path;

use fibermeasure::determinize::{determinize_empirical, determinize_local};
use fibermeasure::models::{equivalent, realizes, LAM};
use fibermeasure::properties::{check, check_all, cross_check, relationships};
use fibermeasure::quantumgen::{singlet_model, SettingDistribution};
use fibermeasure::realizability::{chsh_value, local_hvm_exists, LocalityCertificate};
use fibermeasure::{Error, HVModel, Property, PropertyReport, Rational};
use serde_json::{json, Value};

use crate::format::{parse, serialize, Model};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Output {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Output {
    fn ok(stdout: String, code: i32) -> Self {
        Output { stdout, stderr: String::new(), code }
    }

    fn error(message: impl std::fmt::Display) -> Self {
        Output { stdout: String::new(), stderr: format!("error: {message}\n"), code: EXIT_ERROR }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Empirical,
    Local,
}

fn load(path: &Path) -> Result<Model, Output> {
    let text = fs::read_to_string(path).map_err(|e| Output::error(format!("{}: {e}", path.display())))?;
    parse(&text).map_err(|e| Output::error(format!("{}: {e}", path.display())))
}

fn load_hidden(path: &Path, command: &str) -> Result<HVModel, Output> {
    match load(path)? {
        Model::Hidden(p) => Ok(p),
        Model::Empirical(_) => Err(Output::error(format!(
            "{}: {command} needs a hidden-variable model (the file declares no lam space)",
            path.display()
        ))),
    }
}

fn write(path: &Path, model: &Model) -> Result<(), Output> {
    fs::write(path, serialize(model)).map_err(|e| Output::error(format!("{}: {e}", path.display())))
}

fn report_json(r: &PropertyReport) -> Value {
    json!({
        "property": r.property.short_name(),
        "holds": r.holds,
        "witness": r.witness.as_ref().map(|w| json!({
            "atom": w.atom.iter().map(|(n, l)| (n.clone(), Value::from(l.clone()))).collect::<serde_json::Map<_, _>>(),
            "lhs": w.lhs.to_string(),
            "rhs": w.rhs.to_string(),
        })),
    })
}

fn render(human: String, machine: Value, json: bool) -> String {
    if json {
        let mut s = serde_json::to_string_pretty(&machine).expect("plain data");
        s.push('\n');
        s
    } else {
        human
    }
}

pub fn check_cmd(path: &Path, property: Option<Property>, json: bool) -> Output {
    let p = match load_hidden(path, "check") {
        Ok(p) => p,
        Err(out) => return out,
    };
    let reports: Vec<PropertyReport> = match property {
        Some(prop) => vec![check(prop, &p)],
        None => check_all(&p),
    };
    let human: String = reports.iter().map(|r| format!("{r}\n")).collect();
    let machine = json!({ "reports": reports.iter().map(report_json).collect::<Vec<_>>() });
    let code = if reports.iter().all(|r| r.holds) { EXIT_OK } else { EXIT_FAIL };
    Output::ok(render(human, machine, json), code)
}

pub fn determinize_cmd(path: &Path, method: Method, out: &Path, json: bool) -> Output {
    let model = match load(path) {
        Ok(m) => m,
        Err(o) => return o,
    };
    let (result, name) = match method {
        Method::Empirical => (determinize_empirical(&model.empirical()), "empirical"),
        Method::Local => {
            let Model::Hidden(p) = &model else {
                return Output::error(format!(
                    "{}: local determinization needs a hidden-variable model",
                    path.display()
                ));
            };
            match determinize_local(p) {
                Ok(q) => (q, "local"),
                Err(Error::PropertyFailed(report)) => {
                    let human = format!("precondition failed: {report}\n");
                    let machine = json!({ "precondition_failed": report_json(&report) });
                    return Output::ok(render(human, machine, json), EXIT_FAIL);
                }
                Err(e) => return Output::error(e),
            }
        }
    };
    if let Err(o) = write(out, &Model::Hidden(result.clone())) {
        return o;
    }

    let realizes_input = match &model {
        Model::Hidden(p) => equivalent(&result, p),
        Model::Empirical(e) => realizes(&result, e),
    }
    .unwrap_or(false);
    let strong = check(Property::StrongDeterminism, &result);
    let lambda = check(Property::LambdaIndependence, &result);
    let yes = |b: bool| if b { "yes" } else { "no" };
    let human = format!(
        "wrote {} ({name} determinization, |Λ| = {})\nrealizes the input: {}\nstrong determinism: {}\nλ-independence: {}\n",
        out.display(),
        result.space(LAM).len(),
        yes(realizes_input),
        yes(strong.holds),
        yes(lambda.holds),
    );
    let machine = json!({
        "out": out.display().to_string(),
        "method": name,
        "lambda_size": result.space(LAM).len(),
        "realizes_input": realizes_input,
        "strong_determinism": strong.holds,
        "lambda_independence": lambda.holds,
    });
    Output::ok(render(human, machine, json), EXIT_OK)
}

pub fn realizability_cmd(path: &Path, json: bool) -> Output {
    let model = match load(path) {
        Ok(m) => m,
        Err(o) => return o,
    };
    let e = model.empirical();
    let (feasible, cert) = match local_hvm_exists(&e) {
        Ok(r) => r,
        Err(err) => return Output::error(err),
    };
    let (xa, xb, ya, yb) = (e.space("xa"), e.space("xb"), e.space("ya"), e.space("yb"));
    let (human, machine) = match &cert {
        LocalityCertificate::Feasible { weights, .. } => {
            let mut h = String::from("FEASIBLE\n");
            for (s, w) in weights {
                h.push_str(&format!("  {} {w}\n", s.label(xa, xb)));
            }
            let m = json!({
                "feasible": true,
                "weights": weights.iter().map(|(s, w)| json!({ "strategy": s.label(xa, xb), "p": w.to_string() })).collect::<Vec<_>>(),
            });
            (h, m)
        }
        LocalityCertificate::Infeasible { functional, classical_bound, achieved_value } => {
            let mut h = format!(
                "INFEASIBLE\nclassical bound: {classical_bound}\nachieved value: {achieved_value}\nfunctional:\n"
            );
            let mut terms = Vec::new();
            for (atom, beta) in functional {
                let (a, b, s, t) = (xa.label(atom[0]), xb.label(atom[1]), ya.label(atom[2]), yb.label(atom[3]));
                h.push_str(&format!("  x=({a},{b}) y=({s},{t}) {beta}\n"));
                terms.push(json!({ "atom": { "xa": a, "xb": b, "ya": s, "yb": t }, "coefficient": beta.to_string() }));
            }
            let m = json!({
                "feasible": false,
                "classical_bound": classical_bound.to_string(),
                "achieved_value": achieved_value.to_string(),
                "functional": terms,
            });
            (h, m)
        }
    };
    Output::ok(render(human, machine, json), if feasible { EXIT_OK } else { EXIT_FAIL })
}

fn chsh_lines(s: &Rational) -> String {
    format!("CHSH S = {s} (≈ {:.12})\n|S| = {} (≈ {:.12})\n", s.to_f64(), s.abs(), s.abs().to_f64())
}

pub fn chsh_cmd(path: &Path, json: bool) -> Output {
    let model = match load(path) {
        Ok(m) => m,
        Err(o) => return o,
    };
    match chsh_value(&model.empirical()) {
        Ok(s) => {
            let machine = json!({ "chsh": s.to_string(), "abs": s.abs().to_string(), "approx": s.to_f64() });
            Output::ok(render(chsh_lines(&s), machine, json), EXIT_OK)
        }
        Err(e) => Output::error(e),
    }
}

/// Parses a comma-separated list of angles in degrees.
pub fn parse_angles(text: &str) -> Result<Vec<f64>, String> {
    text.split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<f64>().ok().filter(|a| a.is_finite()).ok_or_else(|| format!("bad angle {t:?}"))
        })
        .collect()
}

pub fn generate_singlet_cmd(angles_a: &str, angles_b: &str, max_denominator: u64, out: &Path, json: bool) -> Output {
    let (a, b) = match (parse_angles(angles_a), parse_angles(angles_b)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return Output::error(e),
    };
    let e = match singlet_model(&a, &b, &SettingDistribution::Uniform, max_denominator) {
        Ok(e) => e,
        Err(err) => return Output::error(err),
    };
    if let Err(o) = write(out, &Model::Empirical(e.clone())) {
        return o;
    }
    let mut human = format!("wrote {} ({}×{} settings)\n", out.display(), a.len(), b.len());
    let mut machine = json!({ "out": out.display().to_string() });
    if a.len() == 2 && b.len() == 2 {
        let s = chsh_value(&e).expect("2×2 model with positive contexts");
        human.push_str(&chsh_lines(&s));
        machine["chsh"] = Value::from(s.to_string());
    }
    Output::ok(render(human, machine, json), EXIT_OK)
}

pub fn verify_cmd(path: &Path, json: bool) -> Output {
    let (p, note) = match load(path) {
        Ok(Model::Hidden(p)) => (p, ""),
        Ok(Model::Empirical(e)) => {
            (determinize_empirical(&e), "empirical model: checking its empirical determinization\n")
        }
        Err(o) => return o,
    };
    let reports = check_all(&p);
    let checks = match cross_check(&p) {
        Ok(c) => c,
        Err(e) => return Output::error(e),
    };
    let rels = relationships(&reports).expect("all six verdicts present");
    let mut human = note.to_string();
    for (r, c) in reports.iter().zip(&checks) {
        let agree = if c.agrees() { "agrees" } else { "DISAGREES" };
        human.push_str(&format!("{r}\n  characterization {agree}\n"));
    }
    for rel in &rels {
        human.push_str(&format!("{}: {}\n", rel.name, if rel.holds { "ok" } else { "VIOLATED" }));
    }
    let ok = checks.iter().all(|c| c.agrees()) && rels.iter().all(|r| r.holds);
    let machine = json!({
        "reports": reports.iter().map(report_json).collect::<Vec<_>>(),
        "cross_checks": checks.iter().map(|c| json!({
            "property": c.property.short_name(), "checker": c.checker, "characterization": c.characterization,
        })).collect::<Vec<_>>(),
        "relationships": rels.iter().map(|r| json!({ "name": r.name, "holds": r.holds })).collect::<Vec<_>>(),
        "consistent": ok,
    });
    Output::ok(render(human, machine, json), if ok { EXIT_OK } else { EXIT_FAIL })
}
