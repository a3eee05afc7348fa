//! The model file format.
//!
//! A model file is UTF-8 JSON:
//!
//! ```json
//! {
//!   "spaces": { "xa": ["0", "1"], "xb": ["0", "1"], "ya": ["0", "1"], "yb": ["0", "1"], "lam": ["l0"] },
//!   "weights": [
//!     { "atom": { "xa": "0", "xb": "0", "ya": "0", "yb": "0", "lam": "l0" }, "p": "1/8" }
//!   ]
//! }
//! ```
//!
//! `lam` is optional in both places; without it the file holds an empirical
//! model. Weights are exact fractions `"n/d"` (or integers), atoms not listed
//! weigh 0, each atom is listed at most once, and the weights must sum to
//! exactly 1. Serialization lists atoms of positive weight in canonical order.

use std::collections::HashSet;

use fibermeasure::models::{LAM, XA, XB, YA, YB};
use fibermeasure::{EmpiricalModel, FiniteMeasure, FiniteSpace, HVModel, ProductLayout, Rational};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{path}: {message}")]
    Field { path: String, message: String },
}

impl FormatError {
    fn field(path: impl Into<String>, message: impl Into<String>) -> Self {
        FormatError::Field { path: path.into(), message: message.into() }
    }
}

impl From<serde_json::Error> for FormatError {
    fn from(e: serde_json::Error) -> Self {
        let message = e.to_string();
        // serde_json appends " at line L column C"; keep just the description
        let message = match message.rfind(" at line ") {
            Some(i) => message[..i].to_string(),
            None => message,
        };
        FormatError::Syntax { line: e.line(), column: e.column(), message }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Model {
    Empirical(EmpiricalModel),
    Hidden(HVModel),
}

impl Model {
    pub fn measure(&self) -> &FiniteMeasure {
        match self {
            Model::Empirical(e) => e.measure(),
            Model::Hidden(p) => p.measure(),
        }
    }

    pub fn empirical(&self) -> EmpiricalModel {
        match self {
            Model::Empirical(e) => e.clone(),
            Model::Hidden(p) => p.empirical(),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpaces {
    xa: Vec<String>,
    xb: Vec<String>,
    ya: Vec<String>,
    yb: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lam: Option<Vec<String>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAtom {
    xa: String,
    xb: String,
    ya: String,
    yb: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lam: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWeight {
    atom: RawAtom,
    p: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    spaces: RawSpaces,
    weights: Vec<RawWeight>,
}

fn build_space(name: &str, labels: &[String]) -> Result<FiniteSpace, FormatError> {
    let path = format!("spaces.{name}");
    if labels.is_empty() {
        return Err(FormatError::field(path, "needs at least one label"));
    }
    let mut seen = HashSet::new();
    for (i, l) in labels.iter().enumerate() {
        if !seen.insert(l) {
            return Err(FormatError::field(format!("{path}[{i}]"), format!("repeated label {l:?}")));
        }
    }
    FiniteSpace::new(name, labels.iter().cloned()).map_err(|e| FormatError::field(path, e.to_string()))
}

pub fn parse(text: &str) -> Result<Model, FormatError> {
    let raw: RawModel = serde_json::from_str(text)?;
    let s = &raw.spaces;
    let mut factors =
        vec![build_space(XA, &s.xa)?, build_space(XB, &s.xb)?, build_space(YA, &s.ya)?, build_space(YB, &s.yb)?];
    if let Some(lam) = &s.lam {
        factors.push(build_space(LAM, lam)?);
    }
    let hidden = s.lam.is_some();
    let layout = ProductLayout::new(factors).expect("distinct coordinate names");

    let mut seen = HashSet::new();
    let mut pairs = Vec::with_capacity(raw.weights.len());
    let mut total = Rational::zero();
    for (i, w) in raw.weights.iter().enumerate() {
        let path = format!("weights[{i}]");
        let a = &w.atom;
        let mut labels = vec![(XA, &a.xa), (XB, &a.xb), (YA, &a.ya), (YB, &a.yb)];
        match (&a.lam, hidden) {
            (Some(l), true) => labels.push((LAM, l)),
            (None, true) => return Err(FormatError::field(format!("{path}.atom"), "missing lam")),
            (Some(_), false) => return Err(FormatError::field(format!("{path}.atom.lam"), "no lam space is declared")),
            (None, false) => {}
        }
        let mut atom = Vec::with_capacity(labels.len());
        for (k, (name, label)) in labels.iter().enumerate() {
            let index = layout.factors()[k]
                .index_of(label)
                .ok_or_else(|| FormatError::field(format!("{path}.atom.{name}"), format!("unknown label {label:?}")))?;
            atom.push(index);
        }
        let p: Rational =
            w.p.parse().map_err(|e: fibermeasure::Error| FormatError::field(format!("{path}.p"), e.to_string()))?;
        if p.is_negative() {
            return Err(FormatError::field(format!("{path}.p"), format!("negative weight {p}")));
        }
        if !seen.insert(atom.clone()) {
            return Err(FormatError::field(format!("{path}.atom"), "atom listed twice"));
        }
        total += &p;
        pairs.push((atom, p));
    }
    if !total.is_one() {
        return Err(FormatError::field("weights", format!("weights sum to {total}, not 1")));
    }
    let measure =
        FiniteMeasure::from_weights(layout, pairs).map_err(|e| FormatError::field("weights", e.to_string()))?;
    Ok(if hidden {
        Model::Hidden(HVModel::new(measure).expect("Ω coordinates"))
    } else {
        Model::Empirical(EmpiricalModel::new(measure).expect("Ψ coordinates"))
    })
}

pub fn serialize(model: &Model) -> String {
    let m = model.measure();
    let layout = m.layout();
    let labels = |i: usize| layout.factors()[i].atoms().to_vec();
    let hidden = layout.len() == 5;
    let raw = RawModel {
        spaces: RawSpaces {
            xa: labels(0),
            xb: labels(1),
            ya: labels(2),
            yb: labels(3),
            lam: hidden.then(|| labels(4)),
        },
        weights: m
            .support()
            .map(|(a, w)| {
                let l = layout.labels(a);
                RawWeight {
                    atom: RawAtom {
                        xa: l[0].to_string(),
                        xb: l[1].to_string(),
                        ya: l[2].to_string(),
                        yb: l[3].to_string(),
                        lam: hidden.then(|| l[4].to_string()),
                    },
                    p: w.to_string(),
                }
            })
            .collect(),
    };
    let mut out = serde_json::to_string_pretty(&raw).expect("plain data");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const PR_BOX: &str = r#"{
      "spaces": {"xa": ["0","1"], "xb": ["0","1"], "ya": ["0","1"], "yb": ["0","1"]},
      "weights": [
        {"atom": {"xa":"0","xb":"0","ya":"0","yb":"0"}, "p":"1/8"},
        {"atom": {"xa":"1","xb":"1","ya":"0","yb":"0"}, "p":"1/8"},
        {"atom": {"xa":"0","xb":"0","ya":"0","yb":"1"}, "p":"1/8"},
        {"atom": {"xa":"1","xb":"1","ya":"0","yb":"1"}, "p":"1/8"},
        {"atom": {"xa":"0","xb":"0","ya":"1","yb":"0"}, "p":"1/8"},
        {"atom": {"xa":"1","xb":"1","ya":"1","yb":"0"}, "p":"1/8"},
        {"atom": {"xa":"0","xb":"1","ya":"1","yb":"1"}, "p":"1/8"},
        {"atom": {"xa":"1","xb":"0","ya":"1","yb":"1"}, "p":"1/8"}
      ]
    }"#;

    fn error_of(text: &str) -> String {
        parse(text).unwrap_err().to_string()
    }

    #[test]
    fn parses_and_round_trips() {
        let m = parse(PR_BOX).unwrap();
        assert!(matches!(m, Model::Empirical(_)));
        assert_eq!(m.measure().support_len(), 8);
        let text = serialize(&m);
        assert_eq!(parse(&text).unwrap(), m);
        assert_eq!(serialize(&parse(&text).unwrap()), text);
    }

    #[test]
    fn hidden_variable_file() {
        let text = r#"{"spaces": {"xa": ["u"], "xb": ["v"], "ya": ["s"], "yb": ["t"], "lam": ["a", "b"]},
            "weights": [{"atom": {"xa":"u","xb":"v","ya":"s","yb":"t","lam":"b"}, "p":"1"}]}"#;
        let Model::Hidden(p) = parse(text).unwrap() else { panic!() };
        assert_eq!(p.space(LAM).atoms(), &["a", "b"]);
        assert_eq!(p.measure().weight(&[0, 0, 0, 0, 1]), Rational::one());
    }

    #[test]
    fn rejects_bad_weights() {
        let zero_den = PR_BOX.replacen("\"p\":\"1/8\"", "\"p\":\"1/0\"", 1);
        assert!(error_of(&zero_den).starts_with("weights[0].p:"), "{}", error_of(&zero_den));
        let negative = PR_BOX.replacen("\"p\":\"1/8\"", "\"p\":\"-1/8\"", 1);
        assert!(error_of(&negative).contains("negative"));
        let short = PR_BOX.replacen("\"p\":\"1/8\"", "\"p\":\"1/9\"", 1);
        assert!(error_of(&short).contains("not 1"));
        let garbage = PR_BOX.replacen("\"p\":\"1/8\"", "\"p\":\"0.125\"", 1);
        assert!(error_of(&garbage).starts_with("weights[0].p:"));
    }

    #[test]
    fn rejects_bad_atoms() {
        let dup =
            PR_BOX.replacen(r#""xa":"1","xb":"1","ya":"0","yb":"0""#, r#""xa":"0","xb":"0","ya":"0","yb":"0""#, 1);
        assert_eq!(error_of(&dup), "weights[1].atom: atom listed twice");
        let unknown = PR_BOX.replacen(r#""xa":"1","xb":"1","ya":"0""#, r#""xa":"2","xb":"1","ya":"0""#, 1);
        assert_eq!(error_of(&unknown), "weights[1].atom.xa: unknown label \"2\"");
        let stray_lam = PR_BOX.replacen(r#""yb":"0"}, "p""#, r#""yb":"0","lam":"l"}, "p""#, 1);
        assert_eq!(error_of(&stray_lam), "weights[0].atom.lam: no lam space is declared");
        let repeated = PR_BOX.replacen(r#""xa": ["0","1"]"#, r#""xa": ["0","0"]"#, 1);
        assert_eq!(error_of(&repeated), "spaces.xa[1]: repeated label \"0\"");
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = parse("{\n  \"spaces\": {\n  \"xa\": [\"0\",]\n}").unwrap_err();
        let FormatError::Syntax { line, .. } = err else { panic!("{err}") };
        assert_eq!(line, 3);
        let err = parse(r#"{"spaces": {"xa": ["0"], "xb": ["0"], "ya": ["0"], "yb": ["0"], "zz": []}, "weights": []}"#)
            .unwrap_err();
        assert!(err.to_string().contains("unknown field"), "{err}");
    }
}
