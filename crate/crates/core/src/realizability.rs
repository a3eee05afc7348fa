//! Local realizability: is an empirical model's conditional behavior a
//! mixture of deterministic strategies?
//!
//! A local λ-independent model exists exactly when a strongly deterministic
//! λ-independent one does, i.e. when `e(x|y)` lies in the convex hull of the
//! strategy behaviors (the local polytope). Membership is decided by an
//! exact Phase-1 simplex; both outcomes come with a checkable certificate.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::measure::{Atom, FiniteMeasure, FiniteSpace, ProductLayout};
use crate::models::{realizes, EmpiricalModel, HVModel, LAM, XA, XB, YA, YB};
use crate::properties::{check_lambda_independence, check_locality, check_strong_determinism};
use crate::rationals::Rational;
use crate::simplex::{phase_one, Feasibility};

pub const DEFAULT_STRATEGY_CAP: usize = 1_000_000;

/// A pair of total maps `f_a: Y_a → X_a`, `f_b: Y_b → X_b`, stored as
/// outcome indices per setting index.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DeterministicStrategy {
    pub f_a: Vec<usize>,
    pub f_b: Vec<usize>,
}

impl DeterministicStrategy {
    /// Outcome pair this strategy produces in context `(ya, yb)`.
    pub fn respond(&self, ya: usize, yb: usize) -> (usize, usize) {
        (self.f_a[ya], self.f_b[yb])
    }

    /// Label such as `a(0,1)b(1,1)`, listing outcomes per setting.
    pub fn label(&self, xa: &FiniteSpace, xb: &FiniteSpace) -> String {
        let side = |f: &[usize], x: &FiniteSpace| f.iter().map(|&i| x.label(i)).collect::<Vec<_>>().join(",");
        format!("a({})b({})", side(&self.f_a, xa), side(&self.f_b, xb))
    }
}

fn functions(settings: usize, outcomes: usize) -> Vec<Vec<usize>> {
    let mut all = vec![Vec::with_capacity(settings)];
    for _ in 0..settings {
        all = all
            .into_iter()
            .flat_map(|prefix| {
                (0..outcomes).map(move |x| {
                    let mut f = prefix.clone();
                    f.push(x);
                    f
                })
            })
            .collect();
    }
    all
}

fn strategy_count(ya: usize, yb: usize, xa: usize, xb: usize) -> Option<usize> {
    let pa = xa.checked_pow(u32::try_from(ya).ok()?)?;
    let pb = xb.checked_pow(u32::try_from(yb).ok()?)?;
    pa.checked_mul(pb)
}

pub fn enumerate_strategies(
    ya: &FiniteSpace,
    yb: &FiniteSpace,
    xa: &FiniteSpace,
    xb: &FiniteSpace,
) -> Result<Vec<DeterministicStrategy>> {
    enumerate_strategies_capped(ya, yb, xa, xb, DEFAULT_STRATEGY_CAP)
}

/// All strategies in canonical order: `f_a` outer, `f_b` inner, each map
/// ordered lexicographically with the first setting most significant.
pub fn enumerate_strategies_capped(
    ya: &FiniteSpace,
    yb: &FiniteSpace,
    xa: &FiniteSpace,
    xb: &FiniteSpace,
    cap: usize,
) -> Result<Vec<DeterministicStrategy>> {
    match strategy_count(ya.len(), yb.len(), xa.len(), xb.len()) {
        Some(n) if n <= cap => {}
        _ => {
            return Err(Error::Resource(format!(
                "{}^{} · {}^{} deterministic strategies exceed the cap of {cap}",
                xa.len(),
                ya.len(),
                xb.len(),
                yb.len()
            )))
        }
    }
    let fb = functions(yb.len(), xb.len());
    Ok(functions(ya.len(), xa.len())
        .into_iter()
        .flat_map(|f_a| fb.iter().map(move |f_b| DeterministicStrategy { f_a: f_a.clone(), f_b: f_b.clone() }))
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LocalityCertificate {
    /// Mixture weights over strategies (positive weights only), and the
    /// strongly deterministic λ-independent model they induce.
    Feasible { weights: Vec<(DeterministicStrategy, Rational)>, model: HVModel },
    /// A Bell functional on `(x_a, x_b, y_a, y_b)` atoms with
    /// `achieved_value > classical_bound`.
    Infeasible { functional: BTreeMap<Atom, Rational>, classical_bound: Rational, achieved_value: Rational },
}

impl LocalityCertificate {
    pub fn is_feasible(&self) -> bool {
        matches!(self, LocalityCertificate::Feasible { .. })
    }

    /// Re-checks the certificate against `e` from scratch.
    pub fn verify(&self, e: &EmpiricalModel) -> Result<bool> {
        let strategies = strategies_for(e)?;
        match self {
            LocalityCertificate::Feasible { weights, model } => {
                let total: Rational = weights.iter().map(|(_, w)| w).sum();
                if !total.is_one() || weights.iter().any(|(_, w)| w.is_negative()) {
                    return Ok(false);
                }
                let behavior = behavior(e);
                for (y, row) in &behavior {
                    for (x, target) in row {
                        let mixed: Rational =
                            weights.iter().filter(|(s, _)| s.respond(y[0], y[1]) == (x[0], x[1])).map(|(_, w)| w).sum();
                        if &mixed != target {
                            return Ok(false);
                        }
                    }
                }
                realizes(model, e)
            }
            LocalityCertificate::Infeasible { functional, classical_bound, achieved_value } => {
                let bound = classical_bound_of(functional, &strategies);
                let value = functional_value(functional, e);
                Ok(&bound == classical_bound && &value == achieved_value && value > bound)
            }
        }
    }
}

impl fmt::Display for LocalityCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LocalityCertificate::Feasible { weights, model } => {
                writeln!(f, "FEASIBLE")?;
                let (xa, xb) = (model.space(XA), model.space(XB));
                for (s, w) in weights {
                    writeln!(f, "  {} {w}", s.label(xa, xb))?;
                }
                Ok(())
            }
            LocalityCertificate::Infeasible { classical_bound, achieved_value, .. } => {
                write!(f, "INFEASIBLE bound {classical_bound} value {achieved_value}")
            }
        }
    }
}

fn strategies_for(e: &EmpiricalModel) -> Result<Vec<DeterministicStrategy>> {
    enumerate_strategies(e.space(YA), e.space(YB), e.space(XA), e.space(XB))
}

/// `e(x|y)` at positive contexts: context `[ya, yb]` → outcome `[xa, xb]` → probability.
fn behavior(e: &EmpiricalModel) -> BTreeMap<Atom, BTreeMap<Atom, Rational>> {
    let c = e.measure().conditional(&[XA, XB], &[YA, YB]).expect("Ψ coordinates");
    c.given_support()
        .map(|(y, _)| {
            let row = (0..e.space(XA).len())
                .flat_map(|xa| (0..e.space(XB).len()).map(move |xb| vec![xa, xb]))
                .map(|x| {
                    let p = c.prob(&x, y).expect("positive context");
                    (x, p)
                })
                .collect();
            (y.clone(), row)
        })
        .collect()
}

/// `Σ β(x,y) e(x|y)` over positive contexts.
pub fn functional_value(functional: &BTreeMap<Atom, Rational>, e: &EmpiricalModel) -> Rational {
    let behavior = behavior(e);
    functional
        .iter()
        .filter_map(|(atom, beta)| {
            let p = behavior.get(&atom[2..])?.get(&atom[..2])?;
            Some(beta * p)
        })
        .sum()
}

/// `Σ_y β(s(y), y)` for one strategy.
pub fn strategy_value(functional: &BTreeMap<Atom, Rational>, s: &DeterministicStrategy) -> Rational {
    functional.iter().filter(|(atom, _)| s.respond(atom[2], atom[3]) == (atom[0], atom[1])).map(|(_, beta)| beta).sum()
}

fn classical_bound_of(functional: &BTreeMap<Atom, Rational>, strategies: &[DeterministicStrategy]) -> Rational {
    strategies.iter().map(|s| strategy_value(functional, s)).max().expect("at least one strategy")
}

/// The eight CHSH-type functionals on 2222 scenarios: the minus sign on one
/// of the four contexts, times an overall sign. Context `(1,1)` with `+`
/// comes first, which is the functional of [`chsh_value`].
fn chsh_variants() -> Vec<BTreeMap<Atom, Rational>> {
    let mut out = Vec::new();
    for overall in [1i64, -1] {
        for minus in [[1usize, 1], [0, 0], [0, 1], [1, 0]] {
            let mut beta = BTreeMap::new();
            for ya in 0..2 {
                for yb in 0..2 {
                    let ctx = if [ya, yb] == minus { -overall } else { overall };
                    for xa in 0..2 {
                        for xb in 0..2 {
                            let parity = if xa == xb { 1 } else { -1 };
                            beta.insert(vec![xa, xb, ya, yb], Rational::from(ctx * parity));
                        }
                    }
                }
            }
            out.push(beta);
        }
    }
    out
}

/// Decides local realizability of `e` exactly, with a verified certificate.
pub fn local_hvm_exists(e: &EmpiricalModel) -> Result<(bool, LocalityCertificate)> {
    let strategies = strategies_for(e)?;
    let behavior = behavior(e);

    // one row per (positive context, outcome pair), then Σ w = 1
    let mut a = Vec::new();
    let mut b = Vec::new();
    let mut row_atoms = Vec::new();
    for (y, row) in &behavior {
        for (x, p) in row {
            a.push(
                strategies
                    .iter()
                    .map(|s| if s.respond(y[0], y[1]) == (x[0], x[1]) { Rational::one() } else { Rational::zero() })
                    .collect::<Vec<_>>(),
            );
            b.push(p.clone());
            row_atoms.push(vec![x[0], x[1], y[0], y[1]]);
        }
    }
    a.push(vec![Rational::one(); strategies.len()]);
    b.push(Rational::one());

    let certificate = match phase_one(&a, &b) {
        Feasibility::Feasible(w) => {
            let weights: Vec<(DeterministicStrategy, Rational)> =
                strategies.into_iter().zip(w).filter(|(_, w)| w.is_positive()).collect();
            let model = strategy_model(e, &weights)?;
            for report in [check_locality(&model), check_lambda_independence(&model), check_strong_determinism(&model)]
            {
                if !report.holds {
                    return Err(Error::Inconsistent(format!("reconstructed local model violates {report}")));
                }
            }
            if !realizes(&model, e)? {
                return Err(Error::Inconsistent("reconstructed local model does not realize the input".into()));
            }
            LocalityCertificate::Feasible { weights, model }
        }
        Feasibility::Infeasible(y) => {
            let full_2222 = [XA, XB, YA, YB].iter().all(|c| e.space(c).len() == 2) && behavior.len() == 4;
            let chsh = if full_2222 {
                chsh_variants().into_iter().find_map(|beta| {
                    let bound = classical_bound_of(&beta, &strategies);
                    let value = functional_value(&beta, e);
                    (value > bound).then_some((beta, bound, value))
                })
            } else {
                None
            };
            let (functional, classical_bound, achieved_value) = match chsh {
                Some(found) => found,
                None => {
                    let beta: BTreeMap<Atom, Rational> =
                        row_atoms.into_iter().zip(y).filter(|(_, v)| !v.is_zero()).collect();
                    let bound = classical_bound_of(&beta, &strategies);
                    let value = functional_value(&beta, e);
                    (beta, bound, value)
                }
            };
            if achieved_value <= classical_bound {
                return Err(Error::Inconsistent(format!(
                    "separating functional does not separate: value {achieved_value} vs bound {classical_bound}"
                )));
            }
            LocalityCertificate::Infeasible { functional, classical_bound, achieved_value }
        }
    };
    Ok((certificate.is_feasible(), certificate))
}

/// `p(x, y, s) = p_Y(y) · w_s · [s(y) = x]` with Λ the listed strategies.
fn strategy_model(e: &EmpiricalModel, weights: &[(DeterministicStrategy, Rational)]) -> Result<HVModel> {
    let (xa, xb) = (e.space(XA), e.space(XB));
    let lam = FiniteSpace::new(LAM, weights.iter().map(|(s, _)| s.label(xa, xb)))?;
    let layout = ProductLayout::new(vec![xa.clone(), xb.clone(), e.space(YA).clone(), e.space(YB).clone(), lam])?;
    let settings = e.settings();
    let atoms = settings.support().flat_map(|(y, py)| {
        weights.iter().enumerate().map(move |(l, (s, w))| {
            let (a, b) = s.respond(y[0], y[1]);
            (vec![a, b, y[0], y[1], l], py * w)
        })
    });
    HVModel::new(FiniteMeasure::from_weights(layout, atoms)?)
}

/// `S = E(0,0) + E(0,1) + E(1,0) − E(1,1)` with the first outcome of each
/// party mapped to +1 and the second to −1.
pub fn chsh_value(e: &EmpiricalModel) -> Result<Rational> {
    for c in [XA, XB, YA, YB] {
        if e.space(c).len() != 2 {
            return Err(Error::Domain(format!("CHSH needs two atoms in {c}, got {}", e.space(c).len())));
        }
    }
    let c = e.measure().conditional(&[XA, XB], &[YA, YB])?;
    let mut s = Rational::zero();
    for ya in 0..2 {
        for yb in 0..2 {
            let y = [ya, yb];
            if c.given_weight(&y).is_zero() {
                return Err(Error::Domain(format!(
                    "context ({}, {}) has probability 0",
                    e.space(YA).label(ya),
                    e.space(YB).label(yb)
                )));
            }
            let mut expectation = Rational::zero();
            for xa in 0..2 {
                for xb in 0..2 {
                    let p = c.prob(&[xa, xb], &y).expect("positive context");
                    if xa == xb {
                        expectation += &p;
                    } else {
                        expectation -= &p;
                    }
                }
            }
            if (ya, yb) == (1, 1) {
                s -= &expectation;
            } else {
                s += &expectation;
            }
        }
    }
    Ok(s)
}
