//! Decision procedures for the six hidden-variable properties.
//!
//! Each checker evaluates the property's defining equation exactly at every
//! atom whose conditioning event has positive probability. On failure the
//! report carries a witness: the first failing atom (canonical order) among
//! atoms of positive probability, with both sides of the equation. Such an
//! atom always exists when the equation fails somewhere, because both sides
//! of every defining equation sum to one over outcomes.
//!
//! [`characterize`] decides the same properties by a second route (fiber
//! products, product measures, partitions) so the two can be cross-checked.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fiber::fiber_product;
use crate::measure::{Atom, CondProb, FiniteMeasure, ProductLayout};
use crate::models::{named_marginals, HVModel, Party, LAM, XA, XB, YA, YB};
use crate::rationals::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    Locality,
    ParameterIndependence,
    OutcomeIndependence,
    LambdaIndependence,
    WeakDeterminism,
    StrongDeterminism,
}

impl Property {
    pub const ALL: [Property; 6] = [
        Property::Locality,
        Property::ParameterIndependence,
        Property::OutcomeIndependence,
        Property::LambdaIndependence,
        Property::WeakDeterminism,
        Property::StrongDeterminism,
    ];

    /// Selector used on the command line.
    pub fn short_name(self) -> &'static str {
        match self {
            Property::Locality => "locality",
            Property::ParameterIndependence => "pi",
            Property::OutcomeIndependence => "oi",
            Property::LambdaIndependence => "lambda",
            Property::WeakDeterminism => "weakdet",
            Property::StrongDeterminism => "strongdet",
        }
    }

    pub fn from_short_name(s: &str) -> Option<Property> {
        Property::ALL.into_iter().find(|p| p.short_name() == s)
    }

    pub fn equation(self) -> &'static str {
        match self {
            Property::Locality => "p[x‖y,λ] = p[x_a‖y_a,λ]·p[x_b‖y_b,λ]",
            Property::ParameterIndependence => "p[x_i‖y,λ] = p[x_i‖y_i,λ]",
            Property::OutcomeIndependence => "p[x‖y,λ] = p[x_a‖y,λ]·p[x_b‖y,λ]",
            Property::LambdaIndependence => "p(y,λ) = p(y)·p(λ)",
            Property::WeakDeterminism => "v = v² for v = p[x‖y,λ]",
            Property::StrongDeterminism => "v = v² for v = p[x_i‖y_i,λ]",
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Property::Locality => "locality",
            Property::ParameterIndependence => "parameter independence",
            Property::OutcomeIndependence => "outcome independence",
            Property::LambdaIndependence => "λ-independence",
            Property::WeakDeterminism => "weak determinism",
            Property::StrongDeterminism => "strong determinism",
        })
    }
}

/// A positive-probability atom at which a defining equation fails.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    /// `(coordinate, label)` pairs.
    pub atom: Vec<(String, String)>,
    pub lhs: Rational,
    pub rhs: Rational,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.atom.iter().map(|(n, l)| format!("{n}={l}")).collect();
        write!(f, "at ({}): lhs {} ≠ rhs {}", parts.join(", "), self.lhs, self.rhs)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PropertyReport {
    pub property: Property,
    pub holds: bool,
    pub witness: Option<Witness>,
}

impl fmt::Display for PropertyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.holds { "holds" } else { "FAILS" };
        write!(f, "{}: {verdict}", self.property)?;
        if let Some(w) = &self.witness {
            write!(f, " {w} [{}]", self.property.equation())?;
        }
        Ok(())
    }
}

struct Scan<'a> {
    property: Property,
    p: &'a FiniteMeasure,
    failed: bool,
    witness: Option<Witness>,
}

impl<'a> Scan<'a> {
    fn new(property: Property, p: &'a FiniteMeasure) -> Self {
        Scan { property, p, failed: false, witness: None }
    }

    /// Records one instance of the equation at `atom` of `p`'s layout.
    fn check(&mut self, atom: &[usize], lhs: Rational, rhs: Rational) {
        if lhs == rhs {
            return;
        }
        self.failed = true;
        if self.witness.is_none() && self.p.weight(atom).is_positive() {
            self.witness = Some(Witness { atom: self.p.layout().labeled(atom), lhs, rhs });
        }
    }

    fn finish(self) -> PropertyReport {
        assert!(!self.failed || self.witness.is_some(), "{} failed only at null atoms", self.property);
        PropertyReport { property: self.property, holds: !self.failed, witness: self.witness }
    }
}

fn cond(p: &FiniteMeasure, target: &[&str], given: &[&str]) -> CondProb {
    p.conditional(target, given).expect("fixed model coordinates")
}

fn outcome_atoms(layout: &ProductLayout, name: &str) -> Vec<usize> {
    (0..layout.factor(name).expect("fixed coordinate").len()).collect()
}

/// Conditionals shared by the checkers.
struct Conditionals {
    joint: CondProb,
    given_y: [CondProb; 2],
    given_own: [CondProb; 2],
}

impl Conditionals {
    fn of(p: &FiniteMeasure) -> Self {
        Conditionals {
            joint: cond(p, &[XA, XB], &[YA, YB, LAM]),
            given_y: [cond(p, &[XA], &[YA, YB, LAM]), cond(p, &[XB], &[YA, YB, LAM])],
            given_own: [cond(p, &[XA], &[YA, LAM]), cond(p, &[XB], &[YB, LAM])],
        }
    }
}

fn idx(party: Party) -> usize {
    match party {
        Party::A => 0,
        Party::B => 1,
    }
}

/// `(y_i, λ)` from `(y_a, y_b, λ)`.
fn own_context(party: Party, ctx: &[usize]) -> [usize; 2] {
    [ctx[idx(party)], ctx[2]]
}

pub fn check_locality(p: &HVModel) -> PropertyReport {
    let m = p.measure();
    let c = Conditionals::of(m);
    let mut scan = Scan::new(Property::Locality, m);
    for xa in outcome_atoms(m.layout(), XA) {
        for xb in outcome_atoms(m.layout(), XB) {
            for (ctx, _) in c.joint.given_support() {
                let lhs = c.joint.prob(&[xa, xb], ctx).expect("positive context");
                let pa = c.given_own[0].prob(&[xa], &own_context(Party::A, ctx)).expect("positive");
                let pb = c.given_own[1].prob(&[xb], &own_context(Party::B, ctx)).expect("positive");
                scan.check(&[xa, xb, ctx[0], ctx[1], ctx[2]], lhs, pa * pb);
            }
        }
    }
    scan.finish()
}

pub fn check_parameter_independence(p: &HVModel) -> PropertyReport {
    let m = p.measure();
    let c = Conditionals::of(m);
    let fam = named_marginals(p);
    let mut report = PropertyReport { property: Property::ParameterIndependence, holds: true, witness: None };
    for party in Party::BOTH {
        let i = idx(party);
        let pm = fam.p_party(party);
        let mut scan = Scan::new(Property::ParameterIndependence, pm);
        for x in outcome_atoms(m.layout(), party.outcome()) {
            for (ctx, _) in c.given_y[i].given_support() {
                let lhs = c.given_y[i].prob(&[x], ctx).expect("positive context");
                let rhs = c.given_own[i].prob(&[x], &own_context(party, ctx)).expect("positive");
                scan.check(&[x, ctx[0], ctx[1], ctx[2]], lhs, rhs);
            }
        }
        let r = scan.finish();
        if report.holds && !r.holds {
            report = r;
        }
    }
    report
}

pub fn check_outcome_independence(p: &HVModel) -> PropertyReport {
    let m = p.measure();
    let c = Conditionals::of(m);
    let mut scan = Scan::new(Property::OutcomeIndependence, m);
    for xa in outcome_atoms(m.layout(), XA) {
        for xb in outcome_atoms(m.layout(), XB) {
            for (ctx, _) in c.joint.given_support() {
                let lhs = c.joint.prob(&[xa, xb], ctx).expect("positive context");
                let pa = c.given_y[0].prob(&[xa], ctx).expect("positive");
                let pb = c.given_y[1].prob(&[xb], ctx).expect("positive");
                scan.check(&[xa, xb, ctx[0], ctx[1], ctx[2]], lhs, pa * pb);
            }
        }
    }
    scan.finish()
}

/// Decided through the independence of settings and hidden variable,
/// `p(y,λ) = p(y)·p(λ)`. The conditional form `p[λ‖y] = p(λ)` and the product
/// form `r = p_Y ⊗ p_Λ` are evaluated as well and must agree.
pub fn check_lambda_independence(p: &HVModel) -> PropertyReport {
    let fam = named_marginals(p);
    let mut scan = Scan::new(Property::LambdaIndependence, &fam.r);
    for atom in fam.r.layout().atoms() {
        let lhs = fam.r.weight(&atom);
        let rhs = fam.p_y.weight(&atom[..2]) * fam.p_lambda.weight(&atom[2..]);
        scan.check(&atom, lhs, rhs);
    }
    let report = scan.finish();

    let lam_given_y = cond(&fam.r, &[LAM], &[YA, YB]);
    let conditional_form = lam_given_y.given_support().all(|(y, _)| {
        fam.p_lambda.layout().atoms().all(|l| lam_given_y.prob(&l, y).expect("positive y") == fam.p_lambda.weight(&l))
    });
    let product_form = product_characterization(&fam.r, &fam.p_y, &fam.p_lambda);
    assert!(
        report.holds == conditional_form && conditional_form == product_form,
        "λ-independence characterizations disagree: independence {}, conditional {conditional_form}, product {product_form}",
        report.holds
    );
    report
}

fn product_characterization(r: &FiniteMeasure, p_y: &FiniteMeasure, p_lambda: &FiniteMeasure) -> bool {
    r.measures_equal(&p_y.product(p_lambda).expect("disjoint factors")).expect("same factors")
}

pub fn check_weak_determinism(p: &HVModel) -> PropertyReport {
    let m = p.measure();
    let c = Conditionals::of(m);
    let mut scan = Scan::new(Property::WeakDeterminism, m);
    for xa in outcome_atoms(m.layout(), XA) {
        for xb in outcome_atoms(m.layout(), XB) {
            for (ctx, _) in c.joint.given_support() {
                let v = c.joint.prob(&[xa, xb], ctx).expect("positive context");
                let sq = &v * &v;
                scan.check(&[xa, xb, ctx[0], ctx[1], ctx[2]], v, sq);
            }
        }
    }
    scan.finish()
}

pub fn check_strong_determinism(p: &HVModel) -> PropertyReport {
    let m = p.measure();
    let c = Conditionals::of(m);
    let fam = named_marginals(p);
    let mut report = PropertyReport { property: Property::StrongDeterminism, holds: true, witness: None };
    for party in Party::BOTH {
        let i = idx(party);
        let mut scan = Scan::new(Property::StrongDeterminism, fam.q_party(party));
        for x in outcome_atoms(m.layout(), party.outcome()) {
            for (ctx, _) in c.given_own[i].given_support() {
                let v = c.given_own[i].prob(&[x], ctx).expect("positive context");
                let sq = &v * &v;
                scan.check(&[x, ctx[0], ctx[1]], v, sq);
            }
        }
        let r = scan.finish();
        if report.holds && !r.holds {
            report = r;
        }
    }
    report
}

pub fn check(property: Property, p: &HVModel) -> PropertyReport {
    match property {
        Property::Locality => check_locality(p),
        Property::ParameterIndependence => check_parameter_independence(p),
        Property::OutcomeIndependence => check_outcome_independence(p),
        Property::LambdaIndependence => check_lambda_independence(p),
        Property::WeakDeterminism => check_weak_determinism(p),
        Property::StrongDeterminism => check_strong_determinism(p),
    }
}

pub fn check_all(p: &HVModel) -> Vec<PropertyReport> {
    Property::ALL.into_iter().map(|prop| check(prop, p)).collect()
}

fn is_fiber(target: &FiniteMeasure, q: &FiniteMeasure, r: &FiniteMeasure, over: &[&str]) -> Result<bool> {
    fiber_product(q, r, over)?.measures_equal(target)
}

/// Decides `property` by its alternative characterization:
///
/// * outcome independence: `p = p_a ⊗_{Y×Λ} p_b`
/// * parameter independence: `p_a = q_a ⊗_{Y_a×Λ} r` and `p_b = q_b ⊗_{Y_b×Λ} r`
/// * locality: all three fiber identities
/// * λ-independence: `r = p_Y ⊗ p_Λ`
/// * weak determinism: each party's `p[x_i‖y,λ] ∈ {0,1}`
/// * strong determinism: `Y_i×Λ` splits into sets `A_x` with `q_i(x × A_x) = q_i(A_x)`
pub fn characterize(property: Property, p: &HVModel) -> Result<bool> {
    let fam = named_marginals(p);
    let outcome = || is_fiber(p.measure(), &fam.p_a, &fam.p_b, &[YA, YB, LAM]);
    let parameter = || -> Result<bool> {
        Ok(is_fiber(&fam.p_a, &fam.q_a, &fam.r, &[YA, LAM])? && is_fiber(&fam.p_b, &fam.q_b, &fam.r, &[YB, LAM])?)
    };
    match property {
        Property::OutcomeIndependence => outcome(),
        Property::ParameterIndependence => parameter(),
        Property::Locality => Ok(outcome()? && parameter()?),
        Property::LambdaIndependence => Ok(product_characterization(&fam.r, &fam.p_y, &fam.p_lambda)),
        Property::WeakDeterminism => {
            let m = p.measure();
            Ok([XA, XB].iter().all(|x| party_rows_deterministic(&cond(m, &[x], &[YA, YB, LAM]))))
        }
        Property::StrongDeterminism => Ok(Party::BOTH.into_iter().all(|party| partition_reading(fam.q_party(party)))),
    }
}

fn party_rows_deterministic(c: &CondProb) -> bool {
    c.given_support().all(|(g, _)| c.row(g).expect("positive").values().all(Rational::is_zero_or_one))
}

/// `q` on `X_i × Y_i × Λ`: assign each positive `(y_i, λ)` to its most likely
/// outcome and test `q({x} × A_x) = q(A_x)` for every outcome `x`.
fn partition_reading(q: &FiniteMeasure) -> bool {
    let context_weight = q.pushforward(&[1, 2]);
    let mut best: std::collections::BTreeMap<Atom, (usize, Rational)> = Default::default();
    for (atom, w) in q.support() {
        let ctx = vec![atom[1], atom[2]];
        match best.get(&ctx) {
            Some((_, bw)) if bw >= w => {}
            _ => {
                best.insert(ctx, (atom[0], w.clone()));
            }
        }
    }
    let n = q.layout().factors()[0].len();
    (0..n).all(|x| {
        let cell: Vec<&Atom> = best.iter().filter(|(_, (bx, _))| *bx == x).map(|(c, _)| c).collect();
        let mass: Rational = cell.iter().map(|c| context_weight[*c].clone()).sum();
        let hit: Rational = cell.iter().map(|c| q.weight(&[x, c[0], c[1]])).sum();
        mass == hit
    })
}

/// One property's verdict by both routes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrossCheck {
    pub property: Property,
    pub checker: bool,
    pub characterization: bool,
}

impl CrossCheck {
    pub fn agrees(&self) -> bool {
        self.checker == self.characterization
    }
}

pub fn cross_check(p: &HVModel) -> Result<Vec<CrossCheck>> {
    Property::ALL
        .into_iter()
        .map(|property| {
            Ok(CrossCheck { property, checker: check(property, p).holds, characterization: characterize(property, p)? })
        })
        .collect()
}

/// The relationships between the properties that hold for every model.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Relationship {
    pub name: &'static str,
    pub holds: bool,
}

/// Evaluates the five property relationships on a set of verdicts.
pub fn relationships(reports: &[PropertyReport]) -> Result<Vec<Relationship>> {
    let get = |prop: Property| {
        reports
            .iter()
            .find(|r| r.property == prop)
            .map(|r| r.holds)
            .ok_or_else(|| Error::Precondition(format!("no verdict for {prop}")))
    };
    let local = get(Property::Locality)?;
    let pi = get(Property::ParameterIndependence)?;
    let oi = get(Property::OutcomeIndependence)?;
    let weak = get(Property::WeakDeterminism)?;
    let strong = get(Property::StrongDeterminism)?;
    Ok(vec![
        Relationship { name: "locality ⇔ PI ∧ OI", holds: local == (pi && oi) },
        Relationship { name: "strong ⇒ weak", holds: !strong || weak },
        Relationship { name: "weak ⇒ OI", holds: !weak || oi },
        Relationship { name: "strong ⇔ weak ∧ PI", holds: strong == (weak && pi) },
        Relationship { name: "strong ⇔ weak ∧ locality", holds: strong == (weak && local) },
    ])
}
