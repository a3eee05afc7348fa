//! Fiber products of measures.
//!
//! Given `q` on `X×Z` and `r` on `Y×Z` with the same marginal `s` on `Z`, the
//! fiber product `q ⊗_Z r` is the common extension on `X×Y×Z` under which `X`
//! and `Y` are conditionally independent given `Z`:
//!
//! ```text
//! p(J×K×L) = Σ_{z∈L, s(z)>0} q[J‖z] · r[K‖z] · s(z)
//! ```
//!
//! With finite `X` it always exists and is unique.

use std::collections::{BTreeMap, HashSet};

use crate::error::{Error, Result};
use crate::measure::{Atom, FiniteMeasure, ProductLayout};
use crate::rationals::Rational;

/// Splits `q`'s and `r`'s factors into (X names, Y names) after checking that
/// they share exactly the `over` coordinates with identical atom lists.
fn split_coordinates<'a>(
    q: &'a FiniteMeasure,
    r: &'a FiniteMeasure,
    over: &[&str],
) -> Result<(Vec<&'a str>, Vec<&'a str>)> {
    let q_names: HashSet<&str> = q.layout().names().into_iter().collect();
    let r_names: HashSet<&str> = r.layout().names().into_iter().collect();
    let mut shared: Vec<&str> = q_names.intersection(&r_names).copied().collect();
    let mut expected: Vec<&str> = over.to_vec();
    shared.sort_unstable();
    expected.sort_unstable();
    expected.dedup();
    if shared != expected || expected.len() != over.len() {
        return Err(Error::layout(format!("measures share coordinates {shared:?}, fiber requested over {over:?}")));
    }
    for z in over {
        if q.layout().factor(z) != r.layout().factor(z) {
            return Err(Error::layout(format!("coordinate {z:?} has different atoms in q and r")));
        }
    }
    let xs = q.layout().names().into_iter().filter(|n| !over.contains(n)).collect();
    let ys = r.layout().names().into_iter().filter(|n| !over.contains(n)).collect();
    Ok((xs, ys))
}

/// The fiber product `q ⊗_Z r`, on the layout `X × Y × Z` (X in `q`'s order,
/// Y in `r`'s order, Z in the order of `over`).
///
/// Evaluated through the defining sum over conditionals: each atom gets
/// `q[x‖z] · r[y‖z] · s(z)`.
pub fn fiber_product(q: &FiniteMeasure, r: &FiniteMeasure, over: &[&str]) -> Result<FiniteMeasure> {
    let (xs, ys) = split_coordinates(q, r, over)?;
    let qc = q.conditional(&xs, over)?;
    let rc = r.conditional(&ys, over)?;

    if qc.given_marginal() != rc.given_marginal() {
        let z =
            qc.given().atoms().find(|z| qc.given_weight(z) != rc.given_weight(z)).expect("marginals differ somewhere");
        return Err(Error::Precondition(format!(
            "marginals on {} differ at {}: q gives {}, r gives {}",
            qc.given(),
            qc.given().describe(&z),
            qc.given_weight(&z),
            rc.given_weight(&z)
        )));
    }

    let mut factors = qc.target().factors().to_vec();
    factors.extend(rc.target().factors().iter().cloned());
    factors.extend(qc.given().factors().iter().cloned());
    let layout = ProductLayout::new(factors)?;

    let mut weights: BTreeMap<Atom, Rational> = BTreeMap::new();
    for (z, s_z) in qc.given_support() {
        let q_row = qc.row(z).expect("positive z");
        let r_row = rc.row(z).expect("positive z");
        for (x, qx) in q_row {
            let qs = qx * s_z;
            for (y, ry) in r_row {
                let mut atom = x.clone();
                atom.extend_from_slice(y);
                atom.extend_from_slice(z);
                weights.insert(atom, &qs * ry);
            }
        }
    }
    Ok(FiniteMeasure::from_parts_unchecked(layout, weights))
}

/// Verdicts of the three conditional characterizations of a fiber product.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FiberConditions {
    /// `p[x,y‖z] = q[x‖z] · r[y‖z]`
    pub conditional_product: bool,
    /// `p[x,y‖z] = p[x‖z] · p[y‖z]`
    pub conditional_independence: bool,
    /// `p[x‖y,z] = p[x‖z]`
    pub screening_off: bool,
}

impl FiberConditions {
    pub fn all_agree(&self) -> bool {
        self.conditional_product == self.conditional_independence && self.conditional_independence == self.screening_off
    }
}

/// Evaluates the three conditional characterizations for a common extension
/// `p` of `q` and `r`. Events range over singletons, which suffices by finite
/// additivity; every identity is checked at positive-probability atoms only.
pub fn fiber_conditions(
    p: &FiniteMeasure,
    q: &FiniteMeasure,
    r: &FiniteMeasure,
    over: &[&str],
) -> Result<FiberConditions> {
    let (xs, ys) = split_coordinates(q, r, over)?;
    let mut expected: Vec<&str> = xs.iter().chain(&ys).chain(over).copied().collect();
    let mut have = p.layout().names();
    expected.sort_unstable();
    have.sort_unstable();
    if expected != have {
        return Err(Error::layout(format!("p is on {:?}, expected coordinates {expected:?}", p.layout().names())));
    }
    for (name, m) in [("q", q), ("r", r)] {
        let names = m.layout().names();
        if !p.marginal(&names)?.measures_equal(m)? {
            return Err(Error::Precondition(format!("p is not an extension of {name}")));
        }
    }

    let xy: Vec<&str> = xs.iter().chain(&ys).copied().collect();
    let yz: Vec<&str> = ys.iter().chain(over).copied().collect();
    let p_xy_z = p.conditional(&xy, over)?;
    let p_x_z = p.conditional(&xs, over)?;
    let p_y_z = p.conditional(&ys, over)?;
    let p_x_yz = p.conditional(&xs, &yz)?;
    let q_x_z = q.conditional(&xs, over)?;
    let r_y_z = r.conditional(&ys, over)?;

    let x_atoms: Vec<Atom> = p_x_z.target().atoms().collect();
    let y_atoms: Vec<Atom> = p_y_z.target().atoms().collect();

    let mut conditional_product = true;
    let mut conditional_independence = true;
    for (z, _) in p_xy_z.given_support() {
        for x in &x_atoms {
            let px = p_x_z.prob(x, z).expect("positive z");
            let qx = q_x_z.prob(x, z).expect("q agrees with p on z");
            for y in &y_atoms {
                let mut xy_atom = x.clone();
                xy_atom.extend_from_slice(y);
                let lhs = p_xy_z.prob(&xy_atom, z).expect("positive z");
                let py = p_y_z.prob(y, z).expect("positive z");
                let ry = r_y_z.prob(y, z).expect("r agrees with p on z");
                conditional_product &= lhs == &qx * &ry;
                conditional_independence &= lhs == &px * &py;
            }
        }
    }

    let mut screening_off = true;
    let y_len = ys.len();
    for (yz_atom, _) in p_x_yz.given_support() {
        let z = &yz_atom[y_len..];
        for x in &x_atoms {
            screening_off &= p_x_yz.prob(x, yz_atom) == p_x_z.prob(x, z);
        }
    }

    Ok(FiberConditions { conditional_product, conditional_independence, screening_off })
}

/// Whether the common extension `p` of `q` and `r` is their fiber product
/// over `over`. All three conditional characterizations are evaluated; if
/// they disagree the result is [`Error::Inconsistent`].
pub fn is_fiber_product(p: &FiniteMeasure, q: &FiniteMeasure, r: &FiniteMeasure, over: &[&str]) -> Result<bool> {
    let c = fiber_conditions(p, q, r, over)?;
    if !c.all_agree() {
        return Err(Error::Inconsistent(format!("fiber-product characterizations disagree: {c:?}")));
    }
    Ok(c.conditional_product)
}
