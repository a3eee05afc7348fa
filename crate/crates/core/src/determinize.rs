//! Determinization of empirical and hidden-variable models.
//!
//! * [`trivial_hv`]: realize `e` with a one-point hidden-variable space.
//! * [`determinize_empirical`]: realize `e` strongly deterministically with Λ
//!   a copy of the outcome space X, as the fiber product `d ⊗_X e` of the
//!   diagonal measure `d` and `e`.
//! * [`determinize_local`]: turn a local, λ-independent model into an
//!   equivalent strongly deterministic, λ-independent one by splitting the
//!   unit interval per party into consecutive intervals whose lengths are the
//!   outcome conditionals.
//!
//! The unit-square factor of the local construction is represented by the
//! common refinement of all interval endpoints: every conditional in the
//! construction is constant on refinement cells, so the quotient by cells
//! changes none of the property-defining conditionals.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::fiber::fiber_product;
use crate::measure::{Atom, FiniteMeasure, FiniteSpace, ProductLayout};
use crate::models::{equivalent, named_marginals, EmpiricalModel, HVModel, Party, LAM, XA, XB, YA, YB};
use crate::properties::{check_lambda_independence, check_locality, check_strong_determinism};
use crate::rationals::Rational;

/// Realizes `e` as `e ⊗ δ` with a one-point hidden-variable space.
pub fn trivial_hv(e: &EmpiricalModel) -> HVModel {
    let lam = ProductLayout::new(vec![FiniteSpace::new(LAM, ["0"]).expect("valid space")]).expect("one factor");
    let point = FiniteMeasure::point_mass(lam, vec![0]).expect("valid atom");
    HVModel::new(e.measure().product(&point).expect("lam is not a Ψ coordinate")).expect("Ω coordinates")
}

/// Labels for Λ as a copy of X: `(x_a,x_b)`, falling back to positional
/// labels if the pair rendering would collide.
fn outcome_pair_labels(xa: &FiniteSpace, xb: &FiniteSpace) -> Vec<String> {
    let pairs: Vec<String> =
        xa.atoms().iter().flat_map(|a| xb.atoms().iter().map(move |b| format!("({a},{b})"))).collect();
    let distinct: std::collections::HashSet<&String> = pairs.iter().collect();
    if distinct.len() == pairs.len() {
        pairs
    } else {
        (0..pairs.len()).map(|i| format!("x{i}")).collect()
    }
}

/// Strongly deterministic realization of `e` with |Λ| = |X_a|·|X_b|.
///
/// With `s = marg_X e`, the diagonal measure `d` on `X × Λ` puts `s(x)` on
/// `(x, x)`, and the result is the fiber product `d ⊗_X e`.
pub fn determinize_empirical(e: &EmpiricalModel) -> HVModel {
    let xa = e.space(XA).clone();
    let xb = e.space(XB).clone();
    let lam = FiniteSpace::new(LAM, outcome_pair_labels(&xa, &xb)).expect("distinct labels");
    let s = e.measure().marginal(&[XA, XB]).expect("Ψ coordinates");
    let d_layout = ProductLayout::new(vec![xa, xb.clone(), lam]).expect("distinct names");
    let diagonal = s.support().map(|(x, w)| (vec![x[0], x[1], x[0] * xb.len() + x[1]], w.clone()));
    let d = FiniteMeasure::from_weights(d_layout, diagonal).expect("d extends s");
    let p = fiber_product(&d, e.measure(), &[XA, XB]).expect("d and e share the marginal s");
    HVModel::new(p).expect("Ω coordinates")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub outcome: usize,
    pub left: Rational,
    pub right: Rational,
}

impl Interval {
    pub fn length(&self) -> Rational {
        &self.right - &self.left
    }
}

/// Per positive `(y_i, λ)`, the unit interval cut into consecutive intervals
/// (one per outcome, canonical order) with lengths `p[x_i‖y_i,λ]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalPartition {
    pub party: Party,
    /// Keyed by `(y_i, λ)` label indices.
    pub rows: BTreeMap<Atom, Vec<Interval>>,
}

impl IntervalPartition {
    /// Outcome whose interval contains `cell`, if any interval does.
    pub fn outcome_for(&self, row: &[usize], cell: &Cell) -> Option<usize> {
        self.rows
            .get(row)?
            .iter()
            .find(|iv| iv.left <= cell.left && cell.right <= iv.right && iv.left < iv.right)
            .map(|iv| iv.outcome)
    }

    pub fn endpoints(&self) -> Vec<Rational> {
        let mut points: Vec<Rational> = vec![Rational::zero(), Rational::one()];
        for row in self.rows.values() {
            for iv in row {
                points.push(iv.left.clone());
                points.push(iv.right.clone());
            }
        }
        points.sort();
        points.dedup();
        points
    }
}

pub fn interval_partition(p: &HVModel, party: Party) -> IntervalPartition {
    let c = p.measure().conditional(&[party.outcome()], &[party.setting(), LAM]).expect("fixed coordinates");
    let n = p.space(party.outcome()).len();
    let rows = c
        .given_support()
        .map(|(ctx, _)| {
            let mut left = Rational::zero();
            let intervals = (0..n)
                .map(|x| {
                    let right = &left + &c.prob(&[x], ctx).expect("positive row");
                    let iv = Interval { outcome: x, left: left.clone(), right: right.clone() };
                    left = right;
                    iv
                })
                .collect();
            (ctx.clone(), intervals)
        })
        .collect();
    IntervalPartition { party, rows }
}

/// A cell `[left, right)` of the refinement (the last cell is closed).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub left: Rational,
    pub right: Rational,
}

impl Cell {
    pub fn length(&self) -> Rational {
        &self.right - &self.left
    }
}

fn endpoint(r: &Rational) -> String {
    if r.denom() == &1.into() {
        r.numer().to_string()
    } else {
        r.to_string()
    }
}

/// The common refinement of every row of an [`IntervalPartition`]: the cells
/// between consecutive distinct endpoints, each of positive length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RefinedCellSpace {
    pub party: Party,
    pub cells: Vec<Cell>,
}

impl RefinedCellSpace {
    pub fn from_partition(partition: &IntervalPartition) -> Self {
        let points = partition.endpoints();
        let cells = points.windows(2).map(|w| Cell { left: w[0].clone(), right: w[1].clone() }).collect();
        RefinedCellSpace { party: partition.party, cells }
    }

    pub fn labels(&self) -> Vec<String> {
        let last = self.cells.len() - 1;
        self.cells
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let close = if i == last { ']' } else { ')' };
                format!("[{},{}{close}", endpoint(&c.left), endpoint(&c.right))
            })
            .collect()
    }

    fn space_name(&self) -> String {
        format!("u{}", self.party.letter())
    }

    /// The cell-length measure: Lebesgue measure on the quotient.
    pub fn measure(&self) -> FiniteMeasure {
        let layout =
            ProductLayout::new(vec![FiniteSpace::new(self.space_name(), self.labels()).expect("distinct cells")])
                .expect("one factor");
        FiniteMeasure::from_weights(layout, self.cells.iter().enumerate().map(|(i, c)| (vec![i], c.length())))
            .expect("cells partition [0,1]")
    }
}

impl fmt::Display for RefinedCellSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.labels().join(" "))
    }
}

/// Everything built along the way by [`determinize_local_detailed`].
#[derive(Clone, Debug)]
pub struct LocalDeterminization {
    pub model: HVModel,
    pub partitions: [IntervalPartition; 2],
    pub cells: [RefinedCellSpace; 2],
    /// `r ⊗ u_a ⊗ u_b` on `Y × Λ × cells_a × cells_b`.
    pub r_bar: FiniteMeasure,
    /// `s_a` on `X_a × Y_a × Λ × cells_a` and `s_b` likewise.
    pub s: [FiniteMeasure; 2],
}

/// A strongly deterministic, λ-independent model equivalent to the local,
/// λ-independent model `p`. Errors with the failing report if `p` is not
/// local or not λ-independent.
pub fn determinize_local(p: &HVModel) -> Result<HVModel> {
    determinize_local_detailed(p).map(|d| d.model)
}

pub fn determinize_local_detailed(p: &HVModel) -> Result<LocalDeterminization> {
    for report in [check_locality(p), check_lambda_independence(p)] {
        if !report.holds {
            return Err(Error::PropertyFailed(Box::new(report)));
        }
    }

    let partitions = [interval_partition(p, Party::A), interval_partition(p, Party::B)];
    let cells = [RefinedCellSpace::from_partition(&partitions[0]), RefinedCellSpace::from_partition(&partitions[1])];
    let r = named_marginals(p).r;
    let u = [cells[0].measure(), cells[1].measure()];
    let r_bar = r.product(&u[0])?.product(&u[1])?;

    let ua = cells[0].space_name();
    let ub = cells[1].space_name();
    let u_names = [ua.as_str(), ub.as_str()];

    // s_i(x × K × L × U) = ∫_{K×L×U} 1_{I_i(x, y_i, λ)}(α) dr̄
    let s = [Party::A, Party::B].map(|party| {
        let i = party as usize;
        let base = r_bar.marginal(&[party.setting(), LAM, u_names[i]]).expect("r̄ coordinates");
        let base = base.permuted(&[party.setting(), LAM, u_names[i]]).expect("same factors");
        let mut factors = vec![p.space(party.outcome()).clone()];
        factors.extend(base.layout().factors().iter().cloned());
        let layout = ProductLayout::new(factors).expect("distinct names");
        let weights = base.support().map(|(atom, w)| {
            let x = partitions[i]
                .outcome_for(&atom[..2], &cells[i].cells[atom[2]])
                .expect("each refinement cell lies inside one interval of every positive row");
            (vec![x, atom[0], atom[1], atom[2]], w.clone())
        });
        FiniteMeasure::from_weights(layout, weights).expect("s_i has the mass of r̄")
    });

    let p_bar_a = fiber_product(&s[0], &r_bar, &[YA, LAM, u_names[0]])?;
    let p_bar_b = fiber_product(&s[1], &r_bar, &[YB, LAM, u_names[1]])?;
    let joint = fiber_product(&p_bar_a, &p_bar_b, &[YA, YB, LAM, u_names[0], u_names[1]])?;
    let model = merge_hidden_factors(&joint, p.space(LAM), &cells, u_names)?;

    if !equivalent(&model, p)? {
        return Err(Error::Inconsistent("local determinization changed the empirical model".into()));
    }
    for report in [check_strong_determinism(&model), check_lambda_independence(&model)] {
        if !report.holds {
            return Err(Error::Inconsistent(format!("local determinization output violates {report}")));
        }
    }
    Ok(LocalDeterminization { model, partitions, cells, r_bar, s })
}

/// Collapses `lam × ua × ub` into a single `lam` factor labelled
/// `λ|a[cell]|b[cell]`.
fn merge_hidden_factors(
    joint: &FiniteMeasure,
    lam: &FiniteSpace,
    cells: &[RefinedCellSpace; 2],
    u_names: [&str; 2],
) -> Result<HVModel> {
    let ordered = joint.permuted(&[XA, XB, YA, YB, LAM, u_names[0], u_names[1]])?;
    let (la, lb) = (cells[0].labels(), cells[1].labels());
    let lb = &lb;
    let labels: Vec<String> = lam
        .atoms()
        .iter()
        .flat_map(|l| la.iter().flat_map(move |a| lb.iter().map(move |b| format!("{l}|a{a}|b{b}"))))
        .collect();
    let merged = FiniteSpace::new(LAM, labels)?;
    let layout = ProductLayout::new(vec![
        ordered.layout().factors()[0].clone(),
        ordered.layout().factors()[1].clone(),
        ordered.layout().factors()[2].clone(),
        ordered.layout().factors()[3].clone(),
        merged,
    ])?;
    let weights = ordered.support().map(|(a, w)| {
        let lam_index = (a[4] * la.len() + a[5]) * lb.len() + a[6];
        (vec![a[0], a[1], a[2], a[3], lam_index], w.clone())
    });
    HVModel::new(FiniteMeasure::from_weights(layout, weights)?)
}
