//! Seeded random instances: measures, empirical models, hidden-variable
//! models of several shapes, and fiber-product inputs.
//!
//! All weights are exact rationals built from small random integers, with
//! zeros drawn on purpose so that null contexts and null atoms show up.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

use crate::measure::{Atom, FiniteMeasure, FiniteSpace, ProductLayout};
use crate::models::{EmpiricalModel, HVModel, LAM, XA, XB, YA, YB};
use crate::rationals::Rational;

/// A random distribution on `n` points with integer weights in `0..=9`,
/// each zero with probability `zero_prob`, never all zero.
pub fn distribution<R: Rng + ?Sized>(rng: &mut R, n: usize, zero_prob: f64) -> Vec<Rational> {
    let mut raw: Vec<u64> =
        (0..n).map(|_| if rng.random_bool(zero_prob) { 0 } else { rng.random_range(1..=9) }).collect();
    if raw.iter().all(|&w| w == 0) {
        raw[rng.random_range(0..n)] = rng.random_range(1..=9);
    }
    let total: u64 = raw.iter().sum();
    raw.into_iter().map(|w| Rational::new(w, total).expect("positive total")).collect()
}

pub fn space(name: &str, size: usize) -> FiniteSpace {
    FiniteSpace::new(name, (0..size).map(|i| i.to_string())).expect("distinct labels")
}

pub fn random_measure<R: Rng + ?Sized>(rng: &mut R, layout: ProductLayout, zero_prob: f64) -> FiniteMeasure {
    let atoms: Vec<Atom> = layout.atoms().collect();
    let w = distribution(rng, atoms.len(), zero_prob);
    FiniteMeasure::from_weights(layout, atoms.into_iter().zip(w)).expect("valid distribution")
}

/// Sizes of the five Ω coordinates, in order `xa, xb, ya, yb, lam`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Dims {
    pub xa: usize,
    pub xb: usize,
    pub ya: usize,
    pub yb: usize,
    pub lam: usize,
}

impl Dims {
    pub const BINARY: Dims = Dims { xa: 2, xb: 2, ya: 2, yb: 2, lam: 1 };

    pub fn random<R: Rng + ?Sized>(rng: &mut R, max: usize) -> Dims {
        let mut d = || rng.random_range(1..=max);
        Dims { xa: d(), xb: d(), ya: d(), yb: d(), lam: d() }
    }

    pub fn psi_layout(&self) -> ProductLayout {
        ProductLayout::new(vec![space(XA, self.xa), space(XB, self.xb), space(YA, self.ya), space(YB, self.yb)])
            .expect("distinct names")
    }

    pub fn omega_layout(&self) -> ProductLayout {
        let mut f = self.psi_layout().factors().to_vec();
        f.push(space(LAM, self.lam));
        ProductLayout::new(f).expect("distinct names")
    }
}

pub fn random_empirical<R: Rng + ?Sized>(rng: &mut R, dims: Dims, zero_prob: f64) -> EmpiricalModel {
    EmpiricalModel::new(random_measure(rng, dims.psi_layout(), zero_prob)).expect("Ψ layout")
}

/// Conditional response tables `K[context][outcome]`.
type Kernel = Vec<Vec<Rational>>;

fn stochastic<R: Rng + ?Sized>(rng: &mut R, contexts: usize, outcomes: usize, zero_prob: f64) -> Kernel {
    (0..contexts).map(|_| distribution(rng, outcomes, zero_prob)).collect()
}

fn deterministic<R: Rng + ?Sized>(rng: &mut R, contexts: usize, outcomes: usize) -> Kernel {
    (0..contexts)
        .map(|_| {
            let hit = rng.random_range(0..outcomes);
            (0..outcomes).map(|x| if x == hit { Rational::one() } else { Rational::zero() }).collect()
        })
        .collect()
}

/// Shapes of `K(x | y, λ)` used by [`random_hv`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelKind {
    /// `K_a(x_a | y_a, λ) · K_b(x_b | y_b, λ)`.
    Local,
    /// `K_a(x_a | y, λ) · K_b(x_b | y, λ)`: outcome independent, may signal.
    Signaling,
    /// Deterministic `f_a(y_a, λ)`, `f_b(y_b, λ)`.
    StrongDeterministic,
    /// Deterministic `f(y, λ)` for the outcome pair.
    WeakDeterministic,
    /// Deterministic `x_a := f(y_b, λ)`, `x_b := g(y_a, λ)`.
    CrossDeterministic,
    /// An arbitrary joint kernel.
    Joint,
}

impl KernelKind {
    pub const ALL: [KernelKind; 6] = [
        KernelKind::Local,
        KernelKind::Signaling,
        KernelKind::StrongDeterministic,
        KernelKind::WeakDeterministic,
        KernelKind::CrossDeterministic,
        KernelKind::Joint,
    ];
}

/// Builds `p(x, y, λ) = r(y, λ) K(x | y, λ)`.
fn assemble(dims: Dims, r: &FiniteMeasure, joint: impl Fn(&[usize], usize, usize) -> Rational) -> HVModel {
    let mut w = Vec::new();
    for (yl, ry) in r.support() {
        for xa in 0..dims.xa {
            for xb in 0..dims.xb {
                let k = joint(yl, xa, xb);
                if !k.is_zero() {
                    w.push((vec![xa, xb, yl[0], yl[1], yl[2]], ry * &k));
                }
            }
        }
    }
    HVModel::new(FiniteMeasure::from_weights(dims.omega_layout(), w).expect("kernel rows sum to 1")).expect("Ω layout")
}

fn r_layout(dims: Dims) -> ProductLayout {
    ProductLayout::new(vec![space(YA, dims.ya), space(YB, dims.yb), space(LAM, dims.lam)]).expect("distinct names")
}

/// `r` on `Y × Λ`: either `p_Y ⊗ p_Λ` or an arbitrary joint.
pub fn random_r<R: Rng + ?Sized>(rng: &mut R, dims: Dims, lambda_independent: bool, zero_prob: f64) -> FiniteMeasure {
    if lambda_independent {
        let y = ProductLayout::new(vec![space(YA, dims.ya), space(YB, dims.yb)]).expect("distinct names");
        let l = ProductLayout::new(vec![space(LAM, dims.lam)]).expect("one factor");
        random_measure(rng, y, zero_prob).product(&random_measure(rng, l, zero_prob)).expect("disjoint")
    } else {
        random_measure(rng, r_layout(dims), zero_prob)
    }
}

pub fn random_hv_with<R: Rng + ?Sized>(
    rng: &mut R,
    dims: Dims,
    kind: KernelKind,
    r: &FiniteMeasure,
    zero_prob: f64,
) -> HVModel {
    let (ya, yb, l) = (dims.ya, dims.yb, dims.lam);
    // context indices: (y_i, λ) ↦ y_i·|Λ| + λ, (y, λ) ↦ (ya·|Y_b| + yb)·|Λ| + λ
    let own = |y: usize, lam: usize| y * l + lam;
    let full = |ctx: &[usize]| (ctx[0] * yb + ctx[1]) * l + ctx[2];
    match kind {
        KernelKind::Local | KernelKind::StrongDeterministic => {
            let (ka, kb) = if kind == KernelKind::Local {
                (stochastic(rng, ya * l, dims.xa, zero_prob), stochastic(rng, yb * l, dims.xb, zero_prob))
            } else {
                (deterministic(rng, ya * l, dims.xa), deterministic(rng, yb * l, dims.xb))
            };
            assemble(dims, r, |c, xa, xb| &ka[own(c[0], c[2])][xa] * &kb[own(c[1], c[2])][xb])
        }
        KernelKind::Signaling => {
            let ka = stochastic(rng, ya * yb * l, dims.xa, zero_prob);
            let kb = stochastic(rng, ya * yb * l, dims.xb, zero_prob);
            assemble(dims, r, |c, xa, xb| &ka[full(c)][xa] * &kb[full(c)][xb])
        }
        KernelKind::CrossDeterministic => {
            let ka = deterministic(rng, yb * l, dims.xa);
            let kb = deterministic(rng, ya * l, dims.xb);
            assemble(dims, r, |c, xa, xb| &ka[own(c[1], c[2])][xa] * &kb[own(c[0], c[2])][xb])
        }
        KernelKind::WeakDeterministic | KernelKind::Joint => {
            let k = if kind == KernelKind::Joint {
                stochastic(rng, ya * yb * l, dims.xa * dims.xb, zero_prob)
            } else {
                deterministic(rng, ya * yb * l, dims.xa * dims.xb)
            };
            assemble(dims, r, |c, xa, xb| k[full(c)][xa * dims.xb + xb].clone())
        }
    }
}

/// A λ-independent model with independent per-party stochastic responses.
pub fn random_local<R: Rng + ?Sized>(rng: &mut R, dims: Dims, zero_prob: f64) -> HVModel {
    let r = random_r(rng, dims, true, zero_prob);
    random_hv_with(rng, dims, KernelKind::Local, &r, zero_prob)
}

/// A model drawn from a mix of constructions: any kernel shape, with or
/// without λ-independence, and occasionally a mixture of two such models.
pub fn random_hv<R: Rng + ?Sized>(rng: &mut R, max_dim: usize) -> HVModel {
    let dims = Dims::random(rng, max_dim);
    let zero_prob = [0.0, 0.2, 0.5][rng.random_range(0..3)];
    let one = |rng: &mut R| {
        let kind = *KernelKind::ALL.choose(rng).expect("nonempty");
        let independent = rng.random_bool(0.5);
        let r = random_r(rng, dims, independent, zero_prob);
        random_hv_with(rng, dims, kind, &r, zero_prob)
    };
    let p = one(rng);
    if rng.random_bool(0.2) {
        let q = one(rng);
        let c = distribution(rng, 2, 0.0);
        let m =
            FiniteMeasure::mixture(&[(c[0].clone(), p.measure()), (c[1].clone(), q.measure())]).expect("same layout");
        HVModel::new(m).expect("Ω layout")
    } else {
        p
    }
}

/// Inputs for a fiber product: `q` on `X × Z` and `r` on `Y × Z` with the
/// same Z-marginal, factor orders shuffled. Returns `(q, r, z_names)`.
pub fn random_fiber_pair<R: Rng + ?Sized>(rng: &mut R) -> (FiniteMeasure, FiniteMeasure, Vec<String>) {
    let mut dim = || rng.random_range(1..=3);
    let xs: Vec<FiniteSpace> = (0..dim().min(2)).map(|i| space(&format!("x{i}"), dim())).collect();
    let ys: Vec<FiniteSpace> = (0..dim().min(2)).map(|i| space(&format!("y{i}"), dim())).collect();
    let zs: Vec<FiniteSpace> = (0..dim().min(2)).map(|i| space(&format!("z{i}"), dim())).collect();
    let zero_prob = [0.0, 0.3][rng.random_range(0..2)];
    let s = random_measure(rng, ProductLayout::new(zs.clone()).expect("distinct"), zero_prob);

    let extend = |rng: &mut R, side: &[FiniteSpace]| {
        let side_layout = ProductLayout::new(side.to_vec()).expect("distinct");
        let n_side: Vec<Atom> = side_layout.atoms().collect();
        let mut factors = side.to_vec();
        factors.extend(zs.iter().cloned());
        let layout = ProductLayout::new(factors).expect("distinct");
        let mut w = Vec::new();
        for (z, sz) in s.support() {
            let k = distribution(rng, n_side.len(), zero_prob);
            for (a, ka) in n_side.iter().zip(k) {
                let mut atom = a.clone();
                atom.extend(z.iter().copied());
                w.push((atom, sz * &ka));
            }
        }
        let m = FiniteMeasure::from_weights(layout, w).expect("extends s");
        let mut order: Vec<String> = m.layout().names().iter().map(|n| n.to_string()).collect();
        order.shuffle(rng);
        let order: Vec<&str> = order.iter().map(String::as_str).collect();
        m.permuted(&order).expect("same factors")
    };
    let q = extend(rng, &xs);
    let r = extend(rng, &ys);
    let mut over: Vec<String> = zs.iter().map(|z| z.name().to_string()).collect();
    over.shuffle(rng);
    (q, r, over)
}
