//! Empirical and hidden-variable models.
//!
//! Both are finite measures with fixed coordinate names: outcomes `xa`, `xb`,
//! settings (measurements) `ya`, `yb`, and for hidden-variable models the
//! hidden variable `lam`. Factors are always stored in that order.

use crate::error::{Error, Result};
use crate::measure::{FiniteMeasure, FiniteSpace, ProductLayout};

pub const XA: &str = "xa";
pub const XB: &str = "xb";
pub const YA: &str = "ya";
pub const YB: &str = "yb";
pub const LAM: &str = "lam";

/// Coordinates of Ψ = X × Y.
pub const PSI: [&str; 4] = [XA, XB, YA, YB];
/// Coordinates of Ω = X × Y × Λ.
pub const OMEGA: [&str; 5] = [XA, XB, YA, YB, LAM];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Party {
    A,
    B,
}

impl Party {
    pub const BOTH: [Party; 2] = [Party::A, Party::B];

    pub fn outcome(self) -> &'static str {
        match self {
            Party::A => XA,
            Party::B => XB,
        }
    }

    pub fn setting(self) -> &'static str {
        match self {
            Party::A => YA,
            Party::B => YB,
        }
    }

    pub fn other(self) -> Party {
        match self {
            Party::A => Party::B,
            Party::B => Party::A,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Party::A => 'a',
            Party::B => 'b',
        }
    }
}

fn with_exact_factors(measure: FiniteMeasure, names: &[&str], what: &str) -> Result<FiniteMeasure> {
    let mut have = measure.layout().names();
    have.sort_unstable();
    let mut want = names.to_vec();
    want.sort_unstable();
    if have != want {
        return Err(Error::layout(format!("{what} needs factors {names:?}, got {:?}", measure.layout().names())));
    }
    measure.permuted(names)
}

/// A probability measure `e` on Ψ = X_a × X_b × Y_a × Y_b.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmpiricalModel {
    measure: FiniteMeasure,
}

impl EmpiricalModel {
    pub fn new(measure: FiniteMeasure) -> Result<Self> {
        Ok(EmpiricalModel { measure: with_exact_factors(measure, &PSI, "an empirical model")? })
    }

    /// Standard layout from the four coordinate spaces' labels.
    pub fn layout_from_labels(xa: &[&str], xb: &[&str], ya: &[&str], yb: &[&str]) -> Result<ProductLayout> {
        ProductLayout::new(vec![
            FiniteSpace::new(XA, xa.iter().copied())?,
            FiniteSpace::new(XB, xb.iter().copied())?,
            FiniteSpace::new(YA, ya.iter().copied())?,
            FiniteSpace::new(YB, yb.iter().copied())?,
        ])
    }

    pub fn measure(&self) -> &FiniteMeasure {
        &self.measure
    }

    pub fn into_measure(self) -> FiniteMeasure {
        self.measure
    }

    pub fn layout(&self) -> &ProductLayout {
        self.measure.layout()
    }

    pub fn space(&self, name: &str) -> &FiniteSpace {
        self.layout().factor(name).expect("fixed coordinate")
    }

    /// The setting distribution `marg_Y e`.
    pub fn settings(&self) -> FiniteMeasure {
        self.measure.marginal_at(&[2, 3])
    }
}

/// A probability measure `p` on Ω = X_a × X_b × Y_a × Y_b × Λ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HVModel {
    measure: FiniteMeasure,
}

impl HVModel {
    pub fn new(measure: FiniteMeasure) -> Result<Self> {
        Ok(HVModel { measure: with_exact_factors(measure, &OMEGA, "a hidden-variable model")? })
    }

    pub fn measure(&self) -> &FiniteMeasure {
        &self.measure
    }

    pub fn into_measure(self) -> FiniteMeasure {
        self.measure
    }

    pub fn layout(&self) -> &ProductLayout {
        self.measure.layout()
    }

    pub fn space(&self, name: &str) -> &FiniteSpace {
        self.layout().factor(name).expect("fixed coordinate")
    }

    /// The empirical model `marg_Ψ p` this model realizes.
    pub fn empirical(&self) -> EmpiricalModel {
        EmpiricalModel { measure: self.measure.marginal_at(&[0, 1, 2, 3]) }
    }

    /// The hidden-variable space's measure `p_Λ`.
    pub fn lambda_marginal(&self) -> FiniteMeasure {
        self.measure.marginal_at(&[4])
    }
}

/// The marginals of an h.v. model used throughout the property checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarginalFamily {
    /// on X_a × Y × Λ
    pub p_a: FiniteMeasure,
    /// on X_b × Y × Λ
    pub p_b: FiniteMeasure,
    /// on X_a × Y_a × Λ
    pub q_a: FiniteMeasure,
    /// on X_b × Y_b × Λ
    pub q_b: FiniteMeasure,
    /// on Y × Λ
    pub r: FiniteMeasure,
    pub p_y: FiniteMeasure,
    pub p_lambda: FiniteMeasure,
}

impl MarginalFamily {
    pub fn p_party(&self, party: Party) -> &FiniteMeasure {
        match party {
            Party::A => &self.p_a,
            Party::B => &self.p_b,
        }
    }

    pub fn q_party(&self, party: Party) -> &FiniteMeasure {
        match party {
            Party::A => &self.q_a,
            Party::B => &self.q_b,
        }
    }
}

pub fn named_marginals(p: &HVModel) -> MarginalFamily {
    let m = p.measure();
    MarginalFamily {
        p_a: m.marginal_at(&[0, 2, 3, 4]),
        p_b: m.marginal_at(&[1, 2, 3, 4]),
        q_a: m.marginal_at(&[0, 2, 4]),
        q_b: m.marginal_at(&[1, 3, 4]),
        r: m.marginal_at(&[2, 3, 4]),
        p_y: m.marginal_at(&[2, 3]),
        p_lambda: m.marginal_at(&[4]),
    }
}

/// Whether `p` realizes `e`, i.e. `e = marg_Ψ p` exactly.
pub fn realizes(p: &HVModel, e: &EmpiricalModel) -> Result<bool> {
    e.measure().measures_equal(p.empirical().measure())
}

/// Realization-equivalence: both models realize the same empirical model.
/// Their hidden-variable spaces may differ.
pub fn equivalent(p: &HVModel, q: &HVModel) -> Result<bool> {
    p.empirical().measure().measures_equal(q.empirical().measure())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rationals::{rat, Rational};

    fn bits(name: &str) -> FiniteSpace {
        FiniteSpace::new(name, ["0", "1"]).unwrap()
    }

    fn correlated() -> EmpiricalModel {
        let layout = EmpiricalModel::layout_from_labels(&["0", "1"], &["0", "1"], &["0"], &["0"]).unwrap();
        EmpiricalModel::new(
            FiniteMeasure::from_weights(layout, [(vec![0, 0, 0, 0], rat(1, 2)), (vec![1, 1, 0, 0], rat(1, 2))])
                .unwrap(),
        )
        .unwrap()
    }

    fn with_lambda(e: &EmpiricalModel, lam: &FiniteMeasure) -> HVModel {
        HVModel::new(e.measure().product(lam).unwrap()).unwrap()
    }

    #[test]
    fn construction_normalizes_factor_order() {
        let e = correlated();
        let shuffled = e.measure().permuted(&["yb", "xa", "ya", "xb"]).unwrap();
        assert_eq!(EmpiricalModel::new(shuffled).unwrap(), e);
        let lam = FiniteMeasure::uniform(ProductLayout::new(vec![bits("lam")]).unwrap()).unwrap();
        let p = HVModel::new(lam.product(e.measure()).unwrap()).unwrap();
        assert_eq!(p.layout().names(), OMEGA.to_vec());
        assert!(matches!(HVModel::new(e.measure().clone()), Err(Error::Layout(_))));
        assert!(matches!(EmpiricalModel::new(p.into_measure()), Err(Error::Layout(_))));
    }

    #[test]
    fn realization_and_equivalence() {
        let e = correlated();
        let point = FiniteMeasure::point_mass(
            ProductLayout::new(vec![FiniteSpace::new(LAM, ["*"]).unwrap()]).unwrap(),
            vec![0],
        )
        .unwrap();
        let p = with_lambda(&e, &point);
        assert!(realizes(&p, &e).unwrap());

        let lam2 = FiniteMeasure::from_weights(
            ProductLayout::new(vec![bits(LAM)]).unwrap(),
            [(vec![0], rat(1, 3)), (vec![1], rat(2, 3))],
        )
        .unwrap();
        let p2 = with_lambda(&e, &lam2);
        assert!(equivalent(&p, &p2).unwrap());

        // Λ-correlated noise that perturbs the Ψ-marginal
        let w = |a: Vec<usize>, r: Rational| (a, r);
        let noisy = FiniteMeasure::from_weights(
            p2.layout().clone(),
            [
                w(vec![0, 0, 0, 0, 0], rat(1, 6) + rat(1, 100)),
                w(vec![1, 1, 0, 0, 0], rat(1, 6) - rat(1, 100)),
                w(vec![0, 0, 0, 0, 1], rat(1, 3)),
                w(vec![1, 1, 0, 0, 1], rat(1, 3)),
            ],
        )
        .unwrap();
        let noisy = HVModel::new(noisy).unwrap();
        assert!(!realizes(&noisy, &e).unwrap());
        assert!(!equivalent(&noisy, &p).unwrap());

        let other_layout = EmpiricalModel::layout_from_labels(&["0", "1"], &["0", "1"], &["0", "1"], &["0"]).unwrap();
        let other = EmpiricalModel::new(FiniteMeasure::uniform(other_layout).unwrap()).unwrap();
        assert!(matches!(realizes(&p, &other), Err(Error::Layout(_))));
    }

    #[test]
    fn marginal_family_of_product_model() {
        let e = correlated();
        let lam = FiniteMeasure::from_weights(
            ProductLayout::new(vec![bits(LAM)]).unwrap(),
            [(vec![0], rat(1, 4)), (vec![1], rat(3, 4))],
        )
        .unwrap();
        let p = with_lambda(&e, &lam);
        let fam = named_marginals(&p);
        assert!(fam.r.measures_equal(&fam.p_y.product(&fam.p_lambda).unwrap()).unwrap());
        assert!(fam.q_a.marginal(&[LAM]).unwrap().measures_equal(&fam.p_lambda).unwrap());
        assert_eq!(fam.p_a.layout().names(), vec![XA, YA, YB, LAM]);
        assert_eq!(fam.q_b.layout().names(), vec![XB, YB, LAM]);
    }

    #[test]
    fn point_mass_marginals_are_point_masses() {
        let layout = ProductLayout::new(vec![bits(XA), bits(XB), bits(YA), bits(YB), bits(LAM)]).unwrap();
        let p = HVModel::new(FiniteMeasure::point_mass(layout, vec![1, 0, 1, 1, 0]).unwrap()).unwrap();
        let fam = named_marginals(&p);
        for m in [&fam.p_a, &fam.p_b, &fam.q_a, &fam.q_b, &fam.r, &fam.p_y, &fam.p_lambda] {
            assert_eq!(m.support_len(), 1);
        }
    }
}
