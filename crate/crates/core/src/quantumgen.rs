//! Empirical models from spin measurements on the two-qubit singlet.
//!
//! The joint outcome probabilities come from a direct state-vector
//! computation: the singlet `(|01⟩ − |10⟩)/√2` in the basis `|ab⟩ ↦ 2a + b`,
//! measured along in-plane directions at the given angles (degrees) with
//! `up = (cos θ/2, sin θ/2)` and `down = (−sin θ/2, cos θ/2)`. Each
//! probability is then rationalized and every context block is renormalized
//! to sum to exactly 1 by adjusting its largest entry.
//!
//! The rational blocks are no longer exactly no-signaling in general; the
//! distortion per entry is bounded by the rationalization error plus the
//! renormalization correction, both `O(1/max_denominator)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::measure::{FiniteMeasure, FiniteSpace, ProductLayout};
use crate::models::{EmpiricalModel, XA, XB, YA, YB};
use crate::rationals::Rational;

pub const OUTCOMES: [&str; 2] = ["up", "down"];

/// How contexts are drawn.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub enum SettingDistribution {
    #[default]
    Uniform,
    /// `weights[i][j]` for angle `i` of Alice and `j` of Bob.
    Weights(Vec<Vec<Rational>>),
}

fn singlet() -> [Complex64; 4] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    [Complex64::new(0.0, 0.0), Complex64::new(h, 0.0), Complex64::new(-h, 0.0), Complex64::new(0.0, 0.0)]
}

fn basis(theta_deg: f64, outcome: usize) -> [Complex64; 2] {
    let half = theta_deg.to_radians() / 2.0;
    let (s, c) = half.sin_cos();
    match outcome {
        0 => [Complex64::new(c, 0.0), Complex64::new(s, 0.0)],
        _ => [Complex64::new(-s, 0.0), Complex64::new(c, 0.0)],
    }
}

/// Born probabilities `P(x_a, x_b)` for outcome indices `0 = up`, `1 = down`.
pub fn singlet_probabilities(theta_a_deg: f64, theta_b_deg: f64) -> [[f64; 2]; 2] {
    let psi = singlet();
    let mut out = [[0.0; 2]; 2];
    for (xa, row) in out.iter_mut().enumerate() {
        let ua = basis(theta_a_deg, xa);
        for (xb, cell) in row.iter_mut().enumerate() {
            let ub = basis(theta_b_deg, xb);
            let mut amp = Complex64::new(0.0, 0.0);
            for i in 0..2 {
                for j in 0..2 {
                    amp += ua[i].conj() * ub[j].conj() * psi[2 * i + j];
                }
            }
            *cell = amp.norm_sqr();
        }
    }
    out
}

/// The CHSH value `E(0,0) + E(0,1) + E(1,0) − E(1,1)` of the exact Born
/// probabilities, before any rationalization.
pub fn singlet_chsh(angles_a: [f64; 2], angles_b: [f64; 2]) -> f64 {
    let mut s = 0.0;
    for (i, &a) in angles_a.iter().enumerate() {
        for (j, &b) in angles_b.iter().enumerate() {
            let p = singlet_probabilities(a, b);
            let e = p[0][0] + p[1][1] - p[0][1] - p[1][0];
            s += if (i, j) == (1, 1) { -e } else { e };
        }
    }
    s
}

fn angle_space(name: &str, angles: &[f64]) -> Result<FiniteSpace> {
    if angles.is_empty() {
        return Err(Error::Domain(format!("no angles given for {name}")));
    }
    if let Some(a) = angles.iter().find(|a| !a.is_finite()) {
        return Err(Error::Domain(format!("angle {a} for {name} is not finite")));
    }
    FiniteSpace::new(name, angles.iter().map(|a| a.to_string()))
        .map_err(|_| Error::Domain(format!("repeated angle for {name}")))
}

/// A four-outcome block rationalized and renormalized to sum to 1.
fn rational_block(p: [[f64; 2]; 2], max_denominator: u64) -> Result<[[Rational; 2]; 2]> {
    let mut block: [[Rational; 2]; 2] = std::array::from_fn(|_| std::array::from_fn(|_| Rational::zero()));
    for (row, prow) in block.iter_mut().zip(p) {
        for (cell, v) in row.iter_mut().zip(prow) {
            *cell = Rational::approximate_from_float(v.clamp(0.0, 1.0), max_denominator)?;
        }
    }
    let total: Rational = block.iter().flatten().sum();
    let (mut bi, mut bj) = (0, 0);
    for i in 0..2 {
        for j in 0..2 {
            if block[i][j] > block[bi][bj] {
                (bi, bj) = (i, j);
            }
        }
    }
    block[bi][bj] += &(Rational::one() - total);
    Ok(block)
}

pub fn singlet_model(
    angles_a: &[f64],
    angles_b: &[f64],
    setting_dist: &SettingDistribution,
    max_denominator: u64,
) -> Result<EmpiricalModel> {
    if max_denominator == 0 {
        return Err(Error::Domain("max_denominator must be at least 1".into()));
    }
    let ya = angle_space(YA, angles_a)?;
    let yb = angle_space(YB, angles_b)?;
    let dist: Vec<Vec<Rational>> = match setting_dist {
        SettingDistribution::Uniform => {
            let u = Rational::new(1, angles_a.len() * angles_b.len())?;
            vec![vec![u; angles_b.len()]; angles_a.len()]
        }
        SettingDistribution::Weights(w) => {
            if w.len() != angles_a.len() || w.iter().any(|r| r.len() != angles_b.len()) {
                return Err(Error::Domain(format!(
                    "setting distribution must be {}×{}",
                    angles_a.len(),
                    angles_b.len()
                )));
            }
            w.clone()
        }
    };

    let outcome = |name: &str| FiniteSpace::new(name, OUTCOMES).expect("distinct outcomes");
    let layout = ProductLayout::new(vec![outcome(XA), outcome(XB), ya, yb])?;
    let mut weights = Vec::with_capacity(4 * angles_a.len() * angles_b.len());
    for (i, &a) in angles_a.iter().enumerate() {
        for (j, &b) in angles_b.iter().enumerate() {
            if dist[i][j].is_zero() {
                continue;
            }
            let block = rational_block(singlet_probabilities(a, b), max_denominator)?;
            for (xa, row) in block.iter().enumerate() {
                for (xb, p) in row.iter().enumerate() {
                    weights.push((vec![xa, xb, i, j], p * &dist[i][j]));
                }
            }
        }
    }
    EmpiricalModel::new(FiniteMeasure::from_weights(layout, weights)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rationals::rat;
    use crate::realizability::chsh_value;
    use proptest::prelude::*;

    const SQRT8: f64 = 2.0 * std::f64::consts::SQRT_2;

    fn closed_form(a: f64, b: f64) -> [[f64; 2]; 2] {
        let d = (a - b).to_radians() / 2.0;
        let same = 0.5 * d.sin().powi(2);
        let diff = 0.5 * d.cos().powi(2);
        [[same, diff], [diff, same]]
    }

    #[test]
    fn equal_angles_anticorrelate() {
        let e = singlet_model(&[0.0], &[0.0], &SettingDistribution::Uniform, 1_000_000).unwrap();
        let m = e.measure();
        assert_eq!(m.weight(&[0, 1, 0, 0]), rat(1, 2));
        assert_eq!(m.weight(&[1, 0, 0, 0]), rat(1, 2));
        assert_eq!(m.support_len(), 2);
        assert_eq!(e.space(YA).atoms(), &["0"]);
        assert_eq!(e.space(XA).atoms(), &["up", "down"]);
    }

    #[test]
    fn orthogonal_angles_are_uniform() {
        let e = singlet_model(&[0.0], &[90.0], &SettingDistribution::Uniform, 1_000_000).unwrap();
        for xa in 0..2 {
            for xb in 0..2 {
                assert_eq!(e.measure().weight(&[xa, xb, 0, 0]), rat(1, 4));
            }
        }
    }

    #[test]
    fn chsh_at_optimal_angles() {
        // |S| = 2√2 with the minus sign on context (1,1)
        let s = singlet_chsh([0.0, 90.0], [45.0, -45.0]);
        assert!((s + SQRT8).abs() < 1e-12);
        let e = singlet_model(&[0.0, 90.0], &[45.0, -45.0], &SettingDistribution::Uniform, 1_000_000).unwrap();
        let exact = chsh_value(&e).unwrap().to_f64();
        assert!((exact.abs() - SQRT8).abs() < 1e-9);
    }

    #[test]
    fn chsh_at_zero_ninety_forty_five_one_thirty_five() {
        // E = −cos(θa − θb) gives −c, +c, −c, −c with c = 1/√2, so S = 0
        assert!(singlet_chsh([0.0, 90.0], [45.0, 135.0]).abs() < 1e-12);
    }

    #[test]
    fn custom_setting_distribution() {
        let dist = SettingDistribution::Weights(vec![vec![rat(1, 3), rat(2, 3)]]);
        let e = singlet_model(&[0.0], &[0.0, 90.0], &dist, 1000).unwrap();
        let s = e.settings();
        assert_eq!(s.weight(&[0, 0]), rat(1, 3));
        assert_eq!(s.weight(&[0, 1]), rat(2, 3));
        let bad = SettingDistribution::Weights(vec![vec![rat(1, 1)]]);
        assert!(matches!(singlet_model(&[0.0], &[0.0, 90.0], &bad, 1000), Err(Error::Domain(_))));
    }

    #[test]
    fn bad_inputs() {
        let u = SettingDistribution::Uniform;
        assert!(matches!(singlet_model(&[], &[0.0], &u, 10), Err(Error::Domain(_))));
        assert!(matches!(singlet_model(&[0.0, 0.0], &[0.0], &u, 10), Err(Error::Domain(_))));
        assert!(matches!(singlet_model(&[f64::NAN], &[0.0], &u, 10), Err(Error::Domain(_))));
        assert!(matches!(singlet_model(&[0.0], &[0.0], &u, 0), Err(Error::Domain(_))));
    }

    proptest! {
        #[test]
        fn matches_closed_form(a in -360.0f64..360.0, b in -360.0f64..360.0) {
            let p = singlet_probabilities(a, b);
            let q = closed_form(a, b);
            for i in 0..2 {
                for j in 0..2 {
                    prop_assert!((p[i][j] - q[i][j]).abs() < 1e-12);
                }
            }
        }

        #[test]
        fn float_behavior_is_no_signaling(a in -180.0f64..180.0, b1 in -180.0f64..180.0, b2 in -180.0f64..180.0) {
            let p1 = singlet_probabilities(a, b1);
            let p2 = singlet_probabilities(a, b2);
            for xa in 0..2 {
                prop_assert!(((p1[xa][0] + p1[xa][1]) - (p2[xa][0] + p2[xa][1])).abs() < 1e-12);
            }
        }

        #[test]
        fn swapping_parties_transposes(a in -180.0f64..180.0, b in -180.0f64..180.0) {
            let p = singlet_probabilities(a, b);
            let q = singlet_probabilities(b, a);
            for i in 0..2 {
                for j in 0..2 {
                    prop_assert!((p[i][j] - q[j][i]).abs() < 1e-12);
                }
            }
        }

        #[test]
        fn rationalized_model_is_valid(
            a in proptest::collection::vec(-180i32..180, 1..3),
            b in proptest::collection::vec(-180i32..180, 1..3),
            den in 1u64..100_000,
        ) {
            let mut a: Vec<f64> = a.into_iter().map(f64::from).collect();
            let mut b: Vec<f64> = b.into_iter().map(f64::from).collect();
            a.dedup();
            b.dedup();
            prop_assume!(a.len() == a.iter().map(|x| x.to_bits()).collect::<std::collections::HashSet<_>>().len());
            prop_assume!(b.len() == b.iter().map(|x| x.to_bits()).collect::<std::collections::HashSet<_>>().len());
            let e = singlet_model(&a, &b, &SettingDistribution::Uniform, den).unwrap();
            let c = e.measure().conditional(&[XA, XB], &[YA, YB]).unwrap();
            for (i, &ta) in a.iter().enumerate() {
                for (j, &tb) in b.iter().enumerate() {
                    let oracle = singlet_probabilities(ta, tb);
                    for (xa, row) in oracle.iter().enumerate() {
                        for (xb, want) in row.iter().enumerate() {
                            let got = c.prob(&[xa, xb], &[i, j]).unwrap().to_f64();
                            prop_assert!((got - want).abs() <= 5.0 / den as f64);
                        }
                    }
                }
            }
        }
    }
}
