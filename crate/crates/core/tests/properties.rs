//! Randomized checks of the hidden-variable properties and their relations.

use fibermeasure::determinize::{determinize_empirical, trivial_hv};
use fibermeasure::models::{equivalent, named_marginals, realizes, LAM, YA, YB};
use fibermeasure::properties::{
    check, check_all, check_lambda_independence, check_weak_determinism, cross_check, relationships, Property,
};
use fibermeasure::sample::{random_hv, random_hv_with, random_r, Dims, KernelKind};
use fibermeasure::{HVModel, Party, Rational};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Each party's outcome conditional given `(y, λ)` is `{0,1}`-valued.
fn party_determined(p: &HVModel, party: Party) -> bool {
    let c = p.measure().conditional(&[party.outcome()], &[YA, YB, LAM]).unwrap();
    let determined = c.given_support().all(|(ctx, _)| c.row(ctx).unwrap().values().all(Rational::is_zero_or_one));
    determined
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn relationships_hold(seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_hv(&mut rng, 3);
        let reports = check_all(&p);
        for rel in relationships(&reports).unwrap() {
            prop_assert!(rel.holds, "{} fails on {:?}", rel.name, p);
        }
    }

    #[test]
    fn checkers_agree_with_characterizations(seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_hv(&mut rng, 3);
        for c in cross_check(&p).unwrap() {
            prop_assert!(c.agrees(), "{:?}", c);
        }
    }

    #[test]
    fn witnesses_are_genuine(seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_hv(&mut rng, 3);
        for report in check_all(&p) {
            match &report.witness {
                None => prop_assert!(report.holds),
                Some(w) => {
                    prop_assert!(!report.holds);
                    prop_assert_ne!(&w.lhs, &w.rhs);
                    let labels: Vec<&str> = w.atom.iter().map(|(_, l)| l.as_str()).collect();
                    let names: Vec<&str> = w.atom.iter().map(|(n, _)| n.as_str()).collect();
                    let marg = p.measure().marginal(&names).unwrap();
                    let atom = marg.layout().atom_from_labels(&labels).unwrap();
                    prop_assert!(marg.weight(&atom).is_positive());
                }
            }
        }
    }

    #[test]
    fn lambda_independence_three_ways(seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_hv(&mut rng, 3);
        let fam = named_marginals(&p);
        // conditional form: p[λ ‖ Y]_y = p(λ) at positive y
        let c = p.measure().conditional(&[LAM], &[YA, YB]).unwrap();
        let conditional = c.given_support().all(|(y, _)| {
            (0..p.space(LAM).len()).all(|l| c.prob(&[l], y).unwrap() == fam.p_lambda.weight(&[l]))
        });
        let product = fam.r.measures_equal(&fam.p_y.product(&fam.p_lambda).unwrap()).unwrap();
        let independent = fam.r.layout().atoms().all(|a| fam.r.weight(&a) == &fam.p_y.weight(&a[..2]) * &fam.p_lambda.weight(&a[2..]));
        prop_assert_eq!(conditional, product);
        prop_assert_eq!(product, independent);
        prop_assert_eq!(product, check_lambda_independence(&p).holds);
    }

    #[test]
    fn lambda_independence_depends_only_on_r(seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dims = Dims::random(&mut rng, 3);
        let independent = rng.random_bool(0.5);
        let r = random_r(&mut rng, dims, independent, 0.3);
        let kinds = KernelKind::ALL;
        let (kp, kq) = (kinds[rng.random_range(0..kinds.len())], kinds[rng.random_range(0..kinds.len())]);
        let p = random_hv_with(&mut rng, dims, kp, &r, 0.3);
        let q = random_hv_with(&mut rng, dims, kq, &r, 0.3);
        prop_assert_eq!(check_lambda_independence(&p).holds, check_lambda_independence(&q).holds);
        if independent {
            prop_assert!(check_lambda_independence(&p).holds);
        }
    }

    #[test]
    fn weak_determinism_per_party(seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_hv(&mut rng, 3);
        let weak = check_weak_determinism(&p).holds;
        let a = party_determined(&p, Party::A);
        let b = party_determined(&p, Party::B);
        prop_assert_eq!(weak, a && b);
        if weak {
            prop_assert!(a);
        }
    }

    #[test]
    fn models_realize_their_marginal(seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_hv(&mut rng, 3);
        prop_assert!(realizes(&p, &p.empirical()).unwrap());
    }

    #[test]
    fn equivalence_is_an_equivalence(seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p1 = random_hv(&mut rng, 2);
        let e = p1.empirical();
        let pick = |rng: &mut ChaCha8Rng| match rng.random_range(0..3) {
            0 => trivial_hv(&e),
            1 => determinize_empirical(&e),
            _ => random_hv(rng, 2),
        };
        let p2 = pick(&mut rng);
        let p3 = pick(&mut rng);
        let eq = |a: &HVModel, b: &HVModel| equivalent(a, b).unwrap_or(false);
        prop_assert!(eq(&p1, &p1));
        prop_assert_eq!(eq(&p1, &p2), eq(&p2, &p1));
        if eq(&p1, &p2) && eq(&p2, &p3) {
            prop_assert!(eq(&p1, &p3));
        }
    }
}

#[test]
fn one_party_determinism_does_not_give_weak_determinism() {
    // Alice deterministic, Bob a fair coin
    let dims = Dims { xa: 2, xb: 2, ya: 1, yb: 1, lam: 1 };
    let layout = dims.omega_layout();
    let p = HVModel::new(
        fibermeasure::FiniteMeasure::from_weights(
            layout,
            [(vec![0, 0, 0, 0, 0], Rational::new(1, 2).unwrap()), (vec![0, 1, 0, 0, 0], Rational::new(1, 2).unwrap())],
        )
        .unwrap(),
    )
    .unwrap();
    assert!(party_determined(&p, Party::A));
    assert!(!party_determined(&p, Party::B));
    assert!(!check(Property::WeakDeterminism, &p).holds);
}
