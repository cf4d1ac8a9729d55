mod common;

use proptest::prelude::*;
use rand::Rng;

use torlog::laurent::{chart_member, delta_apply};
use torlog::vfield::bracket;
use torlog::{CharacterVector, Fan, LatticeVector, LaurentMatrix, LaurentPoly};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn delta_is_a_derivation(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let f = common::laurent(&mut rng, 2, 4);
        let g = common::laurent(&mut rng, 2, 4);
        let v = common::lattice_vector(&mut rng, 2, 3);
        let lhs = delta_apply(&v, &(&f * &g));
        let rhs = &(&delta_apply(&v, &f) * &g) + &(&f * &delta_apply(&v, &g));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn delta_preserves_chart_rings(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let fan = Fan::hirzebruch(2);
        let sigma = fan.maximal_cones()[rng.gen_range(0..fan.maximal_cones().len())];
        let f = common::chart_poly(&mut rng, &fan, sigma, 4);
        let v = common::lattice_vector(&mut rng, 2, 3);
        prop_assert!(chart_member(&f, sigma, &fan));
        prop_assert!(chart_member(&delta_apply(&v, &f), sigma, &fan));
    }

    #[test]
    fn bracket_is_the_commutator_of_derivations(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let a = common::vfield(&mut rng, 2, 3);
        let b = common::vfield(&mut rng, 2, 3);
        let g = common::laurent(&mut rng, 2, 3);
        let ab = bracket(&a, &b).unwrap();
        let commutator = &a.apply(&b.apply(&g)) - &b.apply(&a.apply(&g));
        prop_assert_eq!(ab.apply(&g), commutator);
        prop_assert_eq!(bracket(&b, &a).unwrap(), ab.neg());
    }

    #[test]
    fn jacobi_identity(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let a = common::vfield(&mut rng, 2, 2);
        let b = common::vfield(&mut rng, 2, 2);
        let c = common::vfield(&mut rng, 2, 2);
        let j = bracket(&a, &bracket(&b, &c).unwrap()).unwrap()
            .add(&bracket(&b, &bracket(&c, &a).unwrap()).unwrap())
            .add(&bracket(&c, &bracket(&a, &b).unwrap()).unwrap());
        prop_assert!(j.is_zero());
    }

    #[test]
    fn matrix_leibniz(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let r = rng.gen_range(1..=3);
        let random = |rng: &mut rand_chacha::ChaCha8Rng| {
            let rows = (0..r).map(|_| (0..r).map(|_| common::laurent(rng, 2, 2)).collect()).collect();
            LaurentMatrix::from_rows(rows).unwrap()
        };
        let c1 = random(&mut rng);
        let c2 = random(&mut rng);
        let v = common::lattice_vector(&mut rng, 2, 3);
        let lhs = c1.mul(&c2).unwrap().delta(&v);
        let rhs = c1.delta(&v).mul(&c2).unwrap().add(&c1.mul(&c2.delta(&v)).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn unit_inverse(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let fan = Fan::projective_space(2);
        let sigma = fan.maximal_cones()[0];
        let r = rng.gen_range(1..=3);
        let m = common::frame(&mut rng, &fan, sigma, r);
        let shift = LaurentPoly::character(common::character(&mut rng, 2, 3));
        let c = m.mul(&LaurentMatrix::identity(r, 2).scale(&shift)).unwrap();
        let inv = c.inverse_unit().unwrap();
        prop_assert!(c.mul(&inv).unwrap().is_identity());
        prop_assert!(inv.mul(&c).unwrap().is_identity());
        prop_assert_eq!(inv.inverse_unit().unwrap(), c);
    }
}

#[test]
fn chart_member_examples() {
    let fan = Fan::p1_times_p1();
    let find = |rays: &[usize]| fan.cones().iter().position(|c| c.rays() == rays).unwrap();
    let x = |m: &[i64]| LaurentPoly::character(CharacterVector::new(m.to_vec()));
    let quadrant = find(&[0, 1]);
    assert!(chart_member(&x(&[1, 0]), quadrant, &fan));
    assert!(!chart_member(&x(&[-1, 0]), quadrant, &fan));
    let f = &LaurentPoly::constant(2, torlog::laurent::int(3)) + &x(&[0, 5]).scale(&torlog::laurent::int(2));
    assert!(chart_member(&f, find(&[0]), &fan));
}

#[test]
fn delta_examples() {
    let x = |m: &[i64]| LaurentPoly::character(CharacterVector::new(m.to_vec()));
    let v = LatticeVector::new(vec![1, 0]);
    assert_eq!(delta_apply(&v, &x(&[2, 3])), x(&[2, 3]).scale(&torlog::laurent::int(2)));
    let seven = LaurentPoly::constant(2, torlog::laurent::int(7));
    assert!(delta_apply(&LatticeVector::new(vec![4, -9]), &seven).is_zero());
    let f = &x(&[1, 0]) + &x(&[0, 1]);
    assert_eq!(delta_apply(&LatticeVector::new(vec![1, 1]), &f), f);
}
