use num_traits::Zero;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use fuzzy_core::coeff::{int, rat, Scalar};
use fuzzy_core::hilbert::random_welement;
use fuzzy_core::psi::{inner, product_many, product_rho, rho, BasisLabel, ParamPoint, PsiElement};
use fuzzy_core::special::{clebsch_gordan, hahn_lattice_sum, wigner_d, EulerAngles};
use fuzzy_core::verify::{random_psi, random_scalar};
use fuzzy_core::weil::WElement;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn cfg(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(cfg(64))]

    #[test]
    fn scalar_ring_axioms(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, b, c) = (random_scalar(&mut r), random_scalar(&mut r), random_scalar(&mut r));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(a.conj().conj(), a.clone());
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn scalar_text_round_trip(seed in any::<u64>()) {
        let a = random_scalar(&mut rng(seed));
        let back: Scalar = a.to_string().parse().unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn sqrt_squares_back(n in 1i64..200, d in 1i64..50) {
        let q = rat(n, d);
        let s = Scalar::sqrt_rational(&q).unwrap();
        prop_assert_eq!(&s * &s, Scalar::from_rational(q));
    }
}

proptest! {
    #![proptest_config(cfg(32))]

    #[test]
    fn weyl_associative_and_dagger(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_welement(&mut r, 3, 3);
        let b = random_welement(&mut r, 3, 3);
        let c = random_welement(&mut r, 2, 2);
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b).dagger(), b.dagger().mul(&a.dagger()));
        prop_assert_eq!(a.add(&b).mul(&c), a.mul(&c).add(&b.mul(&c)));
    }

    #[test]
    fn rho_is_a_linear_projection(seed in any::<u64>()) {
        let mut r = rng(seed);
        let p = ParamPoint::symbolic();
        let a = random_welement(&mut r, 4, 3);
        let b = random_welement(&mut r, 4, 3);
        let ra = rho(&a, &p).unwrap();
        prop_assert_eq!(rho(&ra.lift(), &p).unwrap(), ra.clone());
        prop_assert_eq!(rho(&a.add(&b), &p).unwrap(), ra.add(&rho(&b, &p).unwrap()));
    }

    #[test]
    fn label_dagger_matches_lift(seed in any::<u64>()) {
        let x = random_psi(&mut rng(seed), &BasisLabel::all_up_to(4), 3);
        prop_assert_eq!(x.dagger_label().lift(), x.lift().dagger());
    }

    #[test]
    fn ladder_commutator(seed in any::<u64>()) {
        let x = random_psi(&mut rng(seed), &BasisLabel::all_up_to(5), 4);
        let lhs = x.ad_jm().ad_jp().sub(&x.ad_jp().ad_jm());
        prop_assert_eq!(lhs, x.ad_j0().scale(&Scalar::eps().scale(&int(2))));
    }

    #[test]
    fn inner_positive_far_from_degenerate_levels(seed in any::<u64>()) {
        let mut r = rng(seed);
        let p = ParamPoint::numeric(int(1), int(10)).unwrap();
        let x = random_psi(&mut r, &BasisLabel::all_up_to(3), 3);
        let n = inner(&x, &x, &p).unwrap();
        prop_assert_eq!(n.real_sign(), Some(1));
    }

    #[test]
    fn restricted_associativity(seed in any::<u64>()) {
        let mut r = rng(seed);
        let p = ParamPoint::numeric(rat(1, 3), rat(11, 5)).unwrap();
        let ls = BasisLabel::all_up_to(3);
        let (a, b, c) = (random_psi(&mut r, &ls, 2), random_psi(&mut r, &ls, 2), random_psi(&mut r, &ls, 2));
        let right = product_rho(&a, &product_rho(&b, &c, &p).unwrap(), &p).unwrap();
        prop_assert_eq!(right, product_many(&[&a, &b, &c], &p).unwrap());
    }

    #[test]
    fn associativity_defect_is_o_eps(seed in any::<u64>()) {
        let mut r = rng(seed);
        let p = ParamPoint::symbolic();
        let ls = BasisLabel::all_up_to(2);
        let (a, b, c) = (random_psi(&mut r, &ls, 2), random_psi(&mut r, &ls, 2), random_psi(&mut r, &ls, 2));
        let left = product_rho(&product_rho(&a, &b, &p).unwrap(), &c, &p).unwrap();
        let right = product_rho(&a, &product_rho(&b, &c, &p).unwrap(), &p).unwrap();
        prop_assert!(left.sub(&right).eps_order().map_or(true, |o| o >= 2));
    }

    #[test]
    fn products_respect_sectors(a in 0usize..30, b in 0usize..30) {
        let ls = BasisLabel::all_up_to(3);
        let (x, y) = (ls[a], ls[b]);
        let p = ParamPoint::symbolic();
        let prod = product_rho(&PsiElement::basis(x), &PsiElement::basis(y), &p).unwrap();
        for l in prod.labels() {
            prop_assert_eq!(l.r2, x.r2 + y.r2);
            prop_assert_eq!(l.m2, x.m2 + y.m2);
            prop_assert!(l.n2 <= x.n2 + y.n2 && l.n2 >= (x.n2 - y.n2).abs());
        }
    }
}

proptest! {
    #![proptest_config(cfg(64))]

    #[test]
    fn hahn_orthogonality(alpha in 0u32..4, beta in 0u32..4, big_n in 2u32..9, n1 in 0u32..4, n2 in 0u32..4) {
        prop_assume!(n1 < big_n && n2 < big_n && n1 != n2);
        prop_assert!(hahn_lattice_sum(n1, n2, alpha, beta, big_n).is_zero());
    }

    #[test]
    fn clebsch_gordan_orthonormal(j1 in 0i32..5, j2 in 0i32..5, m in -8i32..9) {
        // sum over m1 of <j1 m1; j2 m-m1 | j m>^2 = 1 for every allowed j
        let mut j = (j1 - j2).abs();
        while j <= j1 + j2 {
            if m.abs() <= j && (j + m) % 2 == 0 {
                let mut s = Scalar::zero();
                let mut m1 = -j1;
                while m1 <= j1 {
                    let m2 = m - m1;
                    if m2.abs() <= j2 && (j2 + m2) % 2 == 0 {
                        let c = clebsch_gordan(j1, j2, j, m1, m2, m).unwrap();
                        s += &(&c * &c);
                    }
                    m1 += 2;
                }
                prop_assert_eq!(s, Scalar::one());
            }
            j += 2;
        }
    }

    #[test]
    fn wigner_d_unitary(seed in any::<u64>(), j2 in 0i32..6) {
        let e = EulerAngles::random(&mut rng(seed));
        for m2 in (-j2..=j2).step_by(2) {
            for k2 in (-j2..=j2).step_by(2) {
                let dot: num_complex::Complex64 =
                    (-j2..=j2).step_by(2).map(|a| wigner_d(j2, a, m2, &e).conj() * wigner_d(j2, a, k2, &e)).sum();
                let want = if m2 == k2 { 1.0 } else { 0.0 };
                prop_assert!((dot.re - want).abs() < 1e-12 && dot.im.abs() < 1e-12);
            }
        }
    }
}

#[test]
fn weyl_commutation() {
    assert_eq!(WElement::am().commutator(&WElement::ap()), WElement::scalar(Scalar::eps()));
}
