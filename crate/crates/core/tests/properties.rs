mod common;

use common::*;
use freelin::algebra::{Coeff, FreePoly, Laurent, LaurentRing, Scalar};
use freelin::differentials::{jacobian, jacobian_invert_bounded, partial, JacobianInversion, TensorPoly};
use freelin::endomorphism::{compose, invert_truncated, random_tame, random_tame_with, Endo, InversionStatus, TameOptions};
use freelin::generic::{reduce_endo, standard_identity, CoeffMap};
use freelin::json::{poly_from_json, poly_to_json};
use freelin::lift2::{abelianize_aut, jvdk_decompose, lift, DEFAULT_FACTOR_BOUND};
use freelin::linalg::Mat;
use freelin::parse::{parse_laurent, ParseOptions};
use freelin::rees::{check_grading, rees_presentation, IdealPresentation};
use freelin::torus::{
    average_linearize, is_effective, translate_origin, verify_conjugation_with_inverse, ActionSpec, WeightData,
};
use proptest::prelude::*;

fn cfg(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(cfg(1000))]

    #[test]
    fn multiplication_is_associative_and_distributive(
        (f, g, h) in (1usize..=3).prop_flat_map(|n| (arb_poly(n, 4, 4), arb_poly(n, 4, 4), arb_poly(n, 4, 4)))
    ) {
        prop_assert_eq!(&(&f * &g) * &h, &f * &(&g * &h));
        prop_assert_eq!(&f * &(&g + &h), &(&f * &g) + &(&f * &h));
        prop_assert_eq!(&(&g + &h) * &f, &(&g * &f) + &(&h * &f));
    }
}

proptest! {
    #![proptest_config(cfg(300))]

    #[test]
    fn abelianization_is_a_homomorphism(f in arb_poly(3, 3, 4), g in arb_poly(3, 3, 4)) {
        let (af, ag) = (f.abelianize(), g.abelianize());
        prop_assert_eq!((&f * &g).abelianize(), af.mul(&ag));
        prop_assert_eq!((&f + &g).abelianize(), af.add(&ag));
    }

    #[test]
    fn substitution_is_coherent(
        f in arb_poly(2, 3, 3),
        a in prop::collection::vec(arb_poly(2, 2, 3), 2),
        b in prop::collection::vec(arb_poly(2, 2, 3), 2),
    ) {
        let lhs = f.substitute(&a).unwrap().substitute(&b).unwrap();
        let ab: Vec<_> = a.iter().map(|p| p.substitute(&b).unwrap()).collect();
        prop_assert_eq!(lhs, f.substitute(&ab).unwrap());
    }

    #[test]
    fn json_and_text_round_trip(f in arb_poly(3, 4, 6)) {
        let back: FreePoly<Scalar> = poly_from_json(&poly_to_json(&f), &Q, 3, "").unwrap();
        prop_assert_eq!(&back, &f);
        let text = f.to_string();
        let reparsed = freelin::parse::parse_poly(&text, Q, 3).unwrap();
        prop_assert_eq!(&reparsed, &f);
    }

    #[test]
    fn laurent_json_round_trip(e in prop::collection::vec((-3i64..=3, -3i64..=3, -3i64..=3), 0..4)) {
        let text: Vec<String> = e.iter().map(|(c, a, b)| format!("({c})*t1^({a})*t2^({b})*z{}", (a + 4) % 2 + 1)).collect();
        let text = if text.is_empty() { "0".to_string() } else { text.join(" + ") };
        let p = parse_laurent(&text, ParseOptions { field: Q, n: 2, r: 2 }).unwrap();
        let ring = LaurentRing::new(Q, 2);
        let back: FreePoly<Laurent> = poly_from_json(&poly_to_json(&p), &ring, 2, "").unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn composition_is_associative(
        a in arb_endo(2, 2, 3),
        b in arb_endo(2, 2, 3),
        c in arb_endo(2, 2, 2),
    ) {
        let l = compose(&compose(&a, &b).unwrap(), &c).unwrap();
        let r = compose(&a, &compose(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(l, r);
    }

    #[test]
    fn composition_degree_bound(a in arb_endo(3, 3, 3), b in arb_endo(3, 2, 3)) {
        let d = compose(&a, &b).unwrap().degree().or_zero();
        prop_assert!(d <= a.degree().or_zero().max(1) * b.degree().or_zero().max(1));
    }

    #[test]
    fn exact_inverses_invert(seed in any::<u64>(), n in 2usize..=3) {
        let phi = random_tame(n, 3, 2, seed).unwrap();
        let rep = invert_truncated(&phi, 2 * phi.degree().or_zero()).unwrap();
        if rep.status == InversionStatus::Exact {
            let psi = rep.inverse.unwrap();
            prop_assert!(compose(&phi, &psi).unwrap().is_identity());
            prop_assert!(compose(&psi, &phi).unwrap().is_identity());
        }
    }

    #[test]
    fn singular_linear_part_is_never_invertible(
        f in arb_poly(2, 3, 3),
        g in arb_poly(2, 3, 3),
        cutoff in 0usize..8,
    ) {
        // z1 has no linear part in either image.
        let strip = |p: &FreePoly<Scalar>| p.filter_words(|w| w.len() != 1);
        let phi = Endo::new(2, &Q, vec![strip(&f), &strip(&g) + &poly("z2", 2)]).unwrap();
        prop_assert_eq!(invert_truncated(&phi, cutoff).unwrap().status, InversionStatus::NotInvertible);
    }
}

proptest! {
    #![proptest_config(cfg(500))]

    #[test]
    fn leibniz_rule(f in arb_poly(3, 4, 4), g in arb_poly(3, 4, 4), i in 1usize..=3) {
        let one = FreePoly::one(3, &Q);
        let lhs = partial(&(&f * &g), i).unwrap();
        let rhs = &(&TensorPoly::tensor(&one, &g) * &partial(&f, i).unwrap())
            + &(&TensorPoly::tensor(&f, &one) * &partial(&g, i).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn envelope_product_is_associative_and_unital(
        a in arb_poly(2, 2, 3), b in arb_poly(2, 2, 3), c in arb_poly(2, 2, 3),
        d in arb_poly(2, 2, 3), e in arb_poly(2, 2, 3), f in arb_poly(2, 2, 3),
    ) {
        let (x, y, z) = (TensorPoly::tensor(&a, &b), TensorPoly::tensor(&c, &d), TensorPoly::tensor(&e, &f));
        let x = &x + &y;
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
        let one = TensorPoly::one(2, Q);
        prop_assert_eq!(&one * &x, x.clone());
        prop_assert_eq!(&x * &one, x);
    }
}

proptest! {
    #![proptest_config(cfg(200))]

    #[test]
    fn chain_rule(phi in arb_endo(2, 2, 3), psi in arb_endo(2, 2, 3)) {
        let h = compose(&phi, &psi).unwrap();
        let (jh, jphi, jpsi) = (jacobian(&h), jacobian(&phi), jacobian(&psi));
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = TensorPoly::zero(2, Q);
                for k in 0..2 {
                    let s = jpsi.get(i, k).substitute(phi.images()).unwrap();
                    acc = &acc + &(&s * jphi.get(k, j));
                }
                prop_assert_eq!(&acc, jh.get(i, j));
            }
        }
    }

    #[test]
    fn jacobian_of_linear_map(rows in prop::collection::vec(prop::collection::vec(-3i64..=3, 3), 3)) {
        let images: Vec<FreePoly<Scalar>> = rows
            .iter()
            .map(|r| from_terms(3, r.iter().enumerate().map(|(j, &c)| (c, vec![j as u32 + 1])).collect()))
            .collect();
        let j = jacobian(&Endo::new(3, &Q, images).unwrap());
        for (a, r) in rows.iter().enumerate() {
            for (b, &c) in r.iter().enumerate() {
                prop_assert_eq!(j.get(a, b), &TensorPoly::one(3, Q).scale(&Scalar::from_i64(Q, c)));
            }
        }
    }
}

proptest! {
    #![proptest_config(cfg(20))]

    #[test]
    fn singular_maps_fail_jacobian_inversion(f in arb_poly(2, 3, 3), g in arb_poly(2, 3, 3)) {
        let strip = |p: &FreePoly<Scalar>| p.filter_words(|w| w.len() != 1);
        let phi = Endo::new(2, &Q, vec![strip(&f), &strip(&g) + &poly("z2", 2)]).unwrap();
        let (status, _) = jacobian_invert_bounded(&jacobian(&phi), 0).unwrap();
        prop_assert_eq!(status, JacobianInversion::NotInvertibleAtCutoff);
    }

    #[test]
    fn reduction_is_functorial(phi in arb_endo(2, 2, 3), psi in arb_endo(2, 2, 3), size in 1usize..=2) {
        let h = compose(&phi, &psi).unwrap();
        let lhs = reduce_endo(&h, size).unwrap();
        let rhs = CoeffMap::compose(&reduce_endo(&phi, size).unwrap(), &reduce_endo(&psi, size).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn reduction_to_scalars_is_abelianization(phi in arb_endo(3, 3, 4)) {
        prop_assert_eq!(reduce_endo(&phi, 1).unwrap().images, phi.abelianize());
    }

    #[test]
    fn reductions_of_inverse_pairs_invert(seed in any::<u64>(), size in 1usize..=2) {
        let phi = random_tame(2, 3, 2, seed).unwrap();
        let psi = freelin::endomorphism::invert(&phi).unwrap().exact_inverse().unwrap().clone();
        let (a, b) = (reduce_endo(&phi, size).unwrap(), reduce_endo(&psi, size).unwrap());
        prop_assert!(CoeffMap::compose(&a, &b).unwrap().is_identity());
    }

    #[test]
    fn jvdk_round_trip(seed in any::<u64>()) {
        let phi = random_tame(2, 5, 3, seed).unwrap();
        let comm = abelianize_aut(&phi).unwrap();
        let fact = jvdk_decompose(&comm).unwrap();
        prop_assert!(fact.factors.len() <= DEFAULT_FACTOR_BOUND);
        prop_assert_eq!(&fact.recompose(Q).unwrap(), &comm);
        prop_assert_eq!(abelianize_aut(&lift(&fact, Q).unwrap()).unwrap(), comm);
    }

    #[test]
    fn rees_presentations_are_graded(gens in prop::collection::vec(arb_poly(3, 3, 3), 0..=3)) {
        let gens: Vec<_> = gens.into_iter().filter(|g| !g.is_zero()).collect();
        let g = rees_presentation(&IdealPresentation::new(3, Q, gens).unwrap()).unwrap();
        prop_assert!(check_grading(&g, 6));
        prop_assert!(g.model_is_sound().unwrap());
    }

    #[test]
    fn averaging_fixes_linear_actions(w in prop::collection::vec(prop::collection::vec(-3i64..=3, 2), 2)) {
        prop_assume!(w[0][0] * w[1][1] != w[0][1] * w[1][0]);
        let spec = ActionSpec::diagonal(Q, &w).unwrap();
        let rep = average_linearize(&spec).unwrap();
        prop_assert!(rep.status.is_verified());
        prop_assert!(rep.beta.unwrap().is_linear());
    }

    #[test]
    fn conjugated_actions_linearize(
        seed in any::<u64>(),
        w in prop::collection::vec(prop::sample::select(vec![-2i64, -1, 1, 2]), 2),
    ) {
        let beta = random_tame_with(&TameOptions::new(2, 3, 2), seed).unwrap();
        let tau = ActionSpec::diagonal(Q, &[vec![w[0], 0], vec![0, w[1]]]).unwrap();
        let sigma = ActionSpec::conjugate(&tau, &beta.map, &beta.inverse).unwrap();
        // the unique fixed point is β(0)
        let (moved, c) = translate_origin(&sigma).unwrap();
        let origin: Vec<Scalar> = beta.map.images().iter().map(|p| p.constant_coeff()).collect();
        prop_assert_eq!(c, origin);
        prop_assert!(moved.images().iter().all(|p| p.constant_coeff().is_zero()));
        let rep = average_linearize(&sigma).unwrap();
        prop_assert!(rep.status.is_verified());
        let (b, bi, t) = (rep.beta.unwrap(), rep.beta_inverse.unwrap(), rep.tau.unwrap());
        prop_assert!(verify_conjugation_with_inverse(&sigma, &t, &b, &bi).unwrap());
    }
}

/// Fractions a/d in [0, 1) with d ≤ 6.
fn small_roots() -> Vec<(i64, i64)> {
    let mut out = vec![(0, 1)];
    for d in 2..=6i64 {
        for a in 1..d {
            if num_gcd(a, d) == 1 {
                out.push((a, d));
            }
        }
    }
    out
}

fn num_gcd(a: i64, b: i64) -> i64 {
    if b == 0 { a.abs() } else { num_gcd(b, a % b) }
}

/// Some t ≠ 1 with coordinates of order ≤ 6 acts trivially.
fn brute_force_kernel(m: &[Vec<i64>], r: usize) -> bool {
    let roots = small_roots();
    let total = roots.len().pow(r as u32);
    (1..total).any(|mut code| {
        let t: Vec<(i64, i64)> = (0..r)
            .map(|_| {
                let x = roots[code % roots.len()];
                code /= roots.len();
                x
            })
            .collect();
        let l = t.iter().fold(1, |acc, &(_, d)| acc * d / num_gcd(acc, d));
        m.iter().all(|row| row.iter().zip(&t).map(|(w, (a, d))| w * a * (l / d)).sum::<i64>() % l == 0)
    })
}

proptest! {
    #![proptest_config(cfg(200))]

    #[test]
    fn effectiveness_matches_brute_force(
        n in 1usize..=3,
        r in 1usize..=2,
        entries in prop::collection::vec(-2i64..=2, 6),
    ) {
        let m: Vec<Vec<i64>> = (0..n).map(|i| (0..r).map(|j| entries[i * 2 + j]).collect()).collect();
        prop_assert_eq!(is_effective(&WeightData::from_matrix(m.clone())), !brute_force_kernel(&m, r));
    }

    #[test]
    fn standard_identity_on_rational_3x3(entries in prop::collection::vec(-4i64..=4, 54)) {
        let mats: Vec<Mat<Scalar>> = (0..6)
            .map(|k| Mat::from_fn(3, 3, |i, j| Scalar::from_i64(Q, entries[9 * k + 3 * i + j])))
            .collect();
        prop_assert!(standard_identity(&mats, &Q).unwrap().is_zero());
    }
}
