#![allow(dead_code)]

use freelin::algebra::{Field, FreePoly, Scalar, Word};
use freelin::endomorphism::Endo;
use freelin::parse::parse_poly;
use proptest::prelude::*;

pub const Q: Field = Field::Rational;

pub fn poly(s: &str, n: usize) -> FreePoly<Scalar> {
    parse_poly(s, Q, n).unwrap()
}

pub fn endo(images: &[&str]) -> Endo<Scalar> {
    let n = images.len();
    Endo::new(n, &Q, images.iter().map(|s| poly(s, n)).collect()).unwrap()
}

pub fn from_terms(n: usize, terms: Vec<(i64, Vec<u32>)>) -> FreePoly<Scalar> {
    let mut p = FreePoly::zero(n, &Q);
    for (c, w) in terms {
        p.add_term(Word::new(w), &Scalar::from_i64(Q, c));
    }
    p
}

/// Polynomials in n generators with at most `terms` terms of degree ≤ `deg`.
pub fn arb_poly(n: usize, deg: usize, terms: usize) -> impl Strategy<Value = FreePoly<Scalar>> {
    let word = prop::collection::vec(1..=n as u32, 0..=deg);
    prop::collection::vec((-3i64..=3, word), 0..=terms).prop_map(move |t| from_terms(n, t))
}

pub fn arb_endo(n: usize, deg: usize, terms: usize) -> impl Strategy<Value = Endo<Scalar>> {
    prop::collection::vec(arb_poly(n, deg, terms), n)
        .prop_map(move |images| Endo::new(n, &Q, images).unwrap())
}
