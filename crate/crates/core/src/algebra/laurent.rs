//! Laurent polynomials K[t₁^±1,…,t_r^±1], the coefficient ring of torus
//! actions.

use std::collections::BTreeMap;
use std::fmt;

use super::{Coeff, Field, Scalar};
use crate::error::{invalid, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LaurentRing {
    pub field: Field,
    pub r: usize,
}

impl LaurentRing {
    pub fn new(field: Field, r: usize) -> Self {
        LaurentRing { field, r }
    }
}

/// A finite sum of characters t^m with scalar coefficients. Exponent vectors
/// all have length `r`; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Laurent {
    ring: LaurentRing,
    terms: BTreeMap<Vec<i64>, Scalar>,
}

impl Laurent {
    pub fn ring(&self) -> LaurentRing {
        self.ring
    }

    pub fn r(&self) -> usize {
        self.ring.r
    }

    /// The character c·t^exps.
    pub fn monomial(ring: LaurentRing, exps: Vec<i64>, c: Scalar) -> Self {
        assert_eq!(exps.len(), ring.r, "exponent vector length");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps, c);
        }
        Laurent { ring, terms }
    }

    pub fn constant(ring: LaurentRing, c: Scalar) -> Self {
        Laurent::monomial(ring, vec![0; ring.r], c)
    }

    pub fn from_terms(
        ring: LaurentRing,
        terms: impl IntoIterator<Item = (Vec<i64>, Scalar)>,
    ) -> Result<Self> {
        let mut out = Laurent::zero(&ring);
        for (e, c) in terms {
            if e.len() != ring.r {
                return invalid(format!(
                    "exponent vector {e:?} has length {}, expected {}",
                    e.len(),
                    ring.r
                ));
            }
            if c.field() != ring.field {
                return invalid("coefficient field does not match the ring");
            }
            out.add_term(e, &c);
        }
        Ok(out)
    }

    fn add_term(&mut self, e: Vec<i64>, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().add(c);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &Scalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of t^0.
    pub fn constant_term(&self) -> Scalar {
        self.coeff(&vec![0; self.ring.r])
    }

    pub fn coeff(&self, exps: &[i64]) -> Scalar {
        self.terms
            .get(exps)
            .cloned()
            .unwrap_or_else(|| Scalar::zero(self.ring.field))
    }

    /// True when this is a constant (only the t^0 term, or zero).
    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x == 0))
    }

    /// `Some((m, c))` when this is the single term c·t^m.
    pub fn as_monomial(&self) -> Option<(&Vec<i64>, &Scalar)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    /// Multiplies by the character t^shift.
    pub fn shift(&self, shift: &[i64]) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| (e.iter().zip(shift).map(|(a, b)| a + b).collect(), c.clone()))
            .collect();
        Laurent {
            ring: self.ring,
            terms,
        }
    }

    /// Substitutes tᵢ ↦ tᵢ⁻¹.
    pub fn invert_parameters(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| (e.iter().map(|x| -x).collect(), c.clone()))
            .collect();
        Laurent {
            ring: self.ring,
            terms,
        }
    }

    /// Exact evaluation at a torus point; every coordinate must be nonzero.
    pub fn eval(&self, point: &[Scalar]) -> Result<Scalar> {
        if point.len() != self.ring.r {
            return invalid(format!(
                "evaluation point has {} coordinates, expected {}",
                point.len(),
                self.ring.r
            ));
        }
        if point.iter().any(|p| p.is_zero()) {
            return invalid("torus point has a zero coordinate");
        }
        if point.iter().any(|p| p.field() != self.ring.field) {
            return invalid("evaluation point lies in a different field");
        }
        let mut acc = Scalar::zero(self.ring.field);
        for (e, c) in &self.terms {
            let mut v = c.clone();
            for (p, &k) in point.iter().zip(e) {
                v = v.mul(&p.pow(k).expect("nonzero coordinate"));
            }
            acc = acc.add(&v);
        }
        Ok(acc)
    }

    /// Substitutes each tⱼ by a character of a (possibly larger) parameter
    /// ring: tⱼ ↦ t^{images[j]}.
    pub fn substitute_characters(&self, target: LaurentRing, images: &[Vec<i64>]) -> Self {
        let mut out = Laurent::zero(&target);
        for (e, c) in &self.terms {
            let mut m = vec![0i64; target.r];
            for (k, img) in e.iter().zip(images) {
                for (slot, x) in m.iter_mut().zip(img) {
                    *slot += k * x;
                }
            }
            out.add_term(m, c);
        }
        out
    }
}

impl Coeff for Laurent {
    type Ring = LaurentRing;

    fn zero(ring: &LaurentRing) -> Self {
        Laurent {
            ring: *ring,
            terms: BTreeMap::new(),
        }
    }

    fn one(ring: &LaurentRing) -> Self {
        Laurent::constant(*ring, Scalar::one(ring.field))
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c);
        }
        out
    }

    fn add_assign(&mut self, other: &Self) {
        for (e, c) in &other.terms {
            self.add_term(e.clone(), c);
        }
    }

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    fn mul(&self, other: &Self) -> Self {
        let mut out = Laurent::zero(&self.ring);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let e = a.iter().zip(b).map(|(x, y)| x + y).collect();
                out.add_term(e, &ca.mul(cb));
            }
        }
        out
    }

    fn neg(&self) -> Self {
        Laurent {
            ring: self.ring,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c.neg())).collect(),
        }
    }

    fn from_scalar(ring: &LaurentRing, s: &Scalar) -> Self {
        Laurent::constant(*ring, s.clone())
    }

    fn ground_field(ring: &LaurentRing) -> Field {
        ring.field
    }
}

impl fmt::Display for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}")?;
            for (i, k) in e.iter().enumerate() {
                if *k != 0 {
                    write!(f, "*t{}^{}", i + 1, k)?;
                }
            }
        }
        Ok(())
    }
}
