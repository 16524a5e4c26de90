//! Commutative polynomials K[x₁,…,x_k], the target of abelianization and
//! the coefficient algebra of generic matrices.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use super::{check_terms, Coeff, Degree, Field, FreePoly, Scalar};
use crate::error::{invalid, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CommRing<R> {
    pub nvars: usize,
    pub inner: R,
}

/// A finite sum of coefficient-weighted exponent vectors in ℕ^nvars.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CommPoly<C: Coeff> {
    nvars: usize,
    ring: C::Ring,
    terms: BTreeMap<Vec<u32>, C>,
}

impl<C: Coeff> CommPoly<C> {
    pub fn zero(nvars: usize, ring: &C::Ring) -> Self {
        CommPoly {
            nvars,
            ring: ring.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize, ring: &C::Ring) -> Self {
        Self::constant(nvars, ring, C::one(ring))
    }

    pub fn constant(nvars: usize, ring: &C::Ring, c: C) -> Self {
        Self::monomial(nvars, ring, vec![0; nvars], c)
    }

    /// The variable xᵢ (1-based).
    pub fn var(nvars: usize, ring: &C::Ring, i: usize) -> Self {
        assert!(i >= 1 && i <= nvars, "variable index {i} out of range 1..={nvars}");
        let mut e = vec![0; nvars];
        e[i - 1] = 1;
        Self::monomial(nvars, ring, e, C::one(ring))
    }

    pub fn monomial(nvars: usize, ring: &C::Ring, exps: Vec<u32>, c: C) -> Self {
        assert_eq!(exps.len(), nvars, "exponent vector length");
        let mut p = Self::zero(nvars, ring);
        p.add_term(exps, &c);
        p
    }

    pub fn from_terms(
        nvars: usize,
        ring: &C::Ring,
        terms: impl IntoIterator<Item = (Vec<u32>, C)>,
    ) -> Result<Self> {
        let mut p = Self::zero(nvars, ring);
        for (e, c) in terms {
            if e.len() != nvars {
                return invalid(format!(
                    "exponent vector {e:?} has length {}, expected {nvars}",
                    e.len()
                ));
            }
            p.add_term(e, &c);
        }
        Ok(p)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn ring(&self) -> &C::Ring {
        &self.ring
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &C)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exps: &[u32]) -> C {
        self.terms
            .get(exps)
            .cloned()
            .unwrap_or_else(|| C::zero(&self.ring))
    }

    pub fn add_term(&mut self, e: Vec<u32>, c: &C) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            Entry::Occupied(mut o) => {
                o.get_mut().add_assign(c);
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn degree(&self) -> Degree {
        self.terms
            .keys()
            .map(|e| e.iter().sum::<u32>() as usize)
            .max()
            .map_or(Degree::NegInfinity, Degree::Finite)
    }

    /// Highest-degree homogeneous component.
    pub fn leading_form(&self) -> Self {
        match self.degree() {
            Degree::NegInfinity => self.clone(),
            Degree::Finite(d) => self.homogeneous_part(d),
        }
    }

    pub fn homogeneous_part(&self, d: usize) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| e.iter().sum::<u32>() as usize == d)
            .map(|(e, c)| (e.clone(), c.clone()))
            .collect();
        CommPoly {
            nvars: self.nvars,
            ring: self.ring.clone(),
            terms,
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::zero(self.nvars, &self.ring);
        for (e, a) in &self.terms {
            out.add_term(e.clone(), &a.mul(c));
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.nvars, &self.ring);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn map_coeffs<D: Coeff>(&self, ring: &D::Ring, f: impl Fn(&C) -> D) -> CommPoly<D> {
        let mut out = CommPoly::zero(self.nvars, ring);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), &f(c));
        }
        out
    }

    /// Evaluates at polynomial images of the variables (a ring homomorphism).
    pub fn substitute(&self, images: &[CommPoly<C>]) -> Result<Self> {
        if images.len() != self.nvars {
            return invalid(format!(
                "substitution needs {} images, got {}",
                self.nvars,
                images.len()
            ));
        }
        let (tn, tring) = match images.first() {
            Some(p) => (p.nvars, p.ring.clone()),
            None => (0, self.ring.clone()),
        };
        if images.iter().any(|p| p.nvars != tn || p.ring != tring) {
            return invalid("substitution images live in different rings");
        }
        // cache powers of each image
        let mut powers: Vec<Vec<CommPoly<C>>> = vec![vec![CommPoly::one(tn, &tring)]; self.nvars];
        let mut out = CommPoly::zero(tn, &tring);
        for (e, c) in &self.terms {
            let mut acc = CommPoly::constant(tn, &tring, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                while powers[i].len() <= k as usize {
                    let next = powers[i].last().unwrap().mul(&images[i]);
                    check_terms(next.len())?;
                    powers[i].push(next);
                }
                acc = acc.mul(&powers[i][k as usize]);
            }
            out.add_assign(&acc);
            check_terms(out.len())?;
        }
        Ok(out)
    }

    /// The free polynomial whose words list the variables in increasing
    /// order; a section of abelianization.
    pub fn to_sorted_free(&self) -> FreePoly<C> {
        let mut out = FreePoly::zero(self.nvars, &self.ring);
        for (e, c) in &self.terms {
            let mut letters = Vec::new();
            for (i, &k) in e.iter().enumerate() {
                letters.extend(std::iter::repeat(i as u32 + 1).take(k as usize));
            }
            out.add_term(letters.into(), c);
        }
        out
    }
}

impl CommPoly<Scalar> {
    pub fn field(&self) -> Field {
        self.ring
    }
}

impl<C: Coeff> FreePoly<C> {
    /// Image in the commutative quotient: each word maps to its letter counts.
    pub fn abelianize(&self) -> CommPoly<C> {
        let mut out = CommPoly::zero(self.n(), self.ring());
        for (w, c) in self.terms() {
            out.add_term(w.exponents(self.n()), c);
        }
        out
    }
}

impl<C: Coeff> Coeff for CommPoly<C> {
    type Ring = CommRing<C::Ring>;

    fn zero(ring: &Self::Ring) -> Self {
        CommPoly::zero(ring.nvars, &ring.inner)
    }

    fn one(ring: &Self::Ring) -> Self {
        CommPoly::one(ring.nvars, &ring.inner)
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    fn add_assign(&mut self, other: &Self) {
        assert_eq!(self.nvars, other.nvars, "variable count mismatch");
        for (e, c) in &other.terms {
            self.add_term(e.clone(), c);
        }
    }

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars, "variable count mismatch");
        let mut out = CommPoly::zero(self.nvars, &self.ring);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let e = a.iter().zip(b).map(|(x, y)| x + y).collect();
                out.add_term(e, &ca.mul(cb));
            }
        }
        out
    }

    fn neg(&self) -> Self {
        CommPoly {
            nvars: self.nvars,
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c.neg())).collect(),
        }
    }

    fn from_scalar(ring: &Self::Ring, s: &Scalar) -> Self {
        CommPoly::constant(ring.nvars, &ring.inner, C::from_scalar(&ring.inner, s))
    }

    fn ground_field(ring: &Self::Ring) -> Field {
        C::ground_field(&ring.inner)
    }
}

impl<C: Coeff + fmt::Display> fmt::Display for CommPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            for (j, k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => write!(f, "*x{}", j + 1)?,
                    _ => write!(f, "*x{}^{}", j + 1, k)?,
                }
            }
        }
        Ok(())
    }
}
