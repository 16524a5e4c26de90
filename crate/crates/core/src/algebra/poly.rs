//! Free polynomials: finite sums of coefficient-weighted words.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::{check_terms, Coeff, Word};
use crate::error::{invalid, Result};

/// Total degree. The zero polynomial has degree `NegInfinity`, which sorts
/// below every finite degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degree {
    NegInfinity,
    Finite(usize),
}

impl Degree {
    pub fn finite(self) -> Option<usize> {
        match self {
            Degree::NegInfinity => None,
            Degree::Finite(d) => Some(d),
        }
    }

    /// Degree as a plain number with zero mapped to 0, for bounds.
    pub fn or_zero(self) -> usize {
        self.finite().unwrap_or(0)
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::NegInfinity => write!(f, "-inf"),
            Degree::Finite(d) => write!(f, "{d}"),
        }
    }
}

/// An element of the free algebra on `n` generators with coefficients in `C`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FreePoly<C: Coeff> {
    n: usize,
    ring: C::Ring,
    terms: BTreeMap<Word, C>,
}

impl<C: Coeff> FreePoly<C> {
    pub fn zero(n: usize, ring: &C::Ring) -> Self {
        FreePoly {
            n,
            ring: ring.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(n: usize, ring: &C::Ring) -> Self {
        Self::constant(n, ring, C::one(ring))
    }

    pub fn constant(n: usize, ring: &C::Ring, c: C) -> Self {
        Self::monomial(n, ring, Word::unit(), c)
    }

    /// The generator zᵢ (1-based).
    pub fn var(n: usize, ring: &C::Ring, i: u32) -> Self {
        assert!(i >= 1 && i as usize <= n, "generator index {i} out of range 1..={n}");
        Self::monomial(n, ring, Word::letter(i), C::one(ring))
    }

    pub fn monomial(n: usize, ring: &C::Ring, w: Word, c: C) -> Self {
        let mut p = Self::zero(n, ring);
        p.add_term(w, &c);
        p
    }

    /// Builds a polynomial from (word, coefficient) pairs, collecting equal
    /// words and validating every letter.
    pub fn from_terms(
        n: usize,
        ring: &C::Ring,
        terms: impl IntoIterator<Item = (Word, C)>,
    ) -> Result<Self> {
        let mut p = Self::zero(n, ring);
        for (w, c) in terms {
            if let Some(&bad) = w.letters().iter().find(|&&l| l == 0 || l as usize > n) {
                return invalid(format!("letter {bad} outside 1..={n}"));
            }
            p.add_term(w, &c);
        }
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ring(&self) -> &C::Ring {
        &self.ring
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &C)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, w: &Word) -> C {
        self.terms.get(w).cloned().unwrap_or_else(|| C::zero(&self.ring))
    }

    pub fn degree(&self) -> Degree {
        // length-lex order puts the longest word last
        match self.terms.keys().next_back() {
            Some(w) => Degree::Finite(w.len()),
            None => Degree::NegInfinity,
        }
    }

    /// Smallest word length present, `None` for zero.
    pub fn min_degree(&self) -> Option<usize> {
        self.terms.keys().next().map(|w| w.len())
    }

    pub fn add_term(&mut self, w: Word, c: &C) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
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

    fn check_compatible(&self, other: &Self) {
        assert_eq!(self.n, other.n, "generator count mismatch");
        assert_eq!(self.ring, other.ring, "coefficient ring mismatch");
    }

    /// Whether `other` lives in the same algebra (same n and ring).
    pub fn compatible(&self, other: &Self) -> bool {
        self.n == other.n && self.ring == other.ring
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::zero(self.n, &self.ring);
        for (w, a) in &self.terms {
            out.add_term(w.clone(), &a.mul(c));
        }
        out
    }

    /// Product with every term of length above `max_deg` discarded.
    pub fn mul_truncated(&self, other: &Self, max_deg: usize) -> Self {
        self.check_compatible(other);
        let mut out = Self::zero(self.n, &self.ring);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                if a.len() + b.len() > max_deg {
                    // other is length-sorted, the rest are longer still
                    break;
                }
                out.add_term(a.concat(b), &ca.mul(cb));
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.n, &self.ring);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// The homogeneous component of degree `d`.
    pub fn homogeneous_part(&self, d: usize) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(w, _)| w.len() == d)
            .map(|(w, c)| (w.clone(), c.clone()))
            .collect();
        FreePoly {
            n: self.n,
            ring: self.ring.clone(),
            terms,
        }
    }

    /// Drops every term of length above `max_deg`.
    pub fn truncate(&self, max_deg: usize) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(w, _)| w.len() <= max_deg)
            .map(|(w, c)| (w.clone(), c.clone()))
            .collect();
        FreePoly {
            n: self.n,
            ring: self.ring.clone(),
            terms,
        }
    }

    /// Terms of length at least `min_deg`.
    pub fn tail(&self, min_deg: usize) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(w, _)| w.len() >= min_deg)
            .map(|(w, c)| (w.clone(), c.clone()))
            .collect();
        FreePoly {
            n: self.n,
            ring: self.ring.clone(),
            terms,
        }
    }

    pub fn constant_coeff(&self) -> C {
        self.coeff(&Word::unit())
    }

    pub fn map_coeffs<D: Coeff>(&self, ring: &D::Ring, f: impl Fn(&C) -> D) -> FreePoly<D> {
        let mut out = FreePoly::zero(self.n, ring);
        for (w, c) in &self.terms {
            out.add_term(w.clone(), &f(c));
        }
        out
    }

    /// Rewrites every letter through `f` into an algebra on `n_new` generators.
    pub fn relabel(&self, n_new: usize, f: impl Fn(u32) -> u32) -> Self {
        let mut out = Self::zero(n_new, &self.ring);
        for (w, c) in &self.terms {
            let letters: Vec<u32> = w.letters().iter().map(|&l| f(l)).collect();
            debug_assert!(letters.iter().all(|&l| l >= 1 && l as usize <= n_new));
            out.add_term(Word::new(letters), c);
        }
        out
    }

    /// Filters terms by word.
    pub fn filter_words(&self, keep: impl Fn(&Word) -> bool) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(w, _)| keep(w))
            .map(|(w, c)| (w.clone(), c.clone()))
            .collect();
        FreePoly {
            n: self.n,
            ring: self.ring.clone(),
            terms,
        }
    }

    fn check_images(&self, images: &[FreePoly<C>]) -> Result<(usize, C::Ring)> {
        if images.len() != self.n {
            return invalid(format!(
                "substitution needs {} images, got {}",
                self.n,
                images.len()
            ));
        }
        let (tn, tring) = match images.first() {
            Some(p) => (p.n, p.ring.clone()),
            None => (0, self.ring.clone()),
        };
        if images.iter().any(|p| p.n != tn || p.ring != tring) {
            return invalid("substitution images live in different algebras");
        }
        if tring != self.ring {
            return invalid("substitution images use a different coefficient ring");
        }
        Ok((tn, tring))
    }

    /// Replaces every letter i by `images[i-1]`, expanding and collecting.
    /// This is the algebra homomorphism determined by the images.
    pub fn substitute(&self, images: &[FreePoly<C>]) -> Result<Self> {
        self.substitute_inner(images, None)
    }

    /// Like [`substitute`](Self::substitute), discarding terms longer than
    /// `max_deg` during expansion.
    pub fn substitute_truncated(&self, images: &[FreePoly<C>], max_deg: usize) -> Result<Self> {
        self.substitute_inner(images, Some(max_deg))
    }

    fn substitute_inner(&self, images: &[FreePoly<C>], max_deg: Option<usize>) -> Result<Self> {
        let (tn, tring) = self.check_images(images)?;
        let mut memo: HashMap<Vec<u32>, FreePoly<C>> = HashMap::new();
        let mut out = FreePoly::zero(tn, &tring);
        let one = FreePoly::one(tn, &tring);
        for (w, c) in &self.terms {
            let img = word_image(w.letters(), images, &one, max_deg, &mut memo)?;
            for (u, a) in &img.terms {
                out.add_term(u.clone(), &a.mul(c));
            }
            check_terms(out.len())?;
        }
        Ok(out)
    }
}

fn word_image<C: Coeff>(
    letters: &[u32],
    images: &[FreePoly<C>],
    one: &FreePoly<C>,
    max_deg: Option<usize>,
    memo: &mut HashMap<Vec<u32>, FreePoly<C>>,
) -> Result<FreePoly<C>> {
    match letters.len() {
        0 => return Ok(one.clone()),
        1 => {
            let img = &images[letters[0] as usize - 1];
            return Ok(match max_deg {
                Some(d) => img.truncate(d),
                None => img.clone(),
            });
        }
        _ => {}
    }
    if let Some(p) = memo.get(letters) {
        return Ok(p.clone());
    }
    let (prefix, last) = letters.split_at(letters.len() - 1);
    let head = word_image(prefix, images, one, max_deg, memo)?;
    let tail = &images[last[0] as usize - 1];
    let img = match max_deg {
        Some(d) => head.mul_truncated(tail, d),
        None => &head * tail,
    };
    check_terms(img.len())?;
    memo.insert(letters.to_vec(), img.clone());
    Ok(img)
}

impl<C: Coeff> Add for &FreePoly<C> {
    type Output = FreePoly<C>;

    fn add(self, rhs: Self) -> FreePoly<C> {
        self.check_compatible(rhs);
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.add_term(w.clone(), c);
        }
        out
    }
}

impl<C: Coeff> Sub for &FreePoly<C> {
    type Output = FreePoly<C>;

    fn sub(self, rhs: Self) -> FreePoly<C> {
        self.check_compatible(rhs);
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.add_term(w.clone(), &c.neg());
        }
        out
    }
}

impl<C: Coeff> Neg for &FreePoly<C> {
    type Output = FreePoly<C>;

    fn neg(self) -> FreePoly<C> {
        FreePoly {
            n: self.n,
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(w, c)| (w.clone(), c.neg())).collect(),
        }
    }
}

impl<C: Coeff> Mul for &FreePoly<C> {
    type Output = FreePoly<C>;

    fn mul(self, rhs: Self) -> FreePoly<C> {
        self.check_compatible(rhs);
        let mut out = FreePoly::zero(self.n, &self.ring);
        for (a, ca) in &self.terms {
            for (b, cb) in &rhs.terms {
                out.add_term(a.concat(b), &ca.mul(cb));
            }
        }
        out
    }
}

impl<C: Coeff + fmt::Display> fmt::Display for FreePoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (w, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if w.is_empty() {
                write!(f, "({c})")?;
            } else {
                write!(f, "({c})*{w}")?;
            }
        }
        Ok(())
    }
}
