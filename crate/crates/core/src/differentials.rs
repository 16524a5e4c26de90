//! Partial derivatives with values in the enveloping algebra F⊗F, free
//! Jacobian matrices, the Jacobi endomorphism and test algebras.
//!
//! The product on F⊗F is (a⊗b)(c⊗d) = ac⊗db; note the reversed right
//! factor. With it the Leibniz rule reads ∂(fg) = (1⊗g)·∂f + (f⊗1)·∂g.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::algebra::{check_terms, Coeff, Field, FreePoly, Scalar, Word};
use crate::endomorphism::Endo;
use crate::error::{invalid, Error, Result};
use crate::linalg::Mat;

/// An element Σ c·(u⊗v) of F_n⊗F_n.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TensorPoly {
    n: usize,
    field: Field,
    terms: BTreeMap<(Word, Word), Scalar>,
}

impl TensorPoly {
    pub fn zero(n: usize, field: Field) -> Self {
        TensorPoly {
            n,
            field,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(n: usize, field: Field) -> Self {
        Self::simple(n, Word::unit(), Word::unit(), Scalar::one(field))
    }

    /// c·(u⊗v).
    pub fn simple(n: usize, u: Word, v: Word, c: Scalar) -> Self {
        let mut t = Self::zero(n, c.field());
        t.add_term(u, v, &c);
        t
    }

    /// f⊗g.
    pub fn tensor(f: &FreePoly<Scalar>, g: &FreePoly<Scalar>) -> Self {
        let mut t = Self::zero(f.n(), *f.ring());
        for (u, a) in f.terms() {
            for (v, b) in g.terms() {
                t.add_term(u.clone(), v.clone(), &a.mul(b));
            }
        }
        t
    }

    pub fn from_terms(
        n: usize,
        field: Field,
        terms: impl IntoIterator<Item = (Word, Word, Scalar)>,
    ) -> Result<Self> {
        let mut t = Self::zero(n, field);
        for (u, v, c) in terms {
            if u.max_letter() as usize > n || v.max_letter() as usize > n {
                return invalid(format!("tensor word exceeds n = {n}"));
            }
            if c.field() != field {
                return invalid("coefficient field mismatch");
            }
            t.add_term(u, v, &c);
        }
        Ok(t)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(Word, Word), &Scalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, u: &Word, v: &Word) -> Scalar {
        self.terms
            .get(&(u.clone(), v.clone()))
            .cloned()
            .unwrap_or_else(|| Scalar::zero(self.field))
    }

    pub fn add_term(&mut self, u: Word, v: Word, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry((u, v)) {
            Entry::Vacant(e) => {
                e.insert(c.clone());
            }
            Entry::Occupied(mut e) => {
                e.get_mut().add_assign(c);
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// Largest |u|+|v| over the terms, None for zero.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(|(u, v)| u.len() + v.len()).max()
    }

    pub fn homogeneous_part(&self, d: usize) -> Self {
        TensorPoly {
            n: self.n,
            field: self.field,
            terms: self
                .terms
                .iter()
                .filter(|((u, v), _)| u.len() + v.len() == d)
                .map(|(k, c)| (k.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        let mut t = Self::zero(self.n, self.field);
        for ((u, v), a) in &self.terms {
            t.add_term(u.clone(), v.clone(), &a.mul(c));
        }
        t
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.n != other.n || self.field != other.field {
            return invalid("tensor operands live in different algebras");
        }
        Ok(())
    }

    /// The enveloping product (a⊗b)(c⊗d) = ac⊗db.
    pub fn envelope_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut t = Self::zero(self.n, self.field);
        for ((a, b), x) in &self.terms {
            for ((c, d), y) in &other.terms {
                t.add_term(a.concat(c), d.concat(b), &x.mul(y));
            }
            check_terms(t.len())?;
        }
        Ok(t)
    }

    /// Applies an endomorphism to both tensor factors.
    pub fn substitute(&self, images: &[FreePoly<Scalar>]) -> Result<Self> {
        let n = images.first().map_or(self.n, |p| p.n());
        let mut cache: BTreeMap<&Word, FreePoly<Scalar>> = BTreeMap::new();
        for (u, v) in self.terms.keys() {
            for w in [u, v] {
                if !cache.contains_key(w) {
                    let mono = FreePoly::monomial(self.n, &self.field, w.clone(), Scalar::one(self.field));
                    cache.insert(w, mono.substitute(images)?);
                }
            }
        }
        let mut t = Self::zero(n, self.field);
        for ((u, v), c) in &self.terms {
            let (fu, fv) = (&cache[u], &cache[v]);
            for (a, x) in fu.terms() {
                for (b, y) in fv.terms() {
                    t.add_term(a.clone(), b.clone(), &c.mul(&x.mul(y)));
                }
            }
            check_terms(t.len())?;
        }
        Ok(t)
    }

    /// The multiplication map u⊗v ↦ uv.
    pub fn contract(&self) -> FreePoly<Scalar> {
        let mut p = FreePoly::zero(self.n, &self.field);
        for ((u, v), c) in &self.terms {
            p.add_term(u.concat(v), c);
        }
        p
    }
}

fn combine(a: &TensorPoly, b: &TensorPoly, sign: bool) -> TensorPoly {
    assert!(
        a.n == b.n && a.field == b.field,
        "tensor operands live in different algebras"
    );
    let mut t = a.clone();
    for ((u, v), c) in &b.terms {
        t.add_term(u.clone(), v.clone(), &if sign { c.clone() } else { c.neg() });
    }
    t
}

impl Add for &TensorPoly {
    type Output = TensorPoly;
    fn add(self, rhs: Self) -> TensorPoly {
        combine(self, rhs, true)
    }
}

impl Sub for &TensorPoly {
    type Output = TensorPoly;
    fn sub(self, rhs: Self) -> TensorPoly {
        combine(self, rhs, false)
    }
}

impl Neg for &TensorPoly {
    type Output = TensorPoly;
    fn neg(self) -> TensorPoly {
        self.scale(&Scalar::one(self.field).neg())
    }
}

/// Enveloping product; panics on mismatched algebras.
impl Mul for &TensorPoly {
    type Output = TensorPoly;
    fn mul(self, rhs: Self) -> TensorPoly {
        self.envelope_mul(rhs).expect("enveloping product")
    }
}

impl fmt::Display for TensorPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, ((u, v), c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if c.is_one() {
                write!(f, "{u}⊗{v}")?;
            } else {
                write!(f, "({c})*{u}⊗{v}")?;
            }
        }
        Ok(())
    }
}

/// ∂f/∂zᵢ: every occurrence of zᵢ splits its word into prefix ⊗ suffix.
pub fn partial(f: &FreePoly<Scalar>, i: usize) -> Result<TensorPoly> {
    if i == 0 || i > f.n() {
        return invalid(format!("partial index {i} outside 1..={}", f.n()));
    }
    let mut t = TensorPoly::zero(f.n(), *f.ring());
    for (w, c) in f.terms() {
        let letters = w.letters();
        for (k, &l) in letters.iter().enumerate() {
            if l as usize == i {
                t.add_term(
                    Word::new(letters[..k].to_vec()),
                    Word::new(letters[k + 1..].to_vec()),
                    c,
                );
            }
        }
    }
    Ok(t)
}

/// Square matrix over F⊗F.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct JacobianMatrix {
    pub entries: Vec<Vec<TensorPoly>>,
}

impl JacobianMatrix {
    pub fn identity(n: usize, field: Field) -> Self {
        JacobianMatrix {
            entries: (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            if i == j {
                                TensorPoly::one(n, field)
                            } else {
                                TensorPoly::zero(n, field)
                            }
                        })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    fn field(&self) -> Field {
        self.entries
            .first()
            .and_then(|r| r.first())
            .map_or(Field::Rational, |t| t.field())
    }

    fn algebra_n(&self) -> usize {
        self.entries
            .first()
            .and_then(|r| r.first())
            .map_or(0, |t| t.n())
    }

    pub fn get(&self, i: usize, j: usize) -> &TensorPoly {
        &self.entries[i][j]
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let k = self.size();
        if other.size() != k {
            return invalid("Jacobian sizes differ");
        }
        let (n, field) = (self.algebra_n(), self.field());
        let mut entries = Vec::with_capacity(k);
        for i in 0..k {
            let mut row = Vec::with_capacity(k);
            for j in 0..k {
                let mut acc = TensorPoly::zero(n, field);
                for l in 0..k {
                    acc = &acc + &self.entries[i][l].envelope_mul(&other.entries[l][j])?;
                }
                row.push(acc);
            }
            entries.push(row);
        }
        Ok(JacobianMatrix { entries })
    }

    fn map(&self, f: impl Fn(&TensorPoly) -> TensorPoly) -> Self {
        JacobianMatrix {
            entries: self.entries.iter().map(|r| r.iter().map(&f).collect()).collect(),
        }
    }

    fn add(&self, other: &Self) -> Self {
        JacobianMatrix {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
                .collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.size(), self.field())
    }

    pub fn degree(&self) -> usize {
        self.entries
            .iter()
            .flatten()
            .filter_map(|t| t.degree())
            .max()
            .unwrap_or(0)
    }

    pub fn homogeneous_part(&self, d: usize) -> Self {
        self.map(|t| t.homogeneous_part(d))
    }

    fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(|t| t.is_zero())
    }

    /// The scalar matrix of degree-0 coefficients.
    pub fn constant_matrix(&self) -> Mat<Scalar> {
        let k = self.size();
        let u = Word::unit();
        Mat::from_fn(k, k, |i, j| self.entries[i][j].coeff(&u, &u))
    }

    fn from_scalar_matrix(m: &Mat<Scalar>, n: usize) -> Self {
        let field = m.field();
        JacobianMatrix {
            entries: (0..m.rows())
                .map(|i| {
                    (0..m.cols())
                        .map(|j| TensorPoly::one(n, field).scale(m.get(i, j)))
                        .collect()
                })
                .collect(),
        }
    }
}

impl fmt::Display for JacobianMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.entries {
            let cells: Vec<String> = row.iter().map(|t| t.to_string()).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// J(φ)[i][j] = ∂φ(zᵢ)/∂zⱼ.
pub fn jacobian(phi: &Endo<Scalar>) -> JacobianMatrix {
    let n = phi.n();
    JacobianMatrix {
        entries: phi
            .images()
            .iter()
            .map(|p| {
                (1..=n)
                    .map(|j| partial(p, j).expect("index in range"))
                    .collect()
            })
            .collect(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JacobianInversion {
    Invertible,
    /// No two-sided inverse with entries of tensor degree ≤ cutoff exists.
    NotInvertibleAtCutoff,
    /// The term-size cap stopped the computation.
    Inconclusive,
}

impl fmt::Display for JacobianInversion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            JacobianInversion::Invertible => "Invertible",
            JacobianInversion::NotInvertibleAtCutoff => "NotInvertibleAtCutoff",
            JacobianInversion::Inconclusive => "Inconclusive",
        };
        f.write_str(s)
    }
}

/// Looks for X with J·X = X·J = 1 and entries of tensor degree ≤ cutoff.
///
/// F⊗F is graded with scalars in degree 0, so an inverse exists in the
/// completion exactly when the degree-0 matrix J₀ is invertible, and it is
/// unique there. Its homogeneous components satisfy
/// X⁽⁰⁾ = J₀⁻¹ and X⁽ᵈ⁾ = −J₀⁻¹ Σ_{e≥1} J⁽ᵉ⁾X⁽ᵈ⁻ᵉ⁾, so a bounded-degree inverse
/// exists iff this series stops by the cutoff.
pub fn jacobian_invert_bounded(
    j: &JacobianMatrix,
    cutoff: usize,
) -> Result<(JacobianInversion, Option<JacobianMatrix>)> {
    let k = j.size();
    if j.entries.iter().any(|r| r.len() != k) {
        return invalid("Jacobian matrix is not square");
    }
    let n = j.algebra_n();
    let no = Ok((JacobianInversion::NotInvertibleAtCutoff, None));
    let Some(j0inv) = j.constant_matrix().inverse() else {
        return no;
    };
    let jdeg = j.degree();
    let parts: Vec<JacobianMatrix> = (0..=jdeg).map(|e| j.homogeneous_part(e)).collect();
    let j0inv_t = JacobianMatrix::from_scalar_matrix(&j0inv, n);
    let mut comps: Vec<JacobianMatrix> = vec![j0inv_t.clone()];
    let mut zero_run = 0;
    let attempt = |comps: &[JacobianMatrix]| -> Result<Option<JacobianMatrix>> {
        let mut x = comps[0].clone();
        for c in &comps[1..] {
            x = x.add(c);
        }
        if j.mul(&x)?.is_identity() && x.mul(j)?.is_identity() {
            Ok(Some(x))
        } else {
            Ok(None)
        }
    };
    let mut run = || -> Result<Option<JacobianMatrix>> {
        if jdeg == 0 {
            return attempt(&comps);
        }
        for d in 1..=cutoff {
            let mut acc = JacobianMatrix::identity(k, j.field()).map(|t| TensorPoly::zero(t.n(), t.field()));
            for e in 1..=jdeg.min(d) {
                acc = acc.add(&parts[e].mul(&comps[d - e])?);
            }
            let next = j0inv_t.mul(&acc)?.map(|t| -t);
            if next.is_zero() {
                zero_run += 1;
            } else {
                zero_run = 0;
            }
            comps.push(next);
            if zero_run >= jdeg {
                return attempt(&comps);
            }
        }
        attempt(&comps)
    };
    match run() {
        Ok(Some(x)) => Ok((JacobianInversion::Invertible, Some(x))),
        Ok(None) => no,
        Err(Error::TermLimitExceeded(_)) => Ok((JacobianInversion::Inconclusive, None)),
        Err(e) => Err(e),
    }
}

/// The endomorphism of F_{2n} (x₁…xₙ, y₁…yₙ as z₁…z₂ₙ) with
/// xᵢ ↦ the part of φᵢ(x+y) of degree one in x, and yᵢ ↦ yᵢ.
pub fn jacobi_endomorphism(phi: &Endo<Scalar>) -> Endo<Scalar> {
    let n = phi.n();
    let field = *phi.ring();
    let shift = n as u32;
    let mut images: Vec<FreePoly<Scalar>> = phi
        .images()
        .iter()
        .map(|p| {
            let mut out = FreePoly::zero(2 * n, &field);
            for (w, c) in p.terms() {
                let letters = w.letters();
                for k in 0..letters.len() {
                    let word: Vec<u32> = letters
                        .iter()
                        .enumerate()
                        .map(|(pos, &l)| if pos == k { l } else { l + shift })
                        .collect();
                    out.add_term(Word::new(word), c);
                }
            }
            out
        })
        .collect();
    images.extend((n as u32 + 1..=2 * n as u32).map(|i| FreePoly::var(2 * n, &field, i)));
    Endo::new(2 * n, &field, images).expect("same algebra")
}

/// Block-pattern subalgebra of M_N, N = m·r·p: the first r·k rows hold
/// diag(Λ,…,Λ) with one Λ ∈ M_k repeated r times and zeros elsewhere; the
/// remaining rows are arbitrary.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpecialTestAlgebra {
    pub m: usize,
    pub r: usize,
    pub p: usize,
    pub k: usize,
}

impl SpecialTestAlgebra {
    pub fn new(m: usize, r: usize, p: usize, k: usize) -> Result<Self> {
        if m == 0 || r == 0 || p == 0 || k == 0 {
            return invalid("test algebra parameters must be positive");
        }
        if r * k > m * r * p {
            return invalid(format!("r·k = {} exceeds N = {}", r * k, m * r * p));
        }
        Ok(SpecialTestAlgebra { m, r, p, k })
    }

    /// Block size k = m.
    pub fn with_block_m(m: usize, r: usize, p: usize) -> Result<Self> {
        Self::new(m, r, p, m)
    }

    pub fn size(&self) -> usize {
        self.m * self.r * self.p
    }

    pub fn contains(&self, a: &Mat<Scalar>) -> bool {
        let (n, k) = (self.size(), self.k);
        if a.rows() != n || a.cols() != n {
            return false;
        }
        let top = self.r * k;
        for i in 0..top {
            let (bi, li) = (i / k, i % k);
            for j in 0..n {
                let v = a.get(i, j);
                let expect_zero = j >= top || j / k != bi;
                if expect_zero {
                    if !v.is_zero() {
                        return false;
                    }
                } else if v != a.get(li, j % k) {
                    return false;
                }
            }
        }
        true
    }
}

/// Evaluates a polynomial at square matrices; constants become scalar matrices.
pub fn eval_at_matrices(f: &FreePoly<Scalar>, mats: &[Mat<Scalar>]) -> Result<Mat<Scalar>> {
    let size = mats.first().map_or(0, |m| m.rows());
    if mats.len() != f.n() || mats.iter().any(|m| m.rows() != size || m.cols() != size) {
        return invalid("need n square matrices of one size");
    }
    let field = *f.ring();
    let id = Mat::identity(size, &field);
    let mut acc = Mat::zeros(size, size, &field);
    for (w, c) in f.terms() {
        let mut prod = id.clone();
        for &l in w.letters() {
            prod = prod.mul(&mats[l as usize - 1]);
        }
        acc = acc.add(&prod.scale(c));
    }
    Ok(acc)
}

/// True iff f ∉ Pⁿ while φ(f) ∈ Pⁿ, which certifies that φ is not invertible.
pub fn verify_test_witness(
    phi: &Endo<Scalar>,
    algebra: &SpecialTestAlgebra,
    f: &[Mat<Scalar>],
) -> Result<bool> {
    let size = algebra.size();
    if f.len() != phi.n() {
        return invalid(format!("witness needs {} matrices, got {}", phi.n(), f.len()));
    }
    if f.iter().any(|m| m.rows() != size || m.cols() != size) {
        return invalid(format!("witness matrices must be {size}×{size}"));
    }
    if f.iter().all(|m| algebra.contains(m)) {
        return Ok(false);
    }
    for p in phi.images() {
        if !algebra.contains(&eval_at_matrices(p, f)?) {
            return Ok(false);
        }
    }
    Ok(true)
}
