//! Generic matrices: reduction of free-algebra endomorphisms to commutative
//! maps on matrix entries, the standard identity, and the positive-root
//! linearization pipeline.

use std::fmt;

use crate::algebra::{Coeff, CommPoly, CommRing, Field, FreePoly, Scalar};
use crate::endomorphism::{self, compose, Endo, InversionStatus};
use crate::error::{invalid, Error, Result};
use crate::linalg::Mat;
use crate::torus::{
    self, verify_conjugation_with_inverse, zero_weight_part, ActionSpec, LinearizationReport,
    LinearizationStatus, WeightData,
};

/// Flat 1-based index of x^(k)_{ij} (k 1-based, i and j 0-based).
pub fn entry_var(size: usize, k: usize, i: usize, j: usize) -> usize {
    (k - 1) * size * size + i * size + j + 1
}

/// The k-th N×N generic matrix among n, with entries in K[x^(l)_{ij}].
pub fn generic_matrix(n: usize, size: usize, k: usize, field: Field) -> Mat<CommPoly<Scalar>> {
    let dim = n * size * size;
    Mat::from_fn(size, size, |i, j| CommPoly::var(dim, &field, entry_var(size, k, i, j)))
}

/// The polynomial map on the n·N² matrix entries induced by an endomorphism.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CoeffMap {
    pub n: usize,
    pub size: usize,
    pub images: Vec<CommPoly<Scalar>>,
}

impl CoeffMap {
    pub fn dim(&self) -> usize {
        self.n * self.size * self.size
    }

    pub fn identity(n: usize, size: usize, field: Field) -> Self {
        let dim = n * size * size;
        CoeffMap {
            n,
            size,
            images: (1..=dim).map(|v| CommPoly::var(dim, &field, v)).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        let field = self.images.first().map_or(Field::Rational, |p| p.field());
        *self == Self::identity(self.n, self.size, field)
    }

    /// Same convention as endomorphisms: the images of `inner` with the
    /// images of `outer` substituted, so reduce(φ∘ψ) = compose(reduce φ, reduce ψ).
    pub fn compose(outer: &CoeffMap, inner: &CoeffMap) -> Result<CoeffMap> {
        if outer.n != inner.n || outer.size != inner.size {
            return invalid("coefficient maps of different shapes");
        }
        let images = inner
            .images
            .iter()
            .map(|p| p.substitute(&outer.images))
            .collect::<Result<Vec<_>>>()?;
        Ok(CoeffMap {
            n: outer.n,
            size: outer.size,
            images,
        })
    }
}

impl fmt::Display for CoeffMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (v, p) in self.images.iter().enumerate() {
            writeln!(f, "x{} ↦ {p}", v + 1)?;
        }
        Ok(())
    }
}

/// Evaluates a free polynomial at commutative-entry matrices, sharing the
/// products of common word prefixes.
fn eval_generic(
    p: &FreePoly<Scalar>,
    mats: &[Mat<CommPoly<Scalar>>],
    ring: &CommRing<Field>,
    size: usize,
) -> Mat<CommPoly<Scalar>> {
    let mut acc = Mat::zeros(size, size, ring);
    let id = Mat::identity(size, ring);
    let mut cache: std::collections::HashMap<Vec<u32>, Mat<CommPoly<Scalar>>> = Default::default();
    for (w, c) in p.terms() {
        let letters = w.letters();
        let mut prod = id.clone();
        let mut start = 0;
        for cut in (1..=letters.len()).rev() {
            if let Some(m) = cache.get(&letters[..cut]) {
                prod = m.clone();
                start = cut;
                break;
            }
        }
        for end in start + 1..=letters.len() {
            prod = prod.mul(&mats[letters[end - 1] as usize - 1]);
            cache.insert(letters[..end].to_vec(), prod.clone());
        }
        let cc = CommPoly::constant(ring.nvars, &ring.inner, c.clone());
        acc = acc.add(&prod.scale(&cc));
    }
    acc
}

/// Substitutes N×N generic matrices for the generators and reads off the
/// n·N² entry polynomials.
pub fn reduce_endo(phi: &Endo<Scalar>, size: usize) -> Result<CoeffMap> {
    if size == 0 {
        return invalid("matrix size must be at least 1");
    }
    let (n, field) = (phi.n(), *phi.ring());
    let dim = n * size * size;
    let ring = CommRing {
        nvars: dim,
        inner: field,
    };
    let mats: Vec<_> = (1..=n).map(|k| generic_matrix(n, size, k, field)).collect();
    let mut images = Vec::with_capacity(dim);
    for p in phi.images() {
        let m = eval_generic(p, &mats, &ring, size);
        for i in 0..size {
            for j in 0..size {
                images.push(m.get(i, j).clone());
            }
        }
        crate::algebra::check_terms(images.iter().map(|q| q.len()).sum())?;
    }
    Ok(CoeffMap { n, size, images })
}

fn permutations_signed<C: Coeff>(
    mats: &[Mat<C>],
    used: &mut Vec<bool>,
    prefix: &Mat<C>,
    sign: bool,
    acc: &mut Mat<C>,
) {
    let k = mats.len();
    if used.iter().all(|&u| u) {
        *acc = if sign { acc.add(prefix) } else { acc.sub(prefix) };
        return;
    }
    // choosing the j-th unused index contributes (#unused before j) inversions
    let mut skipped = 0;
    for j in 0..k {
        if used[j] {
            continue;
        }
        used[j] = true;
        let next = prefix.mul(&mats[j]);
        permutations_signed(mats, used, &next, sign ^ (skipped % 2 == 1), acc);
        used[j] = false;
        skipped += 1;
    }
}

/// S_k(M₁,…,M_k) = Σ_σ sgn(σ) M_{σ(1)}⋯M_{σ(k)}, enumerating all k!
/// permutations with shared prefix products.
pub fn standard_identity<C: Coeff>(mats: &[Mat<C>], ring: &C::Ring) -> Result<Mat<C>> {
    let Some(first) = mats.first() else {
        return invalid("the standard polynomial needs at least one matrix");
    };
    let s = first.rows();
    if mats.iter().any(|m| m.rows() != s || m.cols() != s) {
        return invalid("standard polynomial arguments must be square of one size");
    }
    let mut acc = Mat::zeros(s, s, ring);
    let mut used = vec![false; mats.len()];
    permutations_signed(mats, &mut used, &Mat::identity(s, ring), true, &mut acc);
    Ok(acc)
}

/// S_{2N} on N×N generic matrices, fully symbolic.
pub fn amitsur_levitzki(size: usize, field: Field) -> Result<Mat<CommPoly<Scalar>>> {
    let k = 2 * size;
    let ring = CommRing {
        nvars: k * size * size,
        inner: field,
    };
    let mats: Vec<_> = (1..=k).map(|i| generic_matrix(k, size, i, field)).collect();
    standard_identity(&mats, &ring)
}

/// Sign pattern of a weight matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RootSign {
    Positive,
    /// Every entry negative; the action composed with inversion is positive.
    Negative,
    Neither,
}

pub fn positive_root_check(w: &WeightData) -> RootSign {
    let entries = || w.weight_matrix.iter().flatten();
    if w.weight_matrix.is_empty() {
        return RootSign::Neither;
    }
    if entries().all(|&x| x > 0) {
        RootSign::Positive
    } else if entries().all(|&x| x < 0) {
        RootSign::Negative
    } else {
        RootSign::Neither
    }
}

/// Reductions tried when no list is given.
pub const DEFAULT_SIZES: [usize; 2] = [1, 2];

/// Linearizes an action with positive (or, via t ↦ t⁻¹, negative) roots.
///
/// The eigenstate map φ is the zero-weight part of the normalized action.
/// Each reduction of φ to N×N generic matrices must compose to the identity
/// with the reduction of its candidate inverse; φ itself must invert
/// exactly. `cutoff` 0 selects the default inversion cutoff.
pub fn linearize_positive_root(
    spec: &ActionSpec,
    sizes: &[usize],
    cutoff: usize,
) -> Result<LinearizationReport> {
    torus::with_validation(spec, positive_root_core(spec, sizes, cutoff))
}

fn positive_root_core(spec: &ActionSpec, sizes: &[usize], cutoff: usize) -> Result<LinearizationReport> {
    let mut report = LinearizationReport::new();
    let probe = torus::normalize(spec, &mut report)?;
    let (work, flipped) = match positive_root_check(&probe.weights) {
        RootSign::Positive => (spec.clone(), false),
        RootSign::Negative => {
            report.note("roots", "negative roots; using t ↦ t⁻¹");
            (spec.inverse_parameters(), true)
        }
        RootSign::Neither => return Err(Error::NotPositiveRoot),
    };
    let norm = if flipped {
        torus::normalize(&work, &mut report)?
    } else {
        probe
    };
    let m = norm.weights.weight_matrix.clone();
    report.note("roots", format!("weights {m:?}"));
    report.translation = norm.translation.clone();
    let field = spec.field();
    let original_m: Vec<Vec<i64>> = if flipped {
        m.iter().map(|row| row.iter().map(|x| -x).collect()).collect()
    } else {
        m.clone()
    };
    report.weights = Some(WeightData {
        weight_matrix: original_m.clone(),
        ..norm.weights.clone()
    });
    let tau = ActionSpec::diagonal(field, &original_m)?;
    report.tau = Some(tau.clone());

    let phi = zero_weight_part(&norm.action, &m);
    report.note("eigenstate", format!("φ = {phi}"));
    let inv = if cutoff == 0 {
        endomorphism::invert(&phi)?
    } else {
        endomorphism::invert_truncated(&phi, cutoff)?
    };
    let Some(candidate) = inv.inverse.clone() else {
        let e = Error::BetaNotInvertible("the eigenstate map has singular linear part".into());
        return Ok(report.fail("invert", e.to_string()));
    };
    for &size in sizes {
        let a = reduce_endo(&phi, size)?;
        let b = reduce_endo(&candidate, size)?;
        let ok = CoeffMap::compose(&a, &b)?.is_identity() && CoeffMap::compose(&b, &a)?.is_identity();
        if !ok {
            return Ok(report.fail("reduce", Error::ReductionNotInvertible(size).to_string()));
        }
        report.note("reduce", format!("N = {size}: reduction inverts by composition"));
    }
    if inv.status != InversionStatus::Exact {
        let e = Error::BetaNotInvertible(format!("inversion status {}", inv.status));
        return Ok(report.fail("invert", e.to_string()));
    }
    report.note("invert", format!("exact inverse at cutoff {}", inv.cutoff));
    let beta = compose(&phi, &norm.to_normal)?;
    let beta_inv = compose(&norm.from_normal, &candidate)?;
    report.beta_inverse = Some(beta_inv.clone());
    report.beta = Some(beta.clone());
    if !verify_conjugation_with_inverse(spec, &tau, &beta, &beta_inv)? {
        return Ok(report.fail("verify", "τ∘β differs from β∘σ"));
    }
    report.note("verify", "τ∘β = β∘σ holds exactly");
    report.status = LinearizationStatus::Verified;
    Ok(report)
}
