//! Endomorphisms of the free algebra as tuples of generator images.
//!
//! Composition follows the algebra-homomorphism convention:
//! `compose(φ, ψ)` is φ∘ψ, the map zᵢ ↦ φ(ψ(zᵢ)), computed by substituting
//! φ's images into the polynomial ψ(zᵢ). In particular σ(t)∘σ(t) expands as
//! σ(t)(σ(t)(zᵢ)).

use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{Coeff, CommPoly, Degree, Field, FreePoly, Scalar, Word};
use crate::error::{invalid, Result};
use crate::linalg::Mat;

/// An endomorphism of K⟨z₁,…,zₙ⟩ (or of R⟨z₁,…,zₙ⟩ for a coefficient ring R)
/// given by the images of the generators.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Endo<C: Coeff> {
    n: usize,
    ring: C::Ring,
    images: Vec<FreePoly<C>>,
}

impl<C: Coeff> Endo<C> {
    /// Builds an endomorphism of the algebra on `n` generators; all images
    /// must live in that same algebra.
    pub fn new(n: usize, ring: &C::Ring, images: Vec<FreePoly<C>>) -> Result<Self> {
        if images.len() != n {
            return invalid(format!("endomorphism needs {n} images, got {}", images.len()));
        }
        if images.iter().any(|p| p.n() != n || p.ring() != ring) {
            return invalid("every image must live in the same algebra as the generators");
        }
        Ok(Endo {
            n,
            ring: ring.clone(),
            images,
        })
    }

    /// Builds from images, taking n and the ring from them.
    pub fn from_images(images: Vec<FreePoly<C>>) -> Result<Self> {
        let Some(first) = images.first() else {
            return invalid("endomorphism needs at least one image");
        };
        let (n, ring) = (first.n(), first.ring().clone());
        Self::new(n, &ring, images)
    }

    pub fn identity(n: usize, ring: &C::Ring) -> Self {
        Endo {
            n,
            ring: ring.clone(),
            images: (1..=n as u32).map(|i| FreePoly::var(n, ring, i)).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ring(&self) -> &C::Ring {
        &self.ring
    }

    pub fn images(&self) -> &[FreePoly<C>] {
        &self.images
    }

    /// Image of z_i, 1-based.
    pub fn image(&self, i: usize) -> &FreePoly<C> {
        &self.images[i - 1]
    }

    pub fn into_images(self) -> Vec<FreePoly<C>> {
        self.images
    }

    pub fn degree(&self) -> Degree {
        self.images
            .iter()
            .map(|p| p.degree())
            .max()
            .unwrap_or(Degree::NegInfinity)
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n, &self.ring)
    }

    /// True when every image is homogeneous linear.
    pub fn is_linear(&self) -> bool {
        self.images
            .iter()
            .all(|p| p.terms().all(|(w, _)| w.len() == 1))
    }

    /// Applies the endomorphism to a polynomial.
    pub fn apply(&self, f: &FreePoly<C>) -> Result<FreePoly<C>> {
        f.substitute(&self.images)
    }

    /// Degree-1 coefficient matrix: entry (i, j) is the coefficient of z_{j+1}
    /// in the image of z_{i+1}.
    pub fn linear_matrix(&self) -> Mat<C> {
        Mat::from_fn(self.n, self.n, |i, j| {
            self.images[i].coeff(&Word::letter(j as u32 + 1))
        })
    }

    pub fn constant_terms(&self) -> Vec<C> {
        self.images.iter().map(|p| p.constant_coeff()).collect()
    }

    pub fn map_coeffs<D: Coeff>(&self, ring: &D::Ring, f: impl Fn(&C) -> D) -> Endo<D> {
        Endo {
            n: self.n,
            ring: ring.clone(),
            images: self.images.iter().map(|p| p.map_coeffs(ring, &f)).collect(),
        }
    }

    pub fn abelianize(&self) -> Vec<CommPoly<C>> {
        self.images.iter().map(|p| p.abelianize()).collect()
    }

    pub fn total_terms(&self) -> usize {
        self.images.iter().map(|p| p.len()).sum()
    }
}

impl<C: Coeff + fmt::Display> fmt::Display for Endo<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.images.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// φ∘ψ: the images of ψ with φ substituted into them.
pub fn compose<C: Coeff>(phi: &Endo<C>, psi: &Endo<C>) -> Result<Endo<C>> {
    if phi.n != psi.n || phi.ring != psi.ring {
        return invalid("cannot compose endomorphisms of different algebras");
    }
    let images = psi
        .images
        .iter()
        .map(|p| p.substitute(&phi.images))
        .collect::<Result<Vec<_>>>()?;
    Ok(Endo {
        n: phi.n,
        ring: phi.ring.clone(),
        images,
    })
}

/// Outcome of a bounded inversion attempt.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InversionStatus {
    /// The returned map is a two-sided polynomial inverse.
    Exact,
    /// The term-size cap stopped the expansion at this degree; the returned
    /// map inverts modulo terms of higher degree.
    TruncatedAt(usize),
    /// The linear part is singular, so no inverse exists even formally.
    NotInvertible,
    /// The formal inverse has terms up to the cutoff and is not (yet) a
    /// polynomial inverse; a larger cutoff may succeed.
    Inconclusive,
}

impl fmt::Display for InversionStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InversionStatus::Exact => write!(f, "Exact"),
            InversionStatus::TruncatedAt(d) => write!(f, "TruncatedAt({d})"),
            InversionStatus::NotInvertible => write!(f, "NotInvertible"),
            InversionStatus::Inconclusive => write!(f, "Inconclusive"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InversionReport {
    pub status: InversionStatus,
    pub inverse: Option<Endo<Scalar>>,
    pub cutoff: usize,
}

impl InversionReport {
    pub fn exact_inverse(&self) -> Option<&Endo<Scalar>> {
        match self.status {
            InversionStatus::Exact => self.inverse.as_ref(),
            _ => None,
        }
    }
}

/// Default inversion cutoff deg(φ)^(n−1), at least 1.
pub fn default_cutoff(phi: &Endo<Scalar>) -> usize {
    let d = phi.degree().or_zero().max(1);
    d.saturating_pow(phi.n.saturating_sub(1) as u32).max(1)
}

fn is_two_sided_inverse(phi: &Endo<Scalar>, psi: &Endo<Scalar>) -> Result<bool> {
    Ok(compose(phi, psi)?.is_identity() && compose(psi, phi)?.is_identity())
}

/// Solves for the compositional inverse degree by degree up to `cutoff`.
///
/// Writing φ = c + L·z + H with H of order ≥ 2, the formal inverse ψ is
/// built one homogeneous component at a time from ψ = L⁻¹(z − c − H(ψ)).
/// Whenever a component vanishes the partial inverse is tested for exactness
/// by composition on both sides.
pub fn invert_truncated(phi: &Endo<Scalar>, cutoff: usize) -> Result<InversionReport> {
    let n = phi.n;
    let field = phi.ring;
    let not_invertible = InversionReport {
        status: InversionStatus::NotInvertible,
        inverse: None,
        cutoff,
    };
    let lin = phi.linear_matrix();
    let Some(linv) = lin.inverse() else {
        return Ok(not_invertible);
    };
    if cutoff == 0 {
        return invalid("inversion cutoff must be at least 1");
    }

    // φ0 = φ − c, H = terms of degree ≥ 2
    let consts = phi.constant_terms();
    let higher: Vec<FreePoly<Scalar>> = phi.images.iter().map(|p| p.tail(2)).collect();

    // linear start ψ¹_j = Σ_i Linv[j][i] z_i
    let linear_part = |rhs: &[FreePoly<Scalar>]| -> Vec<FreePoly<Scalar>> {
        (0..n)
            .map(|j| {
                let mut acc = FreePoly::zero(n, &field);
                for (i, r) in rhs.iter().enumerate() {
                    let c = linv.get(j, i);
                    if !c.is_zero() {
                        acc = &acc + &r.scale(c);
                    }
                }
                acc
            })
            .collect()
    };
    let vars: Vec<FreePoly<Scalar>> = (1..=n as u32).map(|i| FreePoly::var(n, &field, i)).collect();
    let mut psi0 = linear_part(&vars);

    let finish = |psi0: &[FreePoly<Scalar>]| -> Result<Endo<Scalar>> {
        // ψ(z) = ψ0(z − c)
        let shifted: Vec<FreePoly<Scalar>> = vars
            .iter()
            .zip(&consts)
            .map(|(v, c)| v - &FreePoly::constant(n, &field, c.clone()))
            .collect();
        let images = psi0
            .iter()
            .map(|p| {
                if consts.iter().all(|c| c.is_zero()) {
                    Ok(p.clone())
                } else {
                    p.substitute(&shifted)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Endo::new(n, &field, images)
    };

    if higher.iter().all(|h| h.is_zero()) {
        let inv = finish(&psi0)?;
        debug_assert!(is_two_sided_inverse(phi, &inv)?);
        return Ok(InversionReport {
            status: InversionStatus::Exact,
            inverse: Some(inv),
            cutoff,
        });
    }

    for d in 2..=cutoff {
        let residual = higher
            .iter()
            .map(|h| Ok(h.substitute_truncated(&psi0, d)?.homogeneous_part(d)))
            .collect::<Result<Vec<_>>>();
        let residual = match residual {
            Ok(r) => r,
            Err(crate::Error::TermLimitExceeded(_)) => {
                return Ok(InversionReport {
                    status: InversionStatus::TruncatedAt(d - 1),
                    inverse: Some(finish(&psi0)?),
                    cutoff,
                });
            }
            Err(e) => return Err(e),
        };
        let component: Vec<FreePoly<Scalar>> = linear_part(&residual).iter().map(|p| -p).collect();
        if component.iter().all(|p| p.is_zero()) {
            let candidate = finish(&psi0)?;
            if is_two_sided_inverse(phi, &candidate)? {
                return Ok(InversionReport {
                    status: InversionStatus::Exact,
                    inverse: Some(candidate),
                    cutoff,
                });
            }
        }
        for (p, c) in psi0.iter_mut().zip(&component) {
            *p = &*p + c;
        }
    }
    let candidate = finish(&psi0)?;
    let status = if is_two_sided_inverse(phi, &candidate)? {
        InversionStatus::Exact
    } else {
        InversionStatus::Inconclusive
    };
    Ok(InversionReport {
        status,
        inverse: Some(candidate),
        cutoff,
    })
}

/// Inversion with the default escalation: first the aggressive cutoff
/// 2·deg(φ), then deg(φ)^(n−1) when that is larger.
pub fn invert(phi: &Endo<Scalar>) -> Result<InversionReport> {
    let deg = phi.degree().or_zero().max(1);
    let aggressive = 2 * deg;
    let report = invert_truncated(phi, aggressive)?;
    let fallback = default_cutoff(phi);
    if report.status == InversionStatus::Inconclusive && fallback > aggressive {
        return invert_truncated(phi, fallback);
    }
    Ok(report)
}

/// A tame automorphism together with an exact inverse and its factors.
#[derive(Clone, Debug)]
pub struct Tame {
    pub map: Endo<Scalar>,
    pub inverse: Endo<Scalar>,
    pub factors: Vec<Endo<Scalar>>,
}

/// Shape of randomly generated tame maps.
#[derive(Clone, Debug)]
pub struct TameOptions {
    pub n: usize,
    pub factors: usize,
    /// Maximal degree of each elementary shift.
    pub max_deg: usize,
    /// Allow nonzero translations in the affine factors.
    pub translations: bool,
    /// Number of terms in each elementary shift polynomial.
    pub max_terms: usize,
    /// Keep linear factors diagonal (scalings only).
    pub diagonal_linear: bool,
}

impl TameOptions {
    pub fn new(n: usize, factors: usize, max_deg: usize) -> Self {
        TameOptions {
            n,
            factors,
            max_deg,
            translations: true,
            max_terms: 2,
            diagonal_linear: false,
        }
    }
}

fn small_nonzero(rng: &mut ChaCha8Rng) -> i64 {
    *[-2i64, -1, 1, 2].choose(rng).unwrap()
}

fn random_elementary(rng: &mut ChaCha8Rng, opts: &TameOptions) -> (Endo<Scalar>, Endo<Scalar>) {
    let f = Field::Rational;
    let n = opts.n;
    let i = rng.gen_range(1..=n as u32);
    let others: Vec<u32> = (1..=n as u32).filter(|&j| j != i).collect();
    let mut p = FreePoly::zero(n, &f);
    if others.is_empty() {
        p.add_term(Word::unit(), &Scalar::from_i64(f, small_nonzero(rng)));
    } else {
        let top = opts.max_deg.max(1);
        let lo = if top >= 2 { 2 } else { 1 };
        let terms = rng.gen_range(1..=opts.max_terms.max(1));
        for _ in 0..terms {
            let len = rng.gen_range(lo..=top);
            let w: Vec<u32> = (0..len).map(|_| *others.choose(rng).unwrap()).collect();
            p.add_term(Word::new(w), &Scalar::from_i64(f, small_nonzero(rng)));
        }
    }
    let mut fwd = Endo::identity(n, &f);
    let mut bwd = Endo::identity(n, &f);
    let zi = FreePoly::var(n, &f, i);
    fwd.images[i as usize - 1] = &zi + &p;
    bwd.images[i as usize - 1] = &zi - &p;
    (fwd, bwd)
}

fn random_affine(rng: &mut ChaCha8Rng, opts: &TameOptions) -> (Endo<Scalar>, Endo<Scalar>) {
    let f = Field::Rational;
    let n = opts.n;
    // M = D·P·U with U unitriangular, P a permutation, D a scaling
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let scales: Vec<i64> = (0..n).map(|_| *[1i64, -1, 2].choose(rng).unwrap()).collect();
    let m = Mat::from_fn(n, n, |i, j| {
        if opts.diagonal_linear {
            return if i == j {
                Scalar::from_i64(f, scales[i])
            } else {
                Scalar::zero(f)
            };
        }
        Scalar::zero(f).add(&Scalar::from_i64(f, if perm[i] == j { scales[i] } else { 0 }))
    });
    let m = if opts.diagonal_linear {
        m
    } else {
        let u = Mat::from_fn(n, n, |i, j| match i.cmp(&j) {
            std::cmp::Ordering::Equal => Scalar::one(f),
            std::cmp::Ordering::Less => Scalar::from_i64(f, rng.clone().gen_range(-1..=1)),
            std::cmp::Ordering::Greater => Scalar::zero(f),
        });
        // advance the generator so the triangular entries differ per factor
        let _: u64 = rng.gen();
        m.mul(&u)
    };
    let consts: Vec<Scalar> = (0..n)
        .map(|_| {
            let v = if opts.translations { rng.gen_range(-1..=1) } else { 0 };
            Scalar::from_i64(f, v)
        })
        .collect();
    let fwd = affine_endo(&m, &consts);
    let minv = m.inverse().expect("constructed invertible");
    // inverse of z ↦ c + M z (rowwise) is z ↦ Minv (z − c)
    let inv_consts: Vec<Scalar> = (0..n)
        .map(|i| {
            let mut acc = Scalar::zero(f);
            for (j, c) in consts.iter().enumerate() {
                acc = acc.sub(&minv.get(i, j).mul(c));
            }
            acc
        })
        .collect();
    // the inverse as an algebra map: ψ(z_i) = Σ_j Minv'[i][j] z_j + c'_i where
    // φ_i(ψ) = z_i. With φ_i = c_i + Σ_j M[i][j] z_j this is ψ = Minv·(z − c).
    let bwd = affine_endo(&minv, &inv_consts);
    debug_assert!(compose(&bwd, &fwd).map(|e| e.is_identity()).unwrap_or(false));
    (fwd, bwd)
}

/// The affine map z_i ↦ c_i + Σ_j m[i][j] z_j.
pub fn affine_endo(m: &Mat<Scalar>, consts: &[Scalar]) -> Endo<Scalar> {
    let n = m.rows();
    let f = m.field();
    let images = (0..n)
        .map(|i| {
            let mut p = FreePoly::constant(n, &f, consts[i].clone());
            for j in 0..n {
                p.add_term(Word::letter(j as u32 + 1), m.get(i, j));
            }
            p
        })
        .collect();
    Endo {
        n,
        ring: f,
        images,
    }
}

/// A random tame automorphism with its inverse, deterministic in `seed`.
/// Factors alternate elementary, affine, elementary, …, so a single factor
/// is an elementary map.
pub fn random_tame_with(opts: &TameOptions, seed: u64) -> Result<Tame> {
    if opts.n == 0 {
        return invalid("need at least one generator");
    }
    if opts.factors == 0 {
        return invalid("need at least one factor");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = Field::Rational;
    let mut map = Endo::identity(opts.n, &f);
    let mut inverse = Endo::identity(opts.n, &f);
    let mut factors = Vec::new();
    for k in 0..opts.factors {
        let (fwd, bwd) = if k % 2 == 0 {
            random_elementary(&mut rng, opts)
        } else {
            random_affine(&mut rng, opts)
        };
        map = compose(&map, &fwd)?;
        inverse = compose(&bwd, &inverse)?;
        factors.push(fwd);
    }
    Ok(Tame {
        map,
        inverse,
        factors,
    })
}

/// A random tame automorphism: a composition of `factors` maps alternating
/// between elementary shifts zᵢ ↦ zᵢ + p(other generators) with deg p ≤
/// `max_deg` and invertible affine maps.
pub fn random_tame(n: usize, factors: usize, max_deg: usize, seed: u64) -> Result<Endo<Scalar>> {
    Ok(random_tame_with(&TameOptions::new(n, factors, max_deg), seed)?.map)
}

#[cfg(test)]
mod tests {
    use super::*;

    const F: Field = Field::Rational;

    fn z(n: usize, i: u32) -> FreePoly<Scalar> {
        FreePoly::var(n, &F, i)
    }

    fn endo(images: Vec<FreePoly<Scalar>>) -> Endo<Scalar> {
        Endo::from_images(images).unwrap()
    }

    fn elementary() -> (Endo<Scalar>, Endo<Scalar>) {
        let sq = &z(2, 2) * &z(2, 2);
        (
            endo(vec![&z(2, 1) + &sq, z(2, 2)]),
            endo(vec![&z(2, 1) - &sq, z(2, 2)]),
        )
    }

    #[test]
    fn compose_convention() {
        let (phi, _) = elementary();
        let psi = endo(vec![z(2, 1), &z(2, 1) + &z(2, 2)]);
        let got = compose(&phi, &psi).unwrap();
        let sq = &z(2, 2) * &z(2, 2);
        let expect = endo(vec![&z(2, 1) + &sq, &(&z(2, 1) + &sq) + &z(2, 2)]);
        assert_eq!(got, expect);
        assert_eq!(compose(&phi, &Endo::identity(2, &F)).unwrap(), phi);
    }

    #[test]
    fn elementary_inverse() {
        let (phi, inv) = elementary();
        assert!(compose(&phi, &inv).unwrap().is_identity());
        let rep = invert_truncated(&phi, 4).unwrap();
        assert_eq!(rep.status, InversionStatus::Exact);
        assert_eq!(rep.inverse.unwrap(), inv);
    }

    #[test]
    fn singular_linear_part() {
        let phi = endo(vec![&z(2, 1) * &z(2, 1), z(2, 2)]);
        for cutoff in [1, 3, 8] {
            assert_eq!(
                invert_truncated(&phi, cutoff).unwrap().status,
                InversionStatus::NotInvertible
            );
        }
    }

    #[test]
    fn non_polynomial_inverse_is_inconclusive() {
        // z1 ↦ z1 + z1², z2 ↦ z2 has a formal inverse that never terminates
        let phi = endo(vec![&z(2, 1) + &(&z(2, 1) * &z(2, 1)), z(2, 2)]);
        let rep = invert_truncated(&phi, 5).unwrap();
        assert_eq!(rep.status, InversionStatus::Inconclusive);
        let psi = rep.inverse.unwrap();
        let back = compose(&psi, &phi).unwrap();
        for (i, p) in back.images().iter().enumerate() {
            assert_eq!(p.truncate(5), z(2, i as u32 + 1));
        }
    }

    #[test]
    fn inverse_with_translation() {
        let one = FreePoly::one(2, &F);
        let phi = endo(vec![&(&z(2, 1) + &one) + &(&z(2, 2) * &z(2, 2)), &z(2, 2) - &one]);
        let rep = invert_truncated(&phi, 4).unwrap();
        assert_eq!(rep.status, InversionStatus::Exact);
        let psi = rep.inverse.unwrap();
        assert!(compose(&phi, &psi).unwrap().is_identity());
        assert!(compose(&psi, &phi).unwrap().is_identity());
    }

    #[test]
    fn cutoff_zero_rejected() {
        let (phi, _) = elementary();
        assert!(invert_truncated(&phi, 0).is_err());
    }

    #[test]
    fn random_tame_is_deterministic() {
        assert!(random_tame(2, 0, 2, 1).is_err());
        let a = random_tame(3, 4, 2, 17).unwrap();
        let b = random_tame(3, 4, 2, 17).unwrap();
        assert_eq!(a, b);
        let single = random_tame(2, 1, 3, 5).unwrap();
        let changed: Vec<_> = (1..=2)
            .filter(|&i| single.image(i) != &z(2, i as u32))
            .collect();
        assert_eq!(changed.len(), 1);
    }

    #[test]
    fn tame_inverse_matches_factors() {
        for seed in 0..10 {
            let t = random_tame_with(&TameOptions::new(3, 3, 2), seed).unwrap();
            assert!(compose(&t.map, &t.inverse).unwrap().is_identity());
            assert!(compose(&t.inverse, &t.map).unwrap().is_identity());
        }
    }
}
