//! Two generators: abelianization of Aut F₂, Jung–van der Kulk factorization
//! of plane automorphisms, factorwise lifting back to F₂, and linearization
//! of K^× actions on F₂ through the commutative quotient.

use std::fmt;

use crate::algebra::{Coeff, CommPoly, Degree, Field, FreePoly, Laurent, Scalar};
use crate::endomorphism::{affine_endo, compose, Endo};
use crate::error::{invalid, Error, Result};
use crate::linalg::Mat;
use crate::torus::{
    self, is_effective, verify_conjugation_with_inverse, ActionSpec, LinearizationReport,
    LinearizationStatus,
};

/// Default cap on the number of factors a decomposition may produce.
pub const DEFAULT_FACTOR_BOUND: usize = 12;

/// An endomorphism of K[x₁, x₂] by its two images.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommEndo {
    pub images: Vec<CommPoly<Scalar>>,
}

impl CommEndo {
    pub fn new(images: Vec<CommPoly<Scalar>>) -> Result<Self> {
        if images.len() != 2 || images.iter().any(|p| p.nvars() != 2) {
            return invalid("a plane endomorphism needs two images in x1, x2");
        }
        if images[0].field() != images[1].field() {
            return invalid("images over different fields");
        }
        Ok(CommEndo { images })
    }

    pub fn identity(field: Field) -> Self {
        CommEndo {
            images: vec![CommPoly::var(2, &field, 1), CommPoly::var(2, &field, 2)],
        }
    }

    pub fn field(&self) -> Field {
        self.images[0].field()
    }

    pub fn degree(&self) -> Degree {
        self.images.iter().map(|p| p.degree()).max().unwrap_or(Degree::NegInfinity)
    }

    /// φ∘ψ, the images of ψ with φ substituted.
    pub fn compose(phi: &CommEndo, psi: &CommEndo) -> Result<CommEndo> {
        let images = psi
            .images
            .iter()
            .map(|p| p.substitute(&phi.images))
            .collect::<Result<Vec<_>>>()?;
        Ok(CommEndo { images })
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.field())
    }
}

impl fmt::Display for CommEndo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.images[0], self.images[1])
    }
}

/// Componentwise abelianization Aut F₂ → Aut K[x₁, x₂].
pub fn abelianize_aut(phi: &Endo<Scalar>) -> Result<CommEndo> {
    if phi.n() != 2 {
        return invalid("abelianize_aut works on two generators");
    }
    CommEndo::new(phi.abelianize())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TameFactor {
    /// x ↦ c + M·x, i.e. xᵢ ↦ cᵢ + Σⱼ M[i][j] xⱼ.
    Affine { matrix: Mat<Scalar>, translation: Vec<Scalar> },
    /// xᵢ ↦ xᵢ + p(x_other), the other variable fixed. `index` is 1-based
    /// and p involves only the other variable.
    Elementary { index: usize, poly: CommPoly<Scalar> },
}

impl TameFactor {
    pub fn to_comm(&self) -> CommEndo {
        match self {
            TameFactor::Affine {
                matrix,
                translation,
            } => {
                let f = matrix.field();
                let images = (0..2)
                    .map(|i| {
                        let mut p = CommPoly::constant(2, &f, translation[i].clone());
                        for j in 0..2 {
                            p = p.add(&CommPoly::var(2, &f, j + 1).scale(matrix.get(i, j)));
                        }
                        p
                    })
                    .collect();
                CommEndo { images }
            }
            TameFactor::Elementary { index, poly } => {
                let f = poly.field();
                let mut e = CommEndo::identity(f);
                e.images[index - 1] = e.images[index - 1].add(poly);
                e
            }
        }
    }

    /// The same factor on F₂; p(x_j) becomes p(z_j).
    pub fn lift(&self) -> Endo<Scalar> {
        match self {
            TameFactor::Affine {
                matrix,
                translation,
            } => affine_endo(matrix, translation),
            TameFactor::Elementary { index, poly } => {
                let f = poly.field();
                let mut images = vec![FreePoly::var(2, &f, 1), FreePoly::var(2, &f, 2)];
                images[index - 1] = &images[index - 1] + &poly.to_sorted_free();
                Endo::new(2, &f, images).expect("plane map")
            }
        }
    }

    pub fn inverse(&self) -> TameFactor {
        match self {
            TameFactor::Affine {
                matrix,
                translation,
            } => {
                let inv = matrix.inverse().expect("affine factors are invertible");
                let t = (0..2)
                    .map(|i| {
                        let mut acc = Scalar::zero(matrix.field());
                        for (j, c) in translation.iter().enumerate() {
                            acc = acc.sub(&inv.get(i, j).mul(c));
                        }
                        acc
                    })
                    .collect();
                TameFactor::Affine {
                    matrix: inv,
                    translation: t,
                }
            }
            TameFactor::Elementary { index, poly } => TameFactor::Elementary {
                index: *index,
                poly: poly.neg(),
            },
        }
    }
}

impl fmt::Display for TameFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TameFactor::Affine { .. } => write!(f, "Affine{}", self.to_comm()),
            TameFactor::Elementary { index, poly } => write!(f, "Elementary({index}, {poly})"),
        }
    }
}

/// φ = factors[0]∘factors[1]∘⋯.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TameFactorization {
    pub factors: Vec<TameFactor>,
}

impl TameFactorization {
    pub fn recompose(&self, field: Field) -> Result<CommEndo> {
        let mut acc = CommEndo::identity(field);
        for f in &self.factors {
            acc = CommEndo::compose(&acc, &f.to_comm())?;
        }
        Ok(acc)
    }

    pub fn inverse(&self) -> TameFactorization {
        TameFactorization {
            factors: self.factors.iter().rev().map(|f| f.inverse()).collect(),
        }
    }
}

fn not_aut(msg: impl Into<String>) -> Error {
    Error::NotAnAutomorphism(msg.into())
}

/// Degree reduction: while some image has degree > 1, its leading form must
/// be c·(leading form of the other)^k, and the elementary map cancelling it
/// is split off on the right. Ties reduce the second image first. The
/// affine remainder becomes the first factor; adjacent elementary factors on
/// the same variable are merged.
pub fn jvdk_decompose(phi: &CommEndo) -> Result<TameFactorization> {
    let field = phi.field();
    let mut cur = phi.clone();
    let mut peeled: Vec<TameFactor> = Vec::new();
    loop {
        let d: Vec<usize> = cur
            .images
            .iter()
            .map(|p| p.degree().finite().ok_or_else(|| not_aut("an image is zero")))
            .collect::<Result<_>>()?;
        if d[0] <= 1 && d[1] <= 1 {
            break;
        }
        let (i, j) = if d[1] >= d[0] { (1, 0) } else { (0, 1) };
        if d[j] == 0 {
            return Err(not_aut("an image is constant"));
        }
        if d[i] % d[j] != 0 {
            return Err(not_aut(format!("degrees {} and {} are not divisible", d[i], d[j])));
        }
        let k = (d[i] / d[j]) as u32;
        let lead_i = cur.images[i].leading_form();
        let lead_j = cur.images[j].leading_form();
        let power = lead_j.pow(k);
        let (e, a) = lead_i.terms().next().expect("nonzero");
        let b = power.coeff(e);
        let Some(c) = a.div(&b) else {
            return Err(not_aut("leading forms are not proportional"));
        };
        if lead_i != power.scale(&c) {
            return Err(not_aut("leading forms are not proportional"));
        }
        // φ = φ'∘E⁻¹ with φ' = φ∘E, E: x_i ↦ x_i − c·x_j^k
        let xj = CommPoly::var(2, &field, j + 1);
        let p = xj.pow(k).scale(&c);
        cur.images[i] = cur.images[i].sub(&cur.images[j].pow(k).scale(&c));
        peeled.push(TameFactor::Elementary {
            index: i + 1,
            poly: p,
        });
        if peeled.len() > 4 * (d[0] + d[1]) + 64 {
            return Err(not_aut("degree reduction does not terminate"));
        }
    }
    let lin = Mat::from_fn(2, 2, |i, j| {
        let mut e = vec![0u32; 2];
        e[j] = 1;
        cur.images[i].coeff(&e)
    });
    if lin.inverse().is_none() {
        return Err(not_aut("the affine remainder is singular"));
    }
    let translation = cur.images.iter().map(|p| p.coeff(&[0, 0])).collect();
    let mut factors = vec![TameFactor::Affine {
        matrix: lin,
        translation,
    }];
    for f in peeled.into_iter().rev() {
        match (factors.last_mut(), f) {
            (
                Some(TameFactor::Elementary { index, poly }),
                TameFactor::Elementary { index: i2, poly: p2 },
            ) if *index == i2 => {
                *poly = poly.add(&p2);
                if poly.is_empty() {
                    factors.pop();
                }
            }
            (_, f) => factors.push(f),
        }
    }
    let out = TameFactorization { factors };
    debug_assert_eq!(out.recompose(field).ok().as_ref(), Some(phi));
    Ok(out)
}

/// Lifts each factor verbatim and composes in F₂.
pub fn lift(fact: &TameFactorization, field: Field) -> Result<Endo<Scalar>> {
    let mut acc = Endo::identity(2, &field);
    for f in &fact.factors {
        acc = compose(&acc, &f.lift())?;
    }
    Ok(acc)
}

/// Zero-weight averaging on the commutative quotient: the coefficient of x^e
/// keeps only its t^{e·M} term.
pub fn comm_zero_weight(images: &[CommPoly<Laurent>], weights: &[Vec<i64>], field: Field) -> Vec<CommPoly<Scalar>> {
    images
        .iter()
        .map(|p| {
            let mut g = CommPoly::zero(p.nvars(), &field);
            for (e, c) in p.terms() {
                let r = weights.first().map_or(0, |m| m.len());
                let mut wt = vec![0i64; r];
                for (k, &x) in e.iter().enumerate() {
                    for (slot, m) in wt.iter_mut().zip(&weights[k]) {
                        *slot += x as i64 * m;
                    }
                }
                g.add_term(e.clone(), &c.coeff(&wt));
            }
            g
        })
        .collect()
}

/// Linearizes a K^× action on F₂: average on the commutative quotient,
/// factor the commutative linearizer, lift it, and check on F₂.
pub fn linearize_kstar_f2(spec: &ActionSpec) -> Result<LinearizationReport> {
    if spec.n() != 2 || spec.r() != 1 {
        return invalid("kstar2 needs a one-parameter action on two generators");
    }
    torus::with_validation(spec, kstar_core(spec))
}

fn kstar_core(spec: &ActionSpec) -> Result<LinearizationReport> {
    let field = spec.field();
    let mut report = LinearizationReport::new();
    let norm = torus::normalize(spec, &mut report)?;
    if !is_effective(&norm.weights) {
        return Err(Error::NotEffective);
    }
    let m = norm.weights.weight_matrix.clone();
    report.translation = norm.translation.clone();
    report.weights = Some(norm.weights.clone());
    let tau = ActionSpec::diagonal(field, &m)?;
    report.tau = Some(tau.clone());

    let ab: Vec<CommPoly<Laurent>> = norm.action.endo().abelianize();
    let g = CommEndo::new(comm_zero_weight(&ab, &m, field))?;
    report.note("average", format!("commutative linearizer {g}"));
    // τ∘g = g∘σ on the quotient
    let lr = norm.action.ring();
    let to_l = |p: &CommPoly<Scalar>| p.map_coeffs(&lr, |c| Laurent::constant(lr, c.clone()));
    let gl: Vec<CommPoly<Laurent>> = g.images.iter().map(to_l).collect();
    let tau_ab = tau.endo().abelianize();
    let lhs = gl.iter().map(|p| p.substitute(&tau_ab)).collect::<Result<Vec<_>>>()?;
    let rhs = ab.iter().map(|p| p.substitute(&gl)).collect::<Result<Vec<_>>>()?;
    if lhs != rhs {
        return Err(Error::CommLinearizationFailed(
            "the averaged map does not intertwine the commutative actions".into(),
        ));
    }
    let fact = jvdk_decompose(&g)
        .map_err(|e| Error::CommLinearizationFailed(format!("linearizer is not tame: {e}")))?;
    report.note(
        "jvdk",
        format!(
            "{} factors: {}",
            fact.factors.len(),
            fact.factors.iter().map(|f| f.to_string()).collect::<Vec<_>>().join(" ∘ ")
        ),
    );
    let hat = lift(&fact, field)?;
    let hat_inv = lift(&fact.inverse(), field)?;
    report.note("lift", format!("β̂ = {hat}"));
    let beta = compose(&hat, &norm.to_normal)?;
    let beta_inv = compose(&norm.from_normal, &hat_inv)?;
    report.beta = Some(beta.clone());
    report.beta_inverse = Some(beta_inv.clone());
    // β̂∘σ∘β̂⁻¹ must be exactly linear, with no commutator remainder
    let conj = compose(
        &torus::lift_scalars(&hat, lr),
        &compose(norm.action.endo(), &torus::lift_scalars(&hat_inv, lr))?,
    )?;
    if !conj.is_linear() || !verify_conjugation_with_inverse(spec, &tau, &beta, &beta_inv)? {
        return Err(Error::LiftVerificationFailed(
            "the lifted linearizer leaves a nonlinear remainder".into(),
        ));
    }
    report.note("verify", "β̂∘σ∘β̂⁻¹ is linear and τ∘β = β∘σ holds exactly");
    report.status = LinearizationStatus::Verified;
    Ok(report)
}

/// Elementary factor helper for tests and fixtures: xᵢ ↦ xᵢ + p.
pub fn elementary(index: usize, poly: CommPoly<Scalar>) -> Result<TameFactor> {
    if !(1..=2).contains(&index) {
        return invalid("elementary index must be 1 or 2");
    }
    if poly.terms().any(|(e, _)| e[index - 1] != 0) {
        return invalid("elementary polynomial must not involve its own variable");
    }
    Ok(TameFactor::Elementary { index, poly })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::endomorphism::random_tame;
    use crate::parse::{parse_many, parse_poly, ParseOptions};

    const F: Field = Field::Rational;

    fn endo(texts: &[&str]) -> Endo<Scalar> {
        Endo::from_images(texts.iter().map(|t| parse_poly(t, F, 2).unwrap()).collect()).unwrap()
    }

    fn comm(texts: &[&str]) -> CommEndo {
        abelianize_aut(&endo(texts)).unwrap()
    }

    #[test]
    fn abelianize_examples() {
        assert_eq!(comm(&["z1 + z2*z1*z2", "z2"]), comm(&["z1 + z1*z2^2", "z2"]));
        assert!(comm(&["z1", "z2"]).is_identity());
        assert!(comm(&["z1 + z1*z2 - z2*z1", "z2"]).is_identity());
        let flagged = endo(&["z1 + z1*z2 - z2*z1", "z2"]);
        let rep = crate::endomorphism::invert_truncated(&flagged, 6).unwrap();
        assert_ne!(rep.status, crate::endomorphism::InversionStatus::Exact);
    }

    #[test]
    fn swap_then_elementary() {
        let phi = comm(&["z2", "z1 + z2^2"]);
        let fact = jvdk_decompose(&phi).unwrap();
        assert_eq!(fact.factors.len(), 2);
        assert!(matches!(fact.factors[0], TameFactor::Affine { .. }));
        assert!(matches!(fact.factors[1], TameFactor::Elementary { index: 2, .. }));
        assert_eq!(fact.recompose(F).unwrap(), phi);
        let lifted = lift(&fact, F).unwrap();
        assert_eq!(abelianize_aut(&lifted).unwrap(), phi);
    }

    #[test]
    fn affine_and_singular() {
        let fact = jvdk_decompose(&comm(&["2*z1 + z2 + 1", "z2"])).unwrap();
        assert_eq!(fact.factors.len(), 1);
        assert!(matches!(jvdk_decompose(&comm(&["z1^2", "z2"])), Err(Error::NotAnAutomorphism(_))));
        assert!(matches!(jvdk_decompose(&comm(&["z1 + z2^2", "z2 + z1^2"])), Err(Error::NotAnAutomorphism(_))));
    }

    #[test]
    fn lift_examples() {
        let e = elementary(1, CommPoly::var(2, &F, 2).pow(2)).unwrap();
        let fact = TameFactorization { factors: vec![e] };
        assert_eq!(lift(&fact, F).unwrap(), endo(&["z1 + z2^2", "z2"]));
        assert!(lift(&TameFactorization { factors: vec![] }, F).unwrap().is_identity());
    }

    #[test]
    fn random_round_trip() {
        for seed in 0..30 {
            let phi = comm_of(&random_tame(2, 4, 3, seed).unwrap());
            let fact = jvdk_decompose(&phi).unwrap();
            assert!(fact.factors.len() <= DEFAULT_FACTOR_BOUND);
            assert_eq!(fact.recompose(F).unwrap(), phi);
            assert_eq!(abelianize_aut(&lift(&fact, F).unwrap()).unwrap(), phi);
        }
    }

    fn comm_of(e: &Endo<Scalar>) -> CommEndo {
        abelianize_aut(e).unwrap()
    }

    fn action(texts: &[&str]) -> ActionSpec {
        let images = parse_many(texts, ParseOptions { field: F, n: 2, r: 1 }).unwrap();
        ActionSpec::new(2, 1, images).unwrap()
    }

    #[test]
    fn kstar_family() {
        let spec = action(&["t*z1", "t^3*z2 + (t^2 - t^3)*z1^2"]);
        let rep = linearize_kstar_f2(&spec).unwrap();
        assert!(rep.status.is_verified());
        assert_eq!(rep.beta.as_ref().unwrap(), &endo(&["z1", "z2 + z1^2"]));
        let avg = torus::average_linearize(&spec).unwrap();
        assert_eq!(avg.tau, rep.tau);
    }

    #[test]
    fn kstar_linear_and_noneffective() {
        let rep = linearize_kstar_f2(&action(&["t*z1", "t^2*z2"])).unwrap();
        assert!(rep.beta.unwrap().is_identity());
        assert_eq!(linearize_kstar_f2(&action(&["t^2*z1", "t^2*z2"])), Err(Error::NotEffective));
    }
}
