//! Torus actions on the free algebra and their linearization by zero-weight
//! averaging.
//!
//! An action σ of T_r = (K^×)^r is stored as an endomorphism with Laurent
//! coefficients in t₁,…,t_r. A linearizer is an automorphism β with
//! τ(t)∘β = β∘σ(t) for a diagonal action τ, i.e. τ(t) = β∘σ(t)∘β⁻¹.

use std::fmt;

use crate::algebra::{Coeff, CommPoly, Field, FreePoly, Laurent, LaurentRing, Scalar, Word};
use crate::groebner;
use crate::endomorphism::{self, compose, Endo, InversionStatus};
use crate::error::{invalid, Error, Result};
use crate::linalg::{smith_invariants, Mat};

/// How many prime sample points diagonalization tries before giving up.
pub const DIAGONALIZATION_SAMPLES: usize = 4;

const PRIMES: [i64; 40] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
    97, 101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173,
];

/// σ(t) as n images with Laurent coefficients in r parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionSpec {
    endo: Endo<Laurent>,
}

impl ActionSpec {
    pub fn new(n: usize, r: usize, images: Vec<FreePoly<Laurent>>) -> Result<Self> {
        let field = match images.first() {
            Some(p) => p.ring().field,
            None => return invalid("an action needs at least one generator"),
        };
        let ring = LaurentRing::new(field, r);
        Ok(ActionSpec {
            endo: Endo::new(n, &ring, images)?,
        })
    }

    pub fn from_endo(endo: Endo<Laurent>) -> Self {
        ActionSpec { endo }
    }

    /// The diagonal action zᵢ ↦ t^{mᵢ} zᵢ.
    pub fn diagonal(field: Field, weights: &[Vec<i64>]) -> Result<Self> {
        let n = weights.len();
        let Some(r) = weights.first().map(|m| m.len()) else {
            return invalid("weight matrix has no rows");
        };
        if weights.iter().any(|m| m.len() != r) {
            return invalid("weight matrix rows differ in length");
        }
        let ring = LaurentRing::new(field, r);
        let images = weights
            .iter()
            .enumerate()
            .map(|(i, m)| {
                FreePoly::monomial(
                    n,
                    &ring,
                    Word::letter(i as u32 + 1),
                    Laurent::monomial(ring, m.clone(), Scalar::one(field)),
                )
            })
            .collect();
        Self::new(n, r, images)
    }

    /// β⁻¹∘τ(t)∘β, the action that β conjugates to τ.
    pub fn conjugate(tau: &ActionSpec, beta: &Endo<Scalar>, beta_inv: &Endo<Scalar>) -> Result<Self> {
        let ring = tau.ring();
        let b = lift_scalars(beta, ring);
        let bi = lift_scalars(beta_inv, ring);
        Ok(ActionSpec {
            endo: compose(&bi, &compose(&tau.endo, &b)?)?,
        })
    }

    pub fn n(&self) -> usize {
        self.endo.n()
    }

    pub fn r(&self) -> usize {
        self.endo.ring().r
    }

    pub fn field(&self) -> Field {
        self.endo.ring().field
    }

    pub fn ring(&self) -> LaurentRing {
        *self.endo.ring()
    }

    pub fn endo(&self) -> &Endo<Laurent> {
        &self.endo
    }

    pub fn images(&self) -> &[FreePoly<Laurent>] {
        self.endo.images()
    }

    /// σ at a torus point.
    pub fn at(&self, point: &[Scalar]) -> Result<Endo<Scalar>> {
        let field = self.field();
        let images = self
            .images()
            .iter()
            .map(|p| {
                let mut out = FreePoly::zero(self.n(), &field);
                for (w, c) in p.terms() {
                    out.add_term(w.clone(), &c.eval(point)?);
                }
                Ok(out)
            })
            .collect::<Result<Vec<_>>>()?;
        Endo::new(self.n(), &field, images)
    }

    /// σ(t⁻¹).
    pub fn inverse_parameters(&self) -> Self {
        ActionSpec {
            endo: self.endo.map_coeffs(&self.ring(), |c| c.invert_parameters()),
        }
    }

    /// Re-expresses the action over a larger parameter ring with tⱼ ↦ t^{chars[j]}.
    pub fn reparametrize(&self, target: LaurentRing, chars: &[Vec<i64>]) -> Endo<Laurent> {
        self.endo
            .map_coeffs(&target, |c| c.substitute_characters(target, chars))
    }

    pub fn is_linear(&self) -> bool {
        self.endo.is_linear()
    }

    /// Degree-1 coefficient matrix [a_ij(t)].
    pub fn linear_matrix(&self) -> Mat<Laurent> {
        self.endo.linear_matrix()
    }
}

impl fmt::Display for ActionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.endo)
    }
}

/// Scalar endomorphism viewed over the Laurent coefficient ring.
pub fn lift_scalars(e: &Endo<Scalar>, ring: LaurentRing) -> Endo<Laurent> {
    e.map_coeffs(&ring, |c| Laurent::constant(ring, c.clone()))
}

/// Checks σ(1) = id and σ(s)∘σ(t) = σ(st) with s, t independent symbolic
/// parameter vectors.
pub fn validate_action(spec: &ActionSpec) -> Result<bool> {
    let (n, r, field) = (spec.n(), spec.r(), spec.field());
    if spec.images().iter().any(|p| p.ring().r != r || p.n() != n) {
        return invalid("action images disagree on n or r");
    }
    let ones = vec![Scalar::one(field); r];
    if !spec.at(&ones)?.is_identity() {
        return Ok(false);
    }
    let big = LaurentRing::new(field, 2 * r);
    let unit = |k: usize| {
        let mut v = vec![0i64; 2 * r];
        v[k] = 1;
        v
    };
    let s_chars: Vec<Vec<i64>> = (0..r).map(unit).collect();
    let t_chars: Vec<Vec<i64>> = (0..r).map(|j| unit(r + j)).collect();
    let st_chars: Vec<Vec<i64>> = (0..r)
        .map(|j| {
            let mut v = unit(j);
            v[r + j] = 1;
            v
        })
        .collect();
    let sigma_s = spec.reparametrize(big, &s_chars);
    let sigma_t = spec.reparametrize(big, &t_chars);
    let sigma_st = spec.reparametrize(big, &st_chars);
    Ok(compose(&sigma_s, &sigma_t)? == sigma_st)
}

/// The translation zᵢ ↦ zᵢ + cᵢ.
pub fn translation(n: usize, c: &[Scalar]) -> Endo<Scalar> {
    let field = c.first().map_or(Field::Rational, |s| s.field());
    let images = (0..n)
        .map(|i| &FreePoly::var(n, &field, i as u32 + 1) + &FreePoly::constant(n, &field, c[i].clone()))
        .collect();
    Endo::new(n, &field, images).expect("well-formed translation")
}

/// Moves a fixed point to the origin: returns c and σ'(z) = σ(z + c) − c.
///
/// The fixed-point equations σ(t)(c) = c split by Laurent monomial into a
/// polynomial system in c. Its affine part is tried first; when that does
/// not give a fixed point the full system is solved through a lex Gröbner
/// basis.
pub fn translate_origin(spec: &ActionSpec) -> Result<(ActionSpec, Vec<Scalar>)> {
    let (n, field) = (spec.n(), spec.field());
    let zero = vec![Scalar::zero(field); n];
    if spec.images().iter().all(|p| p.constant_coeff().is_zero()) {
        return Ok((spec.clone(), zero));
    }
    let system = fixed_point_system(spec);
    let affine = affine_solution(&system, n, field);
    if let Some(moved) = affine.as_ref().and_then(|c| moved_to(spec, c).transpose()) {
        return Ok((moved?, affine.unwrap_or_default()));
    }
    let Some(c) = groebner::find_point(&system, n, field) else {
        return Err(Error::NoFixedPointFound(
            "the fixed-point equations have no solution in the ground field".into(),
        ));
    };
    match moved_to(spec, &c)? {
        Some(moved) => Ok((moved, c)),
        None => Err(Error::NoFixedPointFound("the computed point is not fixed".into())),
    }
}

/// One polynomial per coordinate and Laurent monomial: the coefficient of
/// t^e in σᵢ(t)(c) − cᵢ.
fn fixed_point_system(spec: &ActionSpec) -> Vec<CommPoly<Scalar>> {
    let (n, field) = (spec.n(), spec.field());
    let unit = vec![0i64; spec.r()];
    let mut out = Vec::new();
    for (i, p) in spec.images().iter().enumerate() {
        let ab = p.abelianize();
        let mut exps: Vec<Vec<i64>> = vec![unit.clone()];
        for (_, c) in ab.terms() {
            exps.extend(c.terms().map(|(e, _)| e.clone()));
        }
        exps.sort();
        exps.dedup();
        for e in exps {
            let mut eq = CommPoly::from_terms(n, &field, ab.terms().map(|(m, c)| (m.clone(), c.coeff(&e))))
                .expect("well-formed exponents");
            if e == unit {
                eq = eq.sub(&CommPoly::var(n, &field, i + 1));
            }
            if !eq.is_empty() {
                out.push(eq);
            }
        }
    }
    out
}

/// Solves the equations of degree at most one, ignoring the rest.
fn affine_solution(system: &[CommPoly<Scalar>], n: usize, field: Field) -> Option<Vec<Scalar>> {
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for eq in system {
        let mut row = vec![Scalar::zero(field); n];
        let mut b = Scalar::zero(field);
        for (e, c) in eq.terms() {
            match e.iter().sum::<u32>() {
                0 => b = c.neg(),
                1 => row[e.iter().position(|&x| x == 1)?] = c.clone(),
                _ => {}
            }
        }
        rows.push(row);
        rhs.push(b);
    }
    Mat::from_rows(rows).solve(&rhs)
}

/// σ conjugated by the translation by c, if that fixes the origin.
fn moved_to(spec: &ActionSpec, c: &[Scalar]) -> Result<Option<ActionSpec>> {
    let ring = spec.ring();
    let shift = lift_scalars(&translation(spec.n(), c), ring);
    let neg: Vec<Scalar> = c.iter().map(|x| x.neg()).collect();
    let back = lift_scalars(&translation(spec.n(), &neg), ring);
    let moved = compose(&compose(&shift, &spec.endo)?, &back)?;
    if moved.images().iter().any(|p| !p.constant_coeff().is_zero()) {
        return Ok(None);
    }
    Ok(Some(ActionSpec { endo: moved }))
}

/// Weights of the diagonalized linear part.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightData {
    /// Row i is the exponent vector of the character scaling the i-th
    /// eigen-generator.
    pub weight_matrix: Vec<Vec<i64>>,
    pub diagonal: bool,
    /// Rows are the coordinates of the eigen-generators: the linear map C
    /// with matrix B satisfies C⁻¹∘σ∘C having diagonal linear part.
    pub basis_change: Option<Mat<Scalar>>,
}

impl WeightData {
    pub fn from_matrix(weight_matrix: Vec<Vec<i64>>) -> Self {
        WeightData {
            weight_matrix,
            diagonal: true,
            basis_change: None,
        }
    }

    pub fn n(&self) -> usize {
        self.weight_matrix.len()
    }

    pub fn r(&self) -> usize {
        self.weight_matrix.first().map_or(0, |m| m.len())
    }
}

fn character(c: &Laurent) -> Option<Vec<i64>> {
    match c.as_monomial() {
        Some((e, s)) if s.is_one() => Some(e.clone()),
        _ => None,
    }
}

fn diagonal_weights(a: &Mat<Laurent>) -> Option<std::result::Result<Vec<Vec<i64>>, usize>> {
    let n = a.rows();
    for i in 0..n {
        for j in 0..n {
            if i != j && !a.get(i, j).is_zero() {
                return None;
            }
        }
    }
    Some(
        (0..n)
            .map(|i| character(a.get(i, i)).ok_or(i + 1))
            .collect(),
    )
}

/// The i-th deterministic sample point: consecutive primes.
fn sample_point(field: Field, r: usize, k: usize) -> Vec<Scalar> {
    (0..r)
        .map(|j| Scalar::from_i64(field, PRIMES[(k * r + j) % PRIMES.len()]))
        .collect()
}

/// Reads the weights of the linear part, diagonalizing over K if needed.
///
/// Eigenvalues are searched among ±t^m for exponents m occurring in the
/// linear entries. At a point of distinct primes these values are pairwise
/// distinct, so each eigenvector is attached to exactly one candidate; the
/// result is always re-verified symbolically.
pub fn extract_weights(spec: &ActionSpec) -> Result<WeightData> {
    let (n, r, field, ring) = (spec.n(), spec.r(), spec.field(), spec.ring());
    if spec.images().iter().any(|p| !p.constant_coeff().is_zero()) {
        return invalid("weights need an action with zero constant terms");
    }
    let a = spec.linear_matrix();
    if let Some(diag) = diagonal_weights(&a) {
        return match diag {
            Ok(m) => Ok(WeightData::from_matrix(m)),
            Err(i) => Err(Error::NonMonomialEntries(i)),
        };
    }
    let mut exps: Vec<Vec<i64>> = a
        .to_rows()
        .iter()
        .flatten()
        .flat_map(|c| c.terms().map(|(e, _)| e.clone()).collect::<Vec<_>>())
        .collect();
    exps.sort();
    exps.dedup();
    let signs = [Scalar::one(field), Scalar::one(field).neg()];
    let mut last_err = Error::NotDiagonalizable("no sample point produced an eigenbasis".into());
    for k in 0..DIAGONALIZATION_SAMPLES {
        let point = sample_point(field, r, k);
        let a0 = a.map(|c| c.eval(&point).expect("nonzero sample point"));
        let a0t = a0.transpose();
        let mut basis: Vec<Vec<Scalar>> = Vec::new();
        for e in &exps {
            for s in &signs {
                let chi = Laurent::monomial(ring, e.clone(), s.clone());
                let lambda = chi.eval(&point)?;
                let shifted = a0t.sub(&Mat::identity(n, &field).scale(&lambda));
                basis.extend(shifted.kernel());
            }
        }
        if basis.len() != n {
            continue;
        }
        let b = Mat::from_rows(basis);
        let Some(binv) = b.inverse() else {
            continue;
        };
        let lift = |m: &Mat<Scalar>| m.map(|c| Laurent::constant(ring, c.clone()));
        let d = lift(&b).mul(&a).mul(&lift(&binv));
        match diagonal_weights(&d) {
            None => {
                last_err = Error::NotDiagonalizable(format!(
                    "conjugated linear part is not diagonal at sample {k}"
                ));
            }
            Some(Err(i)) => return Err(Error::NonMonomialEntries(i)),
            Some(Ok(m)) => {
                return Ok(WeightData {
                    weight_matrix: m,
                    diagonal: true,
                    basis_change: Some(b),
                })
            }
        }
    }
    Err(last_err)
}

/// Effectiveness of t ↦ (t^{m₁},…,t^{mₙ}): the weight lattice must be all of
/// ℤ^r, i.e. rank r with every invariant factor equal to 1.
pub fn is_effective(w: &WeightData) -> bool {
    let r = w.r();
    if r == 0 {
        return true;
    }
    let inv = smith_invariants(&w.weight_matrix);
    inv.len() == r && inv.iter().all(|d| d == &num_bigint::BigInt::from(1))
}

/// The t-degree-0 part of τ(t⁻¹)∘σ(t): the coefficient of word w in σᵢ is
/// shifted by the total weight of w's letters and only its constant term kept.
pub fn zero_weight_part(spec: &ActionSpec, weights: &[Vec<i64>]) -> Endo<Scalar> {
    let (n, field) = (spec.n(), spec.field());
    let r = spec.r();
    let images = spec
        .images()
        .iter()
        .map(|p| {
            let mut g = FreePoly::zero(n, &field);
            for (w, c) in p.terms() {
                let mut wt = vec![0i64; r];
                for &l in w.letters() {
                    for (slot, m) in wt.iter_mut().zip(&weights[l as usize - 1]) {
                        *slot += m;
                    }
                }
                g.add_term(w.clone(), &c.coeff(&wt));
            }
            g
        })
        .collect();
    Endo::new(n, &field, images).expect("same algebra")
}

/// One step of the linearization pipeline, for the report trace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceEntry {
    pub stage: String,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LinearizationStatus {
    Verified,
    Failed { stage: String, reason: String },
    /// A bounded step (inversion within a cutoff, the term cap) gave up.
    Inconclusive { stage: String, reason: String },
}

impl LinearizationStatus {
    pub fn is_verified(&self) -> bool {
        matches!(self, LinearizationStatus::Verified)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearizationReport {
    pub status: LinearizationStatus,
    pub beta: Option<Endo<Scalar>>,
    pub beta_inverse: Option<Endo<Scalar>>,
    pub tau: Option<ActionSpec>,
    pub weights: Option<WeightData>,
    pub translation: Vec<Scalar>,
    pub trace: Vec<TraceEntry>,
}

impl LinearizationReport {
    pub(crate) fn new() -> Self {
        LinearizationReport {
            status: LinearizationStatus::Failed {
                stage: "start".into(),
                reason: "not run".into(),
            },
            beta: None,
            beta_inverse: None,
            tau: None,
            weights: None,
            translation: Vec::new(),
            trace: Vec::new(),
        }
    }

    pub(crate) fn note(&mut self, stage: &str, detail: impl Into<String>) {
        self.trace.push(TraceEntry {
            stage: stage.into(),
            detail: detail.into(),
        });
    }

    pub(crate) fn inconclusive(mut self, stage: &str, reason: impl Into<String>) -> Self {
        let reason = reason.into();
        self.note(stage, format!("inconclusive: {reason}"));
        self.status = LinearizationStatus::Inconclusive {
            stage: stage.into(),
            reason,
        };
        self
    }

    pub(crate) fn fail(mut self, stage: &str, reason: impl Into<String>) -> Self {
        let reason = reason.into();
        self.note(stage, format!("failed: {reason}"));
        self.status = LinearizationStatus::Failed {
            stage: stage.into(),
            reason,
        };
        self
    }
}

/// Translation and change of eigenbasis bringing σ to an action with zero
/// constant terms and diagonal linear part.
pub(crate) struct Normalized {
    /// The normalized action C⁻¹∘T_c∘σ∘T_{−c}∘C.
    pub action: ActionSpec,
    pub weights: WeightData,
    /// C⁻¹∘T_c and its inverse T_{−c}∘C.
    pub to_normal: Endo<Scalar>,
    pub from_normal: Endo<Scalar>,
    pub translation: Vec<Scalar>,
}

pub(crate) fn normalize(spec: &ActionSpec, report: &mut LinearizationReport) -> Result<Normalized> {
    let (n, field, ring) = (spec.n(), spec.field(), spec.ring());
    let (moved, c) = translate_origin(spec)?;
    report.note(
        "translate",
        format!(
            "c = ({})",
            c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
        ),
    );
    let weights = extract_weights(&moved)?;
    report.note("weights", format!("M = {:?}", weights.weight_matrix));
    let t_c = translation(n, &c);
    let t_neg = translation(n, &c.iter().map(|x| x.neg()).collect::<Vec<_>>());
    let zeros = vec![Scalar::zero(field); n];
    let (action, to_normal, from_normal) = match &weights.basis_change {
        None => (moved, t_c, t_neg),
        Some(b) => {
            let binv = b.inverse().expect("verified eigenbasis");
            let cm = endomorphism::affine_endo(b, &zeros);
            let cinv = endomorphism::affine_endo(&binv, &zeros);
            let conj = compose(
                &lift_scalars(&cinv, ring),
                &compose(moved.endo(), &lift_scalars(&cm, ring))?,
            )?;
            report.note("basis", format!("eigenbasis rows {b}"));
            (
                ActionSpec { endo: conj },
                compose(&cinv, &t_c)?,
                compose(&t_neg, &cm)?,
            )
        }
    };
    Ok(Normalized {
        action,
        weights,
        to_normal,
        from_normal,
        translation: c,
    })
}

/// Checks τ∘β = β∘σ over the Laurent coefficients.
pub fn verify_conjugation(spec: &ActionSpec, tau: &ActionSpec, beta: &Endo<Scalar>) -> Result<bool> {
    verify_action_equivalence(spec, tau, beta)
}

/// Checks σ = β⁻¹∘τ∘β after confirming that β and β⁻¹ compose to the
/// identity both ways. Equivalent to [`verify_conjugation`], and cheaper
/// when σ has higher degree than β⁻¹.
pub fn verify_conjugation_with_inverse(
    spec: &ActionSpec,
    tau: &ActionSpec,
    beta: &Endo<Scalar>,
    beta_inv: &Endo<Scalar>,
) -> Result<bool> {
    if !compose(beta, beta_inv)?.is_identity() || !compose(beta_inv, beta)?.is_identity() {
        return Ok(false);
    }
    Ok(ActionSpec::conjugate(tau, beta, beta_inv)?.endo == spec.endo)
}

/// Linearizes σ by zero-weight averaging: β′ is the t-degree-0 part of
/// τ(t⁻¹)∘σ(t) computed on the normalized action.
pub fn average_linearize(spec: &ActionSpec) -> Result<LinearizationReport> {
    average_linearize_with(spec, 0)
}

/// [`average_linearize`] with an explicit inversion cutoff; 0 selects the
/// default escalation.
pub fn average_linearize_with(spec: &ActionSpec, cutoff: usize) -> Result<LinearizationReport> {
    with_validation(spec, average_core(spec, cutoff))
}

/// Attaches the action-axiom check to a pipeline result. A verified
/// conjugation to a linear action by an automorphism already implies the
/// axioms; the direct check composes σ(s)∘σ(t), whose intermediate terms
/// grow fast, so it only runs when the pipeline did not verify.
pub(crate) fn with_validation(
    spec: &ActionSpec,
    result: Result<LinearizationReport>,
) -> Result<LinearizationReport> {
    let entry = |detail: &str| TraceEntry {
        stage: "validate".into(),
        detail: detail.into(),
    };
    let result = match result {
        Ok(mut report) if report.status.is_verified() => {
            report.trace.insert(0, entry("action axioms follow from the verified conjugation"));
            return Ok(report);
        }
        other => other,
    };
    if !validate_action(spec)? {
        return Ok(LinearizationReport::new().fail("validate", "the images do not satisfy the action axioms"));
    }
    let mut report = result?;
    report.trace.insert(0, entry("action axioms hold"));
    Ok(report)
}

fn average_core(spec: &ActionSpec, cutoff: usize) -> Result<LinearizationReport> {
    let mut report = LinearizationReport::new();
    let norm = normalize(spec, &mut report)?;
    let (n, r) = (spec.n(), spec.r());
    let m = &norm.weights.weight_matrix;
    if r == n {
        if weight_det(m).is_zero() {
            return Err(Error::WeightMatrixSingular);
        }
    } else {
        report.note(
            "weights",
            format!("r = {r} differs from n = {n}; averaging is attempted without a guarantee"),
        );
    }
    report.translation = norm.translation.clone();
    report.weights = Some(norm.weights.clone());
    let tau = ActionSpec::diagonal(spec.field(), m)?;
    let g = zero_weight_part(&norm.action, m);
    report.note("average", format!("G = {g}"));

    let inv = if cutoff == 0 {
        endomorphism::invert(&g)?
    } else {
        endomorphism::invert_truncated(&g, cutoff)?
    };
    report.note("invert", format!("status {} at cutoff {}", inv.status, inv.cutoff));
    let Some(g_inv) = inv.exact_inverse().cloned() else {
        report.tau = Some(tau);
        if inv.status == InversionStatus::NotInvertible {
            return Ok(report.fail("invert", "β is not an automorphism: the averaged map has singular linear part"));
        }
        return Ok(report.inconclusive("invert", "no polynomial inverse of β found within the cutoff"));
    };
    let beta = compose(&g, &norm.to_normal)?;
    let beta_inv = compose(&norm.from_normal, &g_inv)?;
    report.beta = Some(beta.clone());
    report.beta_inverse = Some(beta_inv.clone());
    report.tau = Some(tau.clone());
    if !verify_conjugation_with_inverse(spec, &tau, &beta, &beta_inv)? {
        return Ok(report.fail("verify", "τ∘β differs from β∘σ"));
    }
    report.note("verify", "τ∘β = β∘σ holds exactly");
    report.status = LinearizationStatus::Verified;
    Ok(report)
}

/// Weights of σ after moving its fixed point to the origin and
/// diagonalizing the linear part.
pub fn action_weights(spec: &ActionSpec) -> Result<WeightData> {
    let mut scratch = LinearizationReport::new();
    Ok(normalize(spec, &mut scratch)?.weights)
}

/// Whether σ intertwines the two actions: ψ(t)∘σ = σ∘φ(t).
pub fn verify_action_equivalence(phi: &ActionSpec, psi: &ActionSpec, sigma: &Endo<Scalar>) -> Result<bool> {
    if phi.n() != psi.n() || phi.n() != sigma.n() {
        return invalid("generator counts differ");
    }
    if phi.r() != psi.r() {
        return invalid("the actions are by tori of different rank");
    }
    if phi.field() != psi.field() || *sigma.ring() != phi.field() {
        return invalid("the actions live over different fields");
    }
    let s = lift_scalars(sigma, phi.ring());
    Ok(compose(psi.endo(), &s)? == compose(&s, phi.endo())?)
}

/// Determinant of an integer weight matrix.
pub fn weight_det(m: &[Vec<i64>]) -> Scalar {
    Mat::from_rows(
        m.iter()
            .map(|row| row.iter().map(|&x| Scalar::from_i64(Field::Rational, x)).collect())
            .collect(),
    )
    .det()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_many, parse_poly, ParseOptions};

    const F: Field = Field::Rational;

    fn action(texts: &[&str], r: usize) -> ActionSpec {
        let n = texts.len();
        let images = parse_many(texts, ParseOptions { field: F, n, r }).unwrap();
        ActionSpec::new(n, r, images).unwrap()
    }

    fn endo(texts: &[&str]) -> Endo<Scalar> {
        let n = texts.len();
        Endo::from_images(texts.iter().map(|t| parse_poly(t, F, n).unwrap()).collect()).unwrap()
    }

    fn family() -> ActionSpec {
        action(&["t*z1", "t^3*z2 + (t^2 - t^3)*z1^2"], 1)
    }

    #[test]
    fn validates_cocycle() {
        assert!(validate_action(&family()).unwrap());
        assert!(!validate_action(&action(&["t*z1", "t^2*z2 + t^2*z1^2"], 1)).unwrap());
        assert!(validate_action(&action(&["t1^2*t2^-1*z1", "t2*z2"], 2)).unwrap());
        assert!(!validate_action(&action(&["2*z1"], 1)).unwrap());
    }

    #[test]
    fn family_is_a_conjugate() {
        let tau = ActionSpec::diagonal(F, &[vec![1], vec![3]]).unwrap();
        let sigma =
            ActionSpec::conjugate(&tau, &endo(&["z1", "z2 + z1^2"]), &endo(&["z1", "z2 - z1^2"])).unwrap();
        assert_eq!(sigma, family());
    }

    #[test]
    fn translation_to_origin() {
        let (moved, c) = translate_origin(&action(&["t*z1 + 1 - t"], 1)).unwrap();
        assert_eq!(c, vec![Scalar::one(F)]);
        assert_eq!(moved, action(&["t*z1"], 1));

        let (same, c) = translate_origin(&family()).unwrap();
        assert_eq!(same, family());
        assert!(c.iter().all(|x| x.is_zero()));
    }

    #[test]
    fn nonaffine_fixed_point() {
        // conjugate of diag(t, t) by β = (z1 + z2^2 + 1, z2 + 1)
        let tau = ActionSpec::diagonal(F, &[vec![1], vec![1]]).unwrap();
        let beta = endo(&["z1 + z2^2 + 1", "z2 + 1"]);
        let beta_inv = endomorphism::invert(&beta).unwrap().inverse.unwrap();
        let sigma = ActionSpec::conjugate(&tau, &beta, &beta_inv).unwrap();
        assert!(validate_action(&sigma).unwrap());
        let (moved, c) = translate_origin(&sigma).unwrap();
        assert_eq!(c, vec![Scalar::one(F), Scalar::one(F)]);
        assert!(moved.images().iter().all(|p| p.constant_coeff().is_zero()));
        assert!(average_linearize(&sigma).unwrap().status.is_verified());
        // z1 + t − 1 = z1 has no solution
        let drift = action(&["z1 + t - 1"], 1);
        assert!(matches!(translate_origin(&drift), Err(Error::NoFixedPointFound(_))));
    }

    #[test]
    fn weights_of_diagonal_and_family() {
        let w = extract_weights(&action(&["t1*z1", "t2*z2"], 2)).unwrap();
        assert_eq!(w.weight_matrix, vec![vec![1, 0], vec![0, 1]]);
        assert!(w.diagonal && w.basis_change.is_none());
        let w = extract_weights(&family()).unwrap();
        assert_eq!(w.weight_matrix, vec![vec![1], vec![3]]);
    }

    #[test]
    fn swap_type_linear_part() {
        let swap = action(&["t*z2", "t*z1"], 1);
        assert_eq!(extract_weights(&swap), Err(Error::NonMonomialEntries(2)));
    }

    #[test]
    fn weights_after_basis_change() {
        // linear action conjugate to diag(t, t^2) by z1 ↦ z1 + z2
        let tau = ActionSpec::diagonal(F, &[vec![1], vec![2]]).unwrap();
        let sigma = ActionSpec::conjugate(&tau, &endo(&["z1 + z2", "z2"]), &endo(&["z1 - z2", "z2"])).unwrap();
        let w = extract_weights(&sigma).unwrap();
        let mut m = w.weight_matrix.clone();
        m.sort();
        assert_eq!(m, vec![vec![1], vec![2]]);
        assert!(w.basis_change.is_some());
        let rep = average_linearize(&sigma).unwrap();
        assert!(rep.status.is_verified(), "{:?}", rep.status);
        assert!(rep.beta.unwrap().is_linear());
    }

    #[test]
    fn effectiveness_examples() {
        assert!(is_effective(&WeightData::from_matrix(vec![vec![1, 0], vec![0, 1]])));
        assert!(!is_effective(&WeightData::from_matrix(vec![vec![2], vec![2]])));
        assert!(!is_effective(&WeightData::from_matrix(vec![vec![1, 1], vec![1, 1]])));
        assert!(is_effective(&WeightData::from_matrix(vec![vec![2], vec![3]])));
    }

    #[test]
    fn averaging_examples() {
        let rep = average_linearize(&family()).unwrap();
        assert!(rep.status.is_verified());
        assert_eq!(rep.beta.as_ref().unwrap(), &endo(&["z1", "z2 + z1^2"]));
        assert_eq!(rep.tau.as_ref().unwrap(), &ActionSpec::diagonal(F, &[vec![1], vec![3]]).unwrap());

        let max = action(&["t1*z1", "t2*z2 + (t1^2 - t2)*z1^2"], 2);
        let rep = average_linearize(&max).unwrap();
        assert!(rep.status.is_verified());
        assert_eq!(rep.beta.unwrap(), endo(&["z1", "z2 + z1^2"]));

        let lin = action(&["t1*z1", "t1*t2*z2"], 2);
        let rep = average_linearize(&lin).unwrap();
        assert!(rep.status.is_verified());
        assert!(rep.beta.unwrap().is_identity());
    }

    #[test]
    fn averaging_with_translation() {
        let rep = average_linearize(&action(&["t*z1 + 1 - t"], 1)).unwrap();
        assert!(rep.status.is_verified());
        assert_eq!(rep.beta.unwrap(), endo(&["z1 + 1"]));
    }

    #[test]
    fn singular_weights_rejected() {
        let a = action(&["t1*t2*z1", "t1*t2*z2"], 2);
        assert_eq!(average_linearize(&a), Err(Error::WeightMatrixSingular));
    }

    #[test]
    fn invalid_action_fails_validation_stage() {
        let rep = average_linearize(&action(&["t*z1", "t^2*z2 + t^2*z1^2"], 1)).unwrap();
        assert!(matches!(rep.status, LinearizationStatus::Failed { ref stage, .. } if stage == "validate"));
    }

    #[test]
    fn equivalence_examples() {
        let tau = ActionSpec::diagonal(F, &[vec![1], vec![3]]).unwrap();
        let id = Endo::identity(2, &F);
        assert!(verify_action_equivalence(&tau, &tau, &id).unwrap());
        assert!(verify_action_equivalence(&family(), &tau, &endo(&["z1", "z2 + z1^2"])).unwrap());
        assert!(!verify_action_equivalence(&tau, &tau, &endo(&["z2", "z1"])).unwrap());
        let other = ActionSpec::diagonal(F, &[vec![1, 0], vec![0, 1]]).unwrap();
        assert!(verify_action_equivalence(&tau, &other, &id).is_err());
    }
}
