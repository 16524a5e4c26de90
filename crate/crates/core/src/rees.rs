//! Graded presentations, Rees algebras A[t, t⁻¹I] and isomorphisms between
//! them.
//!
//! A presentation may carry a model: an injective map of the presented
//! algebra into a free algebra with Laurent coefficients in a single central
//! parameter t. Equalities in the presented algebra are decided there. Rees
//! algebras embed into A[t, t⁻¹] through u_g ↦ t⁻¹g.

use std::collections::{BTreeSet, HashSet};

use crate::algebra::{Coeff, Field, FreePoly, Laurent, LaurentRing, Scalar, Word};
use crate::endomorphism::{compose, invert, Endo};
use crate::error::{invalid, Error, Result};
use crate::linalg::Mat;
use crate::torus::{validate_action, ActionSpec};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub degree: Vec<i64>,
}

impl Generator {
    pub fn new(name: impl Into<String>, degree: Vec<i64>) -> Self {
        Generator {
            name: name.into(),
            degree,
        }
    }
}

/// Images of the generators in K[t, t⁻¹]⟨letters⟩.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Model {
    pub letters: usize,
    pub images: Vec<FreePoly<Laurent>>,
}

impl Model {
    pub fn eval(&self, p: &FreePoly<Scalar>) -> Result<FreePoly<Laurent>> {
        if p.n() != self.images.len() {
            return invalid("polynomial and model have different generator counts");
        }
        let ring = LaurentRing::new(*p.ring(), 1);
        p.map_coeffs(&ring, |c| Laurent::constant(ring, c.clone()))
            .substitute(&self.images)
    }
}

/// A two-sided ideal of K⟨z₁,…,zₙ⟩ given by generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdealPresentation {
    pub n: usize,
    pub field: Field,
    pub generators: Vec<FreePoly<Scalar>>,
}

impl IdealPresentation {
    pub fn new(n: usize, field: Field, generators: Vec<FreePoly<Scalar>>) -> Result<Self> {
        if n == 0 {
            return invalid("ambient algebra needs at least one generator");
        }
        for (j, g) in generators.iter().enumerate() {
            if g.n() != n || *g.ring() != field {
                return invalid(format!("ideal generator {} lives in a different algebra", j + 1));
            }
            if g.is_zero() {
                return invalid(format!("ideal generator {} is zero", j + 1));
            }
        }
        Ok(IdealPresentation { n, field, generators })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedPresentation {
    pub field: Field,
    pub gens: Vec<Generator>,
    pub relations: Vec<FreePoly<Scalar>>,
    pub model: Option<Model>,
}

impl GradedPresentation {
    pub fn new(field: Field, gens: Vec<Generator>, relations: Vec<FreePoly<Scalar>>) -> Result<Self> {
        if gens.is_empty() {
            return invalid("presentation has no generators");
        }
        let mut names = HashSet::new();
        for g in &gens {
            if !names.insert(g.name.as_str()) {
                return invalid(format!("duplicate generator name {:?}", g.name));
            }
        }
        for (k, r) in relations.iter().enumerate() {
            if r.n() != gens.len() || *r.ring() != field {
                return invalid(format!("relation {} is not over the declared generators", k + 1));
            }
        }
        Ok(GradedPresentation {
            field,
            gens,
            relations,
            model: None,
        })
    }

    pub fn with_model(mut self, model: Model) -> Result<Self> {
        if model.images.len() != self.gens.len() {
            return invalid("model must give one image per generator");
        }
        let ring = LaurentRing::new(self.field, 1);
        if model
            .images
            .iter()
            .any(|p| p.n() != model.letters || *p.ring() != ring)
        {
            return invalid("model images must share one Laurent algebra in one parameter");
        }
        self.model = Some(model);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.gens.len()
    }

    /// 1-based index of a named generator.
    pub fn index(&self, name: &str) -> Option<u32> {
        self.gens.iter().position(|g| g.name == name).map(|i| i as u32 + 1)
    }

    pub fn var(&self, i: u32) -> FreePoly<Scalar> {
        FreePoly::var(self.n(), &self.field, i)
    }

    pub fn word_degree(&self, w: &Word) -> Vec<i64> {
        let d = self.gens[0].degree.len();
        let mut out = vec![0i64; d];
        for &l in w.letters() {
            for (o, x) in out.iter_mut().zip(&self.gens[l as usize - 1].degree) {
                *o += x;
            }
        }
        out
    }

    /// The common degree of all terms, or None if `p` mixes degrees. Zero is
    /// homogeneous of every degree and reports the zero vector.
    pub fn homogeneous_degree(&self, p: &FreePoly<Scalar>) -> Option<Vec<i64>> {
        let mut degs = p.terms().map(|(w, _)| self.word_degree(w));
        let first = degs.next().unwrap_or_else(|| vec![0; self.gens[0].degree.len()]);
        degs.all(|d| d == first).then_some(first)
    }

    /// Checks that every relation vanishes in the model.
    pub fn model_is_sound(&self) -> Result<bool> {
        let Some(model) = &self.model else {
            return invalid("presentation has no model");
        };
        for r in &self.relations {
            if !model.eval(r)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn relation_strings(&self) -> Vec<String> {
        self.relations.iter().map(|r| self.show(r)).collect()
    }

    /// Renders a polynomial using generator names.
    pub fn show(&self, p: &FreePoly<Scalar>) -> String {
        if p.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, (w, c)) in p.terms().enumerate() {
            let word: Vec<&str> = w
                .letters()
                .iter()
                .map(|&l| self.gens[l as usize - 1].name.as_str())
                .collect();
            let cs = c.to_string();
            let (neg, mag) = match cs.strip_prefix('-') {
                Some(m) => (true, m.to_string()),
                None => (false, cs),
            };
            out.push_str(match (k, neg) {
                (0, false) => "",
                (0, true) => "-",
                (_, false) => " + ",
                (_, true) => " - ",
            });
            if word.is_empty() {
                out.push_str(&mag);
            } else {
                if mag != "1" {
                    out.push_str(&mag);
                    out.push('*');
                }
                out.push_str(&word.join("*"));
            }
        }
        out
    }
}

fn t_exponents(p: &FreePoly<Laurent>) -> BTreeSet<i64> {
    p.terms()
        .flat_map(|(_, c)| c.terms().map(|(e, _)| e[0]).collect::<Vec<_>>())
        .collect()
}

/// True iff the declared degrees are consistent, every relation is
/// homogeneous and, when a one-parameter model is present, every product of
/// at most `max_deg` generators lands in the t-degree equal to the sum of the
/// declared degrees.
pub fn check_grading(g: &GradedPresentation, max_deg: usize) -> bool {
    let d = g.gens[0].degree.len();
    if g.gens.iter().any(|x| x.degree.len() != d) {
        return false;
    }
    if g.relations.iter().any(|r| g.homogeneous_degree(r).is_none()) {
        return false;
    }
    let Some(model) = g.model.as_ref().filter(|_| d == 1) else {
        return true;
    };
    let gen_states: Vec<(i64, BTreeSet<i64>)> = g
        .gens
        .iter()
        .zip(&model.images)
        .map(|(x, img)| (x.degree[0], t_exponents(img)))
        .collect();
    let mut seen: HashSet<(i64, BTreeSet<i64>)> = HashSet::new();
    let mut frontier = vec![(0i64, BTreeSet::from([0i64]))];
    for _ in 0..max_deg {
        let mut next = Vec::new();
        for (deg, exps) in &frontier {
            for (gd, gexps) in &gen_states {
                let sum: BTreeSet<i64> = exps
                    .iter()
                    .flat_map(|a| gexps.iter().map(move |b| a + b))
                    .collect();
                let state = (deg + gd, sum);
                if state.1.iter().any(|&e| e != state.0) {
                    return false;
                }
                if seen.insert(state.clone()) {
                    next.push(state);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    true
}

#[derive(Clone, Copy)]
struct Layout {
    n: usize,
    k: usize,
    m: usize,
}

impl Layout {
    fn total(&self) -> usize {
        self.n + 1 + self.k + self.m
    }
    fn t(&self) -> u32 {
        self.n as u32 + 1
    }
    fn u(&self, j: usize) -> u32 {
        (self.n + 1 + j) as u32
    }
    fn y(&self, j: usize) -> u32 {
        (self.n + 1 + self.k + j) as u32
    }
}

fn commutator(a: &FreePoly<Scalar>, b: &FreePoly<Scalar>) -> FreePoly<Scalar> {
    &(a * b) - &(b * a)
}

/// R_A(I)⟨y₁,…,y_m⟩ with generators z₁..zₙ, t, u₁..u_k, y₁..y_m, where t is
/// central and t·u_j = u_j·t = g_j.
fn rees_extended(
    ideal: &IdealPresentation,
    m: usize,
    t_deg: &[i64],
    y_degs: &[Vec<i64>],
) -> Result<GradedPresentation> {
    let lay = Layout {
        n: ideal.n,
        k: ideal.generators.len(),
        m,
    };
    let field = ideal.field;
    let total = lay.total();
    let zero_deg = vec![0i64; t_deg.len()];
    let neg_t: Vec<i64> = t_deg.iter().map(|x| -x).collect();
    let mut gens: Vec<Generator> = (1..=lay.n)
        .map(|i| Generator::new(format!("z{i}"), zero_deg.clone()))
        .collect();
    gens.push(Generator::new("t", t_deg.to_vec()));
    for j in 1..=lay.k {
        gens.push(Generator::new(format!("u{j}"), neg_t.clone()));
    }
    for (j, d) in y_degs.iter().enumerate() {
        gens.push(Generator::new(format!("y{}", j + 1), d.clone()));
    }

    let var = |i: u32| FreePoly::var(total, &field, i);
    let t = var(lay.t());
    let mut relations = Vec::new();
    for (j, g) in ideal.generators.iter().enumerate() {
        let g = g.relabel(total, |l| l);
        let u = var(lay.u(j + 1));
        relations.push(&(&t * &u) - &g);
        relations.push(&(&u * &t) - &g);
    }
    for i in 1..=lay.n {
        relations.push(commutator(&t, &var(i as u32)));
    }
    for j in 1..=lay.m {
        relations.push(commutator(&t, &var(lay.y(j))));
    }

    let letters = lay.n + lay.m;
    let ring = LaurentRing::new(field, 1);
    let tinv = Laurent::monomial(ring, vec![-1], Scalar::one(field));
    let mut images: Vec<FreePoly<Laurent>> = (1..=lay.n)
        .map(|i| FreePoly::var(letters, &ring, i as u32))
        .collect();
    images.push(FreePoly::constant(
        letters,
        &ring,
        Laurent::monomial(ring, vec![1], Scalar::one(field)),
    ));
    for g in &ideal.generators {
        images.push(
            g.relabel(letters, |l| l)
                .map_coeffs(&ring, |c| tinv.mul(&Laurent::constant(ring, c.clone()))),
        );
    }
    for j in 1..=lay.m {
        images.push(FreePoly::var(letters, &ring, (lay.n + j) as u32));
    }
    GradedPresentation::new(field, gens, relations)?.with_model(Model { letters, images })
}

/// The presentation of R_A(I) = A[t, t⁻¹I] graded by the power of t.
pub fn rees_presentation(ideal: &IdealPresentation) -> Result<GradedPresentation> {
    rees_extended(ideal, 0, &[1], &[])
}

/// A map between presented algebras, given by generator images.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomWitness {
    pub source: GradedPresentation,
    pub target: GradedPresentation,
    pub images: Vec<FreePoly<Scalar>>,
}

impl HomWitness {
    pub fn new(
        source: GradedPresentation,
        target: GradedPresentation,
        images: Vec<FreePoly<Scalar>>,
    ) -> Result<Self> {
        if images.len() != source.n() {
            return invalid("need one image per source generator");
        }
        if images
            .iter()
            .any(|p| p.n() != target.n() || *p.ring() != target.field)
        {
            return invalid("images must be polynomials in the target generators");
        }
        Ok(HomWitness {
            source,
            target,
            images,
        })
    }

    /// Whether every source relation maps to zero in the target.
    pub fn respects_relations(&self) -> Result<bool> {
        let Some(model) = &self.target.model else {
            return invalid("target presentation has no model");
        };
        for r in &self.source.relations {
            if !model.eval(&r.substitute(&self.images)?)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Whether each image is homogeneous of its generator's degree.
    pub fn is_graded(&self) -> bool {
        self.images
            .iter()
            .zip(&self.source.gens)
            .all(|(p, g)| p.is_zero() || self.target.homogeneous_degree(p).as_ref() == Some(&g.degree))
    }

    pub fn max_image_degree(&self) -> usize {
        self.images.iter().map(|p| p.degree().or_zero()).max().unwrap_or(0)
    }
}

/// Checks that `next ∘ first` is the identity on the source of `first`.
fn round_trip(first: &HomWitness, next: &HomWitness) -> Result<bool> {
    let Some(model) = &first.source.model else {
        return invalid("source presentation has no model");
    };
    for (i, img) in first.images.iter().enumerate() {
        let back = img.substitute(&next.images)?;
        if model.eval(&back)? != model.eval(&first.source.var(i as u32 + 1))? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PresentedIso {
    pub forward: HomWitness,
    pub backward: HomWitness,
}

impl PresentedIso {
    /// Both maps respect relations and are mutually inverse on generators.
    pub fn verify(&self) -> Result<bool> {
        if self.forward.source != self.backward.target || self.forward.target != self.backward.source {
            return Ok(false);
        }
        Ok(self.forward.respects_relations()?
            && self.backward.respects_relations()?
            && round_trip(&self.forward, &self.backward)?
            && round_trip(&self.backward, &self.forward)?)
    }
}

/// One summand left·h_index·right of an ideal-membership certificate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessTerm {
    pub left: FreePoly<Scalar>,
    pub index: usize,
    pub right: FreePoly<Scalar>,
}

/// θ with certificates θ(I) ⊆ J and θ⁻¹(J) ⊆ I: `forward[j]` expresses
/// θ(g_j) through the generators of J, `backward[l]` expresses θ⁻¹(h_l)
/// through those of I.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdealEquivalence {
    pub theta: Endo<Scalar>,
    pub theta_inverse: Option<Endo<Scalar>>,
    pub source: IdealPresentation,
    pub target: IdealPresentation,
    pub forward: Vec<Vec<WitnessTerm>>,
    pub backward: Vec<Vec<WitnessTerm>>,
}

fn combination(
    terms: &[WitnessTerm],
    gens: &[FreePoly<Scalar>],
    n: usize,
    field: Field,
) -> Result<FreePoly<Scalar>> {
    let mut acc = FreePoly::zero(n, &field);
    for t in terms {
        if t.index == 0 || t.index > gens.len() {
            return Err(Error::WitnessInvalid(format!("generator index {} out of range", t.index)));
        }
        if t.left.n() != n || t.right.n() != n {
            return Err(Error::WitnessInvalid("witness factor in the wrong algebra".into()));
        }
        acc = &acc + &(&(&t.left * &gens[t.index - 1]) * &t.right);
    }
    Ok(acc)
}

/// The image of u_j: Σ left·u'_index·right in the target Rees presentation.
fn u_image(terms: &[WitnessTerm], lay: Layout, field: Field) -> FreePoly<Scalar> {
    let total = lay.total();
    let mut acc = FreePoly::zero(total, &field);
    for t in terms {
        let u = FreePoly::var(total, &field, lay.u(t.index));
        acc = &acc + &(&(&t.left.relabel(total, |l| l) * &u) * &t.right.relabel(total, |l| l));
    }
    acc
}

fn rees_map(
    theta: &Endo<Scalar>,
    witness: &[Vec<WitnessTerm>],
    target_lay: Layout,
    field: Field,
) -> Vec<FreePoly<Scalar>> {
    let total = target_lay.total();
    let mut images: Vec<FreePoly<Scalar>> =
        theta.images().iter().map(|p| p.relabel(total, |l| l)).collect();
    images.push(FreePoly::var(total, &field, target_lay.t()));
    images.extend(witness.iter().map(|w| u_image(w, target_lay, field)));
    images
}

/// The graded K[t]-isomorphism R_A(I) → R_A(J) extending θ.
pub fn rees_iso_from_ideal_equiv(eq: &IdealEquivalence) -> Result<PresentedIso> {
    let (src, tgt) = (&eq.source, &eq.target);
    let n = src.n;
    let field = src.field;
    if tgt.n != n || tgt.field != field || eq.theta.n() != n || *eq.theta.ring() != field {
        return invalid("θ, I and J must live in the same algebra");
    }
    let bad = |m: String| Err(Error::WitnessInvalid(m));
    let theta_inv = match &eq.theta_inverse {
        Some(inv) => inv.clone(),
        None => match invert(&eq.theta)?.exact_inverse() {
            Some(inv) => inv.clone(),
            None => return bad("θ has no verified inverse".into()),
        },
    };
    if !compose(&eq.theta, &theta_inv)?.is_identity() || !compose(&theta_inv, &eq.theta)?.is_identity() {
        return bad("the supplied inverse does not invert θ".into());
    }
    if eq.forward.len() != src.generators.len() || eq.backward.len() != tgt.generators.len() {
        return bad("need one certificate per ideal generator".into());
    }
    for (j, g) in src.generators.iter().enumerate() {
        if g.substitute(eq.theta.images())? != combination(&eq.forward[j], &tgt.generators, n, field)? {
            return bad(format!("θ(g{}) differs from its certificate", j + 1));
        }
    }
    for (l, h) in tgt.generators.iter().enumerate() {
        if h.substitute(theta_inv.images())? != combination(&eq.backward[l], &src.generators, n, field)? {
            return bad(format!("θ⁻¹(h{}) differs from its certificate", l + 1));
        }
    }
    let rs = rees_presentation(src)?;
    let rt = rees_presentation(tgt)?;
    let lay_s = Layout {
        n,
        k: src.generators.len(),
        m: 0,
    };
    let lay_t = Layout {
        n,
        k: tgt.generators.len(),
        m: 0,
    };
    let iso = PresentedIso {
        forward: HomWitness::new(rs.clone(), rt.clone(), rees_map(&eq.theta, &eq.forward, lay_t, field))?,
        backward: HomWitness::new(rt, rs, rees_map(&theta_inv, &eq.backward, lay_s, field))?,
    };
    if !iso.verify()? || !iso.forward.is_graded() {
        return bad("induced map on Rees algebras fails verification".into());
    }
    Ok(iso)
}

/// For surjections α, γ: K⟨x₁..xₙ, y₁..y_m⟩ → C with α(y) = 0 and γ(x) = 0,
/// and f_j ∈ K⟨x⟩, g_i ∈ K⟨y⟩ with α(x_i) = γ(g_i) and α(f_j) = γ(y_j),
/// returns the automorphism τ = τ₁∘τ₂ (τ₁: x_i ↦ x_i + g_i, τ₂: y_j ↦ y_j −
/// f_j) satisfying α = γ∘τ.
pub fn equivalence_from_surjections(
    n: usize,
    m: usize,
    alpha: &[FreePoly<Scalar>],
    gamma: &[FreePoly<Scalar>],
    f: &[FreePoly<Scalar>],
    g: &[FreePoly<Scalar>],
) -> Result<Endo<Scalar>> {
    let nm = n + m;
    if alpha.len() != nm || gamma.len() != nm || f.len() != m || g.len() != n {
        return invalid("expected n+m images for α and γ, m polynomials f and n polynomials g");
    }
    let Some(field) = alpha.first().map(|p| *p.ring()) else {
        return invalid("empty algebra");
    };
    let c_n = alpha[0].n();
    if alpha.iter().chain(gamma).any(|p| p.n() != c_n || *p.ring() != field) {
        return invalid("α and γ must map into the same algebra");
    }
    if f.iter().chain(g).any(|p| p.n() != nm || *p.ring() != field) {
        return invalid("f and g must be polynomials in x and y");
    }
    let only = |p: &FreePoly<Scalar>, lo: u32, hi: u32| {
        p.terms().all(|(w, _)| w.letters().iter().all(|&l| l >= lo && l <= hi))
    };
    if !f.iter().all(|p| only(p, 1, n as u32)) || !g.iter().all(|p| only(p, n as u32 + 1, nm as u32)) {
        return invalid("f must involve only x and g only y");
    }
    if alpha[n..].iter().any(|p| !p.is_zero()) || gamma[..n].iter().any(|p| !p.is_zero()) {
        return invalid("α must kill y and γ must kill x");
    }
    for i in 0..n {
        if alpha[i] != g[i].substitute(gamma)? {
            return Err(Error::WitnessInvalid(format!("α(x{}) ≠ γ(g{})", i + 1, i + 1)));
        }
    }
    for j in 0..m {
        if f[j].substitute(alpha)? != gamma[n + j] {
            return Err(Error::WitnessInvalid(format!("α(f{}) ≠ γ(y{})", j + 1, j + 1)));
        }
    }
    let var = |i: usize| FreePoly::var(nm, &field, i as u32 + 1);
    let tau1 = Endo::new(
        nm,
        &field,
        (0..nm).map(|i| if i < n { &var(i) + &g[i] } else { var(i) }).collect(),
    )?;
    let tau2 = Endo::new(
        nm,
        &field,
        (0..nm).map(|i| if i < n { var(i) } else { &var(i) - &f[i - n] }).collect(),
    )?;
    let tau = compose(&tau1, &tau2)?;
    for (v, img) in tau.images().iter().enumerate() {
        if img.substitute(gamma)? != alpha[v] {
            return Err(Error::WitnessInvalid(format!("γ∘τ differs from α on generator {}", v + 1)));
        }
    }
    Ok(tau)
}

/// A diagonal torus action on R_A(I)⟨y₁..y_m⟩.
#[derive(Clone, Debug)]
pub struct ReesAction {
    pub presentation: GradedPresentation,
    pub action: ActionSpec,
    pub s: usize,
    pub trace: Vec<String>,
}

fn in_subgroup(v: &[i64], t: &[i64]) -> bool {
    let Some(p) = t.iter().position(|&x| x != 0) else {
        return v.iter().all(|&x| x == 0);
    };
    if v[p] % t[p] != 0 {
        return false;
    }
    let k = v[p] / t[p];
    v.iter().zip(t).all(|(a, b)| *a == k * b)
}

/// Grades R_A(I)⟨y⟩ by z ↦ 0, t ↦ `t_degree`, u ↦ −`t_degree`, y_i ↦
/// `y_degrees[i]`. The degrees of y_{s+1},…,y_m must avoid ℤ·`t_degree`.
pub fn build_rees_action(
    ideal: &IdealPresentation,
    s: usize,
    t_degree: &[i64],
    y_degrees: &[Vec<i64>],
) -> Result<ReesAction> {
    let r = t_degree.len();
    if r == 0 || t_degree.iter().all(|&x| x == 0) {
        return invalid("degree of t must be nonzero");
    }
    if y_degrees.iter().any(|d| d.len() != r) {
        return invalid("all degrees must have the same length");
    }
    if s > y_degrees.len() {
        return invalid("s exceeds the number of y generators");
    }
    for (i, d) in y_degrees.iter().enumerate().skip(s) {
        if in_subgroup(d, t_degree) {
            return Err(Error::SubgroupConditionViolated(i + 1));
        }
    }
    let presentation = rees_extended(ideal, y_degrees.len(), t_degree, y_degrees)?;
    let weights: Vec<Vec<i64>> = presentation.gens.iter().map(|g| g.degree.clone()).collect();
    let action = ActionSpec::diagonal(ideal.field, &weights)?;
    let mut trace = vec![format!(
        "degrees of y{}..y{} avoid the subgroup generated by deg t",
        s + 1,
        y_degrees.len()
    )];
    let graded = check_grading(&presentation, 0);
    trace.push(format!("relations homogeneous: {graded}"));
    let axioms = validate_action(&action)?;
    trace.push(format!("action axioms: {axioms}"));
    if !graded || !axioms {
        return invalid("graded action failed validation");
    }
    Ok(ReesAction {
        presentation,
        action,
        s,
        trace,
    })
}

/// K[t]⟨X₁..Xₙ, Y₁..Y_m⟩ with t central.
fn free_over_kt(n: usize, m: usize, field: Field) -> Result<GradedPresentation> {
    let total = n + m + 1;
    let mut gens: Vec<Generator> = (1..=n).map(|i| Generator::new(format!("X{i}"), vec![0])).collect();
    gens.extend((1..=m).map(|j| Generator::new(format!("Y{j}"), vec![0])));
    gens.push(Generator::new("t", vec![1]));
    let t = FreePoly::var(total, &field, total as u32);
    let relations = (1..total)
        .map(|i| commutator(&t, &FreePoly::var(total, &field, i as u32)))
        .collect();
    let ring = LaurentRing::new(field, 1);
    let mut images: Vec<FreePoly<Laurent>> = (1..total)
        .map(|i| FreePoly::var(n + m, &ring, i as u32))
        .collect();
    images.push(FreePoly::constant(
        n + m,
        &ring,
        Laurent::monomial(ring, vec![1], Scalar::one(field)),
    ));
    GradedPresentation::new(field, gens, relations)?.with_model(Model {
        letters: n + m,
        images,
    })
}

/// For I = ⟨z_{m+1},…,zₙ⟩ ⊂ K⟨z₁..zₙ⟩, the K[t]-isomorphism
/// R_A(I)⟨y₁..y_m⟩ ≅ K[t]⟨X₁..Xₙ, Y₁..Y_m⟩ sending z_i ↦ tX_i and u_i ↦ X_i
/// for i > m.
pub fn rectified_rees_iso(n: usize, m: usize, field: Field) -> Result<PresentedIso> {
    if m > n || n == 0 {
        return invalid("need 0 ≤ m ≤ n and n ≥ 1");
    }
    let gens = (m + 1..=n).map(|i| FreePoly::var(n, &field, i as u32)).collect();
    let ideal = IdealPresentation::new(n, field, gens)?;
    let rees = rees_extended(&ideal, m, &[1], &vec![vec![0]; m])?;
    let free = free_over_kt(n, m, field)?;
    let lay = Layout { n, k: n - m, m };
    let rt = rees.n();
    let ft = free.n();
    let rv = |i: u32| FreePoly::var(rt, &field, i);
    let fv = |i: u32| FreePoly::var(ft, &field, i);
    let ft_t = fv(ft as u32);

    let mut fwd: Vec<FreePoly<Scalar>> = (1..=n as u32)
        .map(|i| if i as usize <= m { fv(i) } else { &ft_t * &fv(i) })
        .collect();
    fwd.push(ft_t.clone());
    fwd.extend((m + 1..=n).map(|i| fv(i as u32)));
    fwd.extend((1..=m).map(|j| fv((n + j) as u32)));

    let mut bwd: Vec<FreePoly<Scalar>> = (1..=n)
        .map(|i| if i <= m { rv(i as u32) } else { rv(lay.u(i - m)) })
        .collect();
    bwd.extend((1..=m).map(|j| rv(lay.y(j))));
    bwd.push(rv(lay.t()));

    let iso = PresentedIso {
        forward: HomWitness::new(rees.clone(), free.clone(), fwd)?,
        backward: HomWitness::new(free, rees, bwd)?,
    };
    if !iso.verify()? {
        return invalid("rectified Rees isomorphism failed verification");
    }
    Ok(iso)
}

use crate::uni::{self, Uni};

/// Cancellation data over D = K[t]: A = D[x, t⁻¹f(x)] and B = D[x, t⁻¹g(x)]
/// with an isomorphism A *_D K⟨w⟩ ≅ B *_D K⟨w⟩.
#[derive(Clone, Debug)]
pub struct CancellationPair {
    pub iso: PresentedIso,
    /// H with x ↦ H inducing K[x]/(f) ≅ K[x]/(g).
    pub witness: Vec<Scalar>,
    pub witness_inverse: Vec<Scalar>,
    pub degree_bound: usize,
}

/// Checks that x ↦ h induces an isomorphism K[x]/(f) → K[x]/(g) and returns
/// the polynomial inducing its inverse.
pub fn quotient_iso(f: &[Scalar], g: &[Scalar], h: &[Scalar], field: Field) -> Result<Vec<Scalar>> {
    let (f, g, h) = (uni::trim(f.to_vec()), uni::trim(g.to_vec()), uni::trim(h.to_vec()));
    let bad = |m: &str| Err(Error::QuotientIsoInvalid(m.into()));
    let d = match (uni::deg(&f), uni::deg(&g)) {
        (Some(a), Some(b)) if a == b => a,
        _ => return bad("f and g have different degrees"),
    };
    if !uni::rem(&uni::compose(&f, &h, field), &g, field).is_empty() {
        return bad("f(H) is not divisible by g");
    }
    let mut cols = Vec::with_capacity(d);
    let mut pw: Uni = vec![Scalar::one(field)];
    for _ in 0..d {
        cols.push(pw.clone());
        pw = uni::rem(&uni::mul(&pw, &h, field), &g, field);
    }
    let m = Mat::from_fn(d, d, |i, j| cols[j].get(i).cloned().unwrap_or(Scalar::zero(field)));
    let mut e = vec![Scalar::zero(field); d];
    e[1] = Scalar::one(field);
    let Some(hp) = m.solve(&e) else {
        return bad("x ↦ H is not bijective on K[x]/(f)");
    };
    let hp = uni::trim(hp);
    if !uni::rem(&uni::compose(&g, &hp, field), &f, field).is_empty() {
        return bad("inverse map is not well defined");
    }
    Ok(hp)
}

fn search_witness(f: &[Scalar], g: &[Scalar], field: Field) -> Option<(Uni, Uni)> {
    let d = f.len().saturating_sub(1);
    let len = d.min(4);
    let mut values: Vec<Scalar> = [0i64, 1, -1, 2, -2]
        .iter()
        .map(|&v| Scalar::from_i64(field, v))
        .collect();
    if let Some(half) = Scalar::from_i64(field, 2).inv() {
        values.push(half.clone());
        values.push(half.neg());
    }
    let mut seen = HashSet::new();
    values.retain(|v| seen.insert(v.to_canonical_string()));
    let base = values.len();
    let total = base.checked_pow(len as u32)?;
    for code in 0..total {
        let mut c = code;
        let h: Uni = (0..len)
            .map(|_| {
                let v = values[c % base].clone();
                c /= base;
                v
            })
            .collect();
        if uni::deg(&uni::trim(h.clone())).unwrap_or(0) == 0 {
            continue;
        }
        if let Ok(hp) = quotient_iso(f, g, &h, field) {
            return Some((uni::trim(h), hp));
        }
    }
    None
}

// Generator order for both presentations: t, x, u (or v), w.
const T: u32 = 1;
const X: u32 = 2;
const U: u32 = 3;
const W: u32 = 4;

fn cancellation_presentation(f: &Uni, field: Field, u_name: &str) -> Result<GradedPresentation> {
    let gens = vec![
        Generator::new("t", vec![1]),
        Generator::new("x", vec![0]),
        Generator::new(u_name, vec![-1]),
        Generator::new("w", vec![0]),
    ];
    let v = |i| FreePoly::var(4, &field, i);
    let (t, x, u, w) = (v(T), v(X), v(U), v(W));
    let fx = uni_free(f, &x, 4, field);
    let relations = vec![
        commutator(&t, &x),
        commutator(&t, &u),
        commutator(&x, &u),
        commutator(&t, &w),
        &(&t * &u) - &fx,
    ];
    let ring = LaurentRing::new(field, 1);
    let lx = FreePoly::var(2, &ring, 1);
    let tinv = Laurent::monomial(ring, vec![-1], Scalar::one(field));
    let images = vec![
        FreePoly::constant(2, &ring, Laurent::monomial(ring, vec![1], Scalar::one(field))),
        lx.clone(),
        uni_free(f, &lx, 2, ring).scale(&tinv),
        FreePoly::var(2, &ring, 2),
    ];
    GradedPresentation::new(field, gens, relations)?.with_model(Model { letters: 2, images })
}

fn uni_free<C: Coeff>(p: &[Scalar], y: &FreePoly<C>, n: usize, ring: C::Ring) -> FreePoly<C> {
    let mut acc = FreePoly::zero(n, &ring);
    for c in p.iter().rev() {
        acc = &(&acc * y) + &FreePoly::constant(n, &ring, C::from_scalar(&ring, c));
    }
    acc
}

/// Rewrites t⁻¹·p, for p in the model with only positive powers of t, as a
/// polynomial in the generators t, x, w.
fn divide_by_t(p: &FreePoly<Laurent>, field: Field) -> Result<FreePoly<Scalar>> {
    let mut out = FreePoly::zero(4, &field);
    for (word, c) in p.terms() {
        for (e, s) in c.terms() {
            if e[0] < 1 {
                return Err(Error::WitnessVerificationFailed(0));
            }
            let mut letters = vec![T; e[0] as usize - 1];
            letters.extend(word.letters().iter().map(|&l| if l == 1 { X } else { W }));
            out.add_term(Word::new(letters), s);
        }
    }
    Ok(out)
}

/// Images of t, x, u, w of D[x, t⁻¹f] *_D K⟨w⟩ in D[x, t⁻¹g] *_D K⟨w⟩:
/// x ↦ tw + H(x), w ↦ t⁻¹(x − H'(tw + H(x))), u ↦ t⁻¹f(tw + H(x)).
fn chain_images(f: &Uni, g: &Uni, h: &Uni, hp: &Uni, field: Field) -> Result<Vec<FreePoly<Scalar>>> {
    let ring = LaurentRing::new(field, 1);
    let lt = Laurent::monomial(ring, vec![1], Scalar::one(field));
    let lx = FreePoly::var(2, &ring, 1);
    let lw = FreePoly::var(2, &ring, 2);
    let hx = uni_free(h, &lx, 2, ring);
    let y = &lw.scale(&lt) + &hx;

    let v = |i| FreePoly::var(4, &field, i);
    let (t, x, gv, w) = (v(T), v(X), v(U), v(W));
    let in_x = |p: &Uni| uni_free(p, &x, 4, field);
    let exact = |a: &Uni| -> Result<Uni> {
        let (q, r) = uni::divrem(a, g, field);
        if r.is_empty() {
            Ok(q)
        } else {
            Err(Error::QuotientIsoInvalid("expected exact division by g".into()))
        }
    };

    // f(H + tw) = f(H) + t·(…), with f(H) = p·g.
    let p = exact(&uni::compose(f, h, field))?;
    let f_tail = &uni_free(f, &y, 2, ring) - &uni_free(&uni::compose(f, h, field), &lx, 2, ring);
    let u_img = &(&in_x(&p) * &gv) + &divide_by_t(&f_tail, field)?;

    // x − H'(H + tw) = (x − H'(H)) − t·(…), with H'(H) − x = q·g.
    let q = exact(&uni::sub(&uni::compose(hp, h, field), &uni::x(field), field))?;
    let hp_tail = &uni_free(hp, &y, 2, ring) - &uni_free(&uni::compose(hp, h, field), &lx, 2, ring);
    let w_img = -&(&(&in_x(&q) * &gv) + &divide_by_t(&hp_tail, field)?);

    let x_img = &(&t * &w) + &in_x(h);
    Ok(vec![t, x_img, u_img, w_img])
}

/// Builds the isomorphism D[x, t⁻¹f] *_D K⟨w⟩ ≅ D[x, t⁻¹g] *_D K⟨w⟩ for
/// D = K[t] from an isomorphism K[x]/(f) ≅ K[x]/(g) given by x ↦ H. Without
/// a witness, H is searched among polynomials of degree below deg g with
/// coefficients in {0, ±1, ±2, ±1/2}. Generator images must have degree at
/// most `degree_bound`.
pub fn cancellation_pair(
    f: &[Scalar],
    g: &[Scalar],
    witness: Option<&[Scalar]>,
    degree_bound: usize,
) -> Result<CancellationPair> {
    let Some(field) = f.first().map(|c| c.field()) else {
        return invalid("f is empty");
    };
    let (f, g) = (uni::trim(f.to_vec()), uni::trim(g.to_vec()));
    for (name, p) in [("f", &f), ("g", &g)] {
        if p.iter().any(|c| c.field() != field) {
            return invalid("f and g must share a field");
        }
        if uni::deg(p).unwrap_or(0) < 2 || !p.last().is_some_and(|c| c.is_one()) {
            return invalid(format!("{name} must be monic of degree at least 2"));
        }
    }
    let (h, hp) = match witness {
        Some(h) => {
            let h = uni::trim(h.to_vec());
            let hp = quotient_iso(&f, &g, &h, field)?;
            (h, hp)
        }
        None => search_witness(&f, &g, field).ok_or_else(|| {
            Error::QuotientIsoInvalid("no witness of degree below deg g with small coefficients".into())
        })?,
    };
    let a = cancellation_presentation(&f, field, "u")?;
    let b = cancellation_presentation(&g, field, "v")?;
    let identity_case = f == g && uni::rem(&h, &g, field) == uni::x(field);
    let (fwd, bwd) = if identity_case {
        let ids: Vec<_> = (1..=4).map(|i| FreePoly::var(4, &field, i)).collect();
        (ids.clone(), ids)
    } else {
        (
            chain_images(&f, &g, &h, &hp, field)?,
            chain_images(&g, &f, &hp, &h, field)?,
        )
    };
    let iso = PresentedIso {
        forward: HomWitness::new(a.clone(), b.clone(), fwd)?,
        backward: HomWitness::new(b, a, bwd)?,
    };
    let small = iso.forward.max_image_degree() <= degree_bound && iso.backward.max_image_degree() <= degree_bound;
    if !small || !iso.verify()? {
        return Err(Error::WitnessVerificationFailed(degree_bound));
    }
    Ok(CancellationPair {
        iso,
        witness: h,
        witness_inverse: hp,
        degree_bound,
    })
}
