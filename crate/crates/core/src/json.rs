//! Canonical JSON for the library's data. Rationals are strings `p/q`,
//! `Fp` elements are residue strings. Parse errors carry a JSON pointer to
//! the offending value.
//!
//! Polynomials may be given either canonically,
//! `{"n": 2, "terms": [{"coeff": "1/1", "word": [1, 2]}]}`, or as an
//! expression string such as `"t^2*z1*z2 - z2*z1"`.

use serde_json::{json, Map, Value};

use crate::algebra::{Coeff, CommPoly, Field, FreePoly, Laurent, LaurentRing, Scalar, Word};
use crate::differentials::{JacobianMatrix, TensorPoly};
use crate::endomorphism::{Endo, InversionReport, InversionStatus};
use crate::error::{Error, Result};
use crate::generic::CoeffMap;
use crate::lift2::{CommEndo, TameFactor, TameFactorization};
use crate::linalg::Mat;
use crate::parse::{parse_laurent, parse_poly, ParseOptions};
use crate::rees::{
    GradedPresentation, Generator, HomWitness, IdealEquivalence, IdealPresentation, PresentedIso,
    WitnessTerm,
};
use crate::torus::{ActionSpec, LinearizationReport, LinearizationStatus, WeightData};

fn bad<T>(path: &str, msg: impl std::fmt::Display) -> Result<T> {
    let p = if path.is_empty() { "/" } else { path };
    Err(Error::InvalidInput(format!("{p}: {msg}")))
}

fn child(path: &str, key: impl std::fmt::Display) -> String {
    format!("{path}/{key}")
}

pub fn get<'a>(v: &'a Value, key: &str, path: &str) -> Result<&'a Value> {
    match v.get(key) {
        Some(x) => Ok(x),
        None => bad(path, format!("missing field {key:?}")),
    }
}

pub fn as_array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().map_or_else(|| bad(path, "expected an array"), Ok)
}

pub fn as_usize(v: &Value, path: &str) -> Result<usize> {
    match v.as_u64() {
        Some(x) if x <= u32::MAX as u64 => Ok(x as usize),
        _ => bad(path, "expected a non-negative integer"),
    }
}

pub fn as_i64(v: &Value, path: &str) -> Result<i64> {
    v.as_i64().map_or_else(|| bad(path, "expected an integer"), Ok)
}

pub fn as_str<'a>(v: &'a Value, path: &str) -> Result<&'a str> {
    v.as_str().map_or_else(|| bad(path, "expected a string"), Ok)
}

pub fn as_i64_vec(v: &Value, path: &str) -> Result<Vec<i64>> {
    as_array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, x)| as_i64(x, &child(path, i)))
        .collect()
}

fn opt_usize(v: &Value, key: &str, path: &str) -> Result<Option<usize>> {
    match v.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(x) => as_usize(x, &child(path, key)).map(Some),
    }
}

fn with_path<T>(r: Result<T>, path: &str) -> Result<T> {
    r.map_err(|e| match e {
        Error::InvalidInput(m) if !m.starts_with('/') => {
            Error::InvalidInput(format!("{}: {m}", if path.is_empty() { "/" } else { path }))
        }
        other => other,
    })
}

pub fn field_to_json(f: Field) -> Value {
    Value::String(f.to_string())
}

/// Reads `"field"`, defaulting to ℚ.
pub fn field_from_json(v: &Value, path: &str) -> Result<Field> {
    match v.get("field") {
        None => Ok(Field::Rational),
        Some(x) => with_path(Field::parse(as_str(x, &child(path, "field"))?), &child(path, "field")),
    }
}

pub fn scalar_to_json(s: &Scalar) -> Value {
    Value::String(s.to_canonical_string())
}

pub fn scalar_from_json(v: &Value, field: Field, path: &str) -> Result<Scalar> {
    match v {
        Value::String(s) => with_path(Scalar::parse(field, s), path),
        Value::Number(n) if n.is_i64() => Ok(Scalar::from_i64(field, n.as_i64().unwrap_or(0))),
        _ => bad(path, "expected a number string such as \"-3/4\""),
    }
}

pub fn scalars_to_json(v: &[Scalar]) -> Value {
    Value::Array(v.iter().map(scalar_to_json).collect())
}

pub fn scalars_from_json(v: &Value, field: Field, path: &str) -> Result<Vec<Scalar>> {
    as_array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, x)| scalar_from_json(x, field, &child(path, i)))
        .collect()
}

/// Coefficient rings with a JSON form.
pub trait JsonCoeff: Coeff {
    fn to_json(&self) -> Value;
    fn from_json(v: &Value, ring: &Self::Ring, path: &str) -> Result<Self>;
    fn parse_text(text: &str, ring: &Self::Ring, n: usize) -> Result<FreePoly<Self>>;
}

impl JsonCoeff for Scalar {
    fn to_json(&self) -> Value {
        scalar_to_json(self)
    }

    fn from_json(v: &Value, ring: &Field, path: &str) -> Result<Self> {
        scalar_from_json(v, *ring, path)
    }

    fn parse_text(text: &str, ring: &Field, n: usize) -> Result<FreePoly<Self>> {
        parse_poly(text, *ring, n)
    }
}

impl JsonCoeff for Laurent {
    fn to_json(&self) -> Value {
        Value::Array(
            self.terms()
                .map(|(e, c)| json!({"tpow": e, "value": scalar_to_json(c)}))
                .collect(),
        )
    }

    fn from_json(v: &Value, ring: &LaurentRing, path: &str) -> Result<Self> {
        if v.is_string() || v.is_number() {
            return Ok(Laurent::constant(*ring, scalar_from_json(v, ring.field, path)?));
        }
        let mut terms = Vec::new();
        for (i, t) in as_array(v, path)?.iter().enumerate() {
            let p = child(path, i);
            let e = as_i64_vec(get(t, "tpow", &p)?, &child(&p, "tpow"))?;
            if e.len() != ring.r {
                return bad(&child(&p, "tpow"), format!("expected {} exponents", ring.r));
            }
            terms.push((e, scalar_from_json(get(t, "value", &p)?, ring.field, &child(&p, "value"))?));
        }
        with_path(Laurent::from_terms(*ring, terms), path)
    }

    fn parse_text(text: &str, ring: &LaurentRing, n: usize) -> Result<FreePoly<Self>> {
        let p = parse_laurent(
            text,
            ParseOptions {
                field: ring.field,
                n,
                r: ring.r,
            },
        )?;
        if p.ring().r != ring.r {
            return Err(Error::InvalidInput(format!("expected {} torus parameters", ring.r)));
        }
        Ok(p)
    }
}

pub fn poly_to_json<C: JsonCoeff>(p: &FreePoly<C>) -> Value {
    let terms: Vec<Value> = p
        .terms()
        .map(|(w, c)| json!({"coeff": c.to_json(), "word": w.letters()}))
        .collect();
    json!({"n": p.n(), "terms": terms})
}

pub fn poly_from_json<C: JsonCoeff>(v: &Value, ring: &C::Ring, n: usize, path: &str) -> Result<FreePoly<C>> {
    if let Some(text) = v.as_str() {
        return with_path(C::parse_text(text, ring, n), path);
    }
    if let Some(m) = opt_usize(v, "n", path)? {
        if m != n {
            return bad(&child(path, "n"), format!("expected {n} generators, found {m}"));
        }
    }
    let tp = child(path, "terms");
    let mut out = FreePoly::zero(n, ring);
    for (i, t) in as_array(get(v, "terms", path)?, &tp)?.iter().enumerate() {
        let p = child(&tp, i);
        let wp = child(&p, "word");
        let letters: Vec<u32> = as_array(get(t, "word", &p)?, &wp)?
            .iter()
            .enumerate()
            .map(|(k, l)| match as_usize(l, &child(&wp, k))? {
                l if l >= 1 && l <= n => Ok(l as u32),
                _ => bad(&child(&wp, k), format!("letter out of range 1..={n}")),
            })
            .collect::<Result<_>>()?;
        let c = C::from_json(get(t, "coeff", &p)?, ring, &child(&p, "coeff"))?;
        out.add_term(Word::new(letters), &c);
    }
    Ok(out)
}

fn polys_from_json<C: JsonCoeff>(v: &Value, ring: &C::Ring, n: usize, path: &str) -> Result<Vec<FreePoly<C>>> {
    as_array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, x)| poly_from_json(x, ring, n, &child(path, i)))
        .collect()
}

/// Number of generators: the explicit `"n"`, else the number of images.
fn arity(v: &Value, images_key: &str, path: &str) -> Result<usize> {
    match opt_usize(v, "n", path)? {
        Some(n) if n > 0 => Ok(n),
        Some(_) => bad(&child(path, "n"), "n must be positive"),
        None => Ok(as_array(get(v, images_key, path)?, &child(path, images_key))?.len()),
    }
}

pub fn endo_to_json(e: &Endo<Scalar>) -> Value {
    json!({
        "field": field_to_json(*e.ring()),
        "n": e.n(),
        "images": e.images().iter().map(poly_to_json).collect::<Vec<_>>(),
    })
}

pub fn endo_from_json(v: &Value, path: &str) -> Result<Endo<Scalar>> {
    let field = field_from_json(v, path)?;
    let n = arity(v, "images", path)?;
    let images = polys_from_json::<Scalar>(get(v, "images", path)?, &field, n, &child(path, "images"))?;
    with_path(Endo::new(n, &field, images), path)
}

pub fn action_to_json(a: &ActionSpec) -> Value {
    json!({
        "field": field_to_json(a.field()),
        "n": a.n(),
        "r": a.r(),
        "images": a.images().iter().map(poly_to_json).collect::<Vec<_>>(),
    })
}

/// An action; `"r"` defaults to the largest parameter index in expression
/// images and must be given for canonical images.
pub fn action_from_json(v: &Value, path: &str) -> Result<ActionSpec> {
    let field = field_from_json(v, path)?;
    let n = arity(v, "images", path)?;
    let ip = child(path, "images");
    let raw = as_array(get(v, "images", path)?, &ip)?;
    let r = match opt_usize(v, "r", path)? {
        Some(r) => r,
        None => {
            let mut r = 0;
            for (i, x) in raw.iter().enumerate() {
                let Some(text) = x.as_str() else {
                    return bad(&child(path, "r"), "r is required with canonical images");
                };
                let p = with_path(parse_laurent(text, ParseOptions { field, n, r: 0 }), &child(&ip, i))?;
                r = r.max(p.ring().r);
            }
            r
        }
    };
    if r == 0 {
        return bad(path, "an action needs at least one torus parameter");
    }
    let ring = LaurentRing::new(field, r);
    let images = polys_from_json::<Laurent>(get(v, "images", path)?, &ring, n, &ip)?;
    if images.len() != n {
        return bad(&ip, format!("expected {n} images"));
    }
    with_path(ActionSpec::new(n, r, images), path)
}

pub fn comm_to_json(p: &CommPoly<Scalar>) -> Value {
    let terms: Vec<Value> = p
        .terms()
        .map(|(e, c)| json!({"coeff": scalar_to_json(c), "exps": e}))
        .collect();
    json!({"nvars": p.nvars(), "terms": terms})
}

pub fn comm_from_json(v: &Value, field: Field, nvars: usize, path: &str) -> Result<CommPoly<Scalar>> {
    if let Some(text) = v.as_str() {
        return Ok(with_path(parse_poly(text, field, nvars), path)?.abelianize());
    }
    let tp = child(path, "terms");
    let mut out = CommPoly::zero(nvars, &field);
    for (i, t) in as_array(get(v, "terms", path)?, &tp)?.iter().enumerate() {
        let p = child(&tp, i);
        let ep = child(&p, "exps");
        let exps: Vec<u32> = as_array(get(t, "exps", &p)?, &ep)?
            .iter()
            .enumerate()
            .map(|(k, x)| as_usize(x, &child(&ep, k)).map(|e| e as u32))
            .collect::<Result<_>>()?;
        if exps.len() != nvars {
            return bad(&ep, format!("expected {nvars} exponents"));
        }
        out.add_term(exps, &scalar_from_json(get(t, "coeff", &p)?, field, &child(&p, "coeff"))?);
    }
    Ok(out)
}

pub fn comm_endo_to_json(e: &CommEndo) -> Value {
    json!({
        "field": field_to_json(e.field()),
        "images": e.images.iter().map(comm_to_json).collect::<Vec<_>>(),
    })
}

pub fn comm_endo_from_json(v: &Value, path: &str) -> Result<CommEndo> {
    let field = field_from_json(v, path)?;
    let ip = child(path, "images");
    let images = as_array(get(v, "images", path)?, &ip)?
        .iter()
        .enumerate()
        .map(|(i, x)| comm_from_json(x, field, 2, &child(&ip, i)))
        .collect::<Result<Vec<_>>>()?;
    with_path(CommEndo::new(images), path)
}

pub fn mat_to_json(m: &Mat<Scalar>) -> Value {
    Value::Array(m.to_rows().iter().map(|r| scalars_to_json(r)).collect())
}

pub fn mat_from_json(v: &Value, field: Field, path: &str) -> Result<Mat<Scalar>> {
    let rows = as_array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, r)| scalars_from_json(r, field, &child(path, i)))
        .collect::<Result<Vec<_>>>()?;
    if rows.is_empty() || rows.iter().any(|r| r.len() != rows[0].len()) {
        return bad(path, "expected a non-empty rectangular matrix");
    }
    Ok(Mat::from_rows(rows))
}

pub fn weights_to_json(w: &WeightData) -> Value {
    json!({
        "weight_matrix": w.weight_matrix,
        "diagonal": w.diagonal,
        "basis_change": w.basis_change.as_ref().map(mat_to_json),
    })
}

pub fn linearization_report_to_json(r: &LinearizationReport) -> Value {
    let (status, failure) = match &r.status {
        LinearizationStatus::Verified => ("Verified", Value::Null),
        LinearizationStatus::Failed { stage, reason } => ("Failed", json!({"stage": stage, "reason": reason})),
        LinearizationStatus::Inconclusive { stage, reason } => {
            ("Inconclusive", json!({"stage": stage, "reason": reason}))
        }
    };
    json!({
        "status": status,
        "failure": failure,
        "beta": r.beta.as_ref().map(endo_to_json),
        "beta_inverse": r.beta_inverse.as_ref().map(endo_to_json),
        "tau": r.tau.as_ref().map(action_to_json),
        "weights": r.weights.as_ref().map(weights_to_json),
        "translation": scalars_to_json(&r.translation),
        "trace": r.trace.iter().map(|t| json!({"stage": t.stage, "detail": t.detail})).collect::<Vec<_>>(),
    })
}

pub fn inversion_report_to_json(r: &InversionReport) -> Value {
    let (status, degree) = match r.status {
        InversionStatus::Exact => ("Exact", Value::Null),
        InversionStatus::TruncatedAt(d) => ("TruncatedAt", json!(d)),
        InversionStatus::NotInvertible => ("NotInvertible", Value::Null),
        InversionStatus::Inconclusive => ("Inconclusive", Value::Null),
    };
    json!({
        "status": status,
        "degree": degree,
        "cutoff": r.cutoff,
        "inverse": r.inverse.as_ref().map(endo_to_json),
    })
}

pub fn tensor_to_json(t: &TensorPoly) -> Value {
    let terms: Vec<Value> = t
        .terms()
        .map(|((u, v), c)| json!({"coeff": scalar_to_json(c), "left": u.letters(), "right": v.letters()}))
        .collect();
    json!({"terms": terms, "text": t.to_string()})
}

pub fn jacobian_to_json(j: &JacobianMatrix) -> Value {
    Value::Array(
        j.entries
            .iter()
            .map(|row| Value::Array(row.iter().map(tensor_to_json).collect()))
            .collect(),
    )
}

pub fn coeff_map_to_json(c: &CoeffMap) -> Value {
    json!({
        "n": c.n,
        "size": c.size,
        "images": c.images.iter().map(comm_to_json).collect::<Vec<_>>(),
    })
}

pub fn factor_to_json(f: &TameFactor) -> Value {
    match f {
        TameFactor::Affine { matrix, translation } => json!({
            "kind": "affine",
            "matrix": mat_to_json(matrix),
            "translation": scalars_to_json(translation),
        }),
        TameFactor::Elementary { index, poly } => json!({
            "kind": "elementary",
            "index": index,
            "poly": comm_to_json(poly),
        }),
    }
}

pub fn factorization_to_json(f: &TameFactorization) -> Value {
    json!({
        "factors": f.factors.iter().map(factor_to_json).collect::<Vec<_>>(),
        "text": f.factors.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
    })
}

pub fn ideal_to_json(i: &IdealPresentation) -> Value {
    json!({
        "field": field_to_json(i.field),
        "n": i.n,
        "generators": i.generators.iter().map(poly_to_json).collect::<Vec<_>>(),
    })
}

pub fn ideal_from_json(v: &Value, path: &str) -> Result<IdealPresentation> {
    let field = field_from_json(v, path)?;
    let n = as_usize(get(v, "n", path)?, &child(path, "n"))?;
    let gens = polys_from_json::<Scalar>(get(v, "generators", path)?, &field, n, &child(path, "generators"))?;
    with_path(IdealPresentation::new(n, field, gens), path)
}

pub fn presentation_to_json(g: &GradedPresentation) -> Value {
    json!({
        "field": field_to_json(g.field),
        "gens": g.gens.iter().map(|x| json!({"name": x.name, "degree": x.degree})).collect::<Vec<_>>(),
        "relations": g.relations.iter().map(poly_to_json).collect::<Vec<_>>(),
        "relations_text": g.relation_strings(),
    })
}

/// Reads a presentation; `relations_text` is ignored and relations given as
/// strings refer to generator k as `zk`.
pub fn presentation_from_json(v: &Value, path: &str) -> Result<GradedPresentation> {
    let field = field_from_json(v, path)?;
    let gp = child(path, "gens");
    let gens = as_array(get(v, "gens", path)?, &gp)?
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let p = child(&gp, i);
            Ok(Generator::new(
                as_str(get(g, "name", &p)?, &child(&p, "name"))?,
                as_i64_vec(get(g, "degree", &p)?, &child(&p, "degree"))?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let n = gens.len();
    let relations = match v.get("relations") {
        None => Vec::new(),
        Some(r) => polys_from_json::<Scalar>(r, &field, n, &child(path, "relations"))?,
    };
    with_path(GradedPresentation::new(field, gens, relations), path)
}

pub fn hom_to_json(h: &HomWitness) -> Value {
    let images: Vec<Value> = h
        .source
        .gens
        .iter()
        .zip(&h.images)
        .map(|(g, p)| json!({"gen": g.name, "image": poly_to_json(p), "text": h.target.show(p)}))
        .collect();
    json!({"images": images})
}

pub fn iso_to_json(iso: &PresentedIso) -> Value {
    json!({
        "source": presentation_to_json(&iso.forward.source),
        "target": presentation_to_json(&iso.forward.target),
        "forward": hom_to_json(&iso.forward),
        "backward": hom_to_json(&iso.backward),
    })
}

fn witness_from_json(v: &Value, field: Field, n: usize, path: &str) -> Result<Vec<Vec<WitnessTerm>>> {
    as_array(v, path)?
        .iter()
        .enumerate()
        .map(|(j, sum)| {
            let sp = child(path, j);
            as_array(sum, &sp)?
                .iter()
                .enumerate()
                .map(|(k, t)| {
                    let p = child(&sp, k);
                    let one = Value::String("1".into());
                    Ok(WitnessTerm {
                        left: poly_from_json(t.get("left").unwrap_or(&one), &field, n, &child(&p, "left"))?,
                        index: as_usize(get(t, "index", &p)?, &child(&p, "index"))?,
                        right: poly_from_json(t.get("right").unwrap_or(&one), &field, n, &child(&p, "right"))?,
                    })
                })
                .collect()
        })
        .collect()
}

/// `{"source": ideal, "target": ideal, "theta": [images], "theta_inverse":
/// [images]?, "forward": [[{"left", "index", "right"}]], "backward": …}`.
pub fn ideal_equivalence_from_json(v: &Value, path: &str) -> Result<IdealEquivalence> {
    let source = ideal_from_json(get(v, "source", path)?, &child(path, "source"))?;
    let target = ideal_from_json(get(v, "target", path)?, &child(path, "target"))?;
    let (n, field) = (source.n, source.field);
    let endo = |key: &str| -> Result<Endo<Scalar>> {
        let p = child(path, key);
        let images = polys_from_json::<Scalar>(get(v, key, path)?, &field, n, &p)?;
        with_path(Endo::new(n, &field, images), &p)
    };
    let theta = endo("theta")?;
    let theta_inverse = match v.get("theta_inverse") {
        None | Some(Value::Null) => None,
        Some(_) => Some(endo("theta_inverse")?),
    };
    Ok(IdealEquivalence {
        theta,
        theta_inverse,
        forward: witness_from_json(get(v, "forward", path)?, field, n, &child(path, "forward"))?,
        backward: witness_from_json(get(v, "backward", path)?, field, n, &child(path, "backward"))?,
        source,
        target,
    })
}

/// Sorted-key object from pairs, for report payloads.
pub fn object(pairs: Vec<(&str, Value)>) -> Value {
    let mut m = Map::new();
    for (k, v) in pairs {
        m.insert(k.to_string(), v);
    }
    Value::Object(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poly_round_trip() {
        let ring = LaurentRing::new(Field::Rational, 1);
        let p = parse_laurent("t^3*z2 + (t^2 - t^3)*z1^2 - 1/2", ParseOptions::default()).unwrap();
        let v = poly_to_json(&p);
        let q: FreePoly<Laurent> = poly_from_json(&v, &ring, 2, "").unwrap();
        assert_eq!(p, q);
        assert_eq!(v["terms"][0]["coeff"][0]["value"], "-1/2");
    }

    #[test]
    fn action_from_expressions() {
        let v = json!({"images": ["t*z1", "t^3*z2 + (t^2 - t^3)*z1^2"]});
        let a = action_from_json(&v, "").unwrap();
        assert_eq!((a.n(), a.r()), (2, 1));
        let back = action_from_json(&action_to_json(&a), "").unwrap();
        assert_eq!(a.images(), back.images());
    }

    #[test]
    fn errors_carry_pointers() {
        let v = json!({"field": "Q", "n": 2, "images": ["z1", {"terms": [{"coeff": "x", "word": [1]}]}]});
        let e = endo_from_json(&v, "").unwrap_err().to_string();
        assert!(e.contains("/images/1/terms/0/coeff"), "{e}");
        let v = json!({"images": ["z1", {"terms": [{"coeff": "1", "word": [3]}]}]});
        let e = endo_from_json(&v, "").unwrap_err().to_string();
        assert!(e.contains("/images/1/terms/0/word/0"), "{e}");
        let e = endo_from_json(&json!({"images": ["z1 +"]}), "").unwrap_err().to_string();
        assert!(e.contains("/images/0"), "{e}");
    }

    #[test]
    fn presentation_round_trip() {
        let ideal = IdealPresentation::new(2, Field::Rational, vec![parse_poly("z2", Field::Rational, 2).unwrap()])
            .unwrap();
        let g = crate::rees::rees_presentation(&ideal).unwrap();
        let back = presentation_from_json(&presentation_to_json(&g), "").unwrap();
        assert_eq!(back.gens, g.gens);
        assert_eq!(back.relations, g.relations);
    }
}
