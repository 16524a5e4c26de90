//! Lex Gröbner bases in K[x₁,…,x_k] with x₁ > … > x_k, and points of the
//! zero sets they cut out.

use crate::algebra::{Coeff, CommPoly, Field, Scalar};
use crate::uni::{self, Uni};

type Poly = CommPoly<Scalar>;

/// Basis size at which the computation gives up.
const BASIS_LIMIT: usize = 256;
/// Values tried for coordinates left free by the basis.
const FREE_VALUES: [i64; 4] = [0, 1, -1, 2];

fn lead(p: &Poly) -> Option<(Vec<u32>, Scalar)> {
    p.terms().last().map(|(e, c)| (e.clone(), c.clone()))
}

fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn monic(p: &Poly) -> Poly {
    match lead(p).and_then(|(_, c)| c.inv()) {
        Some(inv) => p.scale(&inv),
        None => p.clone(),
    }
}

fn shifted(g: &Poly, by: Vec<u32>, c: Scalar) -> Poly {
    g.mul(&Poly::monomial(g.nvars(), g.ring(), by, c))
}

/// Full reduction of `f` modulo `basis`.
fn reduce(f: &Poly, basis: &[Poly]) -> Poly {
    let mut p = f.clone();
    let mut r = Poly::zero(f.nvars(), f.ring());
    while let Some((e, c)) = lead(&p) {
        let hit = basis.iter().find_map(|g| {
            let (ge, gc) = lead(g)?;
            divides(&ge, &e).then_some((g, ge, gc))
        });
        match hit {
            Some((g, ge, gc)) => {
                let by = e.iter().zip(&ge).map(|(a, b)| a - b).collect();
                let coef = c.div(&gc).expect("nonzero leading coefficient");
                p = p.sub(&shifted(g, by, coef));
            }
            None => {
                r.add_term(e.clone(), &c);
                p.add_term(e, &c.neg());
            }
        }
    }
    r
}

fn s_poly(f: &Poly, g: &Poly) -> Poly {
    let (fe, fc) = lead(f).expect("nonzero");
    let (ge, gc) = lead(g).expect("nonzero");
    let l: Vec<u32> = fe.iter().zip(&ge).map(|(a, b)| *a.max(b)).collect();
    let df = l.iter().zip(&fe).map(|(a, b)| a - b).collect();
    let dg = l.iter().zip(&ge).map(|(a, b)| a - b).collect();
    let one = Scalar::one(f.field());
    shifted(f, df, one.div(&fc).unwrap()).sub(&shifted(g, dg, one.div(&gc).unwrap()))
}

/// The reduced lex Gröbner basis of the ideal generated by `gens`, or `None`
/// if it grows past the size limit.
pub fn lex_basis(gens: &[Poly]) -> Option<Vec<Poly>> {
    let mut g: Vec<Poly> = gens.iter().filter(|p| !p.is_empty()).map(monic).collect();
    let mut pairs: Vec<(usize, usize)> = (0..g.len()).flat_map(|j| (0..j).map(move |i| (i, j))).collect();
    while let Some((i, j)) = pairs.pop() {
        let (a, b) = (lead(&g[i])?.0, lead(&g[j])?.0);
        if a.iter().zip(&b).all(|(x, y)| *x == 0 || *y == 0) {
            continue;
        }
        let r = reduce(&s_poly(&g[i], &g[j]), &g);
        if r.is_empty() {
            continue;
        }
        if g.len() >= BASIS_LIMIT {
            return None;
        }
        let k = g.len();
        pairs.extend((0..k).map(|i| (i, k)));
        g.push(monic(&r));
    }
    // drop redundant leads, then interreduce
    let mut min: Vec<Poly> = Vec::new();
    for (i, p) in g.iter().enumerate() {
        let e = lead(p)?.0;
        let redundant = g.iter().enumerate().any(|(j, q)| {
            let f = lead(q).expect("nonzero").0;
            j != i && divides(&f, &e) && (f != e || j < i)
        });
        if !redundant {
            min.push(p.clone());
        }
    }
    let reduced = (0..min.len())
        .map(|i| {
            let others: Vec<Poly> = min.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, q)| q.clone()).collect();
            monic(&reduce(&min[i], &others))
        })
        .collect::<Vec<_>>();
    let mut out = reduced;
    out.sort_by(|a, b| lead(a).map(|x| x.0).cmp(&lead(b).map(|x| x.0)));
    Some(out)
}

/// A point of the common zero set of `gens` with coordinates in the ground
/// field, found by back-substitution through a lex basis. Coordinates the
/// basis leaves free are set to small integers.
pub fn find_point(gens: &[Poly], nvars: usize, field: Field) -> Option<Vec<Scalar>> {
    let basis = lex_basis(gens)?;
    let mut vals = vec![Scalar::zero(field); nvars];
    extend(&basis, &mut vals, nvars, field).then_some(vals)
}

/// Fills coordinates below `k`, given the values at indices k..nvars.
fn extend(basis: &[Poly], vals: &mut Vec<Scalar>, k: usize, field: Field) -> bool {
    // every basis element vanishes at the level of its leading variable
    if k == 0 {
        return true;
    }
    let idx = k - 1;
    let mut g: Uni = Vec::new();
    for p in basis {
        let Some((e, _)) = lead(p) else { continue };
        if e[..idx].iter().any(|&x| x != 0) {
            continue;
        }
        g = uni::gcd(&g, &at_point(p, vals, idx, field), field);
    }
    let candidates = if g.is_empty() {
        FREE_VALUES.iter().map(|&v| Scalar::from_i64(field, v)).collect()
    } else {
        match uni::roots(&g, field) {
            Some(r) => r,
            None => return false,
        }
    };
    for c in candidates {
        vals[idx] = c;
        if extend(basis, vals, idx, field) {
            return true;
        }
    }
    false
}

/// p with x_j = vals[j] for j > idx, as a polynomial in x_idx.
fn at_point(p: &Poly, vals: &[Scalar], idx: usize, field: Field) -> Uni {
    let mut out: Uni = Vec::new();
    for (e, c) in p.terms() {
        let mut v = c.clone();
        for (j, &x) in e.iter().enumerate().skip(idx + 1) {
            v = v.mul(&vals[j].pow(x as i64).expect("nonnegative power"));
        }
        let d = e[idx] as usize;
        if out.len() <= d {
            out.resize(d + 1, Scalar::zero(field));
        }
        out[d] = out[d].add(&v);
    }
    uni::trim(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;

    const F: Field = Field::Rational;

    fn p(s: &str) -> Poly {
        parse_poly(s, F, 3).unwrap().abelianize()
    }

    #[test]
    fn triangular_system() {
        let gens = [p("z1 - z2^2"), p("z2 + 1 + z3^2 - 4"), p("z3*z3 - 2*z3")];
        let sols = find_point(&gens, 3, F).unwrap();
        assert!(gens.iter().all(|g| {
            g.terms().fold(Scalar::zero(F), |acc, (e, c)| {
                let mut v = c.clone();
                for (j, &x) in e.iter().enumerate() {
                    v = v.mul(&sols[j].pow(x as i64).unwrap());
                }
                acc.add(&v)
            })
            .is_zero()
        }));
    }

    #[test]
    fn nonlinear_system() {
        // x1 = x2² + 1, x1 x2 = 2: x2³ + x2 − 2 = 0, so x2 = 1
        let gens = [p("z1 - z2^2 - 1"), p("z1*z2 - 2")];
        assert_eq!(find_point(&gens, 3, F).unwrap()[..2], [Scalar::from_i64(F, 2), Scalar::one(F)]);
        let basis = lex_basis(&gens).unwrap();
        assert_eq!(basis.len(), 2);
    }

    #[test]
    fn empty_and_free() {
        assert!(find_point(&[p("z1"), p("z1 - 1")], 3, F).is_none());
        assert_eq!(find_point(&[], 2, F).unwrap(), vec![Scalar::zero(F); 2]);
    }
}
