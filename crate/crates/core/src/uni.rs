//! Univariate polynomials over a field, low degree first, without trailing
//! zeros.
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};

use crate::algebra::{Coeff, Field, Scalar};

pub type Uni = Vec<Scalar>;

pub fn trim(mut p: Uni) -> Uni {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

pub fn deg(p: &Uni) -> Option<usize> {
    p.len().checked_sub(1)
}

pub fn x(field: Field) -> Uni {
    vec![Scalar::zero(field), Scalar::one(field)]
}

pub fn add(a: &Uni, b: &Uni, field: Field) -> Uni {
    let n = a.len().max(b.len());
    let z = Scalar::zero(field);
    trim((0..n).map(|i| a.get(i).unwrap_or(&z).add(b.get(i).unwrap_or(&z))).collect())
}

pub fn sub(a: &Uni, b: &Uni, field: Field) -> Uni {
    add(a, &b.iter().map(|c| c.neg()).collect(), field)
}

pub fn mul(a: &Uni, b: &Uni, field: Field) -> Uni {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Scalar::zero(field); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].add(&x.mul(y));
        }
    }
    trim(out)
}

/// p(q).
pub fn compose(p: &Uni, q: &Uni, field: Field) -> Uni {
    let mut acc = Vec::new();
    for c in p.iter().rev() {
        acc = add(&mul(&acc, q, field), &vec![c.clone()], field);
    }
    acc
}

/// Division by a monic polynomial.
pub fn divrem(a: &Uni, b: &Uni, field: Field) -> (Uni, Uni) {
    let db = b.len() - 1;
    let mut r = a.clone();
    if r.len() <= db {
        return (Vec::new(), r);
    }
    let mut q = vec![Scalar::zero(field); r.len() - db];
    for k in (0..q.len()).rev() {
        let c = r[k + db].clone();
        if c.is_zero() {
            continue;
        }
        for (i, bi) in b.iter().enumerate() {
            r[k + i] = r[k + i].sub(&c.mul(bi));
        }
        q[k] = c;
    }
    (trim(q), trim(r))
}

pub fn rem(a: &Uni, b: &Uni, field: Field) -> Uni {
    divrem(a, b, field).1
}

pub fn monic(p: &Uni) -> Uni {
    match p.last().and_then(|c| c.inv()) {
        Some(inv) => p.iter().map(|c| c.mul(&inv)).collect(),
        None => p.clone(),
    }
}

/// Monic gcd; the gcd of two zeros is zero.
pub fn gcd(a: &Uni, b: &Uni, field: Field) -> Uni {
    let (mut a, mut b) = (trim(a.clone()), trim(b.clone()));
    while !b.is_empty() {
        let r = rem(&a, &monic(&b), field);
        a = b;
        b = r;
    }
    monic(&a)
}

pub fn eval(p: &Uni, x: &Scalar, field: Field) -> Scalar {
    p.iter().rev().fold(Scalar::zero(field), |acc, c| acc.mul(x).add(c))
}

/// Largest modulus whose residues are enumerated when looking for roots.
const ENUMERATED_PRIME: u64 = 1 << 16;
/// Largest absolute value factored by trial division.
const TRIAL_LIMIT: u64 = 1 << 40;

/// Roots of `p` in the ground field, without multiplicity. Rational roots
/// come from the rational root test; `None` when the coefficients are too
/// large to factor, or the prime too large to enumerate.
pub fn roots(p: &Uni, field: Field) -> Option<Vec<Scalar>> {
    let p = trim(p.clone());
    match deg(&p) {
        None => return None,
        Some(0) => return Some(Vec::new()),
        Some(1) => return Some(vec![p[0].neg().div(&p[1])?]),
        _ => {}
    }
    let mut found = Vec::new();
    match field {
        Field::Prime(q) => {
            if q > ENUMERATED_PRIME {
                return None;
            }
            for v in 0..q {
                let x = Scalar::from_i64(field, v as i64);
                if eval(&p, &x, field).is_zero() {
                    found.push(x);
                }
            }
        }
        Field::Rational => {
            let lead = p.iter().position(|c| !c.is_zero())?;
            if lead > 0 {
                found.push(Scalar::zero(field));
            }
            let ints = integer_coefficients(&p[lead..])?;
            let nums = divisors(ints.first()?)?;
            let dens = divisors(ints.last()?)?;
            for a in &nums {
                for b in &dens {
                    if a.gcd(b) != BigInt::one() {
                        continue;
                    }
                    for sign in [1, -1] {
                        let x = Scalar::from_ratio(field, &(a * sign), b).ok()?;
                        if eval(&p, &x, field).is_zero() {
                            found.push(x);
                        }
                    }
                }
            }
        }
    }
    Some(found)
}

fn integer_coefficients(p: &[Scalar]) -> Option<Vec<BigInt>> {
    let rats: Vec<_> = p.iter().map(|c| c.as_rational().cloned()).collect::<Option<_>>()?;
    let den = rats.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    Some(rats.iter().map(|r| r.numer() * (&den / r.denom())).collect())
}

fn divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let n = n.abs().to_u64().filter(|&n| n != 0 && n <= TRIAL_LIMIT)?;
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            small.push(BigInt::from(d));
            if d * d != n {
                large.push(BigInt::from(n / d));
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    Some(small)
}
