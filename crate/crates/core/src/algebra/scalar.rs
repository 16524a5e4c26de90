//! Exact ground-field scalars: arbitrary-precision rationals and prime-field
//! residues.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::Coeff;
use crate::error::{invalid, Result};

/// The ground field K.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Field {
    Rational,
    Prime(u64),
}

impl Field {
    /// The prime field of order `p`; rejects composite moduli.
    pub fn prime(p: u64) -> Result<Field> {
        if !is_prime(p) {
            return invalid(format!("{p} is not prime"));
        }
        Ok(Field::Prime(p))
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            Field::Rational => 0,
            Field::Prime(p) => *p,
        }
    }

    /// Parses `Q` or `Fp:<p>`.
    pub fn parse(s: &str) -> Result<Field> {
        match s {
            "Q" => Ok(Field::Rational),
            _ => match s.strip_prefix("Fp:") {
                Some(p) => {
                    let p: u64 = p
                        .parse()
                        .map_err(|_| crate::Error::InvalidInput(format!("bad prime in {s:?}")))?;
                    Field::prime(p)
                }
                None => invalid(format!("unknown field {s:?} (expected Q or Fp:<p>)")),
            },
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => write!(f, "Q"),
            Field::Prime(p) => write!(f, "Fp:{p}"),
        }
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// An element of K in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Q(BigRational),
    Fp { value: u64, p: u64 },
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, p);
        }
        b = mul_mod(b, b, p);
        e >>= 1;
    }
    acc
}

impl Scalar {
    pub fn zero(field: Field) -> Scalar {
        Scalar::from_i64(field, 0)
    }

    pub fn one(field: Field) -> Scalar {
        Scalar::from_i64(field, 1)
    }

    pub fn from_i64(field: Field, v: i64) -> Scalar {
        match field {
            Field::Rational => Scalar::Q(BigRational::from_integer(BigInt::from(v))),
            Field::Prime(p) => Scalar::Fp {
                value: (v as i128).rem_euclid(p as i128) as u64,
                p,
            },
        }
    }

    pub fn from_bigint(field: Field, v: &BigInt) -> Scalar {
        match field {
            Field::Rational => Scalar::Q(BigRational::from_integer(v.clone())),
            Field::Prime(p) => {
                let r = v.mod_floor(&BigInt::from(p));
                Scalar::Fp {
                    value: r.to_u64().expect("residue fits"),
                    p,
                }
            }
        }
    }

    /// `num/den` in `field`; fails when `den` vanishes in the field.
    pub fn from_ratio(field: Field, num: &BigInt, den: &BigInt) -> Result<Scalar> {
        if den.is_zero() {
            return invalid("zero denominator");
        }
        match field {
            Field::Rational => Ok(Scalar::Q(BigRational::new(num.clone(), den.clone()))),
            Field::Prime(_) => {
                let d = Scalar::from_bigint(field, den);
                match d.inv() {
                    Some(di) => Ok(Scalar::from_bigint(field, num).mul(&di)),
                    None => invalid("denominator vanishes in the prime field"),
                }
            }
        }
    }

    pub fn rational(r: BigRational) -> Scalar {
        Scalar::Q(r)
    }

    pub fn field(&self) -> Field {
        match self {
            Scalar::Q(_) => Field::Rational,
            Scalar::Fp { p, .. } => Field::Prime(*p),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Q(r) => r.is_one(),
            Scalar::Fp { value, .. } => *value == 1,
        }
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inv(&self) -> Option<Scalar> {
        if Coeff::is_zero(self) {
            return None;
        }
        Some(match self {
            Scalar::Q(r) => Scalar::Q(r.recip()),
            Scalar::Fp { value, p } => Scalar::Fp {
                value: pow_mod(*value, p - 2, *p),
                p: *p,
            },
        })
    }

    pub fn div(&self, other: &Scalar) -> Option<Scalar> {
        other.inv().map(|i| self.mul(&i))
    }

    /// Integer power; negative exponents invert.
    pub fn pow(&self, e: i64) -> Option<Scalar> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = Scalar::one(self.field());
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Some(acc)
    }

    /// Canonical string form: `p/q` for rationals, the residue for `Fp`.
    pub fn to_canonical_string(&self) -> String {
        match self {
            Scalar::Q(r) => format!("{}/{}", r.numer(), r.denom()),
            Scalar::Fp { value, .. } => value.to_string(),
        }
    }

    /// Parses `p/q`, `p`, or a residue, in `field`.
    pub fn parse(field: Field, s: &str) -> Result<Scalar> {
        let s = s.trim();
        let (num, den) = match s.split_once('/') {
            Some((a, b)) => (a.trim(), b.trim()),
            None => (s, "1"),
        };
        let num: BigInt = num
            .parse()
            .map_err(|_| crate::Error::InvalidInput(format!("bad number {s:?}")))?;
        let den: BigInt = den
            .parse()
            .map_err(|_| crate::Error::InvalidInput(format!("bad number {s:?}")))?;
        if field == Field::Rational && den.is_negative() {
            return invalid(format!("denominator must be positive in {s:?}"));
        }
        Scalar::from_ratio(field, &num, &den)
    }

    /// Parses a strictly canonical rational string `p/q` (q > 0, lowest terms).
    pub fn parse_canonical_rational(s: &str) -> Result<Scalar> {
        let (a, b) = s
            .split_once('/')
            .ok_or_else(|| crate::Error::InvalidInput(format!("{s:?} is not of the form p/q")))?;
        let num: BigInt = a
            .parse()
            .map_err(|_| crate::Error::InvalidInput(format!("bad numerator in {s:?}")))?;
        let den: BigInt = b
            .parse()
            .map_err(|_| crate::Error::InvalidInput(format!("bad denominator in {s:?}")))?;
        if !den.is_positive() {
            return invalid(format!("denominator must be positive in {s:?}"));
        }
        if !num.gcd(&den).is_one() {
            return invalid(format!("{s:?} is not in lowest terms"));
        }
        Ok(Scalar::Q(BigRational::new_raw(num, den)))
    }

    /// The rational value, if this is a rational scalar.
    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Q(r) => Some(r),
            Scalar::Fp { .. } => None,
        }
    }

    /// Small integer value when the scalar is an integer fitting in `i64`.
    pub fn to_i64(&self) -> Option<i64> {
        match self {
            Scalar::Q(r) if r.is_integer() => r.numer().to_i64(),
            Scalar::Q(_) => None,
            Scalar::Fp { value, .. } => i64::try_from(*value).ok(),
        }
    }

    fn check_same(&self, other: &Scalar) {
        if self.field() != other.field() {
            panic!("scalar field mismatch: {} vs {}", self.field(), other.field());
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Q(r) => write!(f, "{r}"),
            Scalar::Fp { value, .. } => write!(f, "{value}"),
        }
    }
}

impl Coeff for Scalar {
    type Ring = Field;

    fn zero(ring: &Field) -> Self {
        Scalar::zero(*ring)
    }

    fn one(ring: &Field) -> Self {
        Scalar::one(*ring)
    }

    fn is_zero(&self) -> bool {
        match self {
            Scalar::Q(r) => r.is_zero(),
            Scalar::Fp { value, .. } => *value == 0,
        }
    }

    fn add(&self, other: &Self) -> Self {
        self.check_same(other);
        match (self, other) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a + b),
            (Scalar::Fp { value: a, p }, Scalar::Fp { value: b, .. }) => Scalar::Fp {
                value: ((*a as u128 + *b as u128) % *p as u128) as u64,
                p: *p,
            },
            _ => unreachable!(),
        }
    }

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    fn mul(&self, other: &Self) -> Self {
        self.check_same(other);
        match (self, other) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a * b),
            (Scalar::Fp { value: a, p }, Scalar::Fp { value: b, .. }) => Scalar::Fp {
                value: mul_mod(*a, *b, *p),
                p: *p,
            },
            _ => unreachable!(),
        }
    }

    fn neg(&self) -> Self {
        match self {
            Scalar::Q(a) => Scalar::Q(-a),
            Scalar::Fp { value, p } => Scalar::Fp {
                value: (p - value) % p,
                p: *p,
            },
        }
    }

    fn from_scalar(_ring: &Field, s: &Scalar) -> Self {
        s.clone()
    }

    fn ground_field(ring: &Field) -> Field {
        *ring
    }
}
