//! Exact arithmetic in the free algebra K⟨z₁,…,zₙ⟩ over the supported
//! coefficient rings, plus the commutative quotient K[x₁,…,xₙ].

use std::fmt::Debug;

mod comm;
mod laurent;
mod poly;
mod scalar;
mod word;

pub use comm::{CommPoly, CommRing};
pub use laurent::{Laurent, LaurentRing};
pub use poly::{Degree, FreePoly};
pub use scalar::{Field, Scalar};
pub use word::Word;

/// A commutative coefficient ring with exact arithmetic.
///
/// Values do not carry enough information to build a zero or one on their
/// own (the prime, the number of torus parameters), so constructors take the
/// ring descriptor.
pub trait Coeff: Clone + PartialEq + Eq + Debug + Send + Sync {
    type Ring: Clone + PartialEq + Eq + Debug + Send + Sync;

    fn zero(ring: &Self::Ring) -> Self;
    fn one(ring: &Self::Ring) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn from_scalar(ring: &Self::Ring, s: &Scalar) -> Self;
    fn ground_field(ring: &Self::Ring) -> Field;

    fn add_assign(&mut self, other: &Self) {
        *self = self.add(other);
    }
}

/// Upper bound on the size of any single term table, read once from
/// `FREELIN_MAX_TERMS` (default 10⁶).
pub fn max_terms() -> usize {
    static LIMIT: std::sync::LazyLock<usize> = std::sync::LazyLock::new(|| {
        std::env::var("FREELIN_MAX_TERMS")
            .ok()
            .and_then(|v| v.parse().ok())
            .filter(|&v: &usize| v > 0)
            .unwrap_or(1_000_000)
    });
    *LIMIT
}

pub(crate) fn check_terms(len: usize) -> crate::Result<()> {
    let limit = max_terms();
    if len > limit {
        Err(crate::Error::TermLimitExceeded(limit))
    } else {
        Ok(())
    }
}
