//! Exact certificates of strict positivity in finitely generated quadratic
//! modules.
//!
//! The crate computes explicit sum-of-squares multipliers witnessing that a
//! polynomial `f`, strictly positive on the non-negative set of a generator
//! list `g_1..g_s`, belongs to the quadratic module `qm(G)`, and it verifies
//! such certificates by exact rational arithmetic.
//!
//! The main entry points are [`putinar::certify`] and
//! [`putinar::verify_certificate`]; everything below them (interval
//! branch-and-bound bounds, multiplier construction, Gram-matrix SOS
//! decomposition) is exposed for direct use and testing.
//!
//! All core arithmetic is generic over the coefficient scalar through
//! [`scalar::Coeff`]; the solvers instantiate it with exact rationals
//! ([`Rat`]), while the numerical Gram search uses the `f64` instance.

pub mod scalar;

pub mod monomial;
pub mod parse;
pub mod poly;

pub mod interval;

pub mod bound;

pub mod sos;

pub mod averkov;
pub mod lasserre;
pub mod putinar;

pub mod error;

pub use error::Error;

/// Exact rational scalar used throughout the solvers.
pub type Rat = num_rational::BigRational;

/// Arbitrary-precision integer backing [`Rat`].
pub type Int = num_bigint::BigInt;

/// Sparse multivariate polynomial over the exact rationals.
pub type Poly = poly::Polynomial<Rat>;

/// Floating-point polynomial used by the numerical Gram stage and by
/// sampling heuristics.
pub type FPoly = poly::Polynomial<f64>;

/// Convenience constructor for a rational from an integer pair.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(Int::from(num), Int::from(den))
}

/// Convenience constructor for an integer rational.
pub fn rint(v: i64) -> Rat {
    Rat::from_integer(Int::from(v))
}
