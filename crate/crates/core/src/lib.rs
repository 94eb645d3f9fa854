//! Exact engine for functional equations of the single-valued polylogarithms
//! up to weight 4.
//!
//! The objects live over the rational numbers: split rational functions in one
//! variable `t`, their divisors, and tensor spaces built on the ℚ-vector space
//! `A` spanned by affine rational points (with `[∞] = 0`). A formal sum
//! `Σ nᵢ[φᵢ]` at weight `n` is a functional equation of the weight-`n`
//! single-valued polylogarithm exactly when its cocycle image `J_n` vanishes;
//! this crate decides that exactly, produces certified equations from several
//! constructive generators, reduces weight-4 sums to combinations of special
//! quadratic arguments, and cross-validates everything numerically with
//! arbitrary-precision complex arithmetic.
//!
//! Modules mirror the pipeline:
//! - [`ratfunc`], [`poly`], [`point`]: split rational functions, divisors,
//!   orders of vanishing;
//! - [`mobius`], [`quad`]: cross-ratios, involutions, and the normalized
//!   quadratic constructors used by the weight-4 identities;
//! - [`tensor`]: symmetric powers, the quotient tensors with their canonical
//!   form, and point derivations;
//! - [`cocycle`]: formal sums, the `J_n` maps, the decision procedure and its
//!   dual/valuation reformulations;
//! - [`bloch`]: the weight-2 Bloch group head of the weight-4 theory
//!   (five-term relations, `K_4`, `L_4`);
//! - [`gen`]: equation generators and the weight-4 reduction solver;
//! - [`numeric`]: the arbitrary-precision numeric oracle.

pub mod arith;
pub mod bloch;
pub mod cocycle;
pub mod error;
pub mod gen;
pub mod lincomb;
pub mod mobius;
pub mod numeric;
pub mod point;
pub mod poly;
pub mod quad;
pub mod ratfunc;
pub mod solve;
pub mod tensor;
pub mod textio;
pub mod zagier;

/// Exact rational scalar used everywhere.
pub type Q = num_rational::BigRational;

pub use error::Error;
pub use point::ProjPoint;
pub use ratfunc::RatFunc;

/// Convenience constructor for small rational constants.
pub fn q(n: i64, d: i64) -> Q {
    use num_bigint::BigInt;
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Convenience constructor for small integer constants.
pub fn qi(n: i64) -> Q {
    use num_bigint::BigInt;
    Q::from_integer(BigInt::from(n))
}
