//! Error type shared across the crate.

use thiserror::Error;

/// Everything that can go wrong while building or deciding equations.
///
/// All variants are data-only so results stay `Clone`-able and comparable in
/// tests.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A rational function whose zero/pole divisor is required to consist of
    /// rational points has an irreducible factor of degree ≥ 2.
    #[error("divisor of {func} does not split over the rationals")]
    NonSplitDivisor { func: String },

    /// The zero function was passed to an operation that needs f ≠ 0
    /// (divisors, orders, reciprocals).
    #[error("operation undefined for the zero function")]
    ZeroFunction,

    /// `1 − f` was requested for the constant function 1.
    #[error("1 - f is the zero function (f is constantly 1)")]
    ConstantOne,

    /// A constant function reached an operation defined only for nonconstant
    /// functions.
    #[error("operation undefined for constant functions: {context}")]
    ConstantFunction { context: String },

    /// Cross-ratio of a degenerate quadruple (a repeated point makes both a
    /// numerator and a denominator factor vanish).
    #[error("cross-ratio undefined for the given quadruple")]
    UndefinedCrossRatio,

    /// No Möbius involution satisfies the requested interchange conditions.
    #[error("no Möbius involution swaps the given points")]
    NoInvolution,

    /// A constructor that needs pairwise distinct points received a repeat.
    #[error("points must be pairwise distinct: {context}")]
    DuplicatePoints { context: String },

    /// A quadratic constructor was asked to take the value 1 at two points,
    /// but the function determined by the first condition does not satisfy
    /// the second.
    #[error("normalization conditions are inconsistent: {context}")]
    InconsistentNormalization { context: String },

    /// An argument exceeded the supported degree.
    #[error("degree {degree} exceeds the supported bound {bound}")]
    DegreeTooHigh { degree: usize, bound: usize },

    /// A section/constructor received a parameter at which it degenerates.
    #[error("degenerate parameter: {context}")]
    DegeneratePoint { context: String },

    /// The input needs a normalizing substitution before the identity
    /// applies, and the caller did not allow one.
    #[error("input is not invertible at infinity and auto-normalization is disabled")]
    NormalizationDisabled,

    /// The numeric sampler could not find an admissible sample point.
    #[error("sampler failed to find an admissible point after {attempts} attempts")]
    SamplerStarved { attempts: usize },

    /// A numeric evaluation came too close to a singularity to be trusted.
    #[error("evaluation point too close to a singularity: {context}")]
    NearSingular { context: String },

    /// Text input could not be parsed.
    #[error("parse error: {message}")]
    Parse { message: String },

    /// Division by the zero polynomial / zero rational function.
    #[error("division by zero {context}")]
    DivisionByZero { context: String },
}

impl Error {
    pub fn parse(message: impl Into<String>) -> Self {
        Error::Parse {
            message: message.into(),
        }
    }
}
