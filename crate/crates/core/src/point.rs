//! Points of the rational projective line and exact cross-ratios.

use crate::error::Error;
use crate::Q;
use num_traits::{One, Zero};
use std::fmt;

/// A point of ℙ¹(ℚ): a rational number or the point at infinity.
///
/// The derived order puts all finite points first (in rational order) and
/// infinity last, which gives every point set a deterministic enumeration.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ProjPoint {
    Finite(Q),
    Infinity,
}

impl ProjPoint {
    pub fn finite(x: Q) -> Self {
        ProjPoint::Finite(x)
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, ProjPoint::Infinity)
    }

    pub fn as_finite(&self) -> Option<&Q> {
        match self {
            ProjPoint::Finite(x) => Some(x),
            ProjPoint::Infinity => None,
        }
    }

    pub fn zero() -> Self {
        ProjPoint::Finite(Q::zero())
    }

    pub fn one() -> Self {
        ProjPoint::Finite(Q::one())
    }
}

impl From<Q> for ProjPoint {
    fn from(x: Q) -> Self {
        ProjPoint::Finite(x)
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProjPoint::Finite(x) => write!(f, "{x}"),
            ProjPoint::Infinity => write!(f, "inf"),
        }
    }
}

/// How one difference `x − y` behaves projectively.
enum Factor {
    /// `x == y` (two equal finite points, or both infinite).
    Zero,
    /// Exactly one of the two points is infinite.
    Inf,
    /// Both finite and distinct: the actual difference.
    Finite(Q),
}

fn classify(x: &ProjPoint, y: &ProjPoint) -> Factor {
    match (x, y) {
        (ProjPoint::Infinity, ProjPoint::Infinity) => Factor::Zero,
        (ProjPoint::Infinity, _) | (_, ProjPoint::Infinity) => Factor::Inf,
        (ProjPoint::Finite(a), ProjPoint::Finite(b)) => {
            if a == b {
                Factor::Zero
            } else {
                Factor::Finite(a - b)
            }
        }
    }
}

/// Exact cross-ratio `[a, b; c, d] = (a−b)(c−d) / ((c−b)(a−d))` on ℙ¹(ℚ).
///
/// Infinite and coincident arguments are resolved by factor counting: each
/// difference is a zero, a pole, or a finite value, and the total order of
/// vanishing decides between `0`, `∞`, and the product of the finite factors
/// (poles from single infinite points cancel in pairs because every argument
/// appears in exactly one numerator and one denominator factor). The
/// cross-ratio is undefined only when zero factors survive in both numerator
/// and denominator.
pub fn cross_ratio(
    a: &ProjPoint,
    b: &ProjPoint,
    c: &ProjPoint,
    d: &ProjPoint,
) -> Result<ProjPoint, Error> {
    let num = [classify(a, b), classify(c, d)];
    let den = [classify(c, b), classify(a, d)];
    let count = |fs: &[Factor; 2]| {
        let zeros = fs.iter().filter(|f| matches!(f, Factor::Zero)).count() as i32;
        let infs = fs.iter().filter(|f| matches!(f, Factor::Inf)).count() as i32;
        (zeros, infs)
    };
    let (zn, inum) = count(&num);
    let (zd, iden) = count(&den);
    if zn > 0 && zd > 0 {
        return Err(Error::UndefinedCrossRatio);
    }
    let order = zn + iden - zd - inum;
    if order > 0 {
        return Ok(ProjPoint::Finite(Q::zero()));
    }
    if order < 0 {
        return Ok(ProjPoint::Infinity);
    }
    debug_assert!(zn == 0 && zd == 0, "zero factors force a nonzero order");
    let mut value = Q::one();
    for f in &num {
        if let Factor::Finite(v) = f {
            value *= v;
        }
    }
    for f in &den {
        if let Factor::Finite(v) = f {
            value /= v;
        }
    }
    Ok(ProjPoint::Finite(value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qi;

    fn fp(n: i64) -> ProjPoint {
        ProjPoint::Finite(qi(n))
    }

    #[test]
    fn generic_quadruple() {
        // (0−1)(2−3)/((2−1)(0−3)) = 1/(−3) = −1/3
        let r = cross_ratio(&fp(0), &fp(1), &fp(2), &fp(3)).unwrap();
        assert_eq!(r, ProjPoint::Finite(crate::q(-1, 3)));
    }

    #[test]
    fn single_infinity_cancels() {
        // [a, y; c, ∞] = (a−y)/(c−y)
        let r = cross_ratio(&fp(5), &fp(1), &fp(3), &ProjPoint::Infinity).unwrap();
        assert_eq!(r, ProjPoint::Finite(qi(2)));
        let r = cross_ratio(&fp(0), &fp(1), &fp(2), &ProjPoint::Infinity).unwrap();
        assert_eq!(r, ProjPoint::Finite(qi(-1)));
        // [∞, b; c, d] = (c−d)/(c−b) = (3−7)/(3−1) = −2
        let r = cross_ratio(&ProjPoint::Infinity, &fp(1), &fp(3), &fp(7)).unwrap();
        assert_eq!(r, ProjPoint::Finite(qi(-2)));
    }

    #[test]
    fn coincidences() {
        // Repeated point across numerator and denominator evaluates directly:
        // r(a,b,a,d) = 1 after symbolic cancellation.
        assert_eq!(
            cross_ratio(&fp(2), &fp(5), &fp(2), &fp(9)).unwrap(),
            ProjPoint::Finite(qi(1))
        );
        // a == b puts a zero in the numerator only.
        assert_eq!(
            cross_ratio(&fp(2), &fp(2), &fp(3), &fp(4)).unwrap(),
            ProjPoint::Finite(qi(0))
        );
        // a == d puts a zero in the denominator only.
        assert_eq!(
            cross_ratio(&fp(2), &fp(3), &fp(4), &fp(2)).unwrap(),
            ProjPoint::Infinity
        );
        // Two coincidences on the same side still evaluate (0·0 over finite).
        assert_eq!(
            cross_ratio(&fp(2), &fp(2), &fp(3), &fp(3)).unwrap(),
            ProjPoint::Finite(qi(0))
        );
        // Zeros on both sides are a genuine 0/0.
        assert!(matches!(
            cross_ratio(&fp(2), &fp(5), &fp(2), &fp(2)),
            Err(Error::UndefinedCrossRatio)
        ));
    }

    #[test]
    fn ordering_puts_infinity_last() {
        let mut pts = vec![ProjPoint::Infinity, fp(3), fp(-1)];
        pts.sort();
        assert_eq!(pts, vec![fp(-1), fp(3), ProjPoint::Infinity]);
    }
}
