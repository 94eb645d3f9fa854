//! Constructors for the quadratic rational functions attached to point
//! configurations on ℙ¹: a quadratic is pinned down by two zeros, two poles
//! (∞ allowed anywhere), and a normalization point where it takes the value
//! 1.  Each constructor receives *two* candidate normalization points and
//! verifies at runtime that they agree — the consistency is a geometric fact
//! about the configuration, so a mismatch signals caller misuse.

use crate::error::Error;
use crate::mobius::{five_point, involution_swapping};
use crate::point::ProjPoint;
use crate::poly::Poly;
use crate::ratfunc::RatFunc;
use crate::Q;

use num_traits::{One, Zero};

/// Degree-2 function with the given zeros and poles (multisets, ∞ allowed),
/// scaled so its value at every point of `units` is exactly 1.
pub fn quadratic_from_divisor(
    zeros: &[ProjPoint; 2],
    poles: &[ProjPoint; 2],
    units: &[ProjPoint],
) -> Result<RatFunc, Error> {
    for z in zeros {
        if poles.contains(z) {
            return Err(Error::DuplicatePoints {
                context: format!("quadratic with coinciding zero and pole at {z}"),
            });
        }
    }
    for u in units {
        if zeros.contains(u) || poles.contains(u) {
            return Err(Error::InconsistentNormalization {
                context: format!("normalization point {u} is a zero or pole"),
            });
        }
    }
    let part = |pts: &[ProjPoint; 2]| -> Poly {
        let finite: Vec<Q> = pts
            .iter()
            .filter_map(|p| p.as_finite().cloned())
            .collect();
        Poly::from_roots(&finite)
    };
    let f0 = RatFunc::new(part(zeros), part(poles))?;
    let mut units = units.iter();
    let first = units.next().ok_or_else(|| Error::InconsistentNormalization {
        context: "quadratic constructor needs at least one normalization point".into(),
    })?;
    let scale = match f0.eval_proj(first) {
        ProjPoint::Finite(v) if !v.is_zero() => Q::one() / v,
        other => {
            return Err(Error::InconsistentNormalization {
                context: format!("value {other} at normalization point {first}"),
            });
        }
    };
    let f = &RatFunc::constant(scale) * &f0;
    for u in units {
        if f.eval_proj(u) != ProjPoint::Finite(Q::one()) {
            return Err(Error::InconsistentNormalization {
                context: format!("quadratic is not 1 at second normalization point {u}"),
            });
        }
    }
    Ok(f)
}

/// q with zeros x1, x2, poles x3, x4, equal to 1 at x5 — and, as a built-in
/// consistency check, at the image of x5 under the involution swapping
/// x1 ↔ x2 and x3 ↔ x4.
pub fn quad_pair(
    x1: &ProjPoint,
    x2: &ProjPoint,
    x3: &ProjPoint,
    x4: &ProjPoint,
    x5: &ProjPoint,
) -> Result<RatFunc, Error> {
    let partner = five_point(x1, x2, x3, x4, x5)?;
    quadratic_from_divisor(
        &[x1.clone(), x2.clone()],
        &[x3.clone(), x4.clone()],
        &[x5.clone(), partner],
    )
}

/// q with a double zero at x1 and poles x2, x3, equal to 1 at the images of
/// x5 and x4 under the involutions swapping x1 with x4 resp. x5 (and x2 with
/// x3).
pub fn quad_double(
    x1: &ProjPoint,
    x2: &ProjPoint,
    x3: &ProjPoint,
    ambient: &[ProjPoint; 2],
) -> Result<RatFunc, Error> {
    let [x4, x5] = ambient;
    let u1 = five_point(x1, x4, x2, x3, x5)?;
    let u2 = five_point(x1, x5, x2, x3, x4)?;
    quadratic_from_divisor(
        &[x1.clone(), x1.clone()],
        &[x2.clone(), x3.clone()],
        &[u1, u2],
    )
}

/// q with zeros x1, x2 and poles x3, x4, equal to 1 at the images of the
/// fifth point under the two cross involutions x1 ↔ x3 / x2 ↔ x4 and
/// x1 ↔ x4 / x2 ↔ x3.
pub fn quad_twopair(
    x1: &ProjPoint,
    x2: &ProjPoint,
    x3: &ProjPoint,
    x4: &ProjPoint,
    fifth: &[ProjPoint; 1],
) -> Result<RatFunc, Error> {
    let [x5] = fifth;
    let u1 = five_point(x1, x3, x2, x4, x5)?;
    let u2 = five_point(x1, x4, x2, x3, x5)?;
    quadratic_from_divisor(
        &[x1.clone(), x2.clone()],
        &[x3.clone(), x4.clone()],
        &[u1, u2],
    )
}

/// The quadratic invariant under the involution a_i ↦ b_i: zeros a1, b1,
/// poles a2, b2, value 1 at a3 and b3.
pub fn quad_det(
    a1: &ProjPoint,
    a2: &ProjPoint,
    a3: &ProjPoint,
    b1: &ProjPoint,
    b2: &ProjPoint,
    b3: &ProjPoint,
) -> Result<RatFunc, Error> {
    quadratic_from_divisor(
        &[a1.clone(), b1.clone()],
        &[a2.clone(), b2.clone()],
        &[a3.clone(), b3.clone()],
    )
}

/// Check q ∘ τ = q symbolically for the involution τ swapping a1 ↔ b1 and
/// a2 ↔ b2 (used by tests and by callers wanting the determinant-style
/// symmetry certified).
pub fn invariant_under_swap(
    q: &RatFunc,
    a1: &ProjPoint,
    b1: &ProjPoint,
    a2: &ProjPoint,
    b2: &ProjPoint,
) -> Result<bool, Error> {
    let tau = involution_swapping(a1, b1, a2, b2)?;
    let (al, be, ga, de) = tau.entries();
    let pulled = q.compose_linear_fractional(al, be, ga, de)?;
    Ok(pulled == *q)
}
