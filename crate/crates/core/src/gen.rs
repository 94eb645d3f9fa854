//! Constructive generators of polylogarithm functional equations and the
//! weight-4 reduction to special quadratic arguments.
//!
//! This module produces certified inputs for the decision maps: residual sums
//! for the weight-2 and weight-3 decomposition identities, five-term
//! instances, the named weight-4 generator vectors, and the reduction of a
//! weight-4 symbol to a combination of degree-≤ 2 arguments. It also hosts
//! the seeded samplers that draw random admissible rational functions for
//! property tests.

use crate::cocycle::{j_map, FormalSum, JImage};
use crate::error::Error;
use crate::mobius::five_point;
use crate::point::{cross_ratio, ProjPoint};
use crate::poly::Poly;
use crate::qi;
use crate::quad::{quad_det, quad_double, quad_pair};
use crate::solve::{vec_mod_p, MemberSpan, ModSpan, SpanSolver, MEMBERSHIP_PRIMES};
use crate::tensor::{sh_reduce, Mset, ShTensor};
use crate::Q;
use crate::RatFunc;
use num_traits::{One, Zero};
use rand::Rng;
use std::collections::BTreeMap;

// ---------------------------------------------------------------------------
// Samplers
// ---------------------------------------------------------------------------

/// A small random rational: integers most of the time, occasional halves and
/// thirds to exercise non-integer arithmetic.
pub fn random_point<R: Rng + ?Sized>(rng: &mut R) -> Q {
    match rng.gen_range(0u8..10) {
        0 => Q::new(rng.gen_range(-9i64..=9).into(), 2.into()),
        1 => Q::new(rng.gen_range(-8i64..=8).into(), 3.into()),
        _ => qi(rng.gen_range(-6i64..=6)),
    }
}

/// Draw a non-constant rational function `f` of degree ≤ `max_degree` such
/// that both `f` and `1 − f` factor into rational linear terms.
///
/// Construction: choose the zero sets of `f` and of `1 − f` freely as small
/// integers, together with two non-zero scalars; the common denominator is
/// then forced, and the draw is rejected unless it splits over ℚ. The
/// rejection loop is cheap (rational-root extraction on small polynomials)
/// and terminates quickly for degrees up to 4.
pub fn random_split_function<R: Rng + ?Sized>(rng: &mut R, max_degree: usize) -> RatFunc {
    assert!((1..=4).contains(&max_degree));
    loop {
        let da = rng.gen_range(1..=max_degree);
        let dc = rng.gen_range(0..=max_degree);
        let a_roots: Vec<Q> = (0..da).map(|_| qi(rng.gen_range(-5i64..=5))).collect();
        let c_roots: Vec<Q> = (0..dc).map(|_| qi(rng.gen_range(-5i64..=5))).collect();
        let lam = qi(*[-3i64, -2, -1, 1, 2, 3].get(rng.gen_range(0..6)).unwrap());
        let mu = qi(*[-3i64, -2, -1, 1, 2, 3].get(rng.gen_range(0..6)).unwrap());
        let a = Poly::from_roots(&a_roots).scale(&lam);
        let c = Poly::from_roots(&c_roots).scale(&mu);
        let d = &a + &c;
        if d.is_zero() {
            continue;
        }
        let (_, cofactor) = d.rational_roots();
        if cofactor.degree() != Some(0) {
            continue;
        }
        let f = RatFunc::new(a, d).expect("denominator is non-zero");
        if f.is_constant() {
            continue;
        }
        debug_assert!(f.divisor().is_ok());
        debug_assert!(f.one_minus().unwrap().divisor().is_ok());
        return f;
    }
}

/// Linear function with a zero at `a`, normalized to 1 at `b`:
/// `(t − a)/(b − a)`.
pub fn scaled_shift(a: &Q, b: &Q) -> Result<RatFunc, Error> {
    if a == b {
        return Err(Error::DegeneratePoint {
            context: format!("zero and unit point coincide at {a}"),
        });
    }
    RatFunc::new(
        Poly::new(vec![-a.clone(), Q::one()]),
        Poly::new(vec![b - a]),
    )
}

/// Möbius function with a zero at `a` and a pole at `b`: `(t − a)/(t − b)`.
pub fn pole_shift(a: &Q, b: &Q) -> Result<RatFunc, Error> {
    if a == b {
        return Err(Error::DegeneratePoint {
            context: format!("zero and pole coincide at {a}"),
        });
    }
    RatFunc::new(
        Poly::new(vec![-a.clone(), Q::one()]),
        Poly::new(vec![-b.clone(), Q::one()]),
    )
}

/// The Möbius function `((t − a)(c − b)) / ((t − b)(c − a))`: zero at `a`,
/// pole at `b`, value 1 at `c`.  Requires three distinct points.
pub fn mobius_unit(a: &Q, b: &Q, c: &Q) -> Result<RatFunc, Error> {
    if a == b || b == c || a == c {
        return Err(Error::DuplicatePoints {
            context: format!("Möbius through ({a}, {b}, {c})"),
        });
    }
    RatFunc::new(
        Poly::new(vec![-a.clone(), Q::one()]).scale(&(c - b)),
        Poly::new(vec![-b.clone(), Q::one()]).scale(&(c - a)),
    )
}

/// The quadratic `((t − a)(t − b)) / ((d − a)(d − b))`: zeros `a`, `b`
/// (coincidence allowed), double pole at ∞, value 1 at `d` (and hence also
/// at `a + b − d`).
pub fn paired_product(a: &Q, b: &Q, d: &Q) -> Result<RatFunc, Error> {
    if d == a || d == b {
        return Err(Error::DegeneratePoint {
            context: format!("unit point {d} coincides with a zero"),
        });
    }
    RatFunc::new(
        &Poly::new(vec![-a.clone(), Q::one()]) * &Poly::new(vec![-b.clone(), Q::one()]),
        Poly::new(vec![(d - a) * (d - b)]),
    )
}

/// The quadratic `((t − b)² z(1 − z)) / ((t − a)(a − b))`: double zero at
/// `b`, simple pole at `a`, taking the value 1 at `(a − bz)/(1 − z)` and at
/// `(a − b + bz)/z`.  Requires `a ≠ b` and `z ∉ {0, 1}`.
pub fn double_root_ratio(a: &Q, b: &Q, z: &Q) -> Result<RatFunc, Error> {
    if a == b {
        return Err(Error::DegeneratePoint {
            context: format!("zero and pole coincide at {a}"),
        });
    }
    if z.is_zero() || z.is_one() {
        return Err(Error::DegeneratePoint {
            context: format!("scale parameter {z} collapses the function"),
        });
    }
    let shift = Poly::new(vec![-b.clone(), Q::one()]);
    RatFunc::new(
        (&shift * &shift).scale(&(z * (Q::one() - z))),
        Poly::new(vec![-a.clone(), Q::one()]).scale(&(a - b)),
    )
}

// ---------------------------------------------------------------------------
// Weight-2 and weight-3 decompositions
// ---------------------------------------------------------------------------

/// Weight-2 decomposition residual:
/// `[f] − Σ_{a,b finite} ψ_a(f) ψ_b(1−f) [(t−a)/(b−a)]`.
///
/// The summand at a common pole `a = b` contributes nothing (the wedge
/// `[a]∧[a]` is zero) and is skipped, so the residual always lies in the
/// weight-2 kernel: `verify` holds.
pub fn rogers_decompose(f: &RatFunc) -> Result<FormalSum, Error> {
    if f.is_constant() {
        return Err(Error::ConstantFunction {
            context: "weight-2 decomposition".into(),
        });
    }
    let complement = f.one_minus()?;
    let div_f = f.divisor()?.clone();
    let div_c = complement.divisor()?.clone();
    let mut terms = vec![(f.clone(), Q::one())];
    for (a, na) in div_f.finite_parts() {
        for (b, nb) in div_c.finite_parts() {
            if a == b {
                continue;
            }
            let coeff = Q::from_integer(((-na) * nb).into());
            terms.push((scaled_shift(a, b)?, coeff));
        }
    }
    Ok(FormalSum::new(2, terms))
}

/// Weight-3 decomposition residual:
/// `[g] + ½ Σ_{a,b ∈ div g, c ∈ div(1−g)} ψ_a(g) ψ_b(g) ψ_c(1−g) [m_{a,b,c}]`
/// where `g = f∘μ` is normalized to be invertible together with `1 − g` at
/// ∞, and `m_{a,b,c}` is the Möbius function with zero `a`, pole `b`, unit
/// `c`.
///
/// Degenerate index triples are resolved so that the unreduced images
/// telescope exactly: `a = b` and `c = b` contribute zero and are dropped;
/// `c = a` (a common pole) is replaced by the antisymmetric pair
/// `[(t−a)/(t−b)] − [(t−b)/(t−a)]`, whose image is the collision value
/// `([a]−[b])²⊗([a]−[b])`.  `verify` holds on the result.
///
/// When `f` or `1 − f` fails to be invertible at ∞ the decomposition only
/// applies after a substitution; with `auto_normalize` the function is
/// precomposed with `μ(t) = c₀ + 1/t` for the smallest non-negative integer
/// `c₀` with `f(c₀) ∉ {0, 1, ∞}`, otherwise `NormalizationDisabled` is
/// returned.
pub fn wojtkowiak_decompose(f: &RatFunc, auto_normalize: bool) -> Result<FormalSum, Error> {
    if f.is_constant() {
        return Err(Error::ConstantFunction {
            context: "weight-3 decomposition".into(),
        });
    }
    let complement = f.one_minus()?;
    // Both divisors must split before any substitution is attempted.
    f.divisor()?;
    complement.divisor()?;

    let inf = ProjPoint::Infinity;
    let invertible = f.order_at(&inf)? == 0 && complement.order_at(&inf)? == 0;
    let g = if invertible {
        f.clone()
    } else if !auto_normalize {
        return Err(Error::NormalizationDisabled);
    } else {
        let mut c0 = Q::zero();
        loop {
            let ok = match f.eval(&c0) {
                ProjPoint::Finite(v) => !v.is_zero() && !v.is_one(),
                ProjPoint::Infinity => false,
            };
            if ok {
                break;
            }
            c0 += Q::one();
        }
        // μ(t) = c₀ + 1/t sends ∞ to c₀.
        f.compose_linear_fractional(&c0, &Q::one(), &Q::one(), &Q::zero())?
    };
    let complement = g.one_minus()?;
    let div_g = g.divisor()?.clone();
    let div_c = complement.divisor()?.clone();
    let half = Q::new(1.into(), 2.into());

    let mut terms = vec![(g.clone(), Q::one())];
    for (a, na) in div_g.finite_parts() {
        for (b, nb) in div_g.finite_parts() {
            if a == b {
                continue;
            }
            for (c, nc) in div_c.finite_parts() {
                if c == b {
                    continue;
                }
                let coeff = &half * Q::from_integer((na * nb * nc).into());
                if c == a {
                    terms.push((pole_shift(a, b)?, coeff.clone()));
                    terms.push((pole_shift(b, a)?, -coeff));
                } else {
                    terms.push((mobius_unit(a, b, c)?, coeff));
                }
            }
        }
    }
    Ok(FormalSum::new(3, terms))
}

// ---------------------------------------------------------------------------
// Five-term instances
// ---------------------------------------------------------------------------

/// One face slot of a cross-ratio with the variable substituted.
enum Slot {
    Var,
    Pt(ProjPoint),
}

/// Cross-ratio `r(s₀, s₁, s₂, s₃) = ((s₀−s₁)(s₂−s₃)) / ((s₂−s₁)(s₀−s₃))`
/// with exactly one slot holding the variable `t`; infinite points cancel in
/// numerator/denominator pairs exactly as in the point-valued cross-ratio.
fn cross_ratio_in_t(slots: &[Slot; 4]) -> Result<RatFunc, Error> {
    let mut num = Poly::new(vec![Q::one()]);
    let mut den = Poly::new(vec![Q::one()]);
    let apply = |dst: &mut Poly, x: &Slot, y: &Slot| {
        let factor = match (x, y) {
            (Slot::Var, Slot::Pt(ProjPoint::Finite(c))) => {
                Poly::new(vec![-c.clone(), Q::one()])
            }
            (Slot::Pt(ProjPoint::Finite(c)), Slot::Var) => {
                Poly::new(vec![c.clone(), -Q::one()])
            }
            (Slot::Pt(ProjPoint::Finite(u)), Slot::Pt(ProjPoint::Finite(v))) => {
                Poly::new(vec![u - v])
            }
            // An infinite point appears in exactly one numerator factor and
            // one denominator factor; the pair cancels.
            _ => return,
        };
        *dst = &*dst * &factor;
    };
    apply(&mut num, &slots[0], &slots[1]);
    apply(&mut num, &slots[2], &slots[3]);
    apply(&mut den, &slots[2], &slots[1]);
    apply(&mut den, &slots[0], &slots[3]);
    RatFunc::new(num, den)
}

/// The five-term functional equation attached to five distinct points of
/// ℙ¹(ℚ), with the point in `variable_slot` replaced by the variable:
/// `Σᵢ (−1)ⁱ [r(x₀, …, x̂ᵢ, …, x₄)]`.  The face omitting the variable slot
/// is a constant summand and is kept (its image vanishes).
pub fn abel_five_term(
    points: &[ProjPoint; 5],
    variable_slot: usize,
) -> Result<FormalSum, Error> {
    assert!(variable_slot < 5, "variable slot out of range");
    for i in 0..5 {
        for j in (i + 1)..5 {
            if points[i] == points[j] {
                return Err(Error::DuplicatePoints {
                    context: format!("five-term points ({} repeated)", points[i]),
                });
            }
        }
    }
    let mut terms = Vec::with_capacity(5);
    let mut sign = Q::one();
    for omit in 0..5 {
        let face: Vec<usize> = (0..5).filter(|&j| j != omit).collect();
        if omit == variable_slot {
            let value = cross_ratio(
                &points[face[0]],
                &points[face[1]],
                &points[face[2]],
                &points[face[3]],
            )
            .expect("distinct points have a defined cross-ratio");
            if let ProjPoint::Finite(v) = value {
                terms.push((RatFunc::constant(v), sign.clone()));
            }
        } else {
            let slots: [Slot; 4] = std::array::from_fn(|k| {
                let j = face[k];
                if j == variable_slot {
                    Slot::Var
                } else {
                    Slot::Pt(points[j].clone())
                }
            });
            terms.push((cross_ratio_in_t(&slots)?, sign.clone()));
        }
        sign = -sign;
    }
    Ok(FormalSum::new(2, terms))
}

// ---------------------------------------------------------------------------
// Named weight-4 generator vectors
// ---------------------------------------------------------------------------

/// All 24 permutations of `{0, 1, 2, 3}`, in lexicographic order.
fn s4_perms() -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(24);
    for i in 0..4 {
        for j in 0..4 {
            if j == i {
                continue;
            }
            for k in 0..4 {
                if k == i || k == j {
                    continue;
                }
                out.push([i, j, k, 6 - i - j - k]);
            }
        }
    }
    out
}

fn require_distinct(pts: &[&Q]) -> Result<(), Error> {
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            if pts[i] == pts[j] {
                return Err(Error::DuplicatePoints {
                    context: format!("point {} repeated", pts[i]),
                });
            }
        }
    }
    Ok(())
}

/// Canonical form of the weight-4 tensor `(Σ nᵢ[uᵢ])³ ⊗ (Σ mⱼ[vⱼ])` built
/// from two finite point combinations (the shape of every weight-4 image of
/// a single function, read off its divisor data).
pub fn cube_tensor(left: &[(Q, Q)], right: &[(Q, Q)]) -> crate::tensor::ShTensor {
    let mut pairs = Vec::new();
    for (u1, n1) in left {
        for (u2, n2) in left {
            for (u3, n3) in left {
                for (v, m) in right {
                    let mset = crate::tensor::Mset::new(vec![u1.clone(), u2.clone(), u3.clone()]);
                    pairs.push(((mset, v.clone()), n1 * n2 * n3 * m));
                }
            }
        }
    }
    crate::tensor::sh_reduce(4, pairs)
}

/// The determinant-style triple at four distinct points `a, b, c, d`:
/// `[q₁] + [q₂] − [q₃]`, where each `qᵢ` is a quadratic invariant under the
/// involution pairing its two defining rows.  With `e_b`, `e_c` the images
/// of `d` under the involutions `(b ↔ ∞, a ↔ c)` and `(c ↔ ∞, b ↔ a)`:
/// `q₁` has zeros `{a, c}`, poles `{b, ∞}`, units `{d, e_b}`;
/// `q₂` has zeros `{a, b}`, poles `{c, ∞}`, units `{d, e_c}`;
/// `q₃` has zeros `{b, c}`, poles `{a, ∞}`, units `{e_b, e_c}`.
/// Its weight-4 image collapses to `−12[a][b][c]⊗[d]` after discarding all
/// terms whose left part has a repeated point.
pub fn involution_quad_triple(a: &Q, b: &Q, c: &Q, d: &Q) -> Result<FormalSum, Error> {
    require_distinct(&[a, b, c, d])?;
    let (fa, fb, fc, fd) = (
        ProjPoint::finite(a.clone()),
        ProjPoint::finite(b.clone()),
        ProjPoint::finite(c.clone()),
        ProjPoint::finite(d.clone()),
    );
    let inf = ProjPoint::Infinity;
    let e_b = five_point(&fb, &inf, &fa, &fc, &fd)?;
    let e_c = five_point(&fc, &inf, &fb, &fa, &fd)?;
    let q1 = quad_det(&fa, &fb, &fd, &fc, &inf, &e_b)?;
    let q2 = quad_det(&fa, &fc, &fd, &fb, &inf, &e_c)?;
    let q3 = quad_det(&fb, &fa, &e_b, &fc, &inf, &e_c)?;
    Ok(FormalSum::new(
        4,
        [(q1, Q::one()), (q2, Q::one()), (q3, -Q::one())],
    ))
}

/// The symmetrized quadratic sum over the ambient points `(x₁,…,x₄, ∞)`:
/// with `Σ` running over all 24 permutations `(p, q, r, s)` of the four
/// finite points,
/// `Σ [pair(p,q | r,∞)] + ½ Σ [double(p² | q,r)] + ¼ Σ [double(∞² | p,q)]
///  − ½ Σ [double(p² | q,∞)]`,
/// where each family is normalized at the involution images prescribed by
/// the five-point configuration.
pub fn symmetrized_quad_sum(x: &[Q; 4]) -> Result<FormalSum, Error> {
    require_distinct(&[&x[0], &x[1], &x[2], &x[3]])?;
    let pt: Vec<ProjPoint> = x.iter().map(|v| ProjPoint::finite(v.clone())).collect();
    let inf = ProjPoint::Infinity;
    let half = Q::new(1.into(), 2.into());
    let quarter = Q::new(1.into(), 4.into());
    let mut terms: Vec<(RatFunc, Q)> = Vec::with_capacity(96);
    for [i, j, k, l] in s4_perms() {
        let (p, q, r, s) = (&pt[i], &pt[j], &pt[k], &pt[l]);
        terms.push((quad_pair(p, q, r, &inf, s)?, Q::one()));
        terms.push((quad_double(p, q, r, &[s.clone(), inf.clone()])?, half.clone()));
        terms.push((quad_double(&inf, p, q, &[r.clone(), s.clone()])?, quarter.clone()));
        terms.push((quad_double(p, q, &inf, &[r.clone(), s.clone()])?, -half.clone()));
    }
    Ok(FormalSum::new(4, terms))
}

/// The symmetric-power tensor the symmetrized quadratic sum is aimed at:
/// `L ⊗ (e₁ + e₂ + e₃ − [x₁] − [x₂] − [x₃] − [x₄])`, where
/// `L = −½ Σ [p][q]² + ⅓ Σ [p][q][r]` (24-term symmetrizations) and the
/// `eᵢ` are the images of ∞ under the three involutions pairing the four
/// points two against two.  Every ∞ appearing on the right is dropped.
pub fn symmetrized_quad_target(x: &[Q; 4]) -> Result<crate::tensor::ShTensor, Error> {
    require_distinct(&[&x[0], &x[1], &x[2], &x[3]])?;
    let pt: Vec<ProjPoint> = x.iter().map(|v| ProjPoint::finite(v.clone())).collect();
    let inf = ProjPoint::Infinity;
    let brackets = [
        five_point(&pt[0], &pt[1], &pt[2], &pt[3], &inf)?,
        five_point(&pt[0], &pt[2], &pt[1], &pt[3], &inf)?,
        five_point(&pt[0], &pt[3], &pt[1], &pt[2], &inf)?,
    ];
    let mut right: Vec<(Q, Q)> = Vec::new();
    for e in &brackets {
        if let Some(v) = e.as_finite() {
            right.push((v.clone(), Q::one()));
        }
    }
    for v in x {
        right.push((v.clone(), -Q::one()));
    }
    let half = Q::new(1.into(), 2.into());
    let third = Q::new(1.into(), 3.into());
    let mut pairs = Vec::new();
    for [i, j, k, _] in s4_perms() {
        for (v, m) in &right {
            let sq = crate::tensor::Mset::new(vec![x[i].clone(), x[j].clone(), x[j].clone()]);
            pairs.push(((sq, v.clone()), -&half * m));
            let cube = crate::tensor::Mset::new(vec![x[i].clone(), x[j].clone(), x[k].clone()]);
            pairs.push(((cube, v.clone()), &third * m));
        }
    }
    Ok(crate::tensor::sh_reduce(4, pairs))
}

/// The tensor `[a]²[b] ⊗ (e₁ + e₂ + e₃ + [d] − [c])` obstructing the
/// five-term symbol identity, where `e₁, e₂, e₃` are the images of `d`
/// under the involutions `(c ↔ a, b ↔ ∞)`, `(c ↔ b, a ↔ ∞)` and
/// `(a ↔ b, c ↔ ∞)`.  It lies in the image of the weight-4 map; the
/// reduction solver exhibits a preimage.
pub fn five_term_obstruction_tensor(
    a: &Q,
    b: &Q,
    c: &Q,
    d: &Q,
) -> Result<crate::tensor::ShTensor, Error> {
    require_distinct(&[a, b, c, d])?;
    let (fa, fb, fc, fd) = (
        ProjPoint::finite(a.clone()),
        ProjPoint::finite(b.clone()),
        ProjPoint::finite(c.clone()),
        ProjPoint::finite(d.clone()),
    );
    let inf = ProjPoint::Infinity;
    let brackets = [
        five_point(&fc, &fa, &fb, &inf, &fd)?,
        five_point(&fc, &fb, &fa, &inf, &fd)?,
        five_point(&fa, &fb, &fc, &inf, &fd)?,
    ];
    let mut right: Vec<(Q, Q)> = Vec::new();
    for e in &brackets {
        if let Some(v) = e.as_finite() {
            right.push((v.clone(), Q::one()));
        }
    }
    right.push((d.clone(), Q::one()));
    right.push((c.clone(), -Q::one()));
    let mset = crate::tensor::Mset::new(vec![a.clone(), a.clone(), b.clone()]);
    let pairs: Vec<_> = right
        .into_iter()
        .map(|(v, m)| ((mset.clone(), v), m))
        .collect();
    Ok(crate::tensor::sh_reduce(4, pairs))
}

// ---------------------------------------------------------------------------
// Weight-4 reduction to degree-≤ 2 arguments
// ---------------------------------------------------------------------------

/// Hard ceiling on the number of five-point closure rounds.
pub const MAX_CLOSURE_DEPTH: usize = 3;

/// At most this many of the lowest-height points seed each closure round;
/// keeps the O(m⁵) involution sweep bounded while staying deterministic.
const CLOSURE_SNAPSHOT: usize = 14;

/// Check the target against the span after this many pool insertions.
const CHECK_STRIDE: usize = 48;

/// Tuning knobs for the weight-4 reduction pool.
#[derive(Clone, Debug)]
pub struct ReduceConfig {
    /// Number of five-point closure rounds enlarging the point set before
    /// deeper pool layers are generated (clamped to [`MAX_CLOSURE_DEPTH`]).
    pub depth: usize,
    /// Admit only exact degree-2 pool functions; by default the degree-1
    /// families participate and count as special by convention.
    pub strict_quadratic: bool,
    /// Cap on the total number of points the closure may accumulate.
    pub max_points: usize,
    /// Cap on the number of pool functions offered to the solver; reaching
    /// it yields an `Unknown` verdict, never an error.
    pub max_pool: usize,
}

impl Default for ReduceConfig {
    fn default() -> Self {
        ReduceConfig {
            depth: 1,
            strict_quadratic: false,
            max_points: 24,
            max_pool: 3000,
        }
    }
}

/// Outcome classification of a reduction run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReduceStatus {
    /// The target was expressed exactly over the pool; the residual is zero.
    Solved,
    /// The pool (at the configured depth and caps) does not span the target.
    /// This is a statement about the search, not about the target.
    Unknown,
}

/// One summand of a reduction: `coefficient · [function]`.
#[derive(Clone, Debug)]
pub struct ReductionTerm {
    pub coefficient: Q,
    pub function: RatFunc,
    /// Degree ≤ 1, or a degree-2 function whose branch data passes the
    /// special-quadratic test.
    pub special: bool,
}

/// Result of reducing a weight-4 tensor over the quadratic pool.
#[derive(Clone, Debug)]
pub struct TensorReduction {
    pub terms: Vec<ReductionTerm>,
    /// Exact leftover after eliminating the span: zero iff `Solved`.
    pub residual: ShTensor,
    pub status: ReduceStatus,
    /// Number of pool functions whose images were offered to the solver.
    pub pool_size: usize,
    /// Number of finite points available after closure.
    pub points_used: usize,
    /// Closure rounds actually expanded.
    pub closure_depth: usize,
}

/// Result of reducing a weight-4 formal sum: the reduction data plus the
/// input it certifies.  On `Solved`,
/// `input − Σ coefficientᵢ·[functionᵢ]` has weight-4 image exactly zero.
#[derive(Clone, Debug)]
pub struct ReductionResult {
    pub input: FormalSum,
    pub terms: Vec<ReductionTerm>,
    pub residual: ShTensor,
    pub status: ReduceStatus,
    pub pool_size: usize,
    pub points_used: usize,
    pub closure_depth: usize,
}

/// Bijection between canonical tensor keys and small integer ids, so the
/// span arithmetic runs on cheap integer-keyed vectors instead of comparing
/// multiset keys at every pivot lookup.
#[derive(Default)]
struct KeyInterner {
    ids: BTreeMap<(Mset, Q), u64>,
    keys: Vec<(Mset, Q)>,
}

impl KeyInterner {
    fn intern(&mut self, key: &(Mset, Q)) -> u64 {
        if let Some(&id) = self.ids.get(key) {
            return id;
        }
        let id = self.keys.len() as u64;
        self.ids.insert(key.clone(), id);
        self.keys.push(key.clone());
        id
    }

    fn tensor_to_vec(&mut self, t: &ShTensor) -> BTreeMap<u64, Q> {
        t.iter()
            .map(|(k, c)| (self.intern(k), c.clone()))
            .collect()
    }

    fn key(&self, id: u64) -> &(Mset, Q) {
        &self.keys[id as usize]
    }
}

/// Canonical weight-4 image of a single pool function.
fn image_tensor(q: &RatFunc) -> Option<ShTensor> {
    match j_map(&FormalSum::singleton(4, q.clone())) {
        Ok(JImage::Tensor(t)) => Some(t),
        _ => None,
    }
}

/// Degree ≤ 1, or degree 2 passing the special-quadratic test.
fn special_tag(f: &RatFunc) -> bool {
    match f.degree() {
        Some(d) if d >= 2 => f.is_special_quadratic().unwrap_or(false),
        _ => true,
    }
}

/// One independent pool column: pool index, exact image, modular image.
struct BasisColumn {
    pool_index: usize,
    exact: BTreeMap<u64, Q>,
    modular: BTreeMap<u64, u64>,
}

/// Identity of a pool candidate: family tag plus point indices (unused
/// slots filled with `usize::MAX`).  Point indices are stable because the
/// closure only appends.
type TupleId = (u8, [usize; 4]);

/// Incremental pool state.  Membership is tracked modulo a large fixed
/// prime — pure machine-word arithmetic, immune to the coefficient growth
/// of exact elimination — and only the independent columns are kept.  The
/// final coefficients are solved exactly over ℚ on the small subset the
/// modular combination singles out, so a (cosmically unlikely) modular
/// false positive is caught, never reported.
struct PoolAccum {
    prime: u64,
    span: ModSpan,
    keys: KeyInterner,
    pool: Vec<RatFunc>,
    basis: Vec<BasisColumn>,
    target: BTreeMap<u64, Q>,
    target_mod: BTreeMap<u64, u64>,
    /// Points the pool may speak about: a column whose image leaves this
    /// set is deferred until closure admits it (or dropped at final depth).
    allowed: std::collections::BTreeSet<Q>,
    /// Candidates already inserted (or permanently rejected), so the
    /// per-level re-sweep only retries the support-deferred ones.
    offered: std::collections::BTreeSet<TupleId>,
    max_pool: usize,
    strict: bool,
    since_check: usize,
    solved: bool,
    exhausted: bool,
}

impl PoolAccum {
    fn done(&self) -> bool {
        self.solved || self.exhausted
    }

    /// Insert one candidate (constructor failures are skipped silently —
    /// degenerate configurations are expected while sweeping tuples).  A
    /// candidate whose image involves points outside the allowed set is
    /// left unmarked so a later closure round can pick it up.
    fn offer(&mut self, id: TupleId, candidate: Result<RatFunc, Error>) {
        if self.done() || self.offered.contains(&id) {
            return;
        }
        let q = match candidate {
            Ok(q) => q,
            Err(_) => {
                self.offered.insert(id);
                return;
            }
        };
        if self.strict && q.degree() != Some(2) {
            self.offered.insert(id);
            return;
        }
        let Some(img) = image_tensor(&q) else {
            self.offered.insert(id);
            return;
        };
        if !img
            .point_support()
            .iter()
            .all(|v| self.allowed.contains(v))
        {
            return; // deferred: closure may admit it later
        }
        self.offered.insert(id);
        if self.pool.len() >= self.max_pool {
            self.exhausted = true;
            return;
        }
        let col = self.keys.tensor_to_vec(&img);
        let Some(col_mod) = vec_mod_p(&col, self.prime) else {
            return;
        };
        let pool_index = self.pool.len();
        self.pool.push(q);
        if self.span.insert(col_mod.clone()) {
            self.basis.push(BasisColumn {
                pool_index,
                exact: col,
                modular: col_mod,
            });
        }
        self.since_check += 1;
        if self.since_check >= CHECK_STRIDE {
            self.checkpoint();
        }
    }

    /// Re-test target membership; returns `true` when the run should stop.
    fn checkpoint(&mut self) -> bool {
        self.since_check = 0;
        if !self.done() && self.span.contains(&self.target_mod) {
            self.solved = true;
        }
        self.done()
    }

    /// Exact coefficients of the target over the pool, as (pool index,
    /// value).  The modular combination selects the participating columns;
    /// the coefficients themselves come from an exact solve restricted to
    /// that subset (falling back to the full independent set), and `None`
    /// means the modular containment was spurious.
    fn express_target(&self) -> Option<Vec<(usize, Q)>> {
        let mut modular = ModSpan::with_combos(self.prime);
        for col in &self.basis {
            modular.insert(col.modular.clone());
        }
        let support: Vec<usize> = modular
            .express(&self.target_mod)?
            .into_iter()
            .map(|(ordinal, _)| ordinal)
            .collect();
        for subset in [Some(&support), None] {
            let ordinals: Vec<usize> = match subset {
                Some(s) => s.clone(),
                None => (0..self.basis.len()).collect(),
            };
            let mut exact = SpanSolver::new();
            for &ordinal in &ordinals {
                exact.insert(self.basis[ordinal].exact.clone());
            }
            if let Some(combo) = exact.express(&self.target) {
                return Some(
                    combo
                        .into_iter()
                        .map(|(pos, c)| (self.basis[ordinals[pos]].pool_index, c))
                        .collect(),
                );
            }
        }
        None
    }

    /// Exact canonical remainder of the target modulo the span of the
    /// independent columns.
    fn exact_remainder(&self) -> BTreeMap<u64, Q> {
        let mut exact = MemberSpan::new();
        for col in &self.basis {
            exact.insert(col.exact.clone());
        }
        exact.remainder(&self.target)
    }
}

/// One five-point closure round: apply every involution determined by four
/// of the current points (plus ∞) to each remaining fifth point, and append
/// the finite images not yet present, lowest height first, up to the cap.
fn closure_round(pts: &mut Vec<Q>, lv: &mut Vec<usize>, round: usize, max_points: usize) {
    use crate::bloch::height;
    if pts.len() >= max_points {
        return;
    }
    let mut order: Vec<usize> = (0..pts.len()).collect();
    order.sort_by(|&a, &b| {
        height(&pts[a])
            .cmp(&height(&pts[b]))
            .then_with(|| pts[a].cmp(&pts[b]))
    });
    order.truncate(CLOSURE_SNAPSHOT);
    let mut snap: Vec<ProjPoint> = order
        .iter()
        .map(|&i| ProjPoint::finite(pts[i].clone()))
        .collect();
    snap.push(ProjPoint::Infinity);
    let m = snap.len();
    let known: std::collections::BTreeSet<Q> = pts.iter().cloned().collect();
    let mut fresh_set = std::collections::BTreeSet::new();
    let mut fresh = Vec::new();
    let pairings = [(0usize, 1usize, 2usize, 3usize), (0, 2, 1, 3), (0, 3, 1, 2)];
    for i in 0..m {
        for j in (i + 1)..m {
            for k in (j + 1)..m {
                for l in (k + 1)..m {
                    for o in (l + 1)..m {
                        let sub = [&snap[i], &snap[j], &snap[k], &snap[l], &snap[o]];
                        for s in 0..5 {
                            let rest: Vec<usize> = (0..5).filter(|&x| x != s).collect();
                            for (p, q, r, w) in pairings {
                                let img = five_point(
                                    sub[rest[p]],
                                    sub[rest[q]],
                                    sub[rest[r]],
                                    sub[rest[w]],
                                    sub[s],
                                );
                                if let Ok(ProjPoint::Finite(v)) = img {
                                    if !known.contains(&v) && fresh_set.insert(v.clone()) {
                                        fresh.push(v);
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    fresh.sort_by(|a, b| height(a).cmp(&height(b)).then_with(|| a.cmp(b)));
    for v in fresh {
        if pts.len() >= max_points {
            break;
        }
        pts.push(v);
        lv.push(round);
    }
}

const NONE: usize = usize::MAX;

/// Degree-1 pool layer: the pure-cube and shifted-cube generators over every
/// ordered point pair, and the mixed-cube generators over ordered triples.
fn offer_linear_layer(pts: &[Q], lv: &[usize], level: usize, acc: &mut PoolAccum) -> bool {
    let n = pts.len();
    for i in 0..n {
        for j in 0..n {
            if i == j || lv[i].max(lv[j]) > level {
                continue;
            }
            acc.offer((0, [i, j, NONE, NONE]), scaled_shift(&pts[i], &pts[j]));
            acc.offer((1, [i, j, NONE, NONE]), pole_shift(&pts[i], &pts[j]));
            if acc.done() {
                return true;
            }
        }
    }
    if acc.checkpoint() {
        return true;
    }
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            for k in 0..n {
                if k == i || k == j || lv[i].max(lv[j]).max(lv[k]) > level {
                    continue;
                }
                acc.offer((2, [i, j, k, NONE]), mobius_unit(&pts[i], &pts[j], &pts[k]));
                if acc.done() {
                    return true;
                }
            }
        }
    }
    acc.checkpoint()
}

/// Quadratic pool layer: the four ∞-anchored divisor configurations, each
/// normalized at its involution images.
fn offer_quad_layer(pts: &[Q], lv: &[usize], level: usize, acc: &mut PoolAccum) -> bool {
    let n = pts.len();
    let fp: Vec<ProjPoint> = pts.iter().map(|v| ProjPoint::finite(v.clone())).collect();
    let inf = ProjPoint::Infinity;
    // Zeros {i, j}, poles {k, ∞}, unit at s.
    for i in 0..n {
        for j in (i + 1)..n {
            for k in 0..n {
                if k == i || k == j {
                    continue;
                }
                for s in 0..n {
                    if s == i || s == j || s == k || lv[i].max(lv[j]).max(lv[k]).max(lv[s]) > level
                    {
                        continue;
                    }
                    acc.offer(
                        (3, [i, j, k, s]),
                        quad_pair(&fp[i], &fp[j], &fp[k], &inf, &fp[s]),
                    );
                    if acc.done() {
                        return true;
                    }
                }
            }
        }
    }
    if acc.checkpoint() {
        return true;
    }
    // Double zero at i, poles {j, k}, ambient {s, ∞}.
    for i in 0..n {
        for j in 0..n {
            if j == i {
                continue;
            }
            for k in (j + 1)..n {
                if k == i {
                    continue;
                }
                for s in 0..n {
                    if s == i || s == j || s == k || lv[i].max(lv[j]).max(lv[k]).max(lv[s]) > level
                    {
                        continue;
                    }
                    acc.offer(
                        (4, [i, j, k, s]),
                        quad_double(&fp[i], &fp[j], &fp[k], &[fp[s].clone(), inf.clone()]),
                    );
                    if acc.done() {
                        return true;
                    }
                }
            }
        }
    }
    if acc.checkpoint() {
        return true;
    }
    // Double zero at ∞, poles {i, j}, ambient {k, s}.
    for i in 0..n {
        for j in (i + 1)..n {
            for k in 0..n {
                if k == i || k == j {
                    continue;
                }
                for s in (k + 1)..n {
                    if s == i || s == j || lv[i].max(lv[j]).max(lv[k]).max(lv[s]) > level {
                        continue;
                    }
                    acc.offer(
                        (5, [i, j, k, s]),
                        quad_double(&inf, &fp[i], &fp[j], &[fp[k].clone(), fp[s].clone()]),
                    );
                    if acc.done() {
                        return true;
                    }
                }
            }
        }
    }
    if acc.checkpoint() {
        return true;
    }
    // Double zero at i, poles {j, ∞}, ambient {k, s}.
    for i in 0..n {
        for j in 0..n {
            if j == i {
                continue;
            }
            for k in 0..n {
                if k == i || k == j {
                    continue;
                }
                for s in (k + 1)..n {
                    if s == i || s == j || lv[i].max(lv[j]).max(lv[k]).max(lv[s]) > level {
                        continue;
                    }
                    acc.offer(
                        (6, [i, j, k, s]),
                        quad_double(&fp[i], &fp[j], &inf, &[fp[k].clone(), fp[s].clone()]),
                    );
                    if acc.done() {
                        return true;
                    }
                }
            }
        }
    }
    acc.checkpoint()
}

/// Product-shaped pool layer: normalized root pairs and the double-root
/// ratio family with its modulus drawn from the point set.
fn offer_product_layer(pts: &[Q], lv: &[usize], level: usize, acc: &mut PoolAccum) -> bool {
    let n = pts.len();
    for i in 0..n {
        for j in i..n {
            for d in 0..n {
                if d == i || d == j || lv[i].max(lv[j]).max(lv[d]) > level {
                    continue;
                }
                acc.offer((7, [i, j, d, NONE]), paired_product(&pts[i], &pts[j], &pts[d]));
                if acc.done() {
                    return true;
                }
            }
        }
    }
    if acc.checkpoint() {
        return true;
    }
    for i in 0..n {
        for j in 0..n {
            if j == i {
                continue;
            }
            for z in 0..n {
                if pts[z].is_zero()
                    || pts[z] == Q::one()
                    || lv[i].max(lv[j]).max(lv[z]) > level
                {
                    continue;
                }
                acc.offer((8, [i, j, z, NONE]), double_root_ratio(&pts[i], &pts[j], &pts[z]));
                if acc.done() {
                    return true;
                }
            }
        }
    }
    acc.checkpoint()
}

/// Express a weight-4 tensor exactly over a deterministic pool of degree-≤ 2
/// functions whose points come from the tensor's support, enlarged by
/// five-point involution closure.  The search is layered — degree-1
/// generators, ∞-anchored quadratics, product shapes, then one closure round
/// deeper — and stops at the first layer whose span covers the target.
/// Exhausting the pool cap yields `Unknown` with the exact canonical
/// residual; it never errors.
pub fn reduce_tensor4(target: &ShTensor, config: &ReduceConfig) -> TensorReduction {
    assert_eq!(target.n(), 4, "reduction target must have weight 4");
    let depth = config.depth.min(MAX_CLOSURE_DEPTH);
    let mut keys = KeyInterner::default();
    let target_vec = keys.tensor_to_vec(target);
    let Some((prime, target_mod)) = MEMBERSHIP_PRIMES
        .iter()
        .find_map(|&p| vec_mod_p(&target_vec, p).map(|v| (p, v)))
    else {
        // Both filter primes divide a target denominator; nothing was
        // searched, so the honest answer is the untouched target.
        return TensorReduction {
            terms: Vec::new(),
            residual: target.clone(),
            status: ReduceStatus::Unknown,
            pool_size: 0,
            points_used: 0,
            closure_depth: 0,
        };
    };
    let mut pts: Vec<Q> = target.point_support().into_iter().collect();
    let mut lv: Vec<usize> = vec![0; pts.len()];
    let solved_at_start = target_vec.is_empty();
    let mut acc = PoolAccum {
        prime,
        span: ModSpan::new(prime),
        keys,
        pool: Vec::new(),
        basis: Vec::new(),
        target: target_vec,
        target_mod,
        allowed: pts.iter().cloned().collect(),
        offered: std::collections::BTreeSet::new(),
        max_pool: config.max_pool,
        strict: config.strict_quadratic,
        since_check: 0,
        solved: solved_at_start,
        exhausted: false,
    };
    let mut expanded = 0;
    let _t_phase1 = std::time::Instant::now();
    if !acc.done() {
        'levels: for level in 0..=depth {
            if level > 0 {
                closure_round(&mut pts, &mut lv, level, config.max_points);
                expanded = level;
                acc.allowed = pts.iter().cloned().collect();
            }
            // Layers sweep every tuple reachable at this level; the offered
            // set skips the ones already taken, so only new tuples and the
            // previously support-deferred ones cost anything.
            if offer_linear_layer(&pts, &lv, level, &mut acc)
                || offer_quad_layer(&pts, &lv, level, &mut acc)
                || offer_product_layer(&pts, &lv, level, &mut acc)
            {
                break 'levels;
            }
        }
    }
    acc.checkpoint();
    eprintln!(
        "[diag] phase1 done: pool {}, basis {}, rank {}, keys {}, {:?}",
        acc.pool.len(),
        acc.basis.len(),
        acc.span.rank(),
        acc.keys.keys.len(),
        _t_phase1.elapsed()
    );
    let _t_express = std::time::Instant::now();
    let mut terms = Vec::new();
    let mut solved = acc.solved;
    if solved {
        match acc.express_target() {
            Some(combo) => {
                terms = combo
                    .into_iter()
                    .map(|(idx, coefficient)| {
                        let function = acc.pool[idx].clone();
                        let special = special_tag(&function);
                        ReductionTerm {
                            coefficient,
                            function,
                            special,
                        }
                    })
                    .collect();
            }
            // Spurious modular containment: report the honest verdict.
            None => solved = false,
        }
    }
    eprintln!("[diag] express: {:?}", _t_express.elapsed());
    let _t_res = std::time::Instant::now();
    let (status, residual) = if solved {
        (ReduceStatus::Solved, ShTensor::zero(4))
    } else {
        let rem = acc.exact_remainder();
        let pairs: Vec<_> = rem
            .into_iter()
            .map(|(id, c)| (acc.keys.key(id).clone(), c))
            .collect();
        (ReduceStatus::Unknown, sh_reduce(4, pairs))
    };
    eprintln!("[diag] residual: {:?}", _t_res.elapsed());
    TensorReduction {
        terms,
        residual,
        status,
        pool_size: acc.pool.len(),
        points_used: pts.len(),
        closure_depth: expanded,
    }
}

/// Reduce a weight-4 formal sum: compute its weight-4 image and express it
/// over the quadratic pool.  On `Solved` the returned terms satisfy
/// `input − Σ coefficientᵢ·[functionᵢ] ∈ ker` exactly, with every function
/// of degree ≤ 2.
pub fn reduce_weight4(f: &FormalSum, config: &ReduceConfig) -> Result<ReductionResult, Error> {
    assert_eq!(f.weight(), 4, "weight-4 reduction takes a weight-4 sum");
    let target = match j_map(f)? {
        JImage::Tensor(t) => t,
        JImage::Points(_) => unreachable!("weight 4 lands in the tensor stage"),
    };
    let r = reduce_tensor4(&target, config);
    Ok(ReductionResult {
        input: f.clone(),
        terms: r.terms,
        residual: r.residual,
        status: r.status,
        pool_size: r.pool_size,
        points_used: r.points_used,
        closure_depth: r.closure_depth,
    })
}



#[cfg(test)]
mod vector_tests {
    use super::*;
    use crate::bloch::k4_map;
    use crate::cocycle::j_map;
    use crate::tensor::{sh_reduce, Mset, ShTensor};
    use crate::{q, qi};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::str::FromStr;

    fn qs(vals: &[(i64, i64)]) -> Vec<(Q, Q)> {
        vals.iter().map(|&(p, c)| (qi(p), qi(c))).collect()
    }

    fn tensor_image(sum: &FormalSum) -> ShTensor {
        match j_map(sum).unwrap() {
            crate::cocycle::JImage::Tensor(t) => t,
            other => panic!("expected a tensor image, got {other:?}"),
        }
    }

    fn draw_distinct<Rn: Rng>(rng: &mut Rn, n: usize) -> Vec<Q> {
        let mut pts = Vec::new();
        while pts.len() < n {
            let p = random_point(rng);
            if !pts.contains(&p) {
                pts.push(p);
            }
        }
        pts
    }

    #[test]
    fn triple_instance_matches_hand_computation() {
        // Points (0, 1, 2, 3): the involution (1 ↔ ∞, 0 ↔ 2) maps 3 to 1/2,
        // the involution (2 ↔ ∞, 1 ↔ 0) maps 3 to 4.
        let inf = ProjPoint::Infinity;
        let e_b = five_point(
            &ProjPoint::finite(qi(1)),
            &inf,
            &ProjPoint::finite(qi(0)),
            &ProjPoint::finite(qi(2)),
            &ProjPoint::finite(qi(3)),
        )
        .unwrap();
        assert_eq!(e_b, ProjPoint::finite(q(1, 2)));
        let e_c = five_point(
            &ProjPoint::finite(qi(2)),
            &inf,
            &ProjPoint::finite(qi(1)),
            &ProjPoint::finite(qi(0)),
            &ProjPoint::finite(qi(3)),
        )
        .unwrap();
        assert_eq!(e_c, ProjPoint::finite(qi(4)));

        let x = involution_quad_triple(&qi(0), &qi(1), &qi(2), &qi(3)).unwrap();
        assert_eq!(x.term_count(), 3);
        let q1 = RatFunc::from_str("(2*t^2 - 4*t)/(3*t - 3)").unwrap();
        assert_eq!(x.coeff(&q1), Q::one());
        for (f, _) in x.iter() {
            assert_eq!(f.degree(), Some(2));
        }
    }

    #[test]
    fn triple_image_equals_divisor_cubes() {
        let mut rng = ChaCha8Rng::seed_from_u64(460);
        let mut done = 0;
        while done < 15 {
            let pts = draw_distinct(&mut rng, 4);
            let (a, b, c, d) = (&pts[0], &pts[1], &pts[2], &pts[3]);
            let Ok(x) = involution_quad_triple(a, b, c, d) else {
                continue;
            };
            done += 1;
            let inf = ProjPoint::Infinity;
            let e_b = five_point(
                &ProjPoint::finite(b.clone()),
                &inf,
                &ProjPoint::finite(a.clone()),
                &ProjPoint::finite(c.clone()),
                &ProjPoint::finite(d.clone()),
            )
            .unwrap();
            let e_b = e_b.as_finite().unwrap().clone();
            let e_c = five_point(
                &ProjPoint::finite(c.clone()),
                &inf,
                &ProjPoint::finite(b.clone()),
                &ProjPoint::finite(a.clone()),
                &ProjPoint::finite(d.clone()),
            )
            .unwrap();
            let e_c = e_c.as_finite().unwrap().clone();

            let one = Q::one();
            let mut expected = cube_tensor(
                &[(a.clone(), one.clone()), (c.clone(), one.clone()), (b.clone(), -&one)],
                &[(d.clone(), one.clone()), (e_b.clone(), one.clone()), (b.clone(), -&one)],
            );
            expected.add_scaled(
                &cube_tensor(
                    &[(a.clone(), one.clone()), (b.clone(), one.clone()), (c.clone(), -&one)],
                    &[(d.clone(), one.clone()), (e_c.clone(), one.clone()), (c.clone(), -&one)],
                ),
                &one,
            );
            expected.add_scaled(
                &cube_tensor(
                    &[(b.clone(), one.clone()), (c.clone(), one.clone()), (a.clone(), -&one)],
                    &[(e_b.clone(), one.clone()), (e_c.clone(), one.clone()), (a.clone(), -&one)],
                ),
                &-&one,
            );
            assert_eq!(tensor_image(&x), expected, "points {pts:?}");
        }
    }

    #[test]
    fn triple_collapse_keeps_repeated_point_terms() {
        // The collapsed product form −12[a][b][c]⊗[d] only matches the image
        // after every left part with a repeated point is discarded; the exact
        // image keeps those terms, so bit-exact equality fails.
        let x = involution_quad_triple(&qi(0), &qi(1), &qi(2), &qi(3)).unwrap();
        let image = tensor_image(&x);
        let collapsed = sh_reduce(
            4,
            vec![((Mset::new(vec![qi(0), qi(1), qi(2)]), qi(3)), qi(-12))],
        );
        assert_ne!(image, collapsed);
        // The collapsed form is the full image's component on that single
        // distinct-support key.
        assert_eq!(
            image.coeff(&(Mset::new(vec![qi(0), qi(1), qi(2)]), qi(3))),
            collapsed.coeff(&(Mset::new(vec![qi(0), qi(1), qi(2)]), qi(3))),
        );
    }

    /// Canonical images of all raw keys over `points` whose four slots hold
    /// at most 3 distinct values — the subspace the collapsed product form
    /// is taken modulo.
    fn shallow_span(points: &[Q]) -> crate::solve::SpanSolver<(Mset, Q)> {
        let mut solver = crate::solve::SpanSolver::new();
        let n = points.len();
        for i in 0..n {
            for j in i..n {
                for k in j..n {
                    for l in 0..n {
                        let mut distinct = vec![i, j, k, l];
                        distinct.sort_unstable();
                        distinct.dedup();
                        if distinct.len() > 3 {
                            continue;
                        }
                        let mset = Mset::new(vec![
                            points[i].clone(),
                            points[j].clone(),
                            points[k].clone(),
                        ]);
                        let t = sh_reduce(4, vec![((mset, points[l].clone()), Q::one())]);
                        solver.insert(as_map(&t));
                    }
                }
            }
        }
        solver
    }

    fn as_map(t: &ShTensor) -> std::collections::BTreeMap<(Mset, Q), Q> {
        t.iter().map(|(key, c)| (key.clone(), c.clone())).collect()
    }

    #[test]
    fn triple_collapse_gap_is_shallow() {
        // image − (−12[a][b][c]⊗[d]) is exactly a combination of keys with
        // at most 3 distinct points (drawn from the four inputs and the two
        // involution images); the all-distinct components cancel.
        let mut rng = ChaCha8Rng::seed_from_u64(461);
        let mut done = 0;
        while done < 8 {
            let pts = draw_distinct(&mut rng, 4);
            let Ok(x) = involution_quad_triple(&pts[0], &pts[1], &pts[2], &pts[3]) else {
                continue;
            };
            done += 1;
            let mut gap = tensor_image(&x);
            gap.add_scaled(
                &sh_reduce(
                    4,
                    vec![(
                        (
                            Mset::new(vec![pts[0].clone(), pts[1].clone(), pts[2].clone()]),
                            pts[3].clone(),
                        ),
                        qi(-12),
                    )],
                ),
                &-Q::one(),
            );
            // Collect every point occurring in the three quadratics'
            // divisor data: the four inputs plus the involution images.
            let mut atoms: Vec<Q> = pts.clone();
            for (f, _) in x.iter() {
                for g in [f.clone(), f.one_minus().unwrap()] {
                    for (p, _) in g.divisor().unwrap().finite_parts() {
                        if !atoms.contains(p) {
                            atoms.push(p.clone());
                        }
                    }
                }
            }
            let solver = shallow_span(&atoms);
            assert!(solver.contains(&as_map(&gap)), "points {pts:?}");
        }
    }

    #[test]
    fn symmetrized_sum_is_split_quadratics() {
        let g = symmetrized_quad_sum(&[qi(0), qi(1), qi(2), qi(3)]).unwrap();
        assert!(g.term_count() <= 96);
        assert!(g.term_count() >= 24);
        for (f, _) in g.iter() {
            assert_eq!(f.degree(), Some(2));
            assert!(f.divisor().is_ok());
            assert!(f.one_minus().unwrap().divisor().is_ok());
        }
    }

    #[test]
    fn symmetrized_sum_image_offsets_target_within_comparison_kernel() {
        // (1/6)·image(G) and the target tensor differ bit-exactly, but the
        // difference is a combination of the four symmetrization patterns the
        // comparison map annihilates identically — its image normalizes to
        // the empty map, with no relation search at all.
        let mut rng = ChaCha8Rng::seed_from_u64(462);
        let sixth = Q::new(1.into(), 6.into());
        let mut done = 0;
        while done < 5 {
            let pts = draw_distinct(&mut rng, 4);
            let x: [Q; 4] = pts.clone().try_into().unwrap();
            let Ok(g) = symmetrized_quad_sum(&x) else {
                continue;
            };
            done += 1;
            let image = tensor_image(&g).scaled(&sixth);
            let target = symmetrized_quad_target(&x).unwrap();
            let mut gap = image.clone();
            gap.add_scaled(&target, &-Q::one());
            let comparison = k4_map(&gap);
            assert!(comparison.is_empty(), "points {pts:?}");
            assert_ne!(image, target, "points {pts:?}");
        }
    }

    #[test]
    fn generator_images_are_divisor_cubes() {
        // The images of the four degree-≤2 generator families are exactly
        // the cubes read off their divisors.
        let (a, b, c, d) = (qi(0), qi(1), qi(3), qi(5));
        let z = q(2, 1);

        let f = paired_product(&a, &b, &d).unwrap();
        let expected = cube_tensor(
            &qs(&[(0, 1), (1, 1)]),
            &[(d.clone(), Q::one()), (&a + &b - &d, Q::one())],
        );
        assert_eq!(tensor_image(&FormalSum::singleton(4, f)), expected);

        let f = double_root_ratio(&a, &b, &z).unwrap();
        let w1 = (&a - &(&b * &z)) / (Q::one() - &z);
        let w2 = (&a - &b + &(&b * &z)) / z.clone();
        let expected = cube_tensor(
            &[(b.clone(), qi(2)), (a.clone(), qi(-1))],
            &[(w1, Q::one()), (w2, Q::one()), (a.clone(), -Q::one())],
        );
        assert_eq!(tensor_image(&FormalSum::singleton(4, f)), expected);

        let f = pole_shift(&a, &b).unwrap();
        let expected = cube_tensor(
            &[(a.clone(), Q::one()), (b.clone(), -Q::one())],
            &[(b.clone(), -Q::one())],
        );
        assert_eq!(tensor_image(&FormalSum::singleton(4, f)), expected);

        let f = mobius_unit(&a, &b, &c).unwrap();
        let expected = cube_tensor(
            &[(a.clone(), Q::one()), (b.clone(), -Q::one())],
            &[(c.clone(), Q::one()), (b.clone(), -Q::one())],
        );
        assert_eq!(tensor_image(&FormalSum::singleton(4, f)), expected);
    }

    #[test]
    fn obstruction_tensor_instance() {
        // (a, b, c, d) = (0, 1, 2, 3): the three involution images of 3.
        let p = five_term_obstruction_tensor(&qi(0), &qi(1), &qi(2), &qi(3)).unwrap();
        assert!(!p.is_zero());
        // All keys share the left part {0, 0, 1}.
        for ((m, _), _) in p.iter() {
            assert_eq!(*m, Mset::new(vec![qi(0), qi(0), qi(1)]));
        }
    }

    #[test]
    fn named_vectors_reject_repeated_points() {
        assert!(matches!(
            involution_quad_triple(&qi(0), &qi(0), &qi(2), &qi(3)),
            Err(Error::DuplicatePoints { .. })
        ));
        assert!(matches!(
            symmetrized_quad_sum(&[qi(0), qi(1), qi(1), qi(3)]),
            Err(Error::DuplicatePoints { .. })
        ));
        assert!(matches!(
            five_term_obstruction_tensor(&qi(0), &qi(1), &qi(2), &qi(2)),
            Err(Error::DuplicatePoints { .. })
        ));
    }
}
