//! The decision maps for polylogarithm functional equations.
//!
//! A candidate equation of weight `n` is a finite ℚ-linear combination of
//! symbols `[φ]` with `φ` a rational function. The combination is a valid
//! functional equation (its weighted polylog sum is constant) exactly when its
//! image under the weight-`n` cocycle map [`j_map`] vanishes:
//!
//! * weight 1: `[φ] ↦ divisor of φ` in the point space,
//! * weight ≥ 2: `[φ] ↦ (φ)^(n−1) ⊗ (1−φ)` in the mixed tensor space,
//!   reduced to canonical form.
//!
//! [`verify`] packages the zero test as a certificate with a witness on
//! failure. [`derive_p_formal`] lowers formal sums by weight one per point,
//! commuting with the tensor-side derivation. [`schur_dual_check`] evaluates
//! the dual description of the same criterion: a family of rational-valued
//! functionals indexed by point tuples whose joint vanishing is equivalent to
//! the tensor image vanishing.

use crate::lincomb::{add_term, scale_in_place};
use crate::mobius::MobiusMap;
use crate::point::ProjPoint;
use crate::tensor::{sh_reduce, sym_power, write_linear, DivA, Mset, ShTensor};
use crate::{Error, Q, RatFunc};
use num_traits::{One, Zero};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

// ---------------------------------------------------------------------------
// Formal sums
// ---------------------------------------------------------------------------

/// A weight-tagged ℚ-linear combination of rational-function symbols `[φ]`.
///
/// Functions equal to the constants 0 or 1 carry no information at any weight
/// (their polylog terms are constant and their tensor images vanish
/// identically); they are removed at construction and retained separately for
/// reporting. Other constant symbols are kept: they contribute constants to
/// the analytic side and zero to every cocycle image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormalSum {
    n: usize,
    terms: BTreeMap<RatFunc, Q>,
    stripped: Vec<(RatFunc, Q)>,
}

impl FormalSum {
    /// Build a weight-`n` sum, combining duplicate symbols and stripping the
    /// degenerate constants 0 and 1.
    pub fn new(n: usize, terms: impl IntoIterator<Item = (RatFunc, Q)>) -> FormalSum {
        assert!((1..=4).contains(&n), "weight must be 1..=4, got {n}");
        let mut sum = FormalSum {
            n,
            terms: BTreeMap::new(),
            stripped: Vec::new(),
        };
        for (f, c) in terms {
            if c.is_zero() {
                continue;
            }
            let degenerate = match f.as_constant() {
                Some(v) => v.is_zero() || v.is_one(),
                None => false,
            };
            if degenerate {
                sum.stripped.push((f, c));
            } else {
                add_term(&mut sum.terms, f, c);
            }
        }
        sum
    }

    /// The single symbol `[f]` with coefficient 1.
    pub fn singleton(n: usize, f: RatFunc) -> FormalSum {
        FormalSum::new(n, [(f, Q::one())])
    }

    pub fn empty(n: usize) -> FormalSum {
        FormalSum::new(n, [])
    }

    pub fn weight(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, f: &RatFunc) -> Q {
        self.terms.get(f).cloned().unwrap_or_else(Q::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&RatFunc, &Q)> {
        self.terms.iter()
    }

    /// Degenerate constant symbols (0 or 1) removed at construction.
    pub fn stripped(&self) -> &[(RatFunc, Q)] {
        &self.stripped
    }

    /// `self += scale · other` (weights must agree).
    pub fn add_scaled(&mut self, other: &FormalSum, scale: &Q) {
        assert_eq!(self.n, other.n, "cannot mix weights");
        for (f, c) in &other.terms {
            add_term(&mut self.terms, f.clone(), c * scale);
        }
    }

    pub fn scaled(&self, scale: &Q) -> FormalSum {
        let mut out = self.clone();
        scale_in_place(&mut out.terms, scale);
        out
    }

    /// Substitute `t ↦ μ(t)` in every symbol. An invertible change of
    /// variable preserves validity of functional equations.
    pub fn compose_mobius(&self, mu: &MobiusMap) -> FormalSum {
        let (a, b, c, d) = mu.entries();
        let terms: Vec<(RatFunc, Q)> = self
            .terms
            .iter()
            .map(|(f, co)| {
                let g = f
                    .compose_linear_fractional(a, b, c, d)
                    .expect("invertible substitution keeps functions defined");
                (g, co.clone())
            })
            .collect();
        FormalSum::new(self.n, terms)
    }
}

impl fmt::Display for FormalSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_linear(f, self.terms.iter().map(|(g, c)| (format!("[{g}]"), c)))
    }
}

// ---------------------------------------------------------------------------
// Cocycle images
// ---------------------------------------------------------------------------

/// Image of a formal sum under the weight-`n` cocycle map: a point divisor at
/// weight 1, a canonical mixed tensor at weights 2–4.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum JImage {
    Points(DivA),
    Tensor(ShTensor),
}

impl JImage {
    pub fn is_zero(&self) -> bool {
        match self {
            JImage::Points(d) => d.is_zero(),
            JImage::Tensor(x) => x.is_zero(),
        }
    }

    /// The tensor payload, for weights ≥ 2.
    pub fn as_tensor(&self) -> Option<&ShTensor> {
        match self {
            JImage::Tensor(x) => Some(x),
            JImage::Points(_) => None,
        }
    }

    pub fn as_points(&self) -> Option<&DivA> {
        match self {
            JImage::Points(d) => Some(d),
            JImage::Tensor(_) => None,
        }
    }
}

impl fmt::Display for JImage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            JImage::Points(d) => write!(f, "{d}"),
            JImage::Tensor(x) => {
                if x.n() == 2 {
                    // Rank-2 images read most naturally in wedge form.
                    write!(f, "{}", x.to_wedge())
                } else {
                    write!(f, "{x}")
                }
            }
        }
    }
}

/// Outcome of [`verify`]: `holds` iff the cocycle image vanishes; otherwise
/// the nonzero image is the witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub holds: bool,
    pub witness: Option<JImage>,
}

/// The weight-`n` cocycle map, extended ℚ-linearly over the sum.
///
/// Weight 1 sends `[φ]` to the divisor of `φ` (as a finite-point vector; the
/// point at infinity is dropped). Weights 2–4 send `[φ]` to
/// `(φ)^(n−1) ⊗ (1−φ)`, assembled from the two divisors and reduced to
/// canonical form. Every symbol and its complement must factor into linear
/// terms over ℚ; otherwise the offending function is named in the error.
pub fn j_map(sum: &FormalSum) -> Result<JImage, Error> {
    if sum.n == 1 {
        let mut out = DivA::zero();
        for (f, c) in &sum.terms {
            out.add_scaled(&DivA::from_divisor(f.divisor()?), c);
        }
        return Ok(JImage::Points(out));
    }
    let mut raw: Vec<((Mset, Q), Q)> = Vec::new();
    for (f, c) in &sum.terms {
        if f.is_constant() {
            // Constant symbols have empty divisors: zero contribution.
            continue;
        }
        let left = DivA::from_divisor(f.divisor()?);
        let complement = f
            .one_minus()
            .expect("support excludes the constant 1, so 1 - f is non-zero");
        let right = DivA::from_divisor(complement.divisor()?);
        let sym = sym_power(&left, sum.n - 1);
        for (m, a) in sym.iter() {
            for (y, b) in right.iter() {
                raw.push(((m.clone(), y.clone()), c * a * b));
            }
        }
    }
    Ok(JImage::Tensor(sh_reduce(sum.n, raw)))
}

/// Decide whether the sum is a valid functional equation: certify that its
/// cocycle image vanishes, or return the nonzero image as a witness.
pub fn verify(sum: &FormalSum) -> Result<Certificate, Error> {
    let image = j_map(sum)?;
    let holds = image.is_zero();
    Ok(Certificate {
        holds,
        witness: if holds { None } else { Some(image) },
    })
}

/// Order of vanishing of `f` at the finite point `p` (negative at poles).
pub(crate) fn psi(f: &RatFunc, p: &Q) -> i64 {
    f.order_at(&ProjPoint::Finite(p.clone()))
        .expect("order is defined for non-zero functions")
}

/// Weight-lowering derivation at a finite point `p`.
///
/// For weights 3 and 4 each symbol maps to itself one weight down, scaled by
/// its order at `p`. At weight 2 the image lives in the weight-1 space:
/// `[φ] ↦ ord_p(φ)·[1−φ] − ord_p(1−φ)·[φ]`. The result drops symbols whose
/// order at `p` vanishes; it commutes with the tensor-side derivation.
pub fn derive_p_formal(p: &Q, sum: &FormalSum) -> Result<FormalSum, Error> {
    assert!(sum.n >= 2, "derivation needs weight ≥ 2");
    let mut out: Vec<(RatFunc, Q)> = Vec::new();
    for (f, c) in &sum.terms {
        // The derivation is stated for symbols with split divisors; enforce
        // that here even though the order computation itself is more general.
        f.divisor()?;
        if f.is_constant() {
            continue;
        }
        let complement = f.one_minus().expect("support excludes the constant 1");
        complement.divisor()?;
        let ord_f = psi(f, p);
        if sum.n >= 3 {
            if ord_f != 0 {
                out.push((f.clone(), c * Q::from_integer(ord_f.into())));
            }
        } else {
            let ord_c = psi(&complement, p);
            if ord_f != 0 {
                out.push((complement.clone(), c * Q::from_integer(ord_f.into())));
            }
            if ord_c != 0 {
                out.push((f.clone(), -(c * Q::from_integer(ord_c.into()))));
            }
        }
    }
    Ok(FormalSum::new(sum.n - 1, out))
}

/// One member of the dual functional family deciding the same criterion.
///
/// For a point tuple `p_1..p_n` the value is
/// `Σ_i c_i · ord_{p_1}(φ_i)···ord_{p_(n−2)}(φ_i) ·
///   (ord_{p_(n−1)}(φ_i)·ord_{p_n}(1−φ_i) − ord_{p_(n−1)}(1−φ_i)·ord_{p_n}(φ_i))`.
///
/// It vanishes for every tuple exactly when [`verify`] holds. The value is
/// symmetric in the first `n−2` points and antisymmetric in the last two.
pub fn schur_dual_check(sum: &FormalSum, points: &[Q]) -> Result<Q, Error> {
    assert!(sum.n >= 2, "the dual family needs weight ≥ 2");
    assert_eq!(points.len(), sum.n, "tuple length must equal the weight");
    let mut total = Q::zero();
    for (f, c) in &sum.terms {
        f.divisor()?;
        if f.is_constant() {
            continue;
        }
        let complement = f.one_minus().expect("support excludes the constant 1");
        complement.divisor()?;
        let mut sym = 1i64;
        for p in &points[..sum.n - 2] {
            sym *= psi(f, p);
            if sym == 0 {
                break;
            }
        }
        if sym == 0 {
            continue;
        }
        let (u, v) = (&points[sum.n - 2], &points[sum.n - 1]);
        let bracket = psi(f, u) * psi(&complement, v) - psi(&complement, u) * psi(f, v);
        total += c * Q::from_integer((sym * bracket).into());
    }
    Ok(total)
}

/// Decide joint vanishing of the dual family over its finite sufficient set.
///
/// Points outside every divisor support have order zero in every symbol, so
/// tuples drawn from the union of supports (plus one extra point, asserting
/// exactly that) exhaust the criterion.
pub fn schur_dual_vanishes(sum: &FormalSum) -> Result<bool, Error> {
    assert!(sum.n >= 2);
    // Collect the sufficient point set and cache all orders.
    let mut points: BTreeSet<Q> = BTreeSet::new();
    let mut data: Vec<(Q, BTreeMap<Q, (i64, i64)>)> = Vec::new();
    for (f, c) in &sum.terms {
        f.divisor()?;
        if f.is_constant() {
            continue;
        }
        let complement = f.one_minus().expect("support excludes the constant 1");
        complement.divisor()?;
        for (p, _) in f.divisor()?.finite_parts() {
            points.insert(p.clone());
        }
        for (p, _) in complement.divisor()?.finite_parts() {
            points.insert(p.clone());
        }
        data.push((c.clone(), BTreeMap::new()));
    }
    let fresh = match points.iter().next_back() {
        Some(m) => m + Q::one(),
        None => return Ok(true),
    };
    points.insert(fresh);
    let points: Vec<Q> = points.into_iter().collect();
    for ((f, _), (_, cache)) in sum
        .terms
        .iter()
        .filter(|(f, _)| !f.is_constant())
        .zip(data.iter_mut())
    {
        let complement = f.one_minus().expect("non-constant");
        for p in &points {
            cache.insert(p.clone(), (psi(f, p), psi(&complement, p)));
        }
    }

    let n = sum.n;
    let k = points.len();
    let mut index = vec![0usize; n];
    loop {
        let mut total = Q::zero();
        for (c, cache) in &data {
            let mut sym = 1i64;
            for idx in &index[..n - 2] {
                sym *= cache[&points[*idx]].0;
                if sym == 0 {
                    break;
                }
            }
            if sym == 0 {
                continue;
            }
            let (fu, cu) = cache[&points[index[n - 2]]];
            let (fv, cv) = cache[&points[index[n - 1]]];
            let bracket = fu * cv - cu * fv;
            if bracket != 0 {
                total += c * Q::from_integer((sym * bracket).into());
            }
        }
        if !total.is_zero() {
            return Ok(false);
        }
        // Advance the odometer over all k^n tuples.
        let mut pos = 0;
        loop {
            if pos == n {
                return Ok(true);
            }
            index[pos] += 1;
            if index[pos] < k {
                break;
            }
            index[pos] = 0;
            pos += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::random_split_function;
    use crate::tensor::WedgeAA;
    use crate::{q, qi};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn f(s: &str) -> RatFunc {
        s.parse().unwrap()
    }

    fn sum1(n: usize, s: &str) -> FormalSum {
        FormalSum::singleton(n, f(s))
    }

    fn tensor(image: &JImage) -> &ShTensor {
        image.as_tensor().expect("tensor-valued image")
    }

    #[test]
    fn strips_degenerate_constants_and_keeps_others() {
        let s = FormalSum::new(
            2,
            [
                (f("0"), qi(5)),
                (f("1"), qi(7)),
                (f("1/2"), qi(3)),
                (f("t"), qi(1)),
            ],
        );
        assert_eq!(s.term_count(), 2);
        assert_eq!(s.stripped().len(), 2);
        assert_eq!(s.coeff(&f("1/2")), qi(3));
        // Constants away from 0 and 1 contribute nothing to the image.
        let img = j_map(&s).unwrap();
        assert_eq!(tensor(&img), tensor(&j_map(&sum1(2, "t")).unwrap()));
    }

    #[test]
    fn weight_two_image_of_quadratic() {
        // [2t − t²] ↦ 2[0]∧[1] + 2[2]∧[1].
        let img = j_map(&sum1(2, "2*t - t^2")).unwrap();
        let mut expect = WedgeAA::zero();
        expect.add_wedge(&qi(0), &qi(1), &qi(2));
        expect.add_wedge(&qi(2), &qi(1), &qi(2));
        assert_eq!(tensor(&img).to_wedge(), expect);
        assert_eq!(format!("{img}"), "2*[0]^[1] - 2*[1]^[2]");
    }

    #[test]
    fn weight_four_image_of_linear() {
        // [t − 2] ↦ {2,2,2}⊗[3].
        let img = j_map(&sum1(4, "t - 2")).unwrap();
        let expect = sh_reduce(4, [((Mset::new(vec![qi(2); 3]), qi(3)), qi(1))]);
        assert_eq!(tensor(&img), &expect);
        assert_eq!(format!("{img}"), "1*[2][2][2]⊗[3]");
    }

    #[test]
    fn weight_three_image_of_normalized_linear() {
        // [(t−a)/(b−a)] ↦ {a,a}⊗[b] for several (a, b).
        for (a, b) in [(0i64, 1i64), (2, 5), (-3, 4), (7, -2)] {
            let func = RatFunc::new(
                crate::poly::Poly::new(vec![qi(-a), qi(1)]),
                crate::poly::Poly::new(vec![qi(b - a)]),
            )
            .unwrap();
            let img = j_map(&FormalSum::singleton(3, func)).unwrap();
            let expect = sh_reduce(3, [((Mset::new(vec![qi(a); 2]), qi(b)), qi(1))]);
            assert_eq!(tensor(&img), &expect);
        }
    }

    #[test]
    fn weight_one_image_is_the_divisor() {
        let img = j_map(&sum1(1, "(t - 3)/(t + 1)")).unwrap();
        let d = img.as_points().unwrap();
        assert_eq!(d.coeff(&qi(3)), qi(1));
        assert_eq!(d.coeff(&qi(-1)), qi(-1));
        // [t − x] ↦ [x].
        let img = j_map(&sum1(1, "t - 5")).unwrap();
        assert_eq!(img.as_points().unwrap(), &DivA::single(qi(5)));
    }

    #[test]
    fn non_split_functions_are_named() {
        let err = j_map(&sum1(2, "(t^2 + 1)/(t - 1)")).unwrap_err();
        match err {
            Error::NonSplitDivisor { func } => assert!(func.contains("t^2 + 1")),
            other => panic!("unexpected error {other:?}"),
        }
        // Split f with non-split complement is also rejected: 1 − (t²+t+1) has
        // no rational roots... choose one explicitly: f = -t^2 - t, 1-f = t^2+t+1.
        let err = j_map(&sum1(2, "-t^2 - t")).unwrap_err();
        match err {
            Error::NonSplitDivisor { func } => assert!(func.contains("t^2 + t + 1")),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn verify_reports_witness_and_empty_sum_holds() {
        let cert = verify(&FormalSum::empty(3)).unwrap();
        assert!(cert.holds);
        assert!(cert.witness.is_none());

        let cert = verify(&sum1(2, "2*t - t^2")).unwrap();
        assert!(!cert.holds);
        let witness = cert.witness.unwrap();
        assert_eq!(format!("{witness}"), "2*[0]^[1] - 2*[1]^[2]");
    }

    #[test]
    fn complement_pair_is_a_weight_two_equation() {
        // [φ] + [1−φ] always verifies at weight 2: the wedge factors swap.
        let mut rng = ChaCha8Rng::seed_from_u64(420);
        for _ in 0..25 {
            let phi = random_split_function(&mut rng, 2);
            let complement = phi.one_minus().unwrap();
            let s = FormalSum::new(2, [(phi, qi(1)), (complement, qi(1))]);
            assert!(verify(&s).unwrap().holds);
        }
    }

    #[test]
    fn reciprocal_pair_is_a_weight_two_equation() {
        // [φ] + [1/φ] also verifies at weight 2.
        let mut rng = ChaCha8Rng::seed_from_u64(421);
        for _ in 0..25 {
            let phi = random_split_function(&mut rng, 2);
            if phi.one_minus().is_err() {
                continue;
            }
            let s = FormalSum::new(2, [(phi.clone(), qi(1)), (phi.recip().unwrap(), qi(1))]);
            assert!(verify(&s).unwrap().holds);
        }
    }

    #[test]
    fn j_map_is_linear() {
        let mut rng = ChaCha8Rng::seed_from_u64(422);
        for n in 2..=4usize {
            for _ in 0..10 {
                let f1 = random_split_function(&mut rng, 2);
                let f2 = random_split_function(&mut rng, 2);
                let c1 = qi(rng.gen_range(-5i64..=5));
                let c2 = qi(rng.gen_range(-5i64..=5));
                let mut combo = FormalSum::new(n, [(f1.clone(), c1.clone())]);
                combo.add_scaled(&FormalSum::new(n, [(f2.clone(), c2.clone())]), &Q::one());
                let lhs = j_map(&combo).unwrap();
                let mut rhs = ShTensor::zero(n);
                rhs.add_scaled(
                    tensor(&j_map(&FormalSum::singleton(n, f1)).unwrap()),
                    &c1,
                );
                rhs.add_scaled(
                    tensor(&j_map(&FormalSum::singleton(n, f2)).unwrap()),
                    &c2,
                );
                assert_eq!(tensor(&lhs), &rhs);
            }
        }
    }

    #[test]
    fn mobius_substitution_preserves_validity() {
        let mut rng = ChaCha8Rng::seed_from_u64(423);
        let mut checked = 0;
        while checked < 15 {
            let phi = random_split_function(&mut rng, 2);
            let s = FormalSum::new(
                2,
                [(phi.clone(), qi(1)), (phi.one_minus().unwrap(), qi(1))],
            );
            // Random invertible integer Möbius map.
            let (a, b, c, d) = (
                rng.gen_range(-4i64..=4),
                rng.gen_range(-4i64..=4),
                rng.gen_range(-4i64..=4),
                rng.gen_range(-4i64..=4),
            );
            if a * d == b * c {
                continue;
            }
            let mu = MobiusMap::new(qi(a), qi(b), qi(c), qi(d)).unwrap();
            let t = s.compose_mobius(&mu);
            // Substitution can push divisor points around but never breaks
            // splitness for these families; the composed sum must verify.
            assert!(verify(&t).unwrap().holds);
            checked += 1;
        }
    }

    #[test]
    fn derivation_examples() {
        // Weight 4 at p = 2: [t−2] ↦ [t−2] one weight down.
        let d = derive_p_formal(&qi(2), &sum1(4, "t - 2")).unwrap();
        assert_eq!(d.weight(), 3);
        assert_eq!(d.coeff(&f("t - 2")), qi(1));
        assert_eq!(d.term_count(), 1);

        // Weight 2 at p = 0: [2t−t²] ↦ [(1−t)²] (the complement), since the
        // complement has order 0 at p.
        let d = derive_p_formal(&qi(0), &sum1(2, "2*t - t^2")).unwrap();
        assert_eq!(d.weight(), 1);
        assert_eq!(d.coeff(&f("t^2 - 2*t + 1")), qi(1));
        assert_eq!(d.term_count(), 1);

        // Order zero everywhere in the support: zero sum.
        let d = derive_p_formal(&qi(5), &sum1(3, "t - 2")).unwrap();
        assert!(d.is_empty());
    }

    #[test]
    fn derivation_commutes_with_tensor_derivation() {
        // j ∘ D_p = D_p ∘ j at weights 3 and 4, over all support points and
        // a fresh one.
        let mut rng = ChaCha8Rng::seed_from_u64(424);
        for n in [3usize, 4] {
            for _ in 0..50 {
                let f1 = random_split_function(&mut rng, 2);
                let f2 = random_split_function(&mut rng, 2);
                let s = FormalSum::new(
                    n,
                    [
                        (f1, qi(rng.gen_range(-3i64..=3))),
                        (f2, qi(rng.gen_range(-3i64..=3))),
                    ],
                );
                let image = j_map(&s).unwrap();
                let image = tensor(&image);
                let mut points: BTreeSet<Q> = image.point_support();
                for (g, _) in s.iter() {
                    for (p, _) in g.divisor().unwrap().finite_parts() {
                        points.insert(p.clone());
                    }
                }
                points.insert(qi(99));
                for p in points {
                    let lowered = derive_p_formal(&p, &s).unwrap();
                    let lhs = j_map(&lowered).unwrap();
                    let rhs = image.derive_p(&p);
                    match (&lhs, n) {
                        (JImage::Tensor(x), 4) => assert_eq!(x, &rhs),
                        (JImage::Tensor(x), 3) => assert_eq!(x, &rhs),
                        _ => panic!("unexpected image shape"),
                    }
                }
            }
        }
    }

    #[test]
    fn derivation_commutes_into_weight_one() {
        // The weight-2 derivation lands in the point space; compare against
        // the contraction of the wedge image.
        let mut rng = ChaCha8Rng::seed_from_u64(425);
        for _ in 0..40 {
            let phi = random_split_function(&mut rng, 2);
            let s = FormalSum::new(2, [(phi, qi(rng.gen_range(1i64..=3)))]);
            let image = tensor(&j_map(&s).unwrap()).clone();
            let mut points: BTreeSet<Q> = image.point_support();
            points.insert(qi(99));
            for p in points {
                let lowered = derive_p_formal(&p, &s).unwrap();
                let lhs = j_map(&lowered).unwrap();
                // Contraction of Λ²: [x]∧[y] ↦ ord-style pairing via the
                // reduced tensor derivation at weight 2 → weight 1 vectors.
                let rhs = weight_two_contraction(&image, &p);
                assert_eq!(lhs.as_points().unwrap(), &rhs);
            }
        }
    }

    /// Contract a weight-2 tensor at `p`: `({x}, y) ↦ δ_{x,p}[y] − δ_{y,p}[x]`.
    fn weight_two_contraction(x: &ShTensor, p: &Q) -> DivA {
        assert_eq!(x.n(), 2);
        let mut out = DivA::zero();
        for ((m, y), c) in x.iter() {
            let xpt = &m.points()[0];
            if xpt == p {
                out.add_scaled(&DivA::single(y.clone()), c);
            }
            if y == p {
                out.add_scaled(&DivA::single(xpt.clone()), &-c.clone());
            }
        }
        out
    }

    #[test]
    fn dual_family_symmetries() {
        let mut rng = ChaCha8Rng::seed_from_u64(426);
        for n in 2..=4usize {
            for _ in 0..15 {
                let f1 = random_split_function(&mut rng, 2);
                let f2 = random_split_function(&mut rng, 2);
                let s = FormalSum::new(n, [(f1, qi(2)), (f2, qi(-3))]);
                let pts: Vec<Q> = (0..n).map(|_| qi(rng.gen_range(-4i64..=4))).collect();
                let base = schur_dual_check(&s, &pts).unwrap();
                // Swap the last two points: antisymmetry.
                let mut swapped = pts.clone();
                swapped.swap(n - 2, n - 1);
                assert_eq!(schur_dual_check(&s, &swapped).unwrap(), -base.clone());
                // Permute the symmetric block: invariance.
                if n >= 4 {
                    let mut perm = pts.clone();
                    perm.swap(0, 1);
                    assert_eq!(schur_dual_check(&s, &perm).unwrap(), base);
                }
            }
        }
    }

    #[test]
    fn dual_family_vanishing_agrees_with_verify() {
        let mut rng = ChaCha8Rng::seed_from_u64(427);
        let mut zeros = 0;
        for n in 2..=4usize {
            for trial in 0..30 {
                let s = if n == 2 && trial % 2 == 0 {
                    // Known equation: complement pair.
                    let phi = random_split_function(&mut rng, 2);
                    let c = phi.one_minus().unwrap();
                    FormalSum::new(2, [(phi, qi(1)), (c, qi(1))])
                } else {
                    let f1 = random_split_function(&mut rng, 2);
                    let f2 = random_split_function(&mut rng, 2);
                    FormalSum::new(
                        n,
                        [
                            (f1, qi(rng.gen_range(-2i64..=2))),
                            (f2, qi(rng.gen_range(-2i64..=2))),
                        ],
                    )
                };
                let holds = verify(&s).unwrap().holds;
                if holds {
                    zeros += 1;
                }
                assert_eq!(schur_dual_vanishes(&s).unwrap(), holds);
            }
        }
        assert!(zeros >= 10, "agreement test needs zero cases, got {zeros}");
    }
}
