//! The ℚ-vector space A on affine rational points and the tensor spaces
//! built from it: symmetric powers Sym^k A, the wedge square A∧A, and the
//! quotient space S^{n−1,1}A = (Sym^{n−1}A ⊗ A)/Sym^n A in which the
//! weight-n cocycle images live.  Elements of the quotient are kept in a
//! reduced canonical form, so equality of cosets is equality of maps; the
//! point derivations D_p descend to the quotient and provide an independent
//! recursive zero test.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};

use crate::lincomb::add_term;
use crate::ratfunc::Divisor;
use crate::Q;

// ---------------------------------------------------------------------------
// Multisets of points
// ---------------------------------------------------------------------------

/// A finite multiset of rational points, stored sorted.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mset(Vec<Q>);

impl Mset {
    pub fn new(mut points: Vec<Q>) -> Self {
        points.sort();
        Mset(points)
    }

    pub fn empty() -> Self {
        Mset(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn points(&self) -> &[Q] {
        &self.0
    }

    /// Number of copies of `x`.
    pub fn count(&self, x: &Q) -> usize {
        self.0.iter().filter(|p| *p == x).count()
    }

    /// Smallest point (None for the empty multiset).
    pub fn min_point(&self) -> Option<&Q> {
        self.0.first()
    }

    /// Distinct points with multiplicities, in increasing order.
    pub fn multiplicities(&self) -> Vec<(Q, usize)> {
        let mut out: Vec<(Q, usize)> = Vec::new();
        for p in &self.0 {
            match out.last_mut() {
                Some((q, m)) if q == p => *m += 1,
                _ => out.push((p.clone(), 1)),
            }
        }
        out
    }

    pub fn distinct_count(&self) -> usize {
        self.multiplicities().len()
    }

    /// This multiset with one extra copy of `y`.
    pub fn with(&self, y: &Q) -> Mset {
        let idx = self.0.partition_point(|p| p < y);
        let mut v = self.0.clone();
        v.insert(idx, y.clone());
        Mset(v)
    }

    /// This multiset with one copy of `x` removed (x must be present).
    pub fn without(&self, x: &Q) -> Mset {
        let idx = self.0.iter().position(|p| p == x).expect("point present");
        let mut v = self.0.clone();
        v.remove(idx);
        Mset(v)
    }
}

impl fmt::Display for Mset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.0 {
            write!(f, "[{p}]")?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// The space A
// ---------------------------------------------------------------------------

/// Element of A: a ℚ-linear combination of affine rational points, with the
/// point at infinity identified with 0 (it is dropped at construction).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DivA {
    coeffs: BTreeMap<Q, Q>,
}

impl DivA {
    pub fn zero() -> Self {
        DivA::default()
    }

    pub fn new(coeffs: BTreeMap<Q, Q>) -> Self {
        let coeffs = coeffs.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        DivA { coeffs }
    }

    /// The basis vector [p].
    pub fn single(p: Q) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(p, Q::one());
        DivA { coeffs }
    }

    /// Divisor of a rational function as an element of A: finite points keep
    /// their multiplicities, ∞ is dropped ([∞] = 0).
    pub fn from_divisor(d: &Divisor) -> Self {
        let mut coeffs = BTreeMap::new();
        for (p, m) in d.finite_parts() {
            coeffs.insert(p.clone(), Q::from_integer((*m).into()));
        }
        DivA { coeffs }
    }

    pub fn coeff(&self, p: &Q) -> Q {
        self.coeffs.get(p).cloned().unwrap_or_else(Q::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Q, &Q)> {
        self.coeffs.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &Q> {
        self.coeffs.keys()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add_scaled(&mut self, other: &DivA, scale: &Q) {
        for (p, c) in &other.coeffs {
            add_term(&mut self.coeffs, p.clone(), scale * c);
        }
    }
}

impl std::ops::Add for &DivA {
    type Output = DivA;
    fn add(self, rhs: &DivA) -> DivA {
        let mut out = self.clone();
        out.add_scaled(rhs, &Q::one());
        out
    }
}

impl std::ops::Sub for &DivA {
    type Output = DivA;
    fn sub(self, rhs: &DivA) -> DivA {
        let mut out = self.clone();
        out.add_scaled(rhs, &-Q::one());
        out
    }
}

impl fmt::Display for DivA {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_linear(f, self.coeffs.iter().map(|(p, c)| (format!("[{p}]"), c)))
    }
}

// ---------------------------------------------------------------------------
// Symmetric powers
// ---------------------------------------------------------------------------

/// Element of Sym^k A: combination of size-k multisets of points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymTensor {
    k: usize,
    terms: BTreeMap<Mset, Q>,
}

impl SymTensor {
    pub fn zero(k: usize) -> Self {
        SymTensor {
            k,
            terms: BTreeMap::new(),
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Mset) -> Q {
        self.terms.get(m).cloned().unwrap_or_else(Q::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Mset, &Q)> {
        self.terms.iter()
    }

    /// D_p: remove one copy of p from each multiset, weighted by its
    /// multiplicity.
    pub fn derive_p(&self, p: &Q) -> SymTensor {
        assert!(self.k >= 1, "cannot derive Sym^0");
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let mult = m.count(p);
            if mult > 0 {
                add_term(
                    &mut terms,
                    m.without(p),
                    c * Q::from_integer((mult as i64).into()),
                );
            }
        }
        SymTensor {
            k: self.k - 1,
            terms,
        }
    }
}

/// The k-th symmetric power d^k of an element of A, fully expanded.
pub fn sym_power(d: &DivA, k: usize) -> SymTensor {
    assert!(k >= 1, "symmetric power needs k >= 1");
    let mut terms: BTreeMap<Mset, Q> = BTreeMap::new();
    terms.insert(Mset::empty(), Q::one());
    for _ in 0..k {
        let mut next: BTreeMap<Mset, Q> = BTreeMap::new();
        for (m, c) in &terms {
            for (p, w) in d.iter() {
                add_term(&mut next, m.with(p), c * w);
            }
        }
        terms = next;
    }
    SymTensor { k, terms }
}

impl fmt::Display for SymTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_linear(f, self.terms.iter().map(|(k, c)| (format!("{k}"), c)))
    }
}

// A tiny shared writer for "c1*X1 + c2*X2 − ..." output.
pub(crate) fn write_linear<'a>(
    f: &mut fmt::Formatter<'_>,
    terms: impl Iterator<Item = (String, &'a Q)>,
) -> fmt::Result {
    let mut first = true;
    for (body, c) in terms {
        if first {
            write!(f, "{c}*{body}")?;
            first = false;
        } else if c < &Q::zero() {
            write!(f, " - {}*{body}", -c)?;
        } else {
            write!(f, " + {c}*{body}")?;
        }
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Wedge square
// ---------------------------------------------------------------------------

/// Element of A∧A: combination of ordered pairs p < q.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WedgeAA {
    terms: BTreeMap<(Q, Q), Q>,
}

impl WedgeAA {
    pub fn zero() -> Self {
        WedgeAA::default()
    }

    /// Add c·[p]∧[q] (antisymmetry applied; [p]∧[p] vanishes).
    pub fn add_wedge(&mut self, p: &Q, q: &Q, c: &Q) {
        match p.cmp(q) {
            std::cmp::Ordering::Equal => {}
            std::cmp::Ordering::Less => {
                add_term(&mut self.terms, (p.clone(), q.clone()), c.clone())
            }
            std::cmp::Ordering::Greater => {
                add_term(&mut self.terms, (q.clone(), p.clone()), -c.clone())
            }
        }
    }

    pub fn add_scaled(&mut self, other: &WedgeAA, scale: &Q) {
        for ((p, q), c) in &other.terms {
            add_term(&mut self.terms, (p.clone(), q.clone()), scale * c);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(Q, Q), &Q)> {
        self.terms.iter()
    }

    pub fn coeff(&self, p: &Q, q: &Q) -> Q {
        match p.cmp(q) {
            std::cmp::Ordering::Equal => Q::zero(),
            std::cmp::Ordering::Less => self
                .terms
                .get(&(p.clone(), q.clone()))
                .cloned()
                .unwrap_or_else(Q::zero),
            std::cmp::Ordering::Greater => -self.coeff(q, p),
        }
    }
}

/// x∧y for x, y ∈ A.
pub fn wedge_product(x: &DivA, y: &DivA) -> WedgeAA {
    let mut out = WedgeAA::zero();
    for (p, a) in x.iter() {
        for (q, b) in y.iter() {
            out.add_wedge(p, q, &(a * b));
        }
    }
    out
}

impl fmt::Display for WedgeAA {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_linear(
            f,
            self.terms.iter().map(|((p, q), c)| (format!("[{p}]^[{q}]"), c)),
        )
    }
}

// ---------------------------------------------------------------------------
// The quotient S^{n−1,1}A
// ---------------------------------------------------------------------------

/// Element of S^{n−1,1}A in reduced canonical form: keys are pairs
/// (size-(n−1) multiset N, point y) with y ≠ min supp(N + {y}), and pairs
/// whose multiset N + {y} has a single distinct point never appear.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShTensor {
    n: usize,
    terms: BTreeMap<(Mset, Q), Q>,
}

/// The relation vector attached to a size-n multiset M:
/// Σ_x mult_M(x) · (M∖x, x) over the distinct points x of M.  The canonical
/// form is obtained by eliminating, for each M, the generator with the
/// smallest right factor using this relation.
pub fn relation_vector(m: &Mset) -> Vec<((Mset, Q), Q)> {
    m.multiplicities()
        .into_iter()
        .map(|(x, mult)| {
            (
                (m.without(&x), x),
                Q::from_integer((mult as i64).into()),
            )
        })
        .collect()
}

/// Rewrite one raw generator (N, y) into canonical terms.
fn reduce_generator(gen_n: &Mset, y: &Q) -> Vec<((Mset, Q), Q)> {
    let m = gen_n.with(y);
    if m.distinct_count() <= 1 {
        return Vec::new();
    }
    let m_star = m.min_point().expect("nonempty multiset").clone();
    if *y != m_star {
        return vec![((gen_n.clone(), y.clone()), Q::one())];
    }
    let mult_star = Q::from_integer((m.count(&m_star) as i64).into());
    m.multiplicities()
        .into_iter()
        .filter(|(x, _)| *x != m_star)
        .map(|(x, mult)| {
            (
                (m.without(&x), x),
                -Q::from_integer((mult as i64).into()) / &mult_star,
            )
        })
        .collect()
}

/// Quotient map: reduce a raw combination of Sym^{n−1}A ⊗ A generators to
/// canonical form in S^{n−1,1}A.
pub fn sh_reduce(
    n: usize,
    raw: impl IntoIterator<Item = ((Mset, Q), Q)>,
) -> ShTensor {
    assert!((2..=4).contains(&n), "quotient space defined for n in 2..=4");
    let mut terms: BTreeMap<(Mset, Q), Q> = BTreeMap::new();
    for ((gen_n, y), c) in raw {
        assert_eq!(gen_n.len(), n - 1, "left multiset must have size n-1");
        if c.is_zero() {
            continue;
        }
        for (key, w) in reduce_generator(&gen_n, &y) {
            add_term(&mut terms, key, &c * &w);
        }
    }
    ShTensor { n, terms }
}

impl ShTensor {
    pub fn zero(n: usize) -> Self {
        ShTensor {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(Mset, Q), &Q)> {
        self.terms.iter()
    }

    pub fn coeff(&self, key: &(Mset, Q)) -> Q {
        self.terms.get(key).cloned().unwrap_or_else(Q::zero)
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn add_scaled(&mut self, other: &ShTensor, scale: &Q) {
        assert_eq!(self.n, other.n, "mixed weights");
        for (key, c) in &other.terms {
            add_term(&mut self.terms, key.clone(), scale * c);
        }
    }

    pub fn scaled(&self, scale: &Q) -> ShTensor {
        let mut out = ShTensor::zero(self.n);
        out.add_scaled(self, scale);
        out
    }

    /// All points appearing in left multisets or right factors.
    pub fn point_support(&self) -> BTreeSet<Q> {
        let mut pts = BTreeSet::new();
        for ((n_part, y), _) in &self.terms {
            pts.extend(n_part.points().iter().cloned());
            pts.insert(y.clone());
        }
        pts
    }

    /// The induced derivation: D_p ⊗ id on the left factor, scaled by
    /// 1/(n−1), followed by reduction.  Well defined on the quotient because
    /// D_p maps relation vectors into the relation span; the scalar is chosen
    /// so that deriving the cocycle image of a weight-n argument gives
    /// exactly the weight-(n−1) cocycle of its derived formal sum (a left
    /// multiset coming from a (n−1)-st power sheds its factor n−1 here).
    pub fn derive_p(&self, p: &Q) -> ShTensor {
        assert!(self.n >= 3, "derivation lands in weight >= 2");
        let scale = Q::new(1.into(), ((self.n - 1) as i64).into());
        let raw = self.terms.iter().flat_map(|((n_part, y), c)| {
            let mult = n_part.count(p);
            if mult == 0 {
                None
            } else {
                Some((
                    (n_part.without(p), y.clone()),
                    c * Q::from_integer((mult as i64).into()) * &scale,
                ))
            }
        });
        sh_reduce(self.n - 1, raw)
    }

    /// The canonical isomorphism S^{1,1}A ≅ A∧A, ({x}, y) ↦ [x]∧[y].
    pub fn to_wedge(&self) -> WedgeAA {
        assert_eq!(self.n, 2, "wedge form exists at weight 2 only");
        let mut out = WedgeAA::zero();
        for ((n_part, y), c) in &self.terms {
            let x = &n_part.points()[0];
            out.add_wedge(x, y, c);
        }
        out
    }

    /// Inverse of [`ShTensor::to_wedge`].
    pub fn from_wedge(w: &WedgeAA) -> ShTensor {
        sh_reduce(
            2,
            w.iter().map(|((p, q), c)| {
                ((Mset::new(vec![p.clone()]), q.clone()), c.clone())
            }),
        )
    }
}

impl fmt::Display for ShTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_linear(
            f,
            self.terms
                .iter()
                .map(|((n_part, y), c)| (format!("{n_part}⊗[{y}]"), c)),
        )
    }
}

/// Independent recursive zero test through the joint derivation ⊕D_p, which
/// is injective: an element is zero iff all its derivations vanish, down to
/// weight 2 where the canonical form is a free basis.  `points` should cover
/// the support of `x`; the support is included automatically.
pub fn joint_injectivity_check(x: &ShTensor, points: &[Q]) -> bool {
    if x.n() == 2 {
        return x.is_zero();
    }
    let mut pts = x.point_support();
    pts.extend(points.iter().cloned());
    pts.iter()
        .all(|p| joint_injectivity_check(&x.derive_p(p), points))
}
