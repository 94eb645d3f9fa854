//! The weight-two Bloch group model and the maps connecting it to weight-four
//! tensors.
//!
//! Elements are finite ℚ-linear combinations of symbols `{z}₂` indexed by
//! rational numbers `z ∉ {0, 1}`.  Two symbols whose arguments lie in the same
//! orbit of the six-element anharmonic group agree up to sign, so every
//! combination is stored in a normal form with one representative per orbit.
//! Deciding whether an element vanishes modulo the five-term relation is
//! undecidable in general; [`b2_is_zero`] searches a budgeted span of
//! explicitly generated five-term relation vectors and reports `Zero`,
//! or honestly `Unknown` when the budget is exhausted.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::Error;
use crate::lincomb::{add_scaled, add_term};
use crate::point::{cross_ratio, ProjPoint};
use crate::solve::SpanSolver;
use crate::tensor::{sh_reduce, write_linear, Mset, ShTensor};
use crate::Q;

/// The six anharmonic images of `z`, in a fixed slot order, paired with the
/// sign each slot carries: `z`, `1/z`, `1−z`, `1/(1−z)`, `z/(z−1)`,
/// `(z−1)/z` with signs `+ − − + − +`.
fn orbit_with_signs(z: &Q) -> [(Q, i64); 6] {
    let one = Q::one();
    let zm1 = z - &one;
    [
        (z.clone(), 1),
        (one.clone() / z, -1),
        (&one - z, -1),
        (-one.clone() / &zm1, 1),
        (z / &zm1, -1),
        (zm1 / z, 1),
    ]
}

/// Folds one symbol argument to its orbit representative.
///
/// Returns `None` when the symbol is degenerate (`z ∈ {0, 1}`, where the
/// symbol vanishes) or when the orbit identifies the representative with its
/// own negative (the 2-torsion orbit `{−1, 1/2, 2}`, which dies in the
/// ℚ-vector space).  Otherwise returns the representative — the orbit member
/// minimal under comparison of `(numerator, denominator)` in reduced form —
/// together with the sign relating `{z}₂` to `{rep}₂`.
fn orbit_fold(z: &Q) -> Option<(Q, i64)> {
    if z.is_zero() || z.is_one() {
        return None;
    }
    let orbit = orbit_with_signs(z);
    let rep = orbit
        .iter()
        .map(|(v, _)| v)
        .min_by(|a, b| (a.numer(), a.denom()).cmp(&(b.numer(), b.denom())))
        .expect("orbit is non-empty")
        .clone();
    let mut sign: Option<i64> = None;
    for (v, s) in &orbit {
        if *v == rep {
            match sign {
                None => sign = Some(*s),
                Some(prev) if prev != *s => return None,
                Some(_) => {}
            }
        }
    }
    Some((rep, sign.expect("representative occurs in its own orbit")))
}

/// An element of the weight-two Bloch space in orbit-folded normal form.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct B2Elem {
    terms: BTreeMap<Q, Q>,
}

impl B2Elem {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Coefficient of the symbol whose orbit representative is `rep`.
    pub fn coeff(&self, rep: &Q) -> Q {
        self.terms.get(rep).cloned().unwrap_or_else(Q::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Q, &Q)> {
        self.terms.iter()
    }

    /// Orbit representatives carrying a nonzero coefficient.
    pub fn support(&self) -> Vec<Q> {
        self.terms.keys().cloned().collect()
    }

    pub fn add_scaled(&mut self, other: &Self, c: &Q) {
        add_scaled(&mut self.terms, &other.terms, c);
    }

    pub fn scaled(&self, c: &Q) -> Self {
        let mut out = Self::zero();
        out.add_scaled(self, c);
        out
    }

    pub(crate) fn as_sparse(&self) -> &BTreeMap<Q, Q> {
        &self.terms
    }
}

impl fmt::Display for B2Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        write_linear(f, self.terms.iter().map(|(z, c)| (format!("{{{z}}}_2"), c)))
    }
}

/// Builds a normal-form element from raw `(argument, coefficient)` pairs.
///
/// Arguments at `∞`, `0`, or `1` are dropped (their symbols vanish), every
/// other argument is folded to its orbit representative with the appropriate
/// sign, and arguments in the 2-torsion orbit `{−1, 1/2, 2}` are dropped.
pub fn b2_normalize(raw: impl IntoIterator<Item = (ProjPoint, Q)>) -> B2Elem {
    let mut terms = BTreeMap::new();
    for (p, c) in raw {
        let ProjPoint::Finite(z) = p else { continue };
        let Some((rep, sign)) = orbit_fold(&z) else {
            continue;
        };
        add_term(&mut terms, rep, c * Q::from_integer(sign.into()));
    }
    B2Elem { terms }
}

/// The five-term relation vector attached to five distinct points of ℙ¹(ℚ):
/// the alternating sum `Σᵢ (−1)ⁱ {r(p₀, …, p̂ᵢ, …, p₄)}₂` of the cross-ratios
/// of the five four-point faces, in normal form.
pub fn five_term_vector(points: &[ProjPoint; 5]) -> Result<B2Elem, Error> {
    for i in 0..5 {
        for j in (i + 1)..5 {
            if points[i] == points[j] {
                return Err(Error::UndefinedCrossRatio);
            }
        }
    }
    let mut raw = Vec::with_capacity(5);
    let mut sign = Q::one();
    for i in 0..5 {
        let face: Vec<&ProjPoint> = (0..5).filter(|&j| j != i).map(|j| &points[j]).collect();
        let value = cross_ratio(face[0], face[1], face[2], face[3])
            .expect("distinct points have a defined cross-ratio");
        raw.push((value, sign.clone()));
        sign = -sign;
    }
    Ok(b2_normalize(raw))
}

/// Outcome of a budgeted zero test in the Bloch space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum B2Status {
    /// The element is an explicit combination of five-term relation vectors.
    Zero,
    /// The element is provably nonzero (no certification route is currently
    /// implemented, so this variant is never produced).
    NonZeroCertified,
    /// The search budget was exhausted without a certificate either way.
    Unknown,
}

/// Search budget for [`b2_is_zero`].
#[derive(Clone, Debug)]
pub struct B2Budget {
    /// Rounds of pool closure under cross-ratios of pool points.
    pub depth: usize,
    /// Extra seed points for the relation pool, tried with highest priority.
    pub extra_points: Vec<ProjPoint>,
    /// Hard cap on the number of pool points.
    pub max_pool: usize,
    /// Hard cap on the number of relation vectors inserted into the solver.
    pub max_relations: usize,
}

impl B2Budget {
    pub fn depth(depth: usize) -> Self {
        Self {
            depth,
            extra_points: Vec::new(),
            max_pool: 24,
            max_relations: 6_000,
        }
    }

    pub fn with_points(depth: usize, extra_points: Vec<ProjPoint>) -> Self {
        Self {
            extra_points,
            ..Self::depth(depth)
        }
    }
}

/// Measures how "large" a rational is, for prioritising small pool points.
pub(crate) fn height(q: &Q) -> num_bigint::BigInt {
    let n = q.numer().magnitude().clone();
    let d = q.denom().magnitude().clone();
    num_bigint::BigInt::from(n.max(d))
}

/// Appends `p` to the pool unless it is already present.
fn pool_push(pool: &mut Vec<ProjPoint>, p: ProjPoint) {
    if !pool.contains(&p) {
        pool.push(p);
    }
}

/// Budgeted decision procedure for vanishing in the Bloch space.
///
/// The element vanishes exactly when it is a ℚ-combination of five-term
/// relation vectors.  The search pool starts from the caller's extra points,
/// the standard points `0, 1, ∞`, the element's support, and the full
/// anharmonic orbit of each support value (orbit members name the same
/// symbols up to sign, so this costs nothing in generality while exposing
/// the classical two-variable relations through `(0, 1, ∞, u, v)` tuples);
/// each closure round (up to `budget.depth`) then adjoins cross-ratio values
/// of pool four-tuples, smallest first, up to `budget.max_pool` points.  One
/// relation vector per five-point subset of the pool is fed to an exact span
/// solver, and the element is reported `Zero` as soon as it lies in the
/// accumulated span.  Exhausting the budget yields `Unknown` — never a false
/// `Zero`, since every generator genuinely vanishes.
pub fn b2_is_zero(e: &B2Elem, budget: &B2Budget) -> B2Status {
    if e.is_zero() {
        return B2Status::Zero;
    }

    let mut pool: Vec<ProjPoint> = Vec::new();
    let mut seeds = budget.extra_points.clone();
    seeds.sort();
    for p in seeds {
        pool_push(&mut pool, p);
    }
    pool_push(&mut pool, ProjPoint::Finite(Q::zero()));
    pool_push(&mut pool, ProjPoint::Finite(Q::one()));
    pool_push(&mut pool, ProjPoint::Infinity);
    for z in e.support() {
        pool_push(&mut pool, ProjPoint::Finite(z));
    }
    for z in e.support() {
        for (w, _) in orbit_with_signs(&z) {
            pool_push(&mut pool, ProjPoint::Finite(w));
        }
    }
    pool.truncate(budget.max_pool);

    for _ in 0..budget.depth {
        if pool.len() >= budget.max_pool {
            break;
        }
        // Collect candidate cross-ratio values of pool four-point subsets.
        // One ordering per subset is enough when its whole anharmonic orbit
        // is adjoined: the 24 orderings realise exactly that orbit.
        let mut candidates: Vec<Q> = Vec::new();
        let m = pool.len();
        for a in 0..m {
            for b in (a + 1)..m {
                for c in (b + 1)..m {
                    for d in (c + 1)..m {
                        let Ok(v) = cross_ratio(&pool[a], &pool[b], &pool[c], &pool[d]) else {
                            continue;
                        };
                        let ProjPoint::Finite(v) = v else { continue };
                        if v.is_zero() || v.is_one() {
                            continue;
                        }
                        for (w, _) in orbit_with_signs(&v) {
                            if !candidates.contains(&w) && !pool.contains(&ProjPoint::Finite(w.clone())) {
                                candidates.push(w);
                            }
                        }
                    }
                }
            }
        }
        candidates.sort_by_key(height);
        let mut grew = false;
        for w in candidates {
            if pool.len() >= budget.max_pool {
                break;
            }
            pool_push(&mut pool, ProjPoint::Finite(w));
            grew = true;
        }
        if !grew {
            break;
        }
    }

    let target = e.as_sparse();
    let mut solver: SpanSolver<Q> = SpanSolver::new();
    let mut relations = 0usize;
    let m = pool.len();
    // Index-lexicographic subset order visits subsets of the high-priority
    // prefix (caller hints, standard points) before the rest, so early exit
    // fires as soon as the hinted relations suffice.
    for a in 0..m {
        for b in (a + 1)..m {
            for c in (b + 1)..m {
                for d in (c + 1)..m {
                    for e5 in (d + 1)..m {
                        if relations >= budget.max_relations {
                            return B2Status::Unknown;
                        }
                        relations += 1;
                        let pts = [
                            pool[a].clone(),
                            pool[b].clone(),
                            pool[c].clone(),
                            pool[d].clone(),
                            pool[e5].clone(),
                        ];
                        let vec = five_term_vector(&pts)
                            .expect("pool points are pairwise distinct");
                        if vec.is_zero() {
                            continue;
                        }
                        if solver.insert(vec.as_sparse().clone()) && solver.contains(target) {
                            return B2Status::Zero;
                        }
                    }
                }
            }
        }
    }
    B2Status::Unknown
}

/// A tensor `⊕ (a ∧ b) ⊗ B₂`: one normal-form Bloch element per wedge of two
/// distinct rationals, with keys ordered `a < b` and antisymmetry folded in.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct K4Image {
    components: BTreeMap<(Q, Q), B2Elem>,
}

impl K4Image {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    /// The Bloch element attached to `a ∧ b` (for `a < b`), if nonzero.
    pub fn component(&self, a: &Q, b: &Q) -> Option<&B2Elem> {
        self.components.get(&(a.clone(), b.clone()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(Q, Q), &B2Elem)> {
        self.components.iter()
    }

    /// Adds `c · (a ∧ b) ⊗ elem`, folding orientation and pruning zeros.
    pub fn add_wedge_scaled(&mut self, a: &Q, b: &Q, elem: &B2Elem, c: &Q) {
        if a == b || elem.is_zero() || c.is_zero() {
            return;
        }
        let (key, scale) = if a < b {
            ((a.clone(), b.clone()), c.clone())
        } else {
            ((b.clone(), a.clone()), -c.clone())
        };
        let slot = self.components.entry(key.clone()).or_default();
        slot.add_scaled(elem, &scale);
        if slot.is_zero() {
            self.components.remove(&key);
        }
    }

    pub fn add_scaled(&mut self, other: &Self, c: &Q) {
        for ((a, b), elem) in &other.components {
            self.add_wedge_scaled(a, b, elem, c);
        }
    }
}

impl fmt::Display for K4Image {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for ((a, b), elem) in &self.components {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "([{a}]^[{b}]) ⊗ ({elem})")?;
        }
        Ok(())
    }
}

/// Contribution of one generator `x₁x₂x₃ ⊗ y` (points with multiplicity) to
/// the weight-four comparison map, accumulated into `out` with coefficient
/// `c`: the sum over the six orderings `σ` of the multiset slots of
/// `(x_{σ1} ∧ x_{σ2}) ⊗ {r(x_{σ1}, y, x_{σ3}, ∞)}₂`.  Orderings whose wedge
/// collapses or whose cross-ratio is degenerate or undefined contribute
/// nothing.
fn k4_generator(out: &mut K4Image, pts: &[Q], y: &Q, c: &Q) {
    const PERMS: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let yp = ProjPoint::Finite(y.clone());
    for perm in PERMS {
        let p = &pts[perm[0]];
        let q = &pts[perm[1]];
        let r = &pts[perm[2]];
        if p == q {
            continue;
        }
        let Ok(v) = cross_ratio(
            &ProjPoint::Finite(p.clone()),
            &yp,
            &ProjPoint::Finite(r.clone()),
            &ProjPoint::Infinity,
        ) else {
            continue;
        };
        let elem = b2_normalize([(v, Q::one())]);
        out.add_wedge_scaled(p, q, &elem, c);
    }
}

/// The weight-four comparison map into `⊕ (a ∧ b) ⊗ B₂`.
///
/// Defined generator-by-generator on the canonical form by [`k4_generator`];
/// composed with the weight-four section it recovers the identity, and it
/// annihilates every image of the weight-four obstruction map up to five-term
/// relations.
pub fn k4_map(x: &ShTensor) -> K4Image {
    assert_eq!(x.n(), 4, "the comparison map is defined at weight four");
    let mut out = K4Image::zero();
    for ((m, y), c) in x.iter() {
        k4_generator(&mut out, &m.points(), y, c);
    }
    out
}

/// Section of the comparison map at weight four: a tensor whose image under
/// [`k4_map`] is exactly `(a ∧ b) ⊗ {z}₂`.
///
/// Requires `a ≠ b` and `z ∉ {0, 1}`; the output is
/// `½ · [a][a][b] ⊗ [(a − bz)/(1 − z)]` in canonical form.
pub fn l4_section(a: &Q, b: &Q, z: &Q) -> Result<ShTensor, Error> {
    if a == b {
        return Err(Error::DegeneratePoint {
            context: "section requires two distinct wedge points".into(),
        });
    }
    if z.is_zero() || z.is_one() {
        return Err(Error::DegeneratePoint {
            context: "section requires a symbol argument outside {0, 1}".into(),
        });
    }
    let w = (a - b * z) / (Q::one() - z);
    let m = Mset::new(vec![a.clone(), a.clone(), b.clone()]);
    let half = Q::new(1.into(), 2.into());
    Ok(sh_reduce(4, vec![((m, w), half)]))
}
