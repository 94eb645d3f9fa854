//! Exact incremental linear algebra over ℚ on sparse vectors with ordered
//! keys: span tracking, rank, and expressing a vector as a combination of
//! previously inserted generators.  Deterministic (keys are eliminated in
//! their natural order) and allocation-light for the small systems that
//! arise here.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::lincomb::add_term;
use crate::Q;

/// Sparse vector over ℚ with keys of type `K`.
pub type SparseVec<K> = BTreeMap<K, Q>;

struct Row<K> {
    pivot: K,
    /// Vector with coefficient 1 at `pivot`.
    vec: SparseVec<K>,
    /// The same vector written over the inserted generators (by index).
    combo: BTreeMap<usize, Q>,
}

/// Maintains a basis in echelon form for the span of a growing list of
/// generators, remembering how each basis row is expressed in terms of the
/// generators.
pub struct SpanSolver<K> {
    rows: Vec<Row<K>>,
    generators: usize,
}

impl<K: Ord + Clone> Default for SpanSolver<K> {
    fn default() -> Self {
        SpanSolver {
            rows: Vec::new(),
            generators: 0,
        }
    }
}

impl<K: Ord + Clone> SpanSolver<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn generator_count(&self) -> usize {
        self.generators
    }

    /// Reduce `v` against the current rows; `combo` (over generator indices)
    /// is updated so that `original v = reduced v + Σ combo·generators`.
    fn reduce(&self, v: &mut SparseVec<K>, combo: &mut BTreeMap<usize, Q>) {
        for row in &self.rows {
            let Some(c) = v.get(&row.pivot).cloned() else {
                continue;
            };
            if c.is_zero() {
                v.remove(&row.pivot);
                continue;
            }
            for (k, w) in &row.vec {
                add_term(v, k.clone(), -(&c * w));
            }
            for (g, w) in &row.combo {
                add_term_usize(combo, *g, &c * w);
            }
        }
    }

    /// Add a generator to the span.  Returns `true` if it enlarged the span
    /// (i.e. was independent of the generators inserted before it).
    pub fn insert(&mut self, v: SparseVec<K>) -> bool {
        let index = self.generators;
        self.generators += 1;
        let mut v = v;
        v.retain(|_, c| !c.is_zero());
        let mut combo: BTreeMap<usize, Q> = BTreeMap::new();
        self.reduce(&mut v, &mut combo);
        let Some((pivot, lead)) = v.iter().next().map(|(k, c)| (k.clone(), c.clone())) else {
            return false;
        };
        // original = v + Σ combo·generators  ⇒  v = original − Σ combo·gens.
        let inv = Q::one() / lead;
        let vec: SparseVec<K> = v.into_iter().map(|(k, c)| (k, &c * &inv)).collect();
        let mut row_combo: BTreeMap<usize, Q> = BTreeMap::new();
        add_term_usize(&mut row_combo, index, inv.clone());
        for (g, w) in combo {
            add_term_usize(&mut row_combo, g, -(&inv * &w));
        }
        self.rows.push(Row {
            pivot,
            vec,
            combo: row_combo,
        });
        // Keep rows ordered by pivot so reduction sweeps act like a triangular
        // solve; ordering is not required for correctness, only determinism.
        self.rows.sort_by(|a, b| a.pivot.cmp(&b.pivot));
        true
    }

    /// True iff `v` lies in the current span.
    pub fn contains(&self, v: &SparseVec<K>) -> bool {
        let mut v = v.clone();
        v.retain(|_, c| !c.is_zero());
        let mut combo = BTreeMap::new();
        self.reduce(&mut v, &mut combo);
        v.is_empty()
    }

    /// Canonical remainder of `v` after eliminating every pivot the span
    /// knows: `v − remainder` lies in the span, and the remainder has no
    /// entry at any pivot key.  Empty iff `v` is in the span; deterministic
    /// for a fixed insertion history.
    pub fn remainder(&self, v: &SparseVec<K>) -> SparseVec<K> {
        let mut v = v.clone();
        v.retain(|_, c| !c.is_zero());
        let mut combo = BTreeMap::new();
        self.reduce(&mut v, &mut combo);
        v
    }

    /// Express `v` over the inserted generators: returns coefficients
    /// (generator index, coefficient) with `v = Σ cᵢ·generatorᵢ`, or `None`
    /// if `v` is outside the span.
    pub fn express(&self, v: &SparseVec<K>) -> Option<Vec<(usize, Q)>> {
        let mut v = v.clone();
        v.retain(|_, c| !c.is_zero());
        let mut combo = BTreeMap::new();
        self.reduce(&mut v, &mut combo);
        if !v.is_empty() {
            return None;
        }
        Some(
            combo
                .into_iter()
                .filter(|(_, c)| !c.is_zero())
                .collect(),
        )
    }
}

struct ReducedRow<K> {
    pivot: K,
    /// Coefficient 1 at `pivot`; no entry at any other row's pivot.
    vec: SparseVec<K>,
}

/// Span membership tracker in fully reduced echelon form, without
/// generator bookkeeping.  Keeping every row free of the other rows'
/// pivots means reducing a vector touches only the pivots already in its
/// support — no elimination cascades — so inserts stay cheap even for
/// pools of thousands of columns.  Use [`SpanSolver`] when the
/// combination over the generators is needed.
pub struct MemberSpan<K> {
    rows: Vec<ReducedRow<K>>,
}

impl<K: Ord + Clone> Default for MemberSpan<K> {
    fn default() -> Self {
        MemberSpan { rows: Vec::new() }
    }
}

impl<K: Ord + Clone> MemberSpan<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce_vec(&self, v: &mut SparseVec<K>) {
        // Rows are sorted by pivot and mutually reduced, so one ascending
        // sweep eliminates every pivot in the support; the fill-in lands
        // only at non-pivot keys.
        for row in &self.rows {
            let Some(c) = v.get(&row.pivot).cloned() else {
                continue;
            };
            if c.is_zero() {
                v.remove(&row.pivot);
                continue;
            }
            for (k, w) in &row.vec {
                add_term(v, k.clone(), -(&c * w));
            }
        }
    }

    /// Add a vector to the span.  Returns `true` if it was independent of
    /// everything inserted before.
    pub fn insert(&mut self, v: SparseVec<K>) -> bool {
        let mut v = v;
        v.retain(|_, c| !c.is_zero());
        self.reduce_vec(&mut v);
        let Some((pivot, lead)) = v.iter().next().map(|(k, c)| (k.clone(), c.clone())) else {
            return false;
        };
        let inv = Q::one() / lead;
        let vec: SparseVec<K> = v.into_iter().map(|(k, c)| (k, &c * &inv)).collect();
        // Eliminate the new pivot from every older row to keep the rows
        // mutually reduced.
        for row in &mut self.rows {
            let Some(c) = row.vec.get(&pivot).cloned() else {
                continue;
            };
            row.vec.remove(&pivot);
            for (k, w) in &vec {
                if *k == pivot {
                    continue;
                }
                add_term(&mut row.vec, k.clone(), -(&c * w));
            }
        }
        let at = self
            .rows
            .partition_point(|row| row.pivot < pivot);
        self.rows.insert(at, ReducedRow { pivot, vec });
        true
    }

    /// True iff `v` lies in the span.
    pub fn contains(&self, v: &SparseVec<K>) -> bool {
        self.remainder(v).is_empty()
    }

    /// Canonical remainder of `v` modulo the span: `v − remainder` lies in
    /// the span and the remainder avoids every pivot.  Empty iff `v` is in
    /// the span.
    pub fn remainder(&self, v: &SparseVec<K>) -> SparseVec<K> {
        let mut v = v.clone();
        v.retain(|_, c| !c.is_zero());
        self.reduce_vec(&mut v);
        v
    }
}

/// Primes for the modular membership filter.  Results derived modulo these
/// are only ever used to *select* candidate columns; every reported
/// coefficient is re-solved and verified exactly over ℚ.
pub const MEMBERSHIP_PRIMES: [u64; 2] = [2_305_843_009_213_693_951, 1_000_000_000_000_000_009];

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

fn bigint_mod(x: &num_bigint::BigInt, p: u64) -> u64 {
    use num_traits::sign::Signed;
    let r: num_bigint::BigInt = x % num_bigint::BigInt::from(p);
    let r = if r.is_negative() {
        r + num_bigint::BigInt::from(p)
    } else {
        r
    };
    u64::try_from(r).expect("residue fits")
}

/// Residue of a rational modulo `p`, or `None` when the denominator
/// vanishes mod `p`.
pub fn q_mod_p(q: &Q, p: u64) -> Option<u64> {
    let den = bigint_mod(q.denom(), p);
    if den == 0 {
        return None;
    }
    Some(mul_mod(bigint_mod(q.numer(), p), inv_mod(den, p), p))
}

/// Reduce a whole sparse rational vector modulo `p`.
pub fn vec_mod_p(v: &SparseVec<u64>, p: u64) -> Option<BTreeMap<u64, u64>> {
    let mut out = BTreeMap::new();
    for (k, c) in v {
        let r = q_mod_p(c, p)?;
        if r != 0 {
            out.insert(*k, r);
        }
    }
    Some(out)
}

struct ModRow {
    pivot: u64,
    /// Coefficient 1 at `pivot`; no entry at any other row's pivot.
    vec: BTreeMap<u64, u64>,
    /// Expression of `vec` over the inserted generators (tracked only when
    /// the span was built with `with_combos`).
    combo: BTreeMap<usize, u64>,
}

/// Reduced-echelon span tracker over F_p with integer keys.  Membership
/// tests modulo a large prime are used as a fast *filter*: a vector
/// contained over ℚ is always contained mod p (denominators never vanish
/// for the heights arising here), while the rare mod-p false positive is
/// caught by the exact re-solve that follows.
pub struct ModSpan {
    p: u64,
    rows: Vec<ModRow>,
    generators: usize,
    track_combos: bool,
}

impl ModSpan {
    pub fn new(p: u64) -> Self {
        ModSpan {
            p,
            rows: Vec::new(),
            generators: 0,
            track_combos: false,
        }
    }

    pub fn with_combos(p: u64) -> Self {
        ModSpan {
            track_combos: true,
            ..ModSpan::new(p)
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn add_mod(p: u64, map: &mut BTreeMap<u64, u64>, key: u64, val: u64) {
        if val == 0 {
            return;
        }
        match map.entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(val);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = (*e.get() + val) % p;
                if s == 0 {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    fn add_mod_usize(p: u64, map: &mut BTreeMap<usize, u64>, key: usize, val: u64) {
        if val == 0 {
            return;
        }
        match map.entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(val);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = (*e.get() + val) % p;
                if s == 0 {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    fn reduce_vec(&self, v: &mut BTreeMap<u64, u64>, combo: &mut BTreeMap<usize, u64>) {
        let p = self.p;
        for row in &self.rows {
            let Some(&c) = v.get(&row.pivot) else {
                continue;
            };
            let neg = p - c;
            for (k, w) in &row.vec {
                Self::add_mod(p, v, *k, mul_mod(neg, *w, p));
            }
            if self.track_combos {
                for (g, w) in &row.combo {
                    Self::add_mod_usize(p, combo, *g, mul_mod(c, *w, p));
                }
            }
        }
    }

    /// Add a generator; returns `true` if it enlarged the span.
    pub fn insert(&mut self, v: BTreeMap<u64, u64>) -> bool {
        let p = self.p;
        let index = self.generators;
        self.generators += 1;
        let mut v = v;
        v.retain(|_, c| *c != 0);
        let mut combo = BTreeMap::new();
        self.reduce_vec(&mut v, &mut combo);
        let Some((&pivot, &lead)) = v.iter().next() else {
            return false;
        };
        let inv = inv_mod(lead, p);
        let vec: BTreeMap<u64, u64> = v.iter().map(|(k, c)| (*k, mul_mod(*c, inv, p))).collect();
        let mut row_combo = BTreeMap::new();
        if self.track_combos {
            Self::add_mod_usize(p, &mut row_combo, index, inv);
            for (g, w) in combo {
                Self::add_mod_usize(p, &mut row_combo, g, mul_mod(p - w % p, inv, p));
            }
        }
        // Keep the rows mutually reduced: clear the new pivot out of every
        // older row (and mirror the operation on its combo).
        for row in &mut self.rows {
            let Some(&c) = row.vec.get(&pivot) else {
                continue;
            };
            row.vec.remove(&pivot);
            let neg = p - c;
            for (k, w) in &vec {
                if *k == pivot {
                    continue;
                }
                Self::add_mod(p, &mut row.vec, *k, mul_mod(neg, *w, p));
            }
            if self.track_combos {
                let combo_new = row_combo.clone();
                for (g, w) in combo_new {
                    Self::add_mod_usize(p, &mut row.combo, g, mul_mod(neg, w, p));
                }
            }
        }
        let at = self.rows.partition_point(|row| row.pivot < pivot);
        self.rows.insert(
            at,
            ModRow {
                pivot,
                vec,
                combo: row_combo,
            },
        );
        true
    }

    pub fn contains(&self, v: &BTreeMap<u64, u64>) -> bool {
        let mut v = v.clone();
        v.retain(|_, c| *c != 0);
        let mut combo = BTreeMap::new();
        self.reduce_vec(&mut v, &mut combo);
        v.is_empty()
    }

    /// Express `v` over the generators mod p (requires `with_combos`).
    pub fn express(&self, v: &BTreeMap<u64, u64>) -> Option<Vec<(usize, u64)>> {
        assert!(self.track_combos, "combo tracking disabled");
        let mut v = v.clone();
        v.retain(|_, c| *c != 0);
        let mut combo = BTreeMap::new();
        self.reduce_vec(&mut v, &mut combo);
        if !v.is_empty() {
            return None;
        }
        // reduce_vec accumulated `Σ combo·gens = original − reduced`, so the
        // coefficients come out with the right sign already.
        Some(combo.into_iter().filter(|(_, c)| *c != 0).collect())
    }
}

fn add_term_usize(map: &mut BTreeMap<usize, Q>, key: usize, c: Q) {
    if c.is_zero() {
        return;
    }
    match map.entry(key) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            *e.get_mut() += &c;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

/// Rank of a list of sparse vectors.
pub fn rank<K: Ord + Clone>(vectors: &[SparseVec<K>]) -> usize {
    let mut solver = SpanSolver::new();
    for v in vectors {
        solver.insert(v.clone());
    }
    solver.rank()
}
