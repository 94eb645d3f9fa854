//! The valuation-model symbol criterion and the constant-functional identity.
//!
//! The multiplicative group of non-zero rational functions, tensored with ℚ,
//! decomposes as a free ℚ-vector space on prime constants and monic linear
//! monomials `(t − q)` (the sign is torsion and dies in the tensor product).
//! Each symbol `[φ]` of a formal sum expands in that basis, and the sum maps
//! to `Σ c_i · [φ_i]^(n−2) ⊗ [φ_i] ∧ [1−φ_i]`. For a valid functional
//! equation every component involving a monomial factor cancels — only
//! constant contributions may survive. [`ZagierSymbol::is_const`] tests
//! exactly that.
//!
//! [`constantial_identity_check`] verifies, for a concrete function and a
//! concrete prime, the exchange identity between the constant-part valuation
//! and the order functionals that underlies the criterion.

use crate::arith::{padic_val, rational_primes};
use crate::cocycle::FormalSum;
use crate::point::ProjPoint;
use crate::tensor::write_linear;
use crate::{Error, Q, RatFunc};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Basis element of the valuation model: a prime constant or a monic linear
/// monomial `(t − q)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum MBasis {
    Prime(BigInt),
    Point(Q),
}

impl fmt::Display for MBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MBasis::Prime(p) => write!(f, "{p}"),
            MBasis::Point(q) => {
                if q.is_zero() {
                    write!(f, "(t)")
                } else if q.is_negative() {
                    write!(f, "(t+{})", -q.clone())
                } else {
                    write!(f, "(t-{q})")
                }
            }
        }
    }
}

/// Decomposition of one non-zero split function over the model basis.
fn decompose(f: &RatFunc) -> Result<BTreeMap<MBasis, Q>, Error> {
    if f.is_zero() {
        return Err(Error::ZeroFunction);
    }
    let divisor = f.divisor()?.clone();
    let mut out: BTreeMap<MBasis, Q> = BTreeMap::new();
    for (p, e) in rational_primes(&f.leading_constant()) {
        out.insert(MBasis::Prime(p), Q::from_integer(e.into()));
    }
    for (q, m) in divisor.finite_parts() {
        out.insert(MBasis::Point(q.clone()), Q::from_integer((*m).into()));
    }
    Ok(out)
}

/// Key of one symbol component: a sorted size-(n−2) multiset for the
/// symmetric block and an ordered wedge pair.
type SymbolKey = (Vec<MBasis>, (MBasis, MBasis));

/// Image of a formal sum in the valuation model:
/// `Σ c_i [φ_i]^(n−2) ⊗ [φ_i] ∧ [1−φ_i]`, expanded over the model basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZagierSymbol {
    n: usize,
    terms: BTreeMap<SymbolKey, Q>,
}

impl ZagierSymbol {
    pub fn weight(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&SymbolKey, &Q)> {
        self.terms.iter()
    }

    /// True when no surviving component involves a monomial basis element —
    /// the symbol lies in the constants-only part of the model, as it must
    /// for a valid functional equation.
    pub fn is_const(&self) -> bool {
        self.terms.keys().all(|(sym, (a, b))| {
            sym.iter()
                .chain([a, b])
                .all(|x| matches!(x, MBasis::Prime(_)))
        })
    }
}

impl fmt::Display for ZagierSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_linear(
            f,
            self.terms.iter().map(|((sym, (a, b)), c)| {
                let mut body = String::new();
                for x in sym {
                    body.push_str(&format!("{x}."));
                }
                body.push_str(&format!("{a}^{b}"));
                (body, c)
            }),
        )
    }
}

fn add_term(map: &mut BTreeMap<SymbolKey, Q>, key: SymbolKey, c: Q) {
    crate::lincomb::add_term(map, key, c);
}

/// Map a formal sum to its symbol in the valuation model.
pub fn zagier_symbol(sum: &FormalSum) -> Result<ZagierSymbol, Error> {
    let n = sum.weight();
    assert!(n >= 2, "the symbol criterion needs weight ≥ 2");
    let mut terms: BTreeMap<SymbolKey, Q> = BTreeMap::new();
    for (f, c) in sum.iter() {
        // Constant symbols decompose into constants only and merely add
        // constant wedge terms; they are kept for faithfulness and never
        // affect is_const().
        let u = decompose(f)?;
        let complement = f.one_minus().expect("support excludes the constant 1");
        let v = decompose(&complement)?;
        // Symmetric block: u^(n−2) expanded as multiset combinations.
        let mut sym: BTreeMap<Vec<MBasis>, Q> = BTreeMap::new();
        sym.insert(Vec::new(), Q::one());
        for _ in 0..n - 2 {
            let mut next: BTreeMap<Vec<MBasis>, Q> = BTreeMap::new();
            for (m, a) in &sym {
                for (x, b) in &u {
                    let mut m2 = m.clone();
                    let pos = m2.partition_point(|y| y <= x);
                    m2.insert(pos, x.clone());
                    crate::lincomb::add_term(&mut next, m2, a * b);
                }
            }
            sym = next;
        }
        // Wedge block: u ∧ v with canonical ordered keys.
        let mut wedge: Vec<((MBasis, MBasis), Q)> = Vec::new();
        for (x, a) in &u {
            for (y, b) in &v {
                match x.cmp(y) {
                    std::cmp::Ordering::Equal => continue,
                    std::cmp::Ordering::Less => {
                        wedge.push(((x.clone(), y.clone()), a * b));
                    }
                    std::cmp::Ordering::Greater => {
                        wedge.push(((y.clone(), x.clone()), -(a * b)));
                    }
                }
            }
        }
        for (m, a) in &sym {
            for (pair, b) in &wedge {
                add_term(&mut terms, (m.clone(), pair.clone()), c * a * b);
            }
        }
    }
    Ok(ZagierSymbol { n, terms })
}

/// Check the exchange identity between the `ℓ`-adic valuation of leading
/// constants and the order functionals, at a concrete `(φ, p, ℓ)`:
///
/// `v_ℓ(A_φ)·ord_p(1−φ) − v_ℓ(A_{1−φ})·ord_p(φ)
///    = Σ_q v_ℓ(p−q)·(ord_p(φ)·ord_q(1−φ) − ord_p(1−φ)·ord_q(φ))`,
///
/// the sum running over the finite divisor supports of `φ` and `1−φ`
/// (other points contribute zero; the `q = p` term vanishes identically).
/// Returns whether both sides agree exactly — they always must; `false`
/// indicates an implementation bug.
pub fn constantial_identity_check(f: &RatFunc, p: &Q, ell: &BigInt) -> Result<bool, Error> {
    if f.is_zero() {
        return Err(Error::ZeroFunction);
    }
    let complement = f.one_minus()?;
    f.divisor()?;
    complement.divisor()?;

    let ord = |g: &RatFunc, at: &Q| -> i64 {
        g.order_at(&ProjPoint::Finite(at.clone()))
            .expect("order of a non-zero function")
    };
    let alpha_f = padic_val(&f.leading_constant(), ell);
    let alpha_c = padic_val(&complement.leading_constant(), ell);
    let ord_p_f = ord(f, p);
    let ord_p_c = ord(&complement, p);
    let lhs = alpha_f * ord_p_c - alpha_c * ord_p_f;

    let mut support: Vec<Q> = Vec::new();
    for g in [f, &complement] {
        for (q, _) in g.divisor()?.finite_parts() {
            if !support.contains(q) {
                support.push(q.clone());
            }
        }
    }
    let mut rhs = 0i64;
    for q in &support {
        if q == p {
            continue;
        }
        let bracket = ord_p_f * ord(&complement, q) - ord_p_c * ord(f, q);
        if bracket != 0 {
            rhs += padic_val(&(p - q), ell) * bracket;
        }
    }
    Ok(lhs == rhs)
}
