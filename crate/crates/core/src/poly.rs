//! Dense univariate polynomials over ℚ.
//!
//! Coefficients are stored low-to-high with no trailing zeros, so the zero
//! polynomial is the empty vector. Root extraction works over ℚ only: the
//! rational-root theorem plus deflation finds every rational root with its
//! multiplicity and reports the (root-free) cofactor, which is how the crate
//! detects divisors that fail to split.

use crate::arith::factor;
use crate::error::Error;
use crate::{lincomb, Q};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poly {
    /// Coefficients, `coeffs[i]` multiplying `t^i`; no trailing zeros.
    coeffs: Vec<Q>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Q>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        Poly::constant(Q::one())
    }

    pub fn constant(c: Q) -> Self {
        Poly::new(vec![c])
    }

    /// `c · t^k`.
    pub fn monomial(c: Q, k: usize) -> Self {
        if c.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![Q::zero(); k + 1];
        coeffs[k] = c;
        Poly { coeffs }
    }

    /// The variable `t`.
    pub fn t() -> Self {
        Poly::monomial(Q::one(), 1)
    }

    /// `∏ (t − rᵢ)`.
    pub fn from_roots(roots: &[Q]) -> Self {
        let mut p = Poly::one();
        for r in roots {
            p = &p * &Poly::new(vec![-r.clone(), Q::one()]);
        }
        p
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading_coeff(&self) -> Q {
        self.coeffs.last().cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn coeff(&self, k: usize) -> Q {
        self.coeffs.get(k).cloned().unwrap_or_else(Q::zero)
    }

    pub fn eval(&self, x: &Q) -> Q {
        let mut acc = Q::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * Q::from_integer(BigInt::from(i)))
            .collect();
        Poly::new(coeffs)
    }

    pub fn scale(&self, c: &Q) -> Poly {
        Poly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Make the leading coefficient 1 (no-op on zero).
    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let lc = self.leading_coeff();
        self.scale(&lc.recip())
    }

    /// Quotient and remainder of Euclidean division by a non-zero divisor.
    pub fn div_rem(&self, d: &Poly) -> Result<(Poly, Poly), Error> {
        if d.is_zero() {
            return Err(Error::DivisionByZero {
                context: "polynomial".into(),
            });
        }
        let dd = d.degree().unwrap();
        let dlc = d.leading_coeff();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Q::zero(); self.coeffs.len().saturating_sub(dd)];
        while rem.len() > dd {
            let k = rem.len() - 1 - dd;
            let c = rem.last().unwrap() / &dlc;
            if !c.is_zero() {
                for (i, dc) in d.coeffs.iter().enumerate() {
                    let v = rem[k + i].clone() - &c * dc;
                    rem[k + i] = v;
                }
                quot[k] = c;
            }
            rem.pop();
        }
        Ok((Poly::new(quot), Poly::new(rem)))
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("b non-zero");
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Substitute another polynomial for `t`.
    pub fn compose(&self, inner: &Poly) -> Poly {
        let mut acc = Poly::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * inner) + &Poly::constant(c.clone());
        }
        acc
    }

    /// Order of vanishing at a rational point (0 if `p` is not a root).
    ///
    /// Works whether or not the polynomial splits: repeated synthetic
    /// division by `(t − p)` counts the multiplicity.
    pub fn order_at(&self, p: &Q) -> usize {
        assert!(!self.is_zero(), "order of the zero polynomial is undefined");
        let linear = Poly::new(vec![-p.clone(), Q::one()]);
        let mut f = self.clone();
        let mut ord = 0;
        while f.eval(p).is_zero() {
            let (q_, r) = f.div_rem(&linear).unwrap();
            debug_assert!(r.is_zero());
            f = q_;
            ord += 1;
        }
        ord
    }

    /// All rational roots with multiplicities plus the root-free cofactor.
    ///
    /// The cofactor is constant exactly when the polynomial splits over ℚ.
    pub fn rational_roots(&self) -> (Vec<(Q, usize)>, Poly) {
        assert!(!self.is_zero(), "roots of the zero polynomial are undefined");
        let mut f = self.clone();
        let mut roots: Vec<(Q, usize)> = Vec::new();

        // Strip the root at 0 first so the trailing coefficient is non-zero.
        let val0 = f.coeffs.iter().take_while(|c| c.is_zero()).count();
        if val0 > 0 {
            roots.push((Q::zero(), val0));
            f = Poly::new(f.coeffs[val0..].to_vec());
        }
        if f.degree() == Some(0) {
            return (roots, f);
        }

        loop {
            match find_one_rational_root(&f) {
                Some(r) => {
                    let mult = f.order_at(&r);
                    let linear = Poly::new(vec![-r.clone(), Q::one()]);
                    for _ in 0..mult {
                        let (q_, rem) = f.div_rem(&linear).unwrap();
                        debug_assert!(rem.is_zero());
                        f = q_;
                    }
                    roots.push((r, mult));
                    if f.degree() == Some(0) {
                        break;
                    }
                }
                None => break,
            }
        }
        roots.sort_by(|a, b| a.0.cmp(&b.0));
        (roots, f)
    }

    /// Clear denominators and content: returns `(λ, g)` with integer,
    /// content-free `g` and `self = λ · g`, `g`'s leading coefficient positive.
    pub fn integer_normalized(&self) -> (Q, Poly) {
        if self.is_zero() {
            return (Q::one(), Poly::zero());
        }
        let mut denom_lcm = BigInt::one();
        for c in &self.coeffs {
            denom_lcm = num_integer::lcm(denom_lcm, c.denom().clone());
        }
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| c.numer() * (&denom_lcm / c.denom()))
            .collect();
        let mut content = BigInt::zero();
        for i in &ints {
            content = num_integer::gcd(content, i.clone());
        }
        if ints.last().unwrap().is_negative() {
            content = -content;
        }
        let g = Poly::new(
            ints.iter()
                .map(|i| Q::from_integer(i / &content))
                .collect(),
        );
        (Q::new(content, denom_lcm), g)
    }
}

/// One rational root of a polynomial with non-zero constant term, if any.
fn find_one_rational_root(f: &Poly) -> Option<Q> {
    debug_assert!(!f.coeff(0).is_zero());
    if f.degree() == Some(1) {
        return Some(-f.coeff(0) / f.coeff(1));
    }
    let (_, g) = f.integer_normalized();
    let a0 = g.coeff(0).numer().abs();
    let an = g.leading_coeff().numer().abs();
    let numerators = divisors(&a0);
    let denominators = divisors(&an);
    for p in &numerators {
        for q_ in &denominators {
            let cand = Q::new(p.clone(), q_.clone());
            if f.eval(&cand).is_zero() {
                return Some(cand);
            }
            let neg = -cand;
            if f.eval(&neg).is_zero() {
                return Some(neg);
            }
        }
    }
    None
}

/// All positive divisors of a positive integer.
fn divisors(n: &BigInt) -> Vec<BigInt> {
    let mut out = vec![BigInt::one()];
    for (p, e) in factor(n) {
        let base = out.clone();
        let mut power = BigInt::one();
        for _ in 0..e {
            power *= &p;
            for b in &base {
                out.push(b * &power);
            }
        }
    }
    out.sort();
    out
}

impl std::ops::Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect();
        Poly::new(coeffs)
    }
}

impl std::ops::Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect();
        Poly::new(coeffs)
    }
}

impl std::ops::Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }
}

impl std::ops::Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut acc: BTreeMap<usize, Q> = BTreeMap::new();
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                lincomb::add_term(&mut acc, i + j, a * b);
            }
        }
        let n = acc.keys().next_back().map_or(0, |k| k + 1);
        let mut coeffs = vec![Q::zero(); n];
        for (k, v) in acc {
            coeffs[k] = v;
        }
        Poly::new(coeffs)
    }
}

impl fmt::Display for Poly {
    /// Human form, highest power first, e.g. `2*t^2 - t + 1/3`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let show_coeff = !mag.is_one() || k == 0;
            if show_coeff {
                write!(f, "{mag}")?;
            }
            if k > 0 {
                if show_coeff {
                    write!(f, "*")?;
                }
                write!(f, "t")?;
                if k > 1 {
                    write!(f, "^{k}")?;
                }
            }
        }
        Ok(())
    }
}
