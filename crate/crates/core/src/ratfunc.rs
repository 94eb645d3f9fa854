//! Rational functions of one variable over ℚ, their zero/pole divisors, and
//! the handful of function-level operations the symbolic pipeline is built
//! from: evaluation on the projective line, `1 − f`, reciprocals, Möbius
//! pullbacks, and the degree-≤ 2 shape test used by the quadratic toolkit.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use num_traits::{One, Zero};

use crate::error::Error;
use crate::point::ProjPoint;
use crate::poly::Poly;
use crate::Q;

/// Zero/pole multiplicity data of a nonzero rational function: a finitely
/// supported map from points of ℙ¹(ℚ) to integers with total degree zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Divisor {
    orders: BTreeMap<ProjPoint, i64>,
}

impl Divisor {
    pub fn new(orders: BTreeMap<ProjPoint, i64>) -> Self {
        let orders: BTreeMap<ProjPoint, i64> =
            orders.into_iter().filter(|(_, m)| *m != 0).collect();
        debug_assert_eq!(
            orders.values().sum::<i64>(),
            0,
            "divisor must have total degree zero"
        );
        Divisor { orders }
    }

    /// Multiplicity at `p` (0 for points outside the support).
    pub fn order_at(&self, p: &ProjPoint) -> i64 {
        self.orders.get(p).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ProjPoint, &i64)> {
        self.orders.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &ProjPoint> {
        self.orders.keys()
    }

    /// The finite part of the support with multiplicities, ∞ dropped.
    pub fn finite_parts(&self) -> impl Iterator<Item = (&Q, &i64)> {
        self.orders.iter().filter_map(|(p, m)| match p {
            ProjPoint::Finite(x) => Some((x, m)),
            ProjPoint::Infinity => None,
        })
    }

    pub fn is_empty(&self) -> bool {
        self.orders.is_empty()
    }
}

/// A rational function p(t)/q(t) with p, q coprime and q monic.  The zero
/// function is represented as 0/1.  The divisor is computed lazily and cached.
#[derive(Debug)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
    divisor_cache: OnceLock<Result<Divisor, Error>>,
}

impl Clone for RatFunc {
    fn clone(&self) -> Self {
        // The cache is cheap to rebuild; cloning drops it to keep Clone simple.
        RatFunc::from_normalized(self.num.clone(), self.den.clone())
    }
}

impl PartialEq for RatFunc {
    fn eq(&self, other: &Self) -> bool {
        self.num == other.num && self.den == other.den
    }
}

impl Eq for RatFunc {}

impl PartialOrd for RatFunc {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for RatFunc {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl std::hash::Hash for RatFunc {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.key().hash(state);
    }
}

impl RatFunc {
    fn key(&self) -> (Vec<Q>, Vec<Q>) {
        (self.num.coeffs().to_vec(), self.den.coeffs().to_vec())
    }

    fn from_normalized(num: Poly, den: Poly) -> Self {
        RatFunc {
            num,
            den,
            divisor_cache: OnceLock::new(),
        }
    }

    /// Build p/q, cancelling common factors and making the denominator monic.
    pub fn new(num: Poly, den: Poly) -> Result<Self, Error> {
        if den.is_zero() {
            return Err(Error::DivisionByZero {
                context: "rational function with zero denominator".into(),
            });
        }
        if num.is_zero() {
            return Ok(RatFunc::from_normalized(Poly::zero(), Poly::one()));
        }
        let g = Poly::gcd(&num, &den);
        let num = num.div_rem(&g)?.0;
        let den = den.div_rem(&g)?.0;
        let inv = Q::one() / den.leading_coeff();
        Ok(RatFunc::from_normalized(num.scale(&inv), den.scale(&inv)))
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFunc::from_normalized(p, Poly::one())
    }

    pub fn constant(c: Q) -> Self {
        RatFunc::from_poly(Poly::constant(c))
    }

    /// The identity function t.
    pub fn t() -> Self {
        RatFunc::from_poly(Poly::t())
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// `Some(c)` iff the function is the constant c.
    pub fn as_constant(&self) -> Option<Q> {
        if self.num.degree().map_or(true, |d| d == 0) && self.den.is_one() {
            Some(
                self.num
                    .coeffs()
                    .first()
                    .cloned()
                    .unwrap_or_else(Q::zero),
            )
        } else {
            None
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_constant().is_some()
    }

    /// max(deg p, deg q); None for the zero function.
    pub fn degree(&self) -> Option<usize> {
        let dn = self.num.degree()?;
        let dd = self.den.degree().expect("nonzero denominator");
        Some(dn.max(dd))
    }

    /// Leading constant: the ratio of leading coefficients (the denominator
    /// being monic, this is just the numerator's leading coefficient).
    pub fn leading_constant(&self) -> Q {
        self.num.leading_coeff()
    }

    /// Value at a finite rational point, as a point of ℙ¹ (poles give ∞).
    pub fn eval(&self, x: &Q) -> ProjPoint {
        let dv = self.den.eval(x);
        if dv.is_zero() {
            // Coprimality guarantees the numerator is nonzero here.
            ProjPoint::Infinity
        } else {
            ProjPoint::Finite(self.num.eval(x) / dv)
        }
    }

    /// Value at a point of ℙ¹, including ∞ (degree comparison).
    pub fn eval_proj(&self, p: &ProjPoint) -> ProjPoint {
        match p {
            ProjPoint::Finite(x) => self.eval(x),
            ProjPoint::Infinity => {
                if self.is_zero() {
                    return ProjPoint::zero();
                }
                let dn = self.num.degree().expect("nonzero numerator");
                let dd = self.den.degree().expect("nonzero denominator");
                match dn.cmp(&dd) {
                    Ordering::Less => ProjPoint::zero(),
                    Ordering::Greater => ProjPoint::Infinity,
                    Ordering::Equal => ProjPoint::Finite(self.leading_constant()),
                }
            }
        }
    }

    /// Vanishing order at a point of ℙ¹ (negative at poles).  Defined even
    /// when the divisor does not split over ℚ.
    pub fn order_at(&self, p: &ProjPoint) -> Result<i64, Error> {
        if self.is_zero() {
            return Err(Error::ZeroFunction);
        }
        match p {
            ProjPoint::Finite(x) => {
                Ok(self.num.order_at(x) as i64 - self.den.order_at(x) as i64)
            }
            ProjPoint::Infinity => {
                let dn = self.num.degree().expect("nonzero numerator") as i64;
                let dd = self.den.degree().expect("nonzero denominator") as i64;
                Ok(dd - dn)
            }
        }
    }

    /// The full zero/pole divisor on ℙ¹(ℚ).  Errors if the function is zero
    /// or if some zero or pole is irrational.
    pub fn divisor(&self) -> Result<&Divisor, Error> {
        self.divisor_cache
            .get_or_init(|| self.compute_divisor())
            .as_ref()
            .map_err(|e| e.clone())
    }

    fn compute_divisor(&self) -> Result<Divisor, Error> {
        if self.is_zero() {
            return Err(Error::ZeroFunction);
        }
        let mut orders: BTreeMap<ProjPoint, i64> = BTreeMap::new();
        for (sign, poly) in [(1i64, &self.num), (-1i64, &self.den)] {
            let (roots, cofactor) = poly.rational_roots();
            if cofactor.degree().map_or(false, |d| d > 0) {
                return Err(Error::NonSplitDivisor {
                    func: self.to_string(),
                });
            }
            for (root, mult) in roots {
                *orders.entry(ProjPoint::Finite(root)).or_insert(0) += sign * mult as i64;
            }
        }
        let dn = self.num.degree().expect("nonzero numerator") as i64;
        let dd = self.den.degree().expect("nonzero denominator") as i64;
        if dd != dn {
            orders.insert(ProjPoint::Infinity, dd - dn);
        }
        Ok(Divisor::new(orders))
    }

    /// 1 − f.  Errors only for the constant function 1 (the result would be
    /// the zero function); all other constants are allowed.
    pub fn one_minus(&self) -> Result<RatFunc, Error> {
        if self.as_constant().map_or(false, |c| c.is_one()) {
            return Err(Error::ConstantOne);
        }
        RatFunc::new(&self.den - &self.num, self.den.clone())
    }

    /// 1/f.
    pub fn recip(&self) -> Result<RatFunc, Error> {
        if self.is_zero() {
            return Err(Error::ZeroFunction);
        }
        RatFunc::new(self.den.clone(), self.num.clone())
    }

    /// Pullback f ∘ m along a Möbius map m(t) = (αt + β)/(γt + δ): substitute
    /// and clear denominators by the common power of (γt + δ).
    pub fn compose_linear_fractional(&self, alpha: &Q, beta: &Q, gamma: &Q, delta: &Q) -> Result<RatFunc, Error> {
        if self.is_zero() {
            return Ok(RatFunc::from_normalized(Poly::zero(), Poly::one()));
        }
        let top = Poly::new(vec![beta.clone(), alpha.clone()]);
        let bot = Poly::new(vec![delta.clone(), gamma.clone()]);
        let dn = self.num.degree().expect("nonzero numerator");
        let dd = self.den.degree().expect("nonzero denominator");
        let d = dn.max(dd);
        let sub = |p: &Poly, deg: usize| -> Poly {
            let mut acc = Poly::zero();
            for (i, c) in p.coeffs().iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let mut term = Poly::constant(c.clone());
                for _ in 0..i {
                    term = &term * &top;
                }
                for _ in 0..(d - i) {
                    term = &term * &bot;
                }
                acc = &acc + &term;
            }
            debug_assert!(deg <= d);
            acc
        };
        let new_num = sub(&self.num, dn);
        let new_den = sub(&self.den, dd);
        RatFunc::new(new_num, new_den)
    }

    /// True iff this degree-≤ 2 function takes a value in {0, 1, ∞} at ∞ or
    /// its numerator has a double root.  Errors on constants and on degrees
    /// above 2.
    pub fn is_special_quadratic(&self) -> Result<bool, Error> {
        if self.is_constant() || self.is_zero() {
            return Err(Error::ConstantFunction {
                context: "special-quadratic test".into(),
            });
        }
        let deg = self.degree().expect("nonconstant");
        if deg > 2 {
            return Err(Error::DegreeTooHigh { degree: deg, bound: 2 });
        }
        let at_inf = self.eval_proj(&ProjPoint::Infinity);
        let special_value = match &at_inf {
            ProjPoint::Infinity => true,
            ProjPoint::Finite(v) => v.is_zero() || v.is_one(),
        };
        if special_value {
            return Ok(true);
        }
        // Double root of the numerator: only possible at degree exactly 2.
        if self.num.degree() == Some(2) {
            let c = self.num.coeffs();
            let disc = &c[1] * &c[1] - Q::from_integer(4.into()) * &c[2] * &c[0];
            if disc.is_zero() {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

impl std::ops::Add for &RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: &RatFunc) -> RatFunc {
        RatFunc::new(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
        .expect("nonzero denominators")
    }
}

impl std::ops::Sub for &RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: &RatFunc) -> RatFunc {
        RatFunc::new(
            &(&self.num * &rhs.den) - &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
        .expect("nonzero denominators")
    }
}

impl std::ops::Mul for &RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: &RatFunc) -> RatFunc {
        RatFunc::new(&self.num * &rhs.num, &self.den * &rhs.den)
            .expect("nonzero denominators")
    }
}

impl std::ops::Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc::from_normalized(-&self.num, self.den.clone())
    }
}

impl fmt::Display for RatFunc {
    /// Canonical form: numerator and denominator scaled by one rational so
    /// both have integer coefficients with no common content, denominator
    /// omitted when it is 1.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let (ln, gn) = self.num.integer_normalized();
        let (ld, gd) = self.den.integer_normalized();
        // num/den = (ln/ld) · gn/gd with ln/ld = p/q in lowest terms; scaling
        // both by q/ln? No: f = (p·gn)/(q·gd) where p/q = ln/ld reduced.
        let ratio = ln / ld;
        let p = ratio.numer().clone();
        let q = ratio.denom().clone();
        let num_int = gn.scale(&Q::from_integer(p));
        let den_int = gd.scale(&Q::from_integer(q));
        if den_int.is_one() {
            write!(f, "{}", num_int)
        } else {
            write!(f, "({})/({})", num_int, den_int)
        }
    }
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(num_bigint::BigInt),
    Var,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(input: &str) -> Result<Vec<Token>, Error> {
    let mut out = Vec::new();
    let mut chars = input.char_indices().peekable();
    while let Some(&(pos, c)) = chars.peek() {
        match c {
            ' ' | '\t' | '\n' | '\r' => {
                chars.next();
            }
            '0'..='9' => {
                let mut digits = String::new();
                while let Some(&(_, d)) = chars.peek() {
                    if d.is_ascii_digit() {
                        digits.push(d);
                        chars.next();
                    } else {
                        break;
                    }
                }
                let n: num_bigint::BigInt = digits
                    .parse()
                    .map_err(|_| Error::parse(format!("bad integer literal at byte {pos}")))?;
                out.push(Token::Num(n));
            }
            't' => {
                chars.next();
                out.push(Token::Var);
            }
            '+' => {
                chars.next();
                out.push(Token::Plus);
            }
            '-' => {
                chars.next();
                out.push(Token::Minus);
            }
            '*' => {
                chars.next();
                out.push(Token::Star);
            }
            '/' => {
                chars.next();
                out.push(Token::Slash);
            }
            '^' => {
                chars.next();
                out.push(Token::Caret);
            }
            '(' => {
                chars.next();
                out.push(Token::LParen);
            }
            ')' => {
                chars.next();
                out.push(Token::RParen);
            }
            other => {
                return Err(Error::parse(format!(
                    "unexpected character '{other}' at byte {pos}"
                )));
            }
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<RatFunc, Error> {
        let mut acc = self.term()?;
        while let Some(tok) = self.peek() {
            match tok {
                Token::Plus => {
                    self.next();
                    let rhs = self.term()?;
                    acc = &acc + &rhs;
                }
                Token::Minus => {
                    self.next();
                    let rhs = self.term()?;
                    acc = &acc - &rhs;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<RatFunc, Error> {
        let mut acc = self.factor()?;
        while let Some(tok) = self.peek() {
            match tok {
                Token::Star => {
                    self.next();
                    let rhs = self.factor()?;
                    acc = &acc * &rhs;
                }
                Token::Slash => {
                    self.next();
                    let rhs = self.factor()?;
                    if rhs.is_zero() {
                        return Err(Error::parse("division by the zero function"));
                    }
                    acc = &acc * &rhs.recip().expect("nonzero divisor");
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<RatFunc, Error> {
        let mut negate = false;
        loop {
            match self.peek() {
                Some(Token::Minus) => {
                    negate = !negate;
                    self.next();
                }
                Some(Token::Plus) => {
                    self.next();
                }
                _ => break,
            }
        }
        let base = self.base()?;
        let powed = if let Some(Token::Caret) = self.peek() {
            self.next();
            let mut exp_negate = false;
            while let Some(Token::Minus) = self.peek() {
                exp_negate = !exp_negate;
                self.next();
            }
            let e = match self.next() {
                Some(Token::Num(n)) => n,
                other => {
                    return Err(Error::parse(format!(
                        "expected integer exponent, found {other:?}"
                    )));
                }
            };
            let e: u32 = e
                .try_into()
                .map_err(|_| Error::parse("exponent too large"))?;
            let mut acc = RatFunc::constant(Q::one());
            for _ in 0..e {
                acc = &acc * &base;
            }
            if exp_negate {
                if acc.is_zero() {
                    return Err(Error::parse("zero raised to a negative power"));
                }
                acc = acc.recip().expect("nonzero base");
            }
            acc
        } else {
            base
        };
        Ok(if negate { -&powed } else { powed })
    }

    fn base(&mut self) -> Result<RatFunc, Error> {
        match self.next() {
            Some(Token::Num(n)) => Ok(RatFunc::constant(Q::from_integer(n))),
            Some(Token::Var) => Ok(RatFunc::t()),
            Some(Token::LParen) => {
                let inner = self.expr()?;
                match self.next() {
                    Some(Token::RParen) => Ok(inner),
                    _ => Err(Error::parse("missing closing parenthesis")),
                }
            }
            other => Err(Error::parse(format!(
                "expected a number, 't', or '(', found {other:?}"
            ))),
        }
    }
}

impl std::str::FromStr for RatFunc {
    type Err = Error;

    /// Parse an arithmetic expression in `t` with integer literals and the
    /// operators `+ - * / ^` (exponents are integers; `/` between integers
    /// builds rational constants).
    fn from_str(s: &str) -> Result<Self, Error> {
        let tokens = lex(s)?;
        if tokens.is_empty() {
            return Err(Error::parse("empty expression"));
        }
        let mut p = Parser { tokens, pos: 0 };
        let f = p.expr()?;
        if p.pos != p.tokens.len() {
            return Err(Error::parse(format!(
                "trailing input starting at token {}",
                p.pos
            )));
        }
        Ok(f)
    }
}
