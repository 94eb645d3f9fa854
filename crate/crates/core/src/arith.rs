//! Integer arithmetic helpers: factorization and p-adic valuations.
//!
//! The valuation-based reformulations of the decision procedure need the
//! prime factorization of the rational constants that appear in leading
//! coefficients and point differences. Constants stay small in practice, but
//! factorization is implemented robustly (trial division, then deterministic
//! Miller–Rabin, then Pollard's rho) so arbitrary inputs do not hang.

use crate::Q;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;

/// Multiset of prime factors of `|n|` as `prime -> exponent`.
///
/// `n` must be non-zero; the sign and the unit are discarded.
pub fn factor(n: &BigInt) -> BTreeMap<BigInt, u32> {
    assert!(!n.is_zero(), "cannot factor zero");
    let mut out = BTreeMap::new();
    let mut m = n.abs();
    if m.is_one() {
        return out;
    }
    // Trial division by small primes.
    let mut d = BigInt::from(2u32);
    let limit = BigInt::from(100_000u32);
    while &d * &d <= m && d <= limit {
        while (&m % &d).is_zero() {
            *out.entry(d.clone()).or_insert(0) += 1;
            m /= &d;
        }
        d += 1u32;
    }
    if m.is_one() {
        return out;
    }
    // The remaining cofactor has no factor below 10^5: split it recursively.
    split_big(&m, &mut out);
    out
}

fn split_big(m: &BigInt, out: &mut BTreeMap<BigInt, u32>) {
    if m.is_one() {
        return;
    }
    if is_prime(m) {
        *out.entry(m.clone()).or_insert(0) += 1;
        return;
    }
    let d = pollard_rho(m);
    split_big(&d, out);
    split_big(&(m / &d), out);
}

/// Deterministic Miller–Rabin for positive integers.
///
/// The witness set {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37} is proven
/// deterministic below 3.3·10^24; larger inputs get a strong probable-prime
/// answer, far beyond anything the engine produces.
pub fn is_prime(n: &BigInt) -> bool {
    let two = BigInt::from(2u32);
    if n < &two {
        return false;
    }
    for p in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let p = BigInt::from(p);
        if *n == p {
            return true;
        }
        if (n % &p).is_zero() {
            return false;
        }
    }
    let n_minus_1 = n - 1u32;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    'witness: for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = BigInt::from(a).modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Pollard's rho (Brent variant) — returns a non-trivial factor of composite `m`.
fn pollard_rho(m: &BigInt) -> BigInt {
    let one = BigInt::one();
    let two = BigInt::from(2u32);
    if (m % &two).is_zero() {
        return two;
    }
    let mut c = BigInt::one();
    loop {
        let f = |x: &BigInt| (x * x + &c) % m;
        let mut x = BigInt::from(2u32);
        let mut y = BigInt::from(2u32);
        let mut d = BigInt::one();
        while d.is_one() {
            x = f(&x);
            y = f(&f(&y));
            d = (&x - &y).abs().gcd(m);
        }
        if d != *m {
            return d;
        }
        c += &one;
    }
}

/// p-adic valuation of a non-zero rational: `v_p(a/b) = v_p(a) − v_p(b)`.
pub fn padic_val(x: &Q, p: &BigInt) -> i64 {
    assert!(!x.is_zero(), "valuation of zero is undefined");
    int_val(x.numer(), p) - int_val(x.denom(), p)
}

fn int_val(n: &BigInt, p: &BigInt) -> i64 {
    let mut v = 0i64;
    let mut m = n.abs();
    while (&m % p).is_zero() {
        m /= p;
        v += 1;
    }
    v
}

/// All primes dividing numerator or denominator of a non-zero rational.
pub fn rational_primes(x: &Q) -> BTreeMap<BigInt, i64> {
    assert!(!x.is_zero());
    let mut out: BTreeMap<BigInt, i64> = BTreeMap::new();
    for (p, e) in factor(x.numer()) {
        *out.entry(p).or_insert(0) += e as i64;
    }
    for (p, e) in factor(x.denom()) {
        *out.entry(p).or_insert(0) -= e as i64;
    }
    out.retain(|_, e| *e != 0);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::q;

    #[test]
    fn factors_small_and_large() {
        let f = factor(&BigInt::from(360));
        assert_eq!(f.get(&BigInt::from(2)), Some(&3));
        assert_eq!(f.get(&BigInt::from(3)), Some(&2));
        assert_eq!(f.get(&BigInt::from(5)), Some(&1));

        // A product of two primes above the trial-division bound.
        let p = BigInt::from(1_000_003u64);
        let q_ = BigInt::from(1_000_033u64);
        let f = factor(&(&p * &q_));
        assert_eq!(f.get(&p), Some(&1));
        assert_eq!(f.get(&q_), Some(&1));
    }

    #[test]
    fn primality() {
        assert!(is_prime(&BigInt::from(2)));
        assert!(is_prime(&BigInt::from(97)));
        assert!(is_prime(&BigInt::from(1_000_003u64)));
        assert!(!is_prime(&BigInt::from(1)));
        assert!(!is_prime(&BigInt::from(1_000_001u64))); // 101 · 9901
    }

    #[test]
    fn valuations() {
        assert_eq!(padic_val(&q(8, 3), &BigInt::from(2)), 3);
        assert_eq!(padic_val(&q(8, 3), &BigInt::from(3)), -1);
        assert_eq!(padic_val(&q(5, 1), &BigInt::from(7)), 0);
        let primes = rational_primes(&q(-12, 35));
        assert_eq!(primes.get(&BigInt::from(2)), Some(&2));
        assert_eq!(primes.get(&BigInt::from(3)), Some(&1));
        assert_eq!(primes.get(&BigInt::from(5)), Some(&-1));
        assert_eq!(primes.get(&BigInt::from(7)), Some(&-1));
    }
}
