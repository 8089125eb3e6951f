//! Exact coefficient rings.
//!
//! Every algebraic module in the crate is generic over [`Ring`]. A ring is a
//! lightweight *context* value; its elements are plain data carried around
//! separately (the same split used by most exact-arithmetic libraries), so a
//! polynomial stores its ring once instead of once per coefficient.
//!
//! [`RingSpec`] is the runtime-described family of rings exposed on the
//! command line: integers, rationals, residues, `K[λ]/(λ^N)` and the ramified
//! ring `Z[π]/(π^{p-1}+p, p^N)`. [`crate::ratfunc::RatFuncField`] (rational
//! functions in one parameter) is the only other implementor.

mod hom;
mod piadic;
mod spec;

pub use hom::RingHom;
pub use piadic::PiAdicRing;
pub use spec::{RingElement, RingSpec, Value};

use std::fmt;
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// A commutative ring with identity and canonical element representatives.
///
/// Equality of elements is structural; implementors must keep every element
/// they return in canonical form.
#[allow(clippy::wrong_self_convention)]
pub trait Ring: Clone + PartialEq + fmt::Debug + fmt::Display {
    type Elem: Clone + PartialEq + Eq + Hash + fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_bigint(&self, n: &BigInt) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    /// Multiplicative inverse, or `None` when `a` is not a unit.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn is_field(&self) -> bool;
    /// Whether the ring injects into its tensor product with the rationals.
    fn is_torsion_free(&self) -> bool;
    fn format(&self, a: &Self::Elem) -> String;

    /// Whether `format(a)` must be parenthesized when used as a factor.
    fn needs_parens(&self, _a: &Self::Elem) -> bool {
        false
    }

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn from_i64(&self, n: i64) -> Self::Elem {
        self.from_bigint(&BigInt::from(n))
    }

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    /// Image of a rational number, `None` if its denominator is not a unit.
    fn from_rational(&self, q: &BigRational) -> Option<Self::Elem> {
        let den = self.inv(&self.from_bigint(q.denom()))?;
        Some(self.mul(&self.from_bigint(q.numer()), &den))
    }

    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    fn sum<'a, I>(&self, items: I) -> Self::Elem
    where
        I: IntoIterator<Item = &'a Self::Elem>,
        Self::Elem: 'a,
    {
        items
            .into_iter()
            .fold(self.zero(), |acc, x| self.add(&acc, x))
    }
}

/// Inverse of `a` modulo `m`, if it exists. Result lies in `[0, m)`.
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let a = a.mod_floor(m);
    let e = a.extended_gcd(m);
    if !e.gcd.is_one() {
        return None;
    }
    Some(e.x.mod_floor(m))
}

/// p-adic valuation of a nonzero integer.
pub fn int_valuation(n: &BigInt, p: u64) -> Option<u32> {
    if n.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return Some(v);
        }
        n = q;
        v += 1;
    }
}

/// p-adic valuation of a nonzero rational.
pub fn rat_valuation(q: &BigRational, p: u64) -> Option<i64> {
    let vn = int_valuation(q.numer(), p)? as i64;
    let vd = int_valuation(q.denom(), p).unwrap_or(0) as i64;
    Some(vn - vd)
}

/// Deterministic primality test (Miller-Rabin with fixed bases; exact below
/// 3.3e24, which covers every modulus this crate is used with).
pub fn is_prime(n: &BigInt) -> bool {
    let two = BigInt::from(2);
    if *n < two {
        return false;
    }
    const SMALL: [u32; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];
    for &s in &SMALL {
        let s = BigInt::from(s);
        if *n == s {
            return true;
        }
        if (n % &s).is_zero() {
            return false;
        }
    }
    let one = BigInt::one();
    let n1 = n - &one;
    let mut d = n1.clone();
    let mut r = 0u32;
    while d.is_even() {
        d >>= 1;
        r += 1;
    }
    'witness: for &a in &SMALL {
        let mut x = BigInt::from(a).modpow(&d, n);
        if x == one || x == n1 {
            continue;
        }
        for _ in 1..r {
            x = (&x * &x) % n;
            if x == n1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_small_cases() {
        let primes: Vec<i64> = (0..60).filter(|&n| is_prime(&BigInt::from(n))).collect();
        assert_eq!(
            primes,
            vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]
        );
        assert!(is_prime(&BigInt::from(1_000_000_007i64)));
        assert!(!is_prime(&BigInt::from(343)));
        assert!(!is_prime(&BigInt::from(2401)));
    }

    #[test]
    fn inverse_mod_prime_power() {
        // 3 * 1601 = 4803 = 2 * 2401 + 1
        let inv = mod_inverse(&BigInt::from(3), &BigInt::from(2401)).unwrap();
        assert_eq!(inv, BigInt::from(1601));
        assert!(mod_inverse(&BigInt::from(7), &BigInt::from(2401)).is_none());
    }

    #[test]
    fn valuations() {
        assert_eq!(int_valuation(&BigInt::from(250), 5), Some(3));
        let q = BigRational::new(BigInt::from(3), BigInt::from(50));
        assert_eq!(rat_valuation(&q, 5), Some(-2));
        assert_eq!(rat_valuation(&q, 3), Some(1));
    }
}
