//! The field `QQ(λ)` of rational functions in one parameter, kept as reduced
//! fractions with monic denominators.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::ring::Ring;

/// Dense univariate polynomial over the rationals, lowest degree first, with
/// no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct UPoly(Vec<BigRational>);

impl UPoly {
    pub fn zero() -> Self {
        UPoly(Vec::new())
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    /// `λ`.
    pub fn var() -> Self {
        Self::new(vec![BigRational::zero(), BigRational::one()])
    }

    pub fn new(mut c: Vec<BigRational>) -> Self {
        while c.last().is_some_and(Zero::is_zero) {
            c.pop();
        }
        UPoly(c)
    }

    pub fn from_i64(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&x| BigRational::from_integer(x.into())).collect())
    }

    pub fn coefficients(&self) -> &[BigRational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.0.len() == 1 && self.0[0].is_one()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigRational> {
        self.0.last()
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.0.len().max(o.0.len());
        let z = BigRational::zero();
        Self::new(
            (0..n)
                .map(|i| self.0.get(i).unwrap_or(&z) + o.0.get(i).unwrap_or(&z))
                .collect(),
        )
    }

    pub fn neg(&self) -> Self {
        UPoly(self.0.iter().map(|c| -c).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigRational::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::new(self.0.iter().map(|x| x * c).collect())
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by zero polynomial");
        let lead_inv = d.leading().unwrap().recip();
        let mut r = self.0.clone();
        if r.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut q = vec![BigRational::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] * &lead_inv;
            if !c.is_zero() {
                for (j, dj) in d.0.iter().enumerate() {
                    r[k + j] -= &c * dj;
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (Self::new(q), Self::new(r))
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            Some(l) => self.scale(&l.recip()),
            None => Self::zero(),
        }
    }

    /// Monic gcd (zero for `gcd(0, 0)`).
    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigRational::from_integer(i.into()))
                .collect(),
        )
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.0.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    /// Least common multiple of the denominators of the coefficients.
    pub fn denominator_lcm(&self) -> BigInt {
        self.0.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }

    /// Gcd of the numerators of the coefficients of an integral polynomial.
    pub fn content(&self) -> BigInt {
        self.0.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c.numer()))
    }

    pub fn format(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts: Vec<(bool, String)> = Vec::new();
        for (i, c) in self.0.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            let mono = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            };
            let s = if mono.is_empty() {
                a.to_string()
            } else if a.is_one() {
                mono
            } else {
                format!("{a}*{mono}")
            };
            parts.push((neg, s));
        }
        let mut out = String::new();
        for (k, (neg, s)) in parts.into_iter().enumerate() {
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            out.push_str(&s);
        }
        out
    }
}

/// A reduced fraction `num / den` with `den` monic.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: UPoly,
    den: UPoly,
}

impl RatFunc {
    pub fn new(num: UPoly, den: UPoly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return RatFunc {
                num,
                den: UPoly::one(),
            };
        }
        let g = num.gcd(&den);
        let (mut n, _) = num.div_rem(&g);
        let (mut d, _) = den.div_rem(&g);
        let l = d.leading().unwrap().recip();
        n = n.scale(&l);
        d = d.scale(&l);
        RatFunc { num: n, den: d }
    }

    pub fn from_poly(p: UPoly) -> Self {
        RatFunc {
            num: p,
            den: UPoly::one(),
        }
    }

    pub fn numerator(&self) -> &UPoly {
        &self.num
    }

    pub fn denominator(&self) -> &UPoly {
        &self.den
    }

    pub fn derivative(&self) -> Self {
        let n = self.num.derivative().mul(&self.den).sub(&self.num.mul(&self.den.derivative()));
        RatFunc::new(n, self.den.mul(&self.den))
    }

    /// Value at `λ = x`, or `None` at a pole.
    pub fn eval(&self, x: &BigRational) -> Option<BigRational> {
        let d = self.den.eval(x);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval(x) / d)
        }
    }
}

/// `QQ(var)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatFuncField {
    var: String,
}

impl RatFuncField {
    pub fn new(var: impl Into<String>) -> Self {
        RatFuncField { var: var.into() }
    }

    pub fn var_name(&self) -> &str {
        &self.var
    }

    pub fn param(&self) -> RatFunc {
        RatFunc::from_poly(UPoly::var())
    }

    pub fn from_poly(&self, p: UPoly) -> RatFunc {
        RatFunc::from_poly(p)
    }
}

impl fmt::Display for RatFuncField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QQ({})", self.var)
    }
}

impl Ring for RatFuncField {
    type Elem = RatFunc;

    fn zero(&self) -> RatFunc {
        RatFunc::from_poly(UPoly::zero())
    }

    fn one(&self) -> RatFunc {
        RatFunc::from_poly(UPoly::one())
    }

    fn from_bigint(&self, n: &BigInt) -> RatFunc {
        RatFunc::from_poly(UPoly::constant(BigRational::from_integer(n.clone())))
    }

    fn from_rational(&self, q: &BigRational) -> Option<RatFunc> {
        Some(RatFunc::from_poly(UPoly::constant(q.clone())))
    }

    fn add(&self, a: &RatFunc, b: &RatFunc) -> RatFunc {
        if a.den == b.den {
            return RatFunc::new(a.num.add(&b.num), a.den.clone());
        }
        RatFunc::new(
            a.num.mul(&b.den).add(&b.num.mul(&a.den)),
            a.den.mul(&b.den),
        )
    }

    fn neg(&self, a: &RatFunc) -> RatFunc {
        RatFunc {
            num: a.num.neg(),
            den: a.den.clone(),
        }
    }

    fn mul(&self, a: &RatFunc, b: &RatFunc) -> RatFunc {
        if a.den.is_one() && b.den.is_one() {
            return RatFunc::from_poly(a.num.mul(&b.num));
        }
        RatFunc::new(a.num.mul(&b.num), a.den.mul(&b.den))
    }

    fn is_zero(&self, a: &RatFunc) -> bool {
        a.num.is_zero()
    }

    fn inv(&self, a: &RatFunc) -> Option<RatFunc> {
        if a.num.is_zero() {
            None
        } else {
            Some(RatFunc::new(a.den.clone(), a.num.clone()))
        }
    }

    fn is_field(&self) -> bool {
        true
    }

    fn is_torsion_free(&self) -> bool {
        true
    }

    fn format(&self, a: &RatFunc) -> String {
        let n = a.num.format(&self.var);
        if a.den.is_one() {
            return n;
        }
        let wrap = |p: &UPoly, s: String| {
            if p.0.iter().filter(|c| !c.is_zero()).count() > 1 {
                format!("({s})")
            } else {
                s
            }
        };
        format!("{}/{}", wrap(&a.num, n), wrap(&a.den, a.den.format(&self.var)))
    }

    fn needs_parens(&self, a: &RatFunc) -> bool {
        !a.den.is_one() || a.num.0.iter().filter(|c| !c.is_zero()).count() > 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn euclid_and_gcd() {
        // (λ^2 - 1) / (λ - 1) = λ + 1
        let a = UPoly::from_i64(&[-1, 0, 1]);
        let b = UPoly::from_i64(&[-1, 1]);
        let (qq, r) = a.div_rem(&b);
        assert_eq!(qq, UPoly::from_i64(&[1, 1]));
        assert!(r.is_zero());
        assert_eq!(a.gcd(&UPoly::from_i64(&[2, 2])), UPoly::from_i64(&[1, 1]));
    }

    #[test]
    fn fractions_reduce() {
        let k = RatFuncField::new("lambda");
        let f = RatFunc::new(UPoly::from_i64(&[-1, 0, 1]), UPoly::from_i64(&[-2, 2]));
        assert_eq!(f.numerator(), &UPoly::new(vec![q(1, 2), q(1, 2)]));
        assert!(f.denominator().is_one());
        let lam = k.param();
        let inv = k.inv(&lam).unwrap();
        assert_eq!(k.mul(&lam, &inv), k.one());
        assert_eq!(k.format(&k.add(&inv, &k.one())), "(lambda + 1)/lambda");
        assert_eq!(inv.derivative(), k.neg(&k.mul(&inv, &inv)));
    }

    #[test]
    fn evaluation() {
        let f = RatFunc::new(UPoly::from_i64(&[1]), UPoly::from_i64(&[0, 1]));
        assert_eq!(f.eval(&q(2, 1)), Some(q(1, 2)));
        assert_eq!(f.eval(&q(0, 1)), None);
    }
}
