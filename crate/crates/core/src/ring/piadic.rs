use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{is_prime, mod_inverse, Ring};
use crate::error::{Error, Result};

/// The ramified ring `Z[π]/(π^{p-1} + p, p^N)` for an odd prime `p`.
///
/// Elements are stored as `p - 1` coefficients in `[0, p^N)` with respect to
/// the basis `1, π, …, π^{p-2}`. Since `p^N = ±π^{N(p-1)}`, the ring is the
/// truncation of `Z_p[π]` at π-adic precision `N(p-1)`. Valuations are
/// measured in π-units: `v(π) = 1`, `v(p) = p - 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PiAdicRing {
    p: u64,
    precision: u32,
    modulus: BigInt,
}

impl PiAdicRing {
    pub fn new(p: u64, precision: u32) -> Result<Self> {
        if p == 2 || !is_prime(&BigInt::from(p)) {
            return Err(Error::InvalidRingSpec(format!(
                "pi-adic ring needs an odd prime, got {p}"
            )));
        }
        if precision == 0 {
            return Err(Error::InvalidRingSpec("pi-adic precision must be >= 1".into()));
        }
        Ok(PiAdicRing {
            p,
            precision,
            modulus: BigInt::from(p).pow(precision),
        })
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    /// Precision `N` in p-adic digits.
    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// Total π-adic precision `N(p-1)`.
    pub fn pi_precision(&self) -> i64 {
        self.precision as i64 * (self.p as i64 - 1)
    }

    pub fn modulus(&self) -> &BigInt {
        &self.modulus
    }

    fn degree(&self) -> usize {
        (self.p - 1) as usize
    }

    fn reduce(&self, n: &BigInt) -> BigInt {
        n.mod_floor(&self.modulus)
    }

    pub fn pi(&self) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); self.degree()];
        if self.degree() > 1 {
            v[1] = BigInt::one();
        } else {
            // p - 1 = 1 cannot happen for odd p
            unreachable!()
        }
        v
    }

    /// `π^k` for any `k ≥ 0`.
    pub fn pi_pow(&self, k: u64) -> Vec<BigInt> {
        let d = self.degree() as u64;
        let (q, r) = (k / d, k % d);
        let mut v = vec![BigInt::zero(); self.degree()];
        let mut c = BigInt::from(self.p).pow(q.min(self.precision as u64) as u32);
        if q % 2 == 1 {
            c = -c;
        }
        v[r as usize] = self.reduce(&c);
        v
    }

    /// π-adic valuation in π-units, `None` for zero.
    pub fn valuation(&self, a: &[BigInt]) -> Option<i64> {
        a.iter()
            .enumerate()
            .filter_map(|(i, c)| {
                super::int_valuation(c, self.p)
                    .map(|v| v as i64 * (self.p as i64 - 1) + i as i64)
            })
            .min()
    }

    /// A representative of `a / π` for `a` with positive valuation. The top
    /// p-adic digit of the result is not determined by `a`; callers that care
    /// track that loss themselves.
    pub fn div_pi(&self, a: &[BigInt]) -> Option<Vec<BigInt>> {
        let p = BigInt::from(self.p);
        if !(&a[0] % &p).is_zero() {
            return None;
        }
        let d = self.degree();
        let mut out = vec![BigInt::zero(); d];
        out[..(d - 1)].clone_from_slice(&a[1..d]);
        // a_0 / π = a_0 π^{p-2} / π^{p-1} = -(a_0 / p) π^{p-2}
        out[d - 1] = self.reduce(&-(&a[0] / &p));
        Some(out)
    }

    /// π-adic digits `d_k ∈ [0, p)` with `a = Σ d_k π^k`, `k < N(p-1)`.
    pub fn digits(&self, a: &[BigInt]) -> Vec<u64> {
        let p = BigInt::from(self.p);
        let mut cur = a.to_vec();
        let mut out = Vec::with_capacity(self.pi_precision() as usize);
        for _ in 0..self.pi_precision() {
            let d = cur[0].mod_floor(&p);
            cur[0] = self.reduce(&(&cur[0] - &d));
            out.push(d.try_into().unwrap_or(0));
            cur = self.div_pi(&cur).expect("constant digit removed");
        }
        out
    }

    /// Image of a rational with denominator prime to `p`.
    pub fn rational(&self, q: &BigRational) -> Option<Vec<BigInt>> {
        let inv = mod_inverse(q.denom(), &self.modulus)?;
        let mut v = vec![BigInt::zero(); self.degree()];
        v[0] = self.reduce(&(q.numer() * inv));
        Some(v)
    }
}

impl fmt::Display for PiAdicRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "padic:p={}:N={}", self.p, self.precision)
    }
}

impl Ring for PiAdicRing {
    type Elem = Vec<BigInt>;

    fn zero(&self) -> Vec<BigInt> {
        vec![BigInt::zero(); self.degree()]
    }

    fn one(&self) -> Vec<BigInt> {
        self.from_bigint(&BigInt::one())
    }

    fn from_bigint(&self, n: &BigInt) -> Vec<BigInt> {
        let mut v = self.zero();
        v[0] = self.reduce(n);
        v
    }

    fn add(&self, a: &Vec<BigInt>, b: &Vec<BigInt>) -> Vec<BigInt> {
        a.iter().zip(b).map(|(x, y)| self.reduce(&(x + y))).collect()
    }

    fn neg(&self, a: &Vec<BigInt>) -> Vec<BigInt> {
        a.iter().map(|x| self.reduce(&-x)).collect()
    }

    fn mul(&self, a: &Vec<BigInt>, b: &Vec<BigInt>) -> Vec<BigInt> {
        let d = self.degree();
        let mut full = vec![BigInt::zero(); 2 * d - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if !y.is_zero() {
                    full[i + j] += x * y;
                }
            }
        }
        // π^{d+k} = -p π^k
        let p = BigInt::from(self.p);
        let mut out: Vec<BigInt> = full[..d].to_vec();
        for k in d..(2 * d - 1) {
            out[k - d] -= &p * &full[k];
        }
        out.iter().map(|x| self.reduce(x)).collect()
    }

    fn is_zero(&self, a: &Vec<BigInt>) -> bool {
        a.iter().all(Zero::is_zero)
    }

    fn inv(&self, a: &Vec<BigInt>) -> Option<Vec<BigInt>> {
        // a = c (1 + π r) with c a p-adic unit; the geometric series in π r
        // terminates because π^{N(p-1)} = 0.
        let c_inv = mod_inverse(&a[0], &self.modulus)?;
        let c_inv = self.from_bigint(&c_inv);
        let mut u = self.mul(a, &c_inv);
        u[0] = self.reduce(&(&u[0] - BigInt::one()));
        let neg_u = self.neg(&u);
        let mut term = self.one();
        let mut acc = self.one();
        for _ in 0..self.pi_precision() {
            term = self.mul(&term, &neg_u);
            if self.is_zero(&term) {
                break;
            }
            acc = self.add(&acc, &term);
        }
        Some(self.mul(&acc, &c_inv))
    }

    fn is_field(&self) -> bool {
        false
    }

    fn is_torsion_free(&self) -> bool {
        false
    }

    fn format(&self, a: &Vec<BigInt>) -> String {
        let mut parts = Vec::new();
        for (i, c) in a.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            parts.push(match i {
                0 => c.to_string(),
                1 => format!("{c}*pi"),
                _ => format!("{c}*pi^{i}"),
            });
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }

    fn needs_parens(&self, a: &Vec<BigInt>) -> bool {
        a.iter().filter(|c| !c.is_zero()).count() > 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi_to_the_p_minus_one_is_minus_p() {
        for p in [3u64, 5, 7, 11] {
            let r = PiAdicRing::new(p, 6).unwrap();
            let lhs = r.pow(&r.pi(), p - 1);
            assert_eq!(lhs, r.from_i64(-(p as i64)), "p = {p}");
            assert_eq!(r.pi_pow(p - 1), lhs);
            assert_eq!(r.pi_pow(3 * (p - 1) + 1), r.pow(&r.pi(), 3 * (p - 1) + 1));
        }
    }

    #[test]
    fn rejects_even_and_composite() {
        assert!(PiAdicRing::new(2, 5).is_err());
        assert!(PiAdicRing::new(9, 5).is_err());
        assert!(PiAdicRing::new(5, 0).is_err());
    }

    #[test]
    fn valuation_and_digits() {
        let r = PiAdicRing::new(5, 4).unwrap();
        assert_eq!(r.valuation(&r.pi()), Some(1));
        assert_eq!(r.valuation(&r.from_i64(5)), Some(4));
        assert_eq!(r.valuation(&r.from_i64(50)), Some(8));
        assert_eq!(r.valuation(&r.zero()), None);
        let x = r.add(&r.from_i64(3), &r.mul(&r.from_i64(2), &r.pi()));
        let d = r.digits(&x);
        assert_eq!(&d[..3], &[3, 2, 0]);
        // reconstruct
        let mut back = r.zero();
        for (k, &dk) in d.iter().enumerate() {
            back = r.add(&back, &r.mul(&r.from_i64(dk as i64), &r.pi_pow(k as u64)));
        }
        assert_eq!(back, x);
    }

    #[test]
    fn unit_inverse() {
        let r = PiAdicRing::new(7, 5).unwrap();
        let a = r.add(&r.from_i64(3), &r.mul(&r.from_i64(11), &r.pi_pow(4)));
        let b = r.inv(&a).unwrap();
        assert_eq!(r.mul(&a, &b), r.one());
        assert!(r.inv(&r.pi()).is_none());
    }
}
