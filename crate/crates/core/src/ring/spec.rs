use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{is_prime, mod_inverse, PiAdicRing, Ring};
use crate::error::{Error, Result};

/// Runtime description of a coefficient ring.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RingSpec {
    Integers,
    Rationals,
    Modular(BigInt),
    /// `base[var]/(var^order)`; the base is never itself a truncated series.
    TruncatedSeries {
        base: Box<RingSpec>,
        var: String,
        order: usize,
    },
    PiAdic(PiAdicRing),
}

/// Canonical payload of a [`RingSpec`] element. The meaning depends on the
/// ring: integers and residues use `Int`, rationals `Rat`, truncated series a
/// dense coefficient vector of length exactly `order`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Value {
    Int(BigInt),
    Rat(BigRational),
    Series(Vec<Value>),
    PiAdic(Vec<BigInt>),
}

impl RingSpec {
    pub fn modular(m: impl Into<BigInt>) -> Result<Self> {
        let m = m.into();
        if m < BigInt::from(2) {
            return Err(Error::InvalidRingSpec(format!("modulus must be >= 2, got {m}")));
        }
        Ok(RingSpec::Modular(m))
    }

    pub fn series(base: RingSpec, var: impl Into<String>, order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidRingSpec("series order must be >= 1".into()));
        }
        if matches!(base, RingSpec::TruncatedSeries { .. }) {
            return Err(Error::InvalidRingSpec(
                "truncated series over truncated series is not supported".into(),
            ));
        }
        Ok(RingSpec::TruncatedSeries {
            base: Box::new(base),
            var: var.into(),
            order,
        })
    }

    pub fn padic(p: u64, precision: u32) -> Result<Self> {
        Ok(RingSpec::PiAdic(PiAdicRing::new(p, precision)?))
    }

    /// `self[lambda]/(lambda^order)`.
    pub fn lambda_series(&self, order: usize) -> Result<Self> {
        RingSpec::series(self.clone(), "lambda", order)
    }

    pub fn series_base(&self) -> Option<(&RingSpec, &str, usize)> {
        match self {
            RingSpec::TruncatedSeries { base, var, order } => Some((base, var, *order)),
            _ => None,
        }
    }

    /// Brings an arbitrary payload of the right shape into canonical form.
    pub fn canonicalize(&self, v: Value) -> Result<Value> {
        let bad = |v: &Value| Error::InvalidArgument(format!("value {v:?} does not belong to {self}"));
        match (self, v) {
            (RingSpec::Integers, Value::Int(n)) => Ok(Value::Int(n)),
            (RingSpec::Rationals, Value::Rat(q)) => Ok(Value::Rat(q)),
            (RingSpec::Rationals, Value::Int(n)) => Ok(Value::Rat(BigRational::from_integer(n))),
            (RingSpec::Modular(m), Value::Int(n)) => Ok(Value::Int(n.mod_floor(m))),
            (RingSpec::TruncatedSeries { base, order, .. }, Value::Series(cs)) => {
                let mut out = Vec::with_capacity(*order);
                for c in cs.into_iter().take(*order) {
                    out.push(base.canonicalize(c)?);
                }
                out.resize(*order, base.zero());
                Ok(Value::Series(out))
            }
            (RingSpec::PiAdic(r), Value::PiAdic(cs)) => {
                if cs.len() != (r.prime() - 1) as usize {
                    return Err(bad(&Value::PiAdic(cs)));
                }
                Ok(Value::PiAdic(cs.iter().map(|c| c.mod_floor(r.modulus())).collect()))
            }
            (_, v) => Err(bad(&v)),
        }
    }

    fn series_parts<'a>(&self, v: &'a Value) -> &'a [Value] {
        match v {
            Value::Series(cs) => cs,
            _ => panic!("expected a series value in {self}"),
        }
    }

    fn int<'a>(&self, v: &'a Value) -> &'a BigInt {
        match v {
            Value::Int(n) => n,
            _ => panic!("expected an integer value in {self}"),
        }
    }

    fn rat<'a>(&self, v: &'a Value) -> &'a BigRational {
        match v {
            Value::Rat(q) => q,
            _ => panic!("expected a rational value in {self}"),
        }
    }

    fn padic_parts<'a>(&self, v: &'a Value) -> &'a Vec<BigInt> {
        match v {
            Value::PiAdic(c) => c,
            _ => panic!("expected a pi-adic value in {self}"),
        }
    }

    /// Coefficients of a series element; `None` for non-series rings.
    pub fn series_coefficients<'a>(&self, v: &'a Value) -> Option<&'a [Value]> {
        match (self, v) {
            (RingSpec::TruncatedSeries { .. }, Value::Series(cs)) => Some(cs),
            _ => None,
        }
    }

    /// Embeds a base-ring value as a constant series.
    pub fn series_constant(&self, c: Value) -> Value {
        let (base, _, order) = self.series_base().expect("series ring");
        let mut cs = vec![base.zero(); order];
        cs[0] = c;
        Value::Series(cs)
    }

    /// `var^k` in a truncated-series ring (zero when `k ≥ order`).
    pub fn series_var_pow(&self, k: usize) -> Value {
        let (base, _, order) = self.series_base().expect("series ring");
        let mut cs = vec![base.zero(); order];
        if k < order {
            cs[k] = base.one();
        }
        Value::Series(cs)
    }
}

impl fmt::Display for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingSpec::Integers => write!(f, "ZZ"),
            RingSpec::Rationals => write!(f, "QQ"),
            RingSpec::Modular(m) => write!(f, "Zmod:{m}"),
            RingSpec::TruncatedSeries { base, var, order } => {
                write!(f, "series:{base}:{var}:{order}")
            }
            RingSpec::PiAdic(r) => write!(f, "{r}"),
        }
    }
}

impl Ring for RingSpec {
    type Elem = Value;

    fn zero(&self) -> Value {
        self.from_bigint(&BigInt::zero())
    }

    fn one(&self) -> Value {
        self.from_bigint(&BigInt::one())
    }

    fn from_bigint(&self, n: &BigInt) -> Value {
        match self {
            RingSpec::Integers => Value::Int(n.clone()),
            RingSpec::Rationals => Value::Rat(BigRational::from_integer(n.clone())),
            RingSpec::Modular(m) => Value::Int(n.mod_floor(m)),
            RingSpec::TruncatedSeries { base, .. } => self.series_constant(base.from_bigint(n)),
            RingSpec::PiAdic(r) => Value::PiAdic(r.from_bigint(n)),
        }
    }

    fn add(&self, a: &Value, b: &Value) -> Value {
        match self {
            RingSpec::Integers => Value::Int(self.int(a) + self.int(b)),
            RingSpec::Rationals => Value::Rat(self.rat(a) + self.rat(b)),
            RingSpec::Modular(m) => Value::Int((self.int(a) + self.int(b)).mod_floor(m)),
            RingSpec::TruncatedSeries { base, .. } => Value::Series(
                self.series_parts(a)
                    .iter()
                    .zip(self.series_parts(b))
                    .map(|(x, y)| base.add(x, y))
                    .collect(),
            ),
            RingSpec::PiAdic(r) => Value::PiAdic(r.add(self.padic_parts(a), self.padic_parts(b))),
        }
    }

    fn neg(&self, a: &Value) -> Value {
        match self {
            RingSpec::Integers => Value::Int(-self.int(a)),
            RingSpec::Rationals => Value::Rat(-self.rat(a)),
            RingSpec::Modular(m) => Value::Int((-self.int(a)).mod_floor(m)),
            RingSpec::TruncatedSeries { base, .. } => {
                Value::Series(self.series_parts(a).iter().map(|x| base.neg(x)).collect())
            }
            RingSpec::PiAdic(r) => Value::PiAdic(r.neg(self.padic_parts(a))),
        }
    }

    fn mul(&self, a: &Value, b: &Value) -> Value {
        match self {
            RingSpec::Integers => Value::Int(self.int(a) * self.int(b)),
            RingSpec::Rationals => Value::Rat(self.rat(a) * self.rat(b)),
            RingSpec::Modular(m) => Value::Int((self.int(a) * self.int(b)).mod_floor(m)),
            RingSpec::TruncatedSeries { base, order, .. } => {
                let (xa, xb) = (self.series_parts(a), self.series_parts(b));
                let mut out = vec![base.zero(); *order];
                for (i, x) in xa.iter().enumerate() {
                    if base.is_zero(x) {
                        continue;
                    }
                    for (j, y) in xb.iter().take(order - i).enumerate() {
                        if !base.is_zero(y) {
                            out[i + j] = base.add(&out[i + j], &base.mul(x, y));
                        }
                    }
                }
                Value::Series(out)
            }
            RingSpec::PiAdic(r) => Value::PiAdic(r.mul(self.padic_parts(a), self.padic_parts(b))),
        }
    }

    fn is_zero(&self, a: &Value) -> bool {
        match self {
            RingSpec::Integers | RingSpec::Modular(_) => self.int(a).is_zero(),
            RingSpec::Rationals => self.rat(a).is_zero(),
            RingSpec::TruncatedSeries { base, .. } => {
                self.series_parts(a).iter().all(|x| base.is_zero(x))
            }
            RingSpec::PiAdic(r) => r.is_zero(self.padic_parts(a)),
        }
    }

    fn inv(&self, a: &Value) -> Option<Value> {
        match self {
            RingSpec::Integers => {
                let n = self.int(a);
                (n.abs().is_one()).then(|| Value::Int(n.clone()))
            }
            RingSpec::Rationals => {
                let q = self.rat(a);
                (!q.is_zero()).then(|| Value::Rat(q.recip()))
            }
            RingSpec::Modular(m) => mod_inverse(self.int(a), m).map(Value::Int),
            RingSpec::TruncatedSeries { base, order, .. } => {
                let xs = self.series_parts(a);
                let c0 = base.inv(&xs[0])?;
                let mut out = vec![base.zero(); *order];
                out[0] = c0.clone();
                for k in 1..*order {
                    let mut s = base.zero();
                    for j in 1..=k {
                        s = base.add(&s, &base.mul(&xs[j], &out[k - j]));
                    }
                    out[k] = base.neg(&base.mul(&c0, &s));
                }
                Some(Value::Series(out))
            }
            RingSpec::PiAdic(r) => r.inv(self.padic_parts(a)).map(Value::PiAdic),
        }
    }

    fn is_field(&self) -> bool {
        match self {
            RingSpec::Rationals => true,
            RingSpec::Modular(m) => is_prime(m),
            _ => false,
        }
    }

    fn is_torsion_free(&self) -> bool {
        match self {
            RingSpec::Integers | RingSpec::Rationals => true,
            RingSpec::TruncatedSeries { base, .. } => base.is_torsion_free(),
            RingSpec::Modular(_) | RingSpec::PiAdic(_) => false,
        }
    }

    fn from_rational(&self, q: &BigRational) -> Option<Value> {
        match self {
            RingSpec::Rationals => Some(Value::Rat(q.clone())),
            RingSpec::TruncatedSeries { base, .. } => {
                base.from_rational(q).map(|c| self.series_constant(c))
            }
            _ => {
                let den = self.inv(&self.from_bigint(q.denom()))?;
                Some(self.mul(&self.from_bigint(q.numer()), &den))
            }
        }
    }

    fn format(&self, a: &Value) -> String {
        match self {
            RingSpec::Integers | RingSpec::Modular(_) => self.int(a).to_string(),
            RingSpec::Rationals => self.rat(a).to_string(),
            RingSpec::TruncatedSeries { base, var, .. } => {
                let mut out = String::new();
                for (k, c) in self.series_parts(a).iter().enumerate() {
                    if base.is_zero(c) {
                        continue;
                    }
                    let mut s = base.format(c);
                    let negative = s.starts_with('-') && !base.needs_parens(c);
                    if negative {
                        s.remove(0);
                    }
                    let mono = match k {
                        0 => None,
                        1 => Some(var.clone()),
                        _ => Some(format!("{var}^{k}")),
                    };
                    let term = match mono {
                        None => s,
                        Some(m) if s == "1" => m,
                        Some(m) if base.needs_parens(c) => format!("({s})*{m}"),
                        Some(m) => format!("{s}*{m}"),
                    };
                    if out.is_empty() {
                        if negative {
                            out.push('-');
                        }
                    } else {
                        out.push_str(if negative { " - " } else { " + " });
                    }
                    out.push_str(&term);
                }
                if out.is_empty() {
                    "0".into()
                } else {
                    out
                }
            }
            RingSpec::PiAdic(r) => r.format(self.padic_parts(a)),
        }
    }

    fn needs_parens(&self, a: &Value) -> bool {
        match self {
            RingSpec::TruncatedSeries { base, .. } => {
                let parts = self.series_parts(a);
                parts.iter().filter(|c| !base.is_zero(c)).count() > 1
            }
            RingSpec::PiAdic(r) => r.needs_parens(self.padic_parts(a)),
            _ => false,
        }
    }
}

/// An element tagged with its ring. This is the checked, self-describing
/// form used at API boundaries; internal code works with bare [`Value`]s.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RingElement {
    spec: RingSpec,
    value: Value,
}

impl RingElement {
    pub fn new(spec: RingSpec, value: Value) -> Result<Self> {
        let value = spec.canonicalize(value)?;
        Ok(RingElement { spec, value })
    }

    pub fn from_int(spec: &RingSpec, n: i64) -> Self {
        RingElement {
            value: spec.from_i64(n),
            spec: spec.clone(),
        }
    }

    pub fn from_rational(spec: &RingSpec, q: &BigRational) -> Result<Self> {
        let value = spec.from_rational(q).ok_or_else(|| {
            Error::DenominatorNotInvertible(q.to_string(), spec.to_string())
        })?;
        Ok(RingElement {
            spec: spec.clone(),
            value,
        })
    }

    pub fn spec(&self) -> &RingSpec {
        &self.spec
    }

    pub fn value(&self) -> &Value {
        &self.value
    }

    pub fn into_value(self) -> Value {
        self.value
    }

    fn check(&self, other: &RingElement) -> Result<()> {
        if self.spec != other.spec {
            return Err(Error::SpecMismatch(self.spec.to_string(), other.spec.to_string()));
        }
        Ok(())
    }

    pub fn ring_add(&self, other: &RingElement) -> Result<RingElement> {
        self.check(other)?;
        Ok(RingElement {
            value: self.spec.add(&self.value, &other.value),
            spec: self.spec.clone(),
        })
    }

    pub fn ring_mul(&self, other: &RingElement) -> Result<RingElement> {
        self.check(other)?;
        Ok(RingElement {
            value: self.spec.mul(&self.value, &other.value),
            spec: self.spec.clone(),
        })
    }

    pub fn ring_neg(&self) -> RingElement {
        RingElement {
            value: self.spec.neg(&self.value),
            spec: self.spec.clone(),
        }
    }

    pub fn ring_inverse(&self) -> Result<RingElement> {
        let value = self
            .spec
            .inv(&self.value)
            .ok_or_else(|| Error::NotAUnit(self.to_string(), self.spec.to_string()))?;
        Ok(RingElement {
            value,
            spec: self.spec.clone(),
        })
    }

    pub fn is_zero(&self) -> bool {
        self.spec.is_zero(&self.value)
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.spec.format(&self.value))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn series_qq(order: usize) -> RingSpec {
        RingSpec::series(RingSpec::Rationals, "lambda", order).unwrap()
    }

    fn ser(spec: &RingSpec, cs: &[i64]) -> RingElement {
        let vals = cs
            .iter()
            .map(|&c| Value::Rat(BigRational::from_integer(c.into())))
            .collect();
        RingElement::new(spec.clone(), Value::Series(vals)).unwrap()
    }

    #[test]
    fn rational_addition() {
        let a = RingElement::from_rational(&RingSpec::Rationals, &q(1, 2)).unwrap();
        let b = RingElement::from_rational(&RingSpec::Rationals, &q(1, 3)).unwrap();
        assert_eq!(a.ring_add(&b).unwrap().to_string(), "5/6");
    }

    #[test]
    fn series_product_truncates() {
        let s = series_qq(3);
        let prod = ser(&s, &[1, 1]).ring_mul(&ser(&s, &[1, -1, 1])).unwrap();
        assert_eq!(prod, RingElement::from_int(&s, 1));
    }

    #[test]
    fn modular_product() {
        let m = RingSpec::modular(7).unwrap();
        let prod = RingElement::from_int(&m, 5)
            .ring_mul(&RingElement::from_int(&m, 3))
            .unwrap();
        assert_eq!(prod.to_string(), "1");
    }

    #[test]
    fn inverses() {
        let m = RingSpec::modular(2401).unwrap();
        let inv = RingElement::from_int(&m, 3).ring_inverse().unwrap();
        assert_eq!(inv.to_string(), "1601");

        let s = series_qq(3);
        let inv = ser(&s, &[1, 1]).ring_inverse().unwrap();
        assert_eq!(inv, ser(&s, &[1, -1, 1]));
        assert_eq!(inv.to_string(), "1 - lambda + lambda^2");

        let z = RingSpec::Integers;
        assert_eq!(
            RingElement::from_int(&z, -1).ring_inverse().unwrap(),
            RingElement::from_int(&z, -1)
        );
    }

    #[test]
    fn non_units() {
        let z = RingSpec::Integers;
        let err = RingElement::from_int(&z, 2).ring_inverse().unwrap_err();
        assert_eq!(err.name(), "NotAUnit");
        let s = RingSpec::series(RingSpec::Integers, "lambda", 4).unwrap();
        let lam = RingElement::new(s.clone(), s.series_var_pow(1)).unwrap();
        assert_eq!(lam.ring_inverse().unwrap_err().name(), "NotAUnit");
    }

    #[test]
    fn spec_mismatch() {
        let a = RingElement::from_int(&RingSpec::Integers, 1);
        let b = RingElement::from_int(&RingSpec::Rationals, 1);
        assert_eq!(a.ring_add(&b).unwrap_err().name(), "SpecMismatch");
    }

    #[test]
    fn invalid_specs() {
        assert!(RingSpec::modular(1).is_err());
        assert!(RingSpec::series(RingSpec::Integers, "lambda", 0).is_err());
        let s = series_qq(2);
        assert!(RingSpec::series(s, "mu", 3).is_err());
    }

    #[test]
    fn canonical_forms() {
        let m = RingSpec::modular(5).unwrap();
        assert_eq!(m.canonicalize(Value::Int((-3).into())).unwrap(), Value::Int(2.into()));
        let s = series_qq(2);
        let long = Value::Series(vec![Value::Int(1.into()), Value::Int(2.into()), Value::Int(3.into())]);
        let c = s.canonicalize(long).unwrap();
        assert_eq!(s.series_coefficients(&c).unwrap().len(), 2);
        assert_eq!(s.canonicalize(c.clone()).unwrap(), c);
    }
}
