use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;

use super::{mod_inverse, Ring, RingElement, RingSpec, Value};
use crate::error::{Error, Result};

/// A supported ring homomorphism between two [`RingSpec`]s.
///
/// Supported maps: `ZZ → QQ`, `ZZ → Zmod:m`, `QQ → Zmod:m`,
/// `Zmod:m → Zmod:d` for `d | m`, `ZZ/QQ → padic` (denominators prime to
/// `p`), the identity, and coefficientwise base change of any of these inside
/// truncated series of the same order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingHom {
    domain: RingSpec,
    codomain: RingSpec,
}

impl RingHom {
    pub fn new(domain: RingSpec, codomain: RingSpec) -> Result<Self> {
        if !Self::supported(&domain, &codomain) {
            return Err(Error::UnsupportedHomomorphism(domain.to_string(), codomain.to_string()));
        }
        Ok(RingHom { domain, codomain })
    }

    fn supported(from: &RingSpec, to: &RingSpec) -> bool {
        use RingSpec::*;
        match (from, to) {
            _ if from == to => true,
            (Integers, Rationals) | (Integers, Modular(_)) | (Rationals, Modular(_)) => true,
            (Modular(m), Modular(d)) => m.is_multiple_of(d),
            (Integers, PiAdic(_)) | (Rationals, PiAdic(_)) => true,
            (
                TruncatedSeries { base: b1, order: n1, .. },
                TruncatedSeries { base: b2, order: n2, .. },
            ) => n1 == n2 && Self::supported(b1, b2),
            _ => false,
        }
    }

    pub fn domain(&self) -> &RingSpec {
        &self.domain
    }

    pub fn codomain(&self) -> &RingSpec {
        &self.codomain
    }

    /// Image of a bare value of the domain.
    pub fn apply_value(&self, v: &Value) -> Result<Value> {
        Self::map(&self.domain, &self.codomain, v)
    }

    fn map(from: &RingSpec, to: &RingSpec, v: &Value) -> Result<Value> {
        use RingSpec::*;
        if from == to {
            return Ok(v.clone());
        }
        let not_invertible = |q: &BigRational| {
            Error::DenominatorNotInvertible(q.to_string(), to.to_string())
        };
        match (from, to, v) {
            (Integers, Rationals, Value::Int(n)) => Ok(Value::Rat(BigRational::from_integer(n.clone()))),
            (Integers, Modular(m), Value::Int(n)) | (Modular(_), Modular(m), Value::Int(n)) => {
                Ok(Value::Int(n.mod_floor(m)))
            }
            (Rationals, Modular(m), Value::Rat(q)) => {
                let inv = mod_inverse(q.denom(), m).ok_or_else(|| not_invertible(q))?;
                Ok(Value::Int((q.numer() * inv).mod_floor(m)))
            }
            (Integers, PiAdic(r), Value::Int(n)) => Ok(Value::PiAdic(r.from_bigint(n))),
            (Rationals, PiAdic(r), Value::Rat(q)) => {
                r.rational(q).map(Value::PiAdic).ok_or_else(|| not_invertible(q))
            }
            (
                TruncatedSeries { base: b1, .. },
                TruncatedSeries { base: b2, .. },
                Value::Series(cs),
            ) => Ok(Value::Series(
                cs.iter()
                    .map(|c| Self::map(b1, b2, c))
                    .collect::<Result<Vec<_>>>()?,
            )),
            _ => Err(Error::UnsupportedHomomorphism(from.to_string(), to.to_string())),
        }
    }

    /// `ring_hom_apply`: image of a tagged element.
    pub fn apply(&self, a: &RingElement) -> Result<RingElement> {
        if *a.spec() != self.domain {
            return Err(Error::SpecMismatch(a.spec().to_string(), self.domain.to_string()));
        }
        RingElement::new(self.codomain.clone(), self.apply_value(a.value())?)
    }

    /// Image of an integer (always defined).
    pub fn apply_int(&self, n: &BigInt) -> Value {
        self.codomain.from_bigint(n)
    }
}
