//! Sparse multivariate polynomials over a [`Ring`].
//!
//! Terms are kept in a `BTreeMap` keyed by exponent vectors ordered by
//! degree-reverse-lexicographic order with `x1 > x2 > … > xn`, so the last
//! entry of the map is always the leading term. Zero coefficients are never
//! stored.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::ring::{Ring, RingHom, RingSpec};

/// Exponent vector, ordered by degrevlex.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn from_exponents(e: Vec<u32>) -> Self {
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self`, if `self` divides `other`.
    pub fn quotient(&self, other: &Monomial) -> Option<Monomial> {
        self.divides(other)
            .then(|| Monomial(other.0.iter().zip(&self.0).map(|(b, a)| b - a).collect()))
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| *a == 0 || *b == 0)
    }

    /// Decrements the exponent of variable `i`; `None` if it is zero.
    pub fn lower(&self, i: usize) -> Option<Monomial> {
        if self.0[i] == 0 {
            return None;
        }
        let mut e = self.0.clone();
        e[i] -= 1;
        Some(Monomial(e))
    }

    pub fn raise(&self, i: usize) -> Monomial {
        let mut e = self.0.clone();
        e[i] += 1;
        Monomial(e)
    }

    /// Index of the only variable with a nonzero exponent, for pure powers.
    pub fn pure_power_var(&self) -> Option<usize> {
        let mut nz = self.0.iter().enumerate().filter(|(_, &e)| e > 0);
        match (nz.next(), nz.next()) {
            (Some((i, _)), None) => Some(i),
            _ => None,
        }
    }

    pub fn format(&self, names: &[String]) -> String {
        let parts: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| {
                if e == 1 {
                    names[i].clone()
                } else {
                    format!("{}^{}", names[i], e)
                }
            })
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            o => return o,
        }
        for (a, b) in self.0.iter().zip(&other.0).rev() {
            match a.cmp(b) {
                Ordering::Equal => continue,
                // smaller exponent in the last differing variable is larger
                o => return o.reverse(),
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Default variable names `x1, …, xn`.
pub fn default_names(nvars: usize) -> Vec<String> {
    (1..=nvars).map(|i| format!("x{i}")).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly<R: Ring> {
    ring: R,
    nvars: usize,
    terms: BTreeMap<Monomial, R::Elem>,
}

impl<R: Ring> Poly<R> {
    pub fn zero(ring: &R, nvars: usize) -> Self {
        Poly {
            ring: ring.clone(),
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ring: &R, nvars: usize, c: R::Elem) -> Self {
        Self::term(ring, Monomial::one(nvars), c)
    }

    pub fn one(ring: &R, nvars: usize) -> Self {
        Self::constant(ring, nvars, ring.one())
    }

    pub fn from_i64(ring: &R, nvars: usize, c: i64) -> Self {
        Self::constant(ring, nvars, ring.from_i64(c))
    }

    pub fn var(ring: &R, nvars: usize, i: usize) -> Self {
        Self::term(ring, Monomial::var(nvars, i), ring.one())
    }

    pub fn term(ring: &R, m: Monomial, c: R::Elem) -> Self {
        let nvars = m.nvars();
        let mut p = Self::zero(ring, nvars);
        if !ring.is_zero(&c) {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, R::Elem)>>(ring: &R, nvars: usize, it: I) -> Self {
        let mut p = Self::zero(ring, nvars);
        for (m, c) in it {
            assert_eq!(m.nvars(), nvars, "exponent vector length");
            p.add_term(m, &c);
        }
        p
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending degrevlex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &R::Elem)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> BTreeMap<Monomial, R::Elem> {
        self.terms
    }

    pub fn coeff(&self, m: &Monomial) -> R::Elem {
        self.terms.get(m).cloned().unwrap_or_else(|| self.ring.zero())
    }

    /// Total degree; `None` stands for the degree of the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &R::Elem)> {
        self.terms.iter().next_back()
    }

    pub fn leading_monomial(&self) -> Option<&Monomial> {
        self.terms.keys().next_back()
    }

    pub fn constant_term(&self) -> R::Elem {
        self.coeff(&Monomial::one(self.nvars))
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn add_term(&mut self, m: Monomial, c: &R::Elem) {
        if self.ring.is_zero(c) {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                let s = self.ring.add(v, c);
                if self.ring.is_zero(&s) {
                    self.terms.remove(&m);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(m, c.clone());
            }
        }
    }

    /// `self += c · m · other`, in place.
    pub fn add_scaled(&mut self, c: &R::Elem, m: &Monomial, other: &Self) {
        self.check(other);
        for (om, oc) in &other.terms {
            let v = self.ring.mul(c, oc);
            self.add_term(m.mul(om), &v);
        }
    }

    fn check(&self, other: &Self) {
        assert_eq!(self.nvars, other.nvars, "polynomials in different numbers of variables");
        debug_assert_eq!(self.ring, other.ring);
    }

    /// Checked variant of `add` for API boundaries.
    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        Ok(self.add(other))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        Ok(self.mul(other))
    }

    pub fn compatible(&self, other: &Self) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::SpecMismatch(self.ring.to_string(), other.ring.to_string()));
        }
        if self.nvars != other.nvars {
            return Err(Error::DimensionMismatch(format!(
                "{} vs {} variables",
                self.nvars, other.nvars
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check(other);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Poly {
            ring: self.ring.clone(),
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), self.ring.neg(c)))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check(other);
        let mut out = Self::zero(&self.ring, self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), &self.ring.mul(ca, cb));
            }
        }
        out
    }

    pub fn scale(&self, c: &R::Elem) -> Self {
        Self::from_terms(
            &self.ring,
            self.nvars,
            self.terms.iter().map(|(m, a)| (m.clone(), self.ring.mul(a, c))),
        )
    }

    pub fn mul_term(&self, m: &Monomial, c: &R::Elem) -> Self {
        Self::from_terms(
            &self.ring,
            self.nvars,
            self.terms
                .iter()
                .map(|(k, a)| (k.mul(m), self.ring.mul(a, c))),
        )
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(&self.ring, self.nvars);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Partial derivative with respect to variable `i`.
    pub fn derivative(&self, i: usize) -> Self {
        let mut out = Self::zero(&self.ring, self.nvars);
        for (m, c) in &self.terms {
            if let Some(lower) = m.lower(i) {
                let e = m.exponents()[i];
                out.add_term(lower, &self.ring.mul(c, &self.ring.from_i64(e as i64)));
            }
        }
        out
    }

    pub fn map_coeffs<S: Ring, F>(&self, target: &S, f: F) -> Poly<S>
    where
        F: Fn(&R::Elem) -> S::Elem,
    {
        Poly::from_terms(
            target,
            self.nvars,
            self.terms.iter().map(|(m, c)| (m.clone(), f(c))),
        )
    }

    pub fn try_map_coeffs<S: Ring, F>(&self, target: &S, f: F) -> Result<Poly<S>>
    where
        F: Fn(&R::Elem) -> Result<S::Elem>,
    {
        let mut out = Poly::zero(target, self.nvars);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), &f(c)?);
        }
        Ok(out)
    }

    /// Reindexes variables: variable `i` becomes variable `map[i]` in a ring
    /// with `nvars` variables.
    pub fn embed(&self, nvars: usize, map: &[usize]) -> Self {
        assert_eq!(map.len(), self.nvars);
        Self::from_terms(
            &self.ring,
            nvars,
            self.terms.iter().map(|(m, c)| {
                let mut e = vec![0; nvars];
                for (i, &x) in m.exponents().iter().enumerate() {
                    e[map[i]] += x;
                }
                (Monomial(e), c.clone())
            }),
        )
    }

    /// Substitutes `images[i]` for variable `i`. All images share a ring and
    /// a variable count, which becomes the variable count of the result.
    pub fn compose(&self, images: &[Poly<R>]) -> Self {
        assert_eq!(images.len(), self.nvars, "one image per variable");
        let target_vars = images
            .first()
            .map(|p| p.nvars)
            .unwrap_or(0);
        let mut out = Poly::zero(&self.ring, target_vars);
        let mut powers: Vec<Vec<Poly<R>>> = images
            .iter()
            .map(|p| vec![Poly::one(&self.ring, target_vars), p.clone()])
            .collect();
        for (m, c) in &self.terms {
            let mut t = Poly::constant(&self.ring, target_vars, c.clone());
            for (i, &e) in m.exponents().iter().enumerate() {
                let e = e as usize;
                while powers[i].len() <= e {
                    let next = powers[i].last().unwrap().mul(&images[i]);
                    powers[i].push(next);
                }
                if e > 0 {
                    t = t.mul(&powers[i][e]);
                }
            }
            out = out.add(&t);
        }
        out
    }

    /// Evaluates at a point of the coefficient ring.
    pub fn eval(&self, point: &[R::Elem]) -> R::Elem {
        assert_eq!(point.len(), self.nvars);
        let mut acc = self.ring.zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(m.exponents()) {
                if e > 0 {
                    t = self.ring.mul(&t, &self.ring.pow(x, e as u64));
                }
            }
            acc = self.ring.add(&acc, &t);
        }
        acc
    }

    pub fn format_with(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        // descending order: leading term first
        for (m, c) in self.terms.iter().rev() {
            let mut coeff = self.ring.format(c);
            let parens = self.ring.needs_parens(c);
            let negative = !parens && coeff.starts_with('-');
            if negative {
                coeff.remove(0);
            }
            let term = if m.is_one() {
                if parens {
                    format!("({coeff})")
                } else {
                    coeff
                }
            } else if coeff == "1" {
                m.format(names)
            } else if parens {
                format!("({coeff})*{}", m.format(names))
            } else {
                format!("{coeff}*{}", m.format(names))
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
        out
    }
}

impl Poly<RingSpec> {
    /// Applies a ring homomorphism coefficientwise.
    pub fn base_change(&self, h: &RingHom) -> Result<Poly<RingSpec>> {
        if self.ring != *h.domain() {
            return Err(Error::SpecMismatch(self.ring.to_string(), h.domain().to_string()));
        }
        self.try_map_coeffs(h.codomain(), |c| h.apply_value(c))
    }

    pub fn from_int_terms(ring: &RingSpec, nvars: usize, terms: &[(i64, &[u32])]) -> Self {
        Poly::from_terms(
            ring,
            nvars,
            terms
                .iter()
                .map(|(c, e)| (Monomial(e.to_vec()), ring.from_bigint(&BigInt::from(*c)))),
        )
    }
}

impl<R: Ring> fmt::Display for Poly<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format_with(&default_names(self.nvars)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zz() -> RingSpec {
        RingSpec::Integers
    }

    #[test]
    fn degrevlex_order() {
        let m = |e: &[u32]| Monomial::from_exponents(e.to_vec());
        // x1 > x2 > x3
        assert!(m(&[1, 0, 0]) > m(&[0, 1, 0]));
        assert!(m(&[0, 1, 0]) > m(&[0, 0, 1]));
        // degree first
        assert!(m(&[0, 0, 2]) > m(&[1, 0, 0]));
        // x1 x3 < x2^2 in degrevlex
        assert!(m(&[1, 0, 1]) < m(&[0, 2, 0]));
        assert!(m(&[2, 0, 0]) > m(&[1, 1, 0]));
    }

    #[test]
    fn arithmetic_and_display() {
        let r = zz();
        let x = Poly::var(&r, 2, 0);
        let y = Poly::var(&r, 2, 1);
        let p = x.add(&y).pow(2);
        assert_eq!(p.to_string(), "x1^2 + 2*x1*x2 + x2^2");
        assert_eq!(p.sub(&p), Poly::zero(&r, 2));
        assert_eq!(p.degree(), Some(2));
        assert_eq!(Poly::<RingSpec>::zero(&r, 2).degree(), None);
        let q = x.sub(&y.scale(&r.from_i64(3)));
        assert_eq!(q.to_string(), "x1 - 3*x2");
    }

    #[test]
    fn derivative_and_compose() {
        let r = zz();
        let x = Poly::var(&r, 2, 0);
        let y = Poly::var(&r, 2, 1);
        let p = x.pow(3).mul(&y).add(&y.pow(2).mul(&x));
        assert_eq!(p.derivative(0).to_string(), "3*x1^2*x2 + x2^2");
        // compose with (u + v, u v)
        let u = Poly::var(&r, 2, 0);
        let v = Poly::var(&r, 2, 1);
        let c = x.mul(&y).compose(&[u.add(&v), u.mul(&v)]);
        assert_eq!(c.to_string(), "x1^2*x2 + x1*x2^2");
    }

    #[test]
    fn eval_point() {
        let r = zz();
        let x = Poly::var(&r, 2, 0);
        let y = Poly::var(&r, 2, 1);
        let p = x.pow(2).add(&y.scale(&r.from_i64(-3)));
        assert_eq!(p.eval(&[r.from_i64(4), r.from_i64(2)]), r.from_i64(10));
    }
}
