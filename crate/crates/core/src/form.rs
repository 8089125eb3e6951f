//! Polynomial differential forms, the exterior calculus on them, and the
//! twisted differential `d_f = d + df∧`.
//!
//! A form is a map from basis wedges `dx_S` (S a strictly increasing index
//! set) to polynomial coefficients. `dx_S` always means
//! `dx_{s1}∧…∧dx_{sk}` with `s1 < … < sk`; products are brought to this
//! order with the sign of the sorting permutation.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::poly::{default_names, Poly};
use crate::ring::{Ring, RingHom, RingSpec};

/// A strictly increasing set of variable indices, stored as a bitmask.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct IndexSet(u32);

impl IndexSet {
    pub const EMPTY: IndexSet = IndexSet(0);

    pub fn from_indices(idx: &[usize]) -> Self {
        let mut bits = 0u32;
        for &i in idx {
            assert!(i < 32, "at most 32 variables");
            bits |= 1 << i;
        }
        IndexSet(bits)
    }

    pub fn single(i: usize) -> Self {
        IndexSet(1 << i)
    }

    /// `{0, …, n-1}`, the index set of the top form.
    pub fn full(n: usize) -> Self {
        IndexSet(if n == 32 { u32::MAX } else { (1u32 << n) - 1 })
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 & (1 << i) != 0
    }

    pub fn indices(self) -> Vec<usize> {
        (0..32).filter(|&i| self.contains(i)).collect()
    }

    pub fn without(self, i: usize) -> Self {
        IndexSet(self.0 & !(1 << i))
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    /// `dx_S ∧ dx_T = sign · dx_{S∪T}`, or `None` when `S ∩ T ≠ ∅`.
    pub fn wedge(self, other: IndexSet) -> Option<(IndexSet, bool)> {
        if self.0 & other.0 != 0 {
            return None;
        }
        let mut inversions = 0u32;
        for t in other.indices() {
            // elements of S greater than t must move past dx_t
            inversions += (self.0 >> (t + 1)).count_ones();
        }
        Some((IndexSet(self.0 | other.0), inversions % 2 == 1))
    }

    /// All index sets of size `k` in `{0, …, n-1}`, in ascending order.
    pub fn subsets(n: usize, k: usize) -> Vec<IndexSet> {
        let mut out: Vec<IndexSet> = (0u32..(1u32 << n))
            .filter(|b| b.count_ones() as usize == k)
            .map(IndexSet)
            .collect();
        out.sort();
        out
    }

    pub fn format(self, names: &[String]) -> String {
        self.indices()
            .iter()
            .map(|&i| format!("d{}", names[i]))
            .collect::<Vec<_>>()
            .join("^")
    }
}

impl Ord for IndexSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.indices().cmp(&other.indices()))
    }
}

impl PartialOrd for IndexSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Form<R: Ring> {
    ring: R,
    nvars: usize,
    comps: BTreeMap<IndexSet, Poly<R>>,
}

impl<R: Ring> Form<R> {
    pub fn zero(ring: &R, nvars: usize) -> Self {
        Form {
            ring: ring.clone(),
            nvars,
            comps: BTreeMap::new(),
        }
    }

    /// `coeff · dx_S`.
    pub fn monomial(coeff: Poly<R>, s: IndexSet) -> Self {
        let mut f = Self::zero(coeff.ring(), coeff.nvars());
        f.add_component(s, &coeff);
        f
    }

    pub fn function(g: Poly<R>) -> Self {
        Self::monomial(g, IndexSet::EMPTY)
    }

    /// `g dx_1 ∧ … ∧ dx_n`.
    pub fn top(g: Poly<R>) -> Self {
        let n = g.nvars();
        Self::monomial(g, IndexSet::full(n))
    }

    /// `dx_i`.
    pub fn dx(ring: &R, nvars: usize, i: usize) -> Self {
        Self::monomial(Poly::one(ring, nvars), IndexSet::single(i))
    }

    /// The 1-form `Σ c_i dx_i`.
    pub fn one_form(ring: &R, nvars: usize, comps: &[Poly<R>]) -> Self {
        let mut f = Self::zero(ring, nvars);
        for (i, c) in comps.iter().enumerate() {
            f.add_component(IndexSet::single(i), c);
        }
        f
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn components(&self) -> impl Iterator<Item = (&IndexSet, &Poly<R>)> {
        self.comps.iter()
    }

    pub fn component(&self, s: IndexSet) -> Poly<R> {
        self.comps
            .get(&s)
            .cloned()
            .unwrap_or_else(|| Poly::zero(&self.ring, self.nvars))
    }

    /// The coefficient of `dx_1 ∧ … ∧ dx_n`.
    pub fn top_coefficient(&self) -> Poly<R> {
        self.component(IndexSet::full(self.nvars))
    }

    /// Degrees present among the nonzero components.
    pub fn degrees(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.comps.keys().map(|s| s.len()).collect();
        d.dedup();
        d
    }

    /// Degree of a homogeneous nonzero form.
    pub fn degree(&self) -> Option<usize> {
        match self.degrees().as_slice() {
            [d] => Some(*d),
            _ => None,
        }
    }

    /// Degree-`k` part.
    pub fn part(&self, k: usize) -> Self {
        Form {
            ring: self.ring.clone(),
            nvars: self.nvars,
            comps: self
                .comps
                .iter()
                .filter(|(s, _)| s.len() == k)
                .map(|(s, p)| (*s, p.clone()))
                .collect(),
        }
    }

    pub fn add_component(&mut self, s: IndexSet, p: &Poly<R>) {
        if p.is_zero() {
            return;
        }
        let sum = match self.comps.get(&s) {
            Some(q) => q.add(p),
            None => p.clone(),
        };
        if sum.is_zero() {
            self.comps.remove(&s);
        } else {
            self.comps.insert(s, sum);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (s, p) in &other.comps {
            out.add_component(*s, p);
        }
        out
    }

    pub fn neg(&self) -> Self {
        Form {
            ring: self.ring.clone(),
            nvars: self.nvars,
            comps: self.comps.iter().map(|(s, p)| (*s, p.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul_poly(&self, g: &Poly<R>) -> Self {
        let mut out = Self::zero(&self.ring, self.nvars);
        for (s, p) in &self.comps {
            out.add_component(*s, &p.mul(g));
        }
        out
    }

    pub fn scale(&self, c: &R::Elem) -> Self {
        let mut out = Self::zero(&self.ring, self.nvars);
        for (s, p) in &self.comps {
            out.add_component(*s, &p.scale(c));
        }
        out
    }

    pub fn map_polys<S: Ring, F>(&self, ring: &S, nvars: usize, f: F) -> Form<S>
    where
        F: Fn(&Poly<R>) -> Poly<S>,
    {
        let mut out = Form::zero(ring, nvars);
        for (s, p) in &self.comps {
            out.add_component(*s, &f(p));
        }
        out
    }

    /// `self ∧ other`.
    pub fn wedge(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut out = Self::zero(&self.ring, self.nvars);
        for (s, p) in &self.comps {
            for (t, q) in &other.comps {
                if let Some((u, negative)) = s.wedge(*t) {
                    let c = p.mul(q);
                    out.add_component(u, &if negative { c.neg() } else { c });
                }
            }
        }
        out
    }

    /// Checked wedge for API boundaries.
    pub fn try_wedge(&self, other: &Self) -> Result<Self> {
        if self.ring != other.ring {
            return Err(Error::SpecMismatch(self.ring.to_string(), other.ring.to_string()));
        }
        if self.nvars != other.nvars {
            return Err(Error::DimensionMismatch(format!(
                "forms in {} and {} variables",
                self.nvars, other.nvars
            )));
        }
        Ok(self.wedge(other))
    }

    /// De Rham differential.
    pub fn d(&self) -> Self {
        let mut out = Self::zero(&self.ring, self.nvars);
        for (s, p) in &self.comps {
            for i in 0..self.nvars {
                if s.contains(i) {
                    continue;
                }
                let di = p.derivative(i);
                if di.is_zero() {
                    continue;
                }
                let (u, negative) = IndexSet::single(i).wedge(*s).unwrap();
                out.add_component(u, &if negative { di.neg() } else { di });
            }
        }
        out
    }

    /// Interior product with the vector field `Σ η_i ∂_i`.
    pub fn contract(&self, eta: &[Poly<R>]) -> Self {
        assert_eq!(eta.len(), self.nvars);
        let mut out = Self::zero(&self.ring, self.nvars);
        for (s, p) in &self.comps {
            for (pos, i) in s.indices().into_iter().enumerate() {
                let c = eta[i].mul(p);
                out.add_component(s.without(i), &if pos % 2 == 1 { c.neg() } else { c });
            }
        }
        out
    }

    /// Lie derivative along `Σ η_i ∂_i`, from the coordinate formula
    /// `L_η(g dx_S) = η(g) dx_S + g Σ_j dx_{s1}∧…∧dη_{sj}∧…∧dx_{sk}`.
    pub fn lie_derivative(&self, eta: &[Poly<R>]) -> Self {
        assert_eq!(eta.len(), self.nvars);
        let n = self.nvars;
        let d_eta: Vec<Form<R>> = eta.iter().map(|e| Form::function(e.clone()).d()).collect();
        let mut out = Self::zero(&self.ring, n);
        for (s, p) in &self.comps {
            let mut eta_g = Poly::zero(&self.ring, n);
            for (i, e) in eta.iter().enumerate() {
                eta_g = eta_g.add(&e.mul(&p.derivative(i)));
            }
            out.add_component(*s, &eta_g);
            let idx = s.indices();
            for j in 0..idx.len() {
                let mut w = Form::function(p.clone());
                for (k, &i) in idx.iter().enumerate() {
                    let factor = if k == j {
                        d_eta[i].clone()
                    } else {
                        Form::dx(&self.ring, n, i)
                    };
                    w = w.wedge(&factor);
                }
                out = out.add(&w);
            }
        }
        out
    }

    /// Pullback along `φ: K^m → K^n` given by `n` polynomials in `m`
    /// variables.
    pub fn pullback(&self, phi: &[Poly<R>]) -> Result<Self> {
        if phi.len() != self.nvars {
            return Err(Error::DimensionMismatch(format!(
                "map has {} components, form lives in {} variables",
                phi.len(),
                self.nvars
            )));
        }
        let m = phi.first().map(Poly::nvars).unwrap_or(0);
        for c in phi {
            if *c.ring() != self.ring {
                return Err(Error::SpecMismatch(c.ring().to_string(), self.ring.to_string()));
            }
            if c.nvars() != m {
                return Err(Error::DimensionMismatch("map components in different variables".into()));
            }
        }
        let dphi: Vec<Form<R>> = phi.iter().map(|c| Form::function(c.clone()).d()).collect();
        let mut out = Self::zero(&self.ring, m);
        for (s, p) in &self.comps {
            let mut w = Form::function(p.compose(phi));
            for i in s.indices() {
                w = w.wedge(&dphi[i]);
            }
            out = out.add(&w);
        }
        Ok(out)
    }

    pub fn format_with(&self, names: &[String]) -> String {
        if self.comps.is_empty() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (s, p) in &self.comps {
            let coeff = p.format_with(names);
            if s.is_empty() {
                parts.push(coeff);
            } else if coeff == "1" {
                parts.push(s.format(names));
            } else if coeff == "-1" {
                parts.push(format!("-{}", s.format(names)));
            } else if p.len() > 1 {
                parts.push(format!("({coeff})*{}", s.format(names)));
            } else {
                parts.push(format!("{coeff}*{}", s.format(names)));
            }
        }
        let mut out = parts[0].clone();
        for t in &parts[1..] {
            if let Some(rest) = t.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(rest);
            } else {
                out.push_str(" + ");
                out.push_str(t);
            }
        }
        out
    }
}

impl Form<RingSpec> {
    /// Applies a ring homomorphism coefficientwise.
    pub fn base_change(&self, h: &RingHom) -> Result<Form<RingSpec>> {
        let mut out = Form::zero(h.codomain(), self.nvars);
        for (s, p) in &self.comps {
            out.add_component(*s, &p.base_change(h)?);
        }
        Ok(out)
    }
}

impl<R: Ring> fmt::Display for Form<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format_with(&default_names(self.nvars)))
    }
}

/// The complex of polynomial forms with differential `d + df∧`.
///
/// Only the closed 1-form `df` enters, so the complex may be built from `f`
/// or directly from a closed 1-form whose primitive need not have
/// coefficients in the ring.
#[derive(Clone, Debug, PartialEq)]
pub struct TwistedComplex<R: Ring> {
    ring: R,
    nvars: usize,
    potential: Option<Poly<R>>,
    df: Vec<Poly<R>>,
}

impl<R: Ring> TwistedComplex<R> {
    pub fn new(f: &Poly<R>) -> Self {
        let df = (0..f.nvars()).map(|i| f.derivative(i)).collect();
        TwistedComplex {
            ring: f.ring().clone(),
            nvars: f.nvars(),
            potential: Some(f.clone()),
            df,
        }
    }

    /// Builds the complex from the components of a closed 1-form.
    pub fn from_closed_form(df: Vec<Poly<R>>) -> Result<Self> {
        let n = df.len();
        let ring = df
            .first()
            .map(|p| p.ring().clone())
            .ok_or_else(|| Error::InvalidArgument("empty one-form".into()))?;
        for a in 0..n {
            if df[a].nvars() != n {
                return Err(Error::DimensionMismatch(format!(
                    "component {} has {} variables, expected {n}",
                    a + 1,
                    df[a].nvars()
                )));
            }
            for b in (a + 1)..n {
                if df[a].derivative(b) != df[b].derivative(a) {
                    return Err(Error::NotClosed);
                }
            }
        }
        Ok(TwistedComplex {
            ring,
            nvars: n,
            potential: None,
            df,
        })
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn potential(&self) -> Option<&Poly<R>> {
        self.potential.as_ref()
    }

    pub fn gradient(&self) -> &[Poly<R>] {
        &self.df
    }

    pub fn df(&self) -> Form<R> {
        Form::one_form(&self.ring, self.nvars, &self.df)
    }

    /// `d_f ω = dω + df ∧ ω`.
    pub fn d(&self, omega: &Form<R>) -> Form<R> {
        omega.d().add(&self.df().wedge(omega))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn zz() -> RingSpec {
        RingSpec::Integers
    }

    fn xs(r: &RingSpec, n: usize) -> Vec<Poly<RingSpec>> {
        (0..n).map(|i| Poly::var(r, n, i)).collect()
    }

    #[test]
    fn differential_of_product() {
        let r = zz();
        let v = xs(&r, 2);
        let w = Form::function(v[0].mul(&v[1])).d();
        assert_eq!(w.to_string(), "x2*dx1 + x1*dx2");
    }

    #[test]
    fn differential_sign() {
        let r = zz();
        let v = xs(&r, 2);
        let w = Form::monomial(v[1].clone(), IndexSet::single(0)).d();
        assert_eq!(w.component(IndexSet::full(2)), Poly::from_i64(&r, 2, -1));
    }

    #[test]
    fn d_squared_vanishes() {
        let r = zz();
        let v = xs(&r, 2);
        let g = v[0].pow(3).mul(&v[1]).add(&v[1].pow(2).mul(&v[0]));
        assert!(Form::function(g).d().d().is_zero());
    }

    #[test]
    fn wedge_of_differentials() {
        let r = zz();
        let dx = Form::dx(&r, 2, 0);
        let dy = Form::dx(&r, 2, 1);
        assert_eq!(dx.wedge(&dy).component(IndexSet::full(2)), Poly::one(&r, 2));
        assert_eq!(dy.wedge(&dx).component(IndexSet::full(2)), Poly::from_i64(&r, 2, -1));
        assert!(dx.wedge(&dx).is_zero());
    }

    #[test]
    fn twisted_differential_examples() {
        let q = RingSpec::Rationals;
        let x = Poly::var(&q, 1, 0);
        let half = q.from_rational(&BigRational::new(1.into(), 2.into())).unwrap();
        let c = TwistedComplex::new(&x.pow(2).scale(&half));
        let out = c.d(&Form::function(Poly::one(&q, 1)));
        assert_eq!(out, Form::monomial(x.clone(), IndexSet::single(0)));

        let third = q.from_rational(&BigRational::new(1.into(), 3.into())).unwrap();
        let c = TwistedComplex::new(&x.pow(3).scale(&third));
        let out = c.d(&Form::function(Poly::one(&q, 1)));
        assert_eq!(out, Form::monomial(x.pow(2), IndexSet::single(0)));

        let v = xs(&q, 3);
        let f = v[0].pow(3).add(&v[1].mul(&v[2]));
        let c = TwistedComplex::new(&f);
        assert!(c.d(&Form::top(Poly::one(&q, 3))).is_zero());
    }

    #[test]
    fn closedness_is_checked() {
        let r = zz();
        let v = xs(&r, 2);
        // y dx is not closed
        let err = TwistedComplex::from_closed_form(vec![v[1].clone(), Poly::zero(&r, 2)]).unwrap_err();
        assert_eq!(err, Error::NotClosed);
        // y dx + x dy = d(xy)
        assert!(TwistedComplex::from_closed_form(vec![v[1].clone(), v[0].clone()]).is_ok());
    }

    #[test]
    fn pullback_examples() {
        let r = zz();
        let u = Poly::var(&r, 1, 0);
        let out = Form::dx(&r, 1, 0).pullback(&[u.pow(2)]).unwrap();
        assert_eq!(out, Form::monomial(u.scale(&r.from_i64(2)), IndexSet::single(0)));

        let v = xs(&r, 2);
        let w = Form::monomial(v[0].clone(), IndexSet::single(1));
        assert_eq!(w.pullback(&v).unwrap(), w);
    }

    #[test]
    fn pullback_is_a_chain_map() {
        // φ(u, v) = (u + v, u v), ω = x1 dx2, f = x1
        let r = zz();
        let v = xs(&r, 2);
        let phi = vec![v[0].add(&v[1]), v[0].mul(&v[1])];
        let omega = Form::monomial(v[0].clone(), IndexSet::single(1));
        let f = v[0].clone();
        let f_phi = f.compose(&phi);
        let lhs = TwistedComplex::new(&f).d(&omega).pullback(&phi).unwrap();
        let rhs = TwistedComplex::new(&f_phi).d(&omega.pullback(&phi).unwrap());
        assert_eq!(lhs, rhs);
        // both sides expanded by hand: d_f(x1 dx2) = (1 + x1) dx1∧dx2, pulled
        // back: (1 + u + v)(u - v) du∧dv
        let expected = v[0].add(&v[1]).add(&Poly::one(&r, 2)).mul(&v[0].sub(&v[1]));
        assert_eq!(lhs.top_coefficient(), expected);
    }

    #[test]
    fn base_change_to_residues() {
        let z = zz();
        let h = RingHom::new(z.clone(), RingSpec::modular(5).unwrap()).unwrap();
        let x = Poly::var(&z, 1, 0);
        let w = Form::monomial(x.scale(&z.from_i64(7)).add(&Poly::from_i64(&z, 1, 3)), IndexSet::single(0));
        let img = w.base_change(&h).unwrap();
        assert_eq!(img.to_string(), "(2*x1 + 3)*dx1");
    }

    #[test]
    fn contraction_and_cartan() {
        let r = zz();
        let v = xs(&r, 2);
        let eta = vec![v[1].clone(), v[0].pow(2)];
        let omega = Form::monomial(v[0].mul(&v[1]), IndexSet::single(0))
            .add(&Form::function(v[1].pow(3)));
        // L = d ι + ι d
        let cartan = omega.contract(&eta).d().add(&omega.d().contract(&eta));
        assert_eq!(omega.lie_derivative(&eta), cartan);
    }
}
