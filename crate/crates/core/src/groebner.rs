//! Buchberger's algorithm in degrevlex with cofactor tracking.
//!
//! Every basis element remembers how it is written in terms of the input
//! generators, so division by the basis yields quotients with respect to the
//! original generators. Milnor reduction needs exactly that: `g = r + Σ q_a ∂_a f`.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::poly::{Monomial, Poly};
use crate::ring::Ring;

#[derive(Clone, Debug)]
pub struct GroebnerBasis<R: Ring> {
    ring: R,
    nvars: usize,
    generators: Vec<Poly<R>>,
    basis: Vec<Poly<R>>,
    /// `basis[i] = Σ_j cofactors[i][j] · generators[j]`
    cofactors: Vec<Vec<Poly<R>>>,
}

/// Result of dividing by a Gröbner basis: `g = remainder + Σ_j quotients[j] · generators[j]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Division<R: Ring> {
    pub remainder: Poly<R>,
    pub quotients: Vec<Poly<R>>,
}

struct Tracked<R: Ring> {
    poly: Poly<R>,
    cof: Vec<Poly<R>>,
}

impl<R: Ring> Tracked<R> {
    fn add_scaled(&mut self, c: &R::Elem, m: &Monomial, other: &Tracked<R>) {
        self.poly.add_scaled(c, m, &other.poly);
        for (a, b) in self.cof.iter_mut().zip(&other.cof) {
            a.add_scaled(c, m, b);
        }
    }

    fn scale(&mut self, c: &R::Elem) {
        self.poly = self.poly.scale(c);
        for a in self.cof.iter_mut() {
            *a = a.scale(c);
        }
    }

    fn make_monic(&mut self) {
        let lc = self.poly.leading_term().map(|(_, c)| c.clone());
        if let Some(lc) = lc {
            let inv = self.poly.ring().inv(&lc).expect("field coefficients");
            self.scale(&inv);
        }
    }
}

impl<R: Ring> GroebnerBasis<R> {
    /// Computes the reduced Gröbner basis of the ideal generated by
    /// `generators`. The coefficient ring must be a field.
    pub fn new(generators: Vec<Poly<R>>) -> Result<Self> {
        let first = generators
            .first()
            .ok_or_else(|| Error::InvalidArgument("no generators".into()))?;
        let ring = first.ring().clone();
        let nvars = first.nvars();
        if !ring.is_field() {
            return Err(Error::NotAField(ring.to_string()));
        }
        for g in &generators {
            first.compatible(g)?;
        }
        let k = generators.len();
        let zero = Poly::zero(&ring, nvars);
        let mut work: Vec<Tracked<R>> = Vec::new();
        for (j, g) in generators.iter().enumerate() {
            if g.is_zero() {
                continue;
            }
            let mut cof = vec![zero.clone(); k];
            cof[j] = Poly::one(&ring, nvars);
            let mut t = Tracked { poly: g.clone(), cof };
            t.make_monic();
            work.push(t);
        }

        let mut pairs: BTreeSet<(u32, usize, usize)> = BTreeSet::new();
        let lcm_deg = |a: &Tracked<R>, b: &Tracked<R>| {
            a.poly.leading_monomial().unwrap().lcm(b.poly.leading_monomial().unwrap()).degree()
        };
        for j in 0..work.len() {
            for i in 0..j {
                pairs.insert((lcm_deg(&work[i], &work[j]), i, j));
            }
        }
        let mut done: BTreeSet<(usize, usize)> = BTreeSet::new();
        while let Some(&(d, i, j)) = pairs.iter().next() {
            pairs.remove(&(d, i, j));
            done.insert((i, j));
            let mi = work[i].poly.leading_monomial().unwrap().clone();
            let mj = work[j].poly.leading_monomial().unwrap().clone();
            if mi.is_coprime(&mj) {
                continue;
            }
            let l = mi.lcm(&mj);
            // chain criterion: some k with LM_k | lcm whose pairs with i and j are already handled
            let chain = (0..work.len()).any(|k| {
                k != i
                    && k != j
                    && work[k].poly.leading_monomial().unwrap().divides(&l)
                    && done.contains(&(i.min(k), i.max(k)))
                    && done.contains(&(j.min(k), j.max(k)))
            });
            if chain {
                continue;
            }
            let one = ring.one();
            let mut s = Tracked {
                poly: zero.clone(),
                cof: vec![zero.clone(); k],
            };
            s.add_scaled(&one, &mi.quotient(&l).unwrap(), &work[i]);
            s.add_scaled(&ring.neg(&one), &mj.quotient(&l).unwrap(), &work[j]);
            let mut r = Self::reduce_tracked(&ring, s, &work);
            if r.poly.is_zero() {
                continue;
            }
            r.make_monic();
            let idx = work.len();
            for (a, w) in work.iter().enumerate() {
                pairs.insert((lcm_deg(w, &r), a, idx));
            }
            work.push(r);
        }

        // minimal basis: drop elements whose leading monomial is divisible by another's
        let lms: Vec<Monomial> = work.iter().map(|t| t.poly.leading_monomial().unwrap().clone()).collect();
        let mut keep = Vec::new();
        for (i, m) in lms.iter().enumerate() {
            let redundant = lms
                .iter()
                .enumerate()
                .any(|(j, o)| j != i && o.divides(m) && (o != m || j < i));
            if !redundant {
                keep.push(i);
            }
        }
        let mut minimal: Vec<Tracked<R>> = Vec::new();
        let mut work: Vec<Option<Tracked<R>>> = work.into_iter().map(Some).collect();
        for i in keep {
            minimal.push(work[i].take().unwrap());
        }
        // interreduce the tails to obtain the reduced basis
        for i in 0..minimal.len() {
            let t = std::mem::replace(
                &mut minimal[i],
                Tracked {
                    poly: zero.clone(),
                    cof: Vec::new(),
                },
            );
            minimal[i] = Self::reduce_tracked_except(&ring, t, &minimal, i, true);
        }
        minimal.sort_by(|a, b| a.poly.leading_monomial().cmp(&b.poly.leading_monomial()));
        let (basis, cofactors) = minimal.into_iter().map(|t| (t.poly, t.cof)).unzip();
        Ok(GroebnerBasis {
            ring,
            nvars,
            generators,
            basis,
            cofactors,
        })
    }

    fn reduce_tracked(ring: &R, p: Tracked<R>, by: &[Tracked<R>]) -> Tracked<R> {
        Self::reduce_tracked_except(ring, p, by, usize::MAX, false)
    }

    /// Full reduction of `p` by `by` (skipping index `skip`), updating
    /// cofactors. With `keep_leading` only the terms below the leading one
    /// are reduced.
    fn reduce_tracked_except(
        ring: &R,
        p: Tracked<R>,
        by: &[Tracked<R>],
        skip: usize,
        keep_leading: bool,
    ) -> Tracked<R> {
        let nvars = p.poly.nvars();
        let mut rem = Tracked {
            poly: Poly::zero(ring, nvars),
            cof: p.cof,
        };
        let mut cur = p.poly;
        if keep_leading {
            if let Some((m, c)) = cur.leading_term().map(|(m, c)| (m.clone(), c.clone())) {
                cur.add_term(m.clone(), &ring.neg(&c));
                rem.poly.add_term(m, &c);
            }
        }
        while let Some((m, c)) = cur.leading_term().map(|(m, c)| (m.clone(), c.clone())) {
            let divisor = by.iter().enumerate().find(|(i, t)| {
                *i != skip && !t.poly.is_zero() && t.poly.leading_monomial().unwrap().divides(&m)
            });
            match divisor {
                Some((_, t)) => {
                    let (lm, lc) = t.poly.leading_term().unwrap();
                    let q = ring.neg(&ring.mul(&c, &ring.inv(lc).expect("field")));
                    let mono = lm.quotient(&m).unwrap();
                    cur.add_scaled(&q, &mono, &t.poly);
                    for (a, b) in rem.cof.iter_mut().zip(&t.cof) {
                        a.add_scaled(&q, &mono, b);
                    }
                }
                None => {
                    cur.add_term(m.clone(), &ring.neg(&c));
                    rem.poly.add_term(m, &c);
                }
            }
        }
        rem
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn generators(&self) -> &[Poly<R>] {
        &self.generators
    }

    pub fn basis(&self) -> &[Poly<R>] {
        &self.basis
    }

    pub fn cofactors(&self) -> &[Vec<Poly<R>>] {
        &self.cofactors
    }

    pub fn leading_monomials(&self) -> Vec<&Monomial> {
        self.basis.iter().map(|p| p.leading_monomial().unwrap()).collect()
    }

    /// Divides `g` by the basis and rewrites the quotients in terms of the
    /// original generators.
    pub fn divide(&self, g: &Poly<R>) -> Division<R> {
        let r = &self.ring;
        let zero = Poly::zero(r, self.nvars);
        let mut basis_q = vec![zero.clone(); self.basis.len()];
        let mut remainder = zero.clone();
        let mut cur = g.clone();
        while let Some((m, c)) = cur.leading_term().map(|(m, c)| (m.clone(), c.clone())) {
            match self
                .basis
                .iter()
                .position(|b| b.leading_monomial().unwrap().divides(&m))
            {
                Some(i) => {
                    let b = &self.basis[i];
                    let (lm, lc) = b.leading_term().unwrap();
                    let q = r.mul(&c, &r.inv(lc).expect("field"));
                    let mono = lm.quotient(&m).unwrap();
                    cur.add_scaled(&r.neg(&q), &mono, b);
                    basis_q[i].add_term(mono, &q);
                }
                None => {
                    cur.add_term(m.clone(), &r.neg(&c));
                    remainder.add_term(m, &c);
                }
            }
        }
        let mut quotients = vec![zero; self.generators.len()];
        for (q, cof) in basis_q.iter().zip(&self.cofactors) {
            if q.is_zero() {
                continue;
            }
            for (j, c) in cof.iter().enumerate() {
                if !c.is_zero() {
                    quotients[j] = quotients[j].add(&q.mul(c));
                }
            }
        }
        Division { remainder, quotients }
    }

    /// Normal form of `g`.
    pub fn reduce(&self, g: &Poly<R>) -> Poly<R> {
        let r = &self.ring;
        let mut remainder = Poly::zero(r, self.nvars);
        let mut cur = g.clone();
        while let Some((m, c)) = cur.leading_term().map(|(m, c)| (m.clone(), c.clone())) {
            match self.basis.iter().find(|b| b.leading_monomial().unwrap().divides(&m)) {
                Some(b) => {
                    let (lm, lc) = b.leading_term().unwrap();
                    let q = r.neg(&r.mul(&c, &r.inv(lc).expect("field")));
                    cur.add_scaled(&q, &lm.quotient(&m).unwrap(), b);
                }
                None => {
                    cur.add_term(m.clone(), &r.neg(&c));
                    remainder.add_term(m, &c);
                }
            }
        }
        remainder
    }

    pub fn contains(&self, g: &Poly<R>) -> bool {
        self.reduce(g).is_zero()
    }

    /// Whether the quotient ring is finite dimensional: every variable needs
    /// a pure power among the leading monomials.
    pub fn is_zero_dimensional(&self) -> bool {
        self.pure_power_bounds().is_some()
    }

    fn pure_power_bounds(&self) -> Option<Vec<u32>> {
        let mut bounds = vec![None; self.nvars];
        for m in self.leading_monomials() {
            if m.is_one() {
                return Some(vec![0; self.nvars]);
            }
            if let Some(i) = m.pure_power_var() {
                let e = m.exponents()[i];
                bounds[i] = Some(bounds[i].map_or(e, |b: u32| b.min(e)));
            }
        }
        bounds.into_iter().collect()
    }

    /// Monomials not divisible by any leading monomial, by ascending degree
    /// and, within a degree, with `x1` before `x2`.
    pub fn standard_monomials(&self) -> Result<Vec<Monomial>> {
        let bounds = self.pure_power_bounds().ok_or(Error::NotZeroDimensional)?;
        if bounds.contains(&0) {
            return Ok(Vec::new());
        }
        let lms = self.leading_monomials();
        let mut out = Vec::new();
        let mut e = vec![0u32; self.nvars];
        loop {
            let m = Monomial::from_exponents(e.clone());
            if !lms.iter().any(|l| l.divides(&m)) {
                out.push(m);
            }
            // odometer over the box
            let mut i = 0;
            loop {
                if i == self.nvars {
                    out.sort_by(|a, b| a.degree().cmp(&b.degree()).then_with(|| b.cmp(a)));
                    return Ok(out);
                }
                e[i] += 1;
                if e[i] < bounds[i] {
                    break;
                }
                e[i] = 0;
                i += 1;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::RingSpec;

    fn q() -> RingSpec {
        RingSpec::Rationals
    }

    #[test]
    fn monomial_ideal() {
        let r = q();
        let x = Poly::var(&r, 1, 0);
        let gb = GroebnerBasis::new(vec![x.pow(2).scale(&r.from_i64(3))]).unwrap();
        let sm = gb.standard_monomials().unwrap();
        assert_eq!(sm, vec![Monomial::one(1), Monomial::var(1, 0)]);
    }

    #[test]
    fn division_identity() {
        let r = q();
        let x = Poly::var(&r, 2, 0);
        let y = Poly::var(&r, 2, 1);
        // (x^2 + y, xy - 1)
        let gens = vec![x.pow(2).add(&y), x.mul(&y).sub(&Poly::one(&r, 2))];
        let gb = GroebnerBasis::new(gens.clone()).unwrap();
        let g = x.pow(3).mul(&y.pow(2)).add(&x.mul(&y.pow(3))).add(&y);
        let div = gb.divide(&g);
        let mut back = div.remainder.clone();
        for (q, f) in div.quotients.iter().zip(&gens) {
            back = back.add(&q.mul(f));
        }
        assert_eq!(back, g);
        assert_eq!(gb.reduce(&g), div.remainder);
        for f in &gens {
            assert!(gb.contains(f));
        }
        // the cofactors reproduce each basis element
        for (b, cof) in gb.basis().iter().zip(gb.cofactors()) {
            let mut s = Poly::zero(&r, 2);
            for (c, f) in cof.iter().zip(&gens) {
                s = s.add(&c.mul(f));
            }
            assert_eq!(&s, b);
        }
    }

    #[test]
    fn not_zero_dimensional() {
        let r = q();
        let x = Poly::var(&r, 2, 0);
        let y = Poly::var(&r, 2, 1);
        let gb = GroebnerBasis::new(vec![x.mul(&y)]).unwrap();
        assert!(!gb.is_zero_dimensional());
        assert_eq!(gb.standard_monomials().unwrap_err(), Error::NotZeroDimensional);
    }

    #[test]
    fn rejects_non_fields() {
        let z = RingSpec::Integers;
        let x = Poly::var(&z, 1, 0);
        assert_eq!(GroebnerBasis::new(vec![x]).unwrap_err().name(), "NotAField");
    }
}
