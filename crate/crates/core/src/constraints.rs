//! Constraint elimination: forms on a hypersurface `P = 0` (or a complete
//! intersection `f_1 = … = f_m = 0`) mapped into the twisted complex of
//! `g = f + Σ t_i f_i` on `K^n × K^m`.
//!
//! Variables of the ambient space are ordered `x1..xn, t1..tm`, and wedges
//! put x-differentials before t-differentials.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::form::{Form, IndexSet, TwistedComplex};
use crate::groebner::GroebnerBasis;
use crate::linalg::Matrix;
use crate::milnor::{all_monomials, MilnorData};
use crate::poly::{Monomial, Poly};
use crate::ring::{Ring, RingHom, RingSpec};

#[derive(Clone, Debug, PartialEq)]
pub struct ConstraintProblem {
    ring: RingSpec,
    n: usize,
    f: Poly<RingSpec>,
    constraints: Vec<Poly<RingSpec>>,
}

/// `numerator / P^pole_order`.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentForm {
    pub numerator: Form<RingSpec>,
    pub pole_order: u32,
}

impl ConstraintProblem {
    pub fn new(f: &Poly<RingSpec>, constraints: Vec<Poly<RingSpec>>) -> Result<Self> {
        if constraints.is_empty() {
            return Err(Error::InvalidArgument("at least one constraint is required".into()));
        }
        for c in &constraints {
            f.compatible(c)?;
        }
        if f.nvars() + constraints.len() > 32 {
            return Err(Error::InvalidArgument("too many variables".into()));
        }
        Ok(ConstraintProblem {
            ring: f.ring().clone(),
            n: f.nvars(),
            f: f.clone(),
            constraints,
        })
    }

    /// Hypersurface `P = 0` with `f = 0`.
    pub fn hypersurface(p: &Poly<RingSpec>) -> Result<Self> {
        Self::new(&Poly::zero(p.ring(), p.nvars()), vec![p.clone()])
    }

    pub fn ring(&self) -> &RingSpec {
        &self.ring
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn codim(&self) -> usize {
        self.constraints.len()
    }

    pub fn constraints(&self) -> &[Poly<RingSpec>] {
        &self.constraints
    }

    pub fn f(&self) -> &Poly<RingSpec> {
        &self.f
    }

    fn total_vars(&self) -> usize {
        self.n + self.codim()
    }

    fn embed_poly(&self, p: &Poly<RingSpec>) -> Poly<RingSpec> {
        let map: Vec<usize> = (0..self.n).collect();
        p.embed(self.total_vars(), &map)
    }

    /// `ω̃` as a form on `K^n × K^m`.
    pub fn lift(&self, omega: &Form<RingSpec>) -> Result<Form<RingSpec>> {
        self.check_form(omega)?;
        Ok(omega.map_polys(&self.ring, self.total_vars(), |p| self.embed_poly(p)))
    }

    fn check_form(&self, omega: &Form<RingSpec>) -> Result<()> {
        if *omega.ring() != self.ring {
            return Err(Error::SpecMismatch(omega.ring().to_string(), self.ring.to_string()));
        }
        if omega.nvars() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "form in {} variables, constraints in {}",
                omega.nvars(),
                self.n
            )));
        }
        Ok(())
    }

    /// `g = f + Σ t_i f_i`.
    pub fn g_total(&self) -> Poly<RingSpec> {
        let nt = self.total_vars();
        let mut g = self.embed_poly(&self.f);
        for (i, c) in self.constraints.iter().enumerate() {
            let t = Poly::var(&self.ring, nt, self.n + i);
            g = g.add(&t.mul(&self.embed_poly(c)));
        }
        g
    }

    pub fn ambient_complex(&self) -> TwistedComplex<RingSpec> {
        TwistedComplex::new(&self.g_total())
    }

    /// `ω̃ ∧ df_1 ∧ dt_1 ∧ … ∧ df_m ∧ dt_m`; raises degree by exactly `2m`.
    pub fn codim_m_map(&self, omega: &Form<RingSpec>) -> Result<Form<RingSpec>> {
        let mut out = self.lift(omega)?;
        let nt = self.total_vars();
        for (i, c) in self.constraints.iter().enumerate() {
            let dfi = Form::function(self.embed_poly(c)).d();
            out = out.wedge(&dfi).wedge(&Form::dx(&self.ring, nt, self.n + i));
        }
        let shift = 2 * self.codim();
        for d in out.degrees() {
            assert!(omega.degrees().contains(&(d - shift)), "degree shift violated");
        }
        Ok(out)
    }

    /// `ω̃ ∧ dP ∧ dt` for a hypersurface.
    pub fn delta_map(&self, omega: &Form<RingSpec>) -> Result<Form<RingSpec>> {
        if self.codim() != 1 {
            return Err(Error::InvalidArgument(format!(
                "delta_map needs one constraint, got {}",
                self.codim()
            )));
        }
        self.codim_m_map(omega)
    }

    /// The two maps whose composite is [`ConstraintProblem::delta_map`]:
    /// `ω ↦ ω̃ dP / P` and `ω / P^{i+1} ↦ (-1)^i t^i / i! · ω̃ ∧ dt`.
    pub fn intermediate_maps(&self, omega: &Form<RingSpec>, i: usize) -> Result<(LaurentForm, Form<RingSpec>)> {
        if self.codim() != 1 {
            return Err(Error::InvalidArgument("intermediate maps need one constraint".into()));
        }
        self.check_form(omega)?;
        let r = &self.ring;
        let dp = Form::function(self.constraints[0].clone()).d();
        let first = LaurentForm {
            numerator: omega.wedge(&dp),
            pole_order: 1,
        };
        let fact = (1..=i as i64).fold(r.one(), |acc, k| r.mul(&acc, &r.from_i64(k)));
        let inv = r
            .inv(&fact)
            .ok_or_else(|| Error::FactorialNotInvertible(i, r.to_string()))?;
        let coeff = if i % 2 == 1 { r.neg(&inv) } else { inv };
        let nt = self.total_vars();
        let t_pow = Poly::var(r, nt, self.n).pow(i as u32).scale(&coeff);
        let second = self
            .lift(omega)?
            .wedge(&Form::dx(r, nt, self.n))
            .mul_poly(&t_pow);
        Ok((first, second))
    }

    /// Certifies the chain-map property of `delta_map` on `ω` by splitting
    /// `d_f ω̃ = ρ + Pα + dP∧β` with `ρ` reduced modulo the `(P, dP)`
    /// submodule, then checking `d_g(δω̃) - δ(ρ) = δ(Pα)` and
    /// `δ(Pα) = ±(d_g(α∧dP) - d_f α ∧ dP)`.
    pub fn chain_certificate(&self, omega: &Form<RingSpec>) -> Result<ChainCertificate> {
        if self.codim() != 1 {
            return Err(Error::InvalidArgument("chain certificate needs one constraint".into()));
        }
        self.check_form(omega)?;
        if !self.ring.is_field() {
            return Err(Error::NotAField(self.ring.to_string()));
        }
        let n = self.n;
        let r = &self.ring;
        let p = &self.constraints[0];
        let dp = Form::function(p.clone()).d();
        let y_complex = TwistedComplex::new(&self.f);
        let u = y_complex.d(omega);
        let (rho, alpha, beta) = split_mod_hypersurface(p, &u)?;
        let recomposed = rho.add(&alpha.mul_poly(p)).add(&dp.wedge(&beta));
        let decomposition_holds = recomposed == u;

        let g_complex = self.ambient_complex();
        let lhs = g_complex.d(&self.delta_map(omega)?);
        let delta_rho = self.delta_map(&rho)?;
        let delta_p_alpha = self.delta_map(&alpha.mul_poly(p))?;
        let chain_identity_holds = lhs.sub(&delta_rho) == delta_p_alpha
            && self.delta_map(&dp.wedge(&beta))?.is_zero();

        // P α∧dP∧dt = (-1)^{|α|+1} (d_g(α∧dP) - d_f α ∧ dP) on each homogeneous part
        let mut correction = Form::zero(r, n + 1);
        for k in alpha.degrees() {
            let a = self.lift(&alpha.part(k))?;
            let dp_t = self.lift(&dp)?;
            let a_dp = a.wedge(&dp_t);
            let term = g_complex
                .d(&a_dp)
                .sub(&self.lift(&y_complex.d(&alpha.part(k)))?.wedge(&dp_t));
            correction = correction.add(&if k % 2 == 0 { term.neg() } else { term });
        }
        let correction_identity_holds = correction == delta_p_alpha;
        Ok(ChainCertificate {
            rho,
            alpha,
            beta,
            decomposition_holds,
            chain_identity_holds,
            correction_identity_holds,
        })
    }

    /// Jacobian zero-dimensionality of `g` plus seeded integer point checks
    /// of the full-rank condition on the constraint locus.
    pub fn regularity(&self, seed: u64) -> Result<RegularityReport> {
        let q = RingSpec::Rationals;
        let to_q = |p: &Poly<RingSpec>| -> Result<Poly<RingSpec>> {
            if self.ring == q {
                Ok(p.clone())
            } else {
                p.base_change(&RingHom::new(self.ring.clone(), q.clone())?)
            }
        };
        let g = to_q(&self.g_total())?;
        let (jacobian_zero_dimensional, mu) = match MilnorData::new(&g) {
            Ok(m) => (true, Some(m.mu())),
            Err(Error::NotZeroDimensional) => (false, None),
            Err(e) => return Err(e),
        };
        let cs: Vec<Poly<RingSpec>> = self.constraints.iter().map(to_q).collect::<Result<_>>()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut points_on_locus = 0;
        let mut rank_failures = 0;
        for _ in 0..REGULARITY_SAMPLES {
            let pt: Vec<_> = (0..self.n).map(|_| q.from_i64(rng.gen_range(-3..=3))).collect();
            if cs.iter().any(|c| !q.is_zero(&c.eval(&pt))) {
                continue;
            }
            points_on_locus += 1;
            let rows: Vec<Vec<_>> = cs
                .iter()
                .map(|c| (0..self.n).map(|i| c.derivative(i).eval(&pt)).collect())
                .collect();
            if Matrix::from_rows(&q, rows)?.rank() < cs.len() {
                rank_failures += 1;
            }
        }
        Ok(RegularityReport {
            jacobian_zero_dimensional,
            mu,
            points_on_locus,
            rank_failures,
        })
    }
}

/// Number of random integer points tried by [`ConstraintProblem::regularity`].
pub const REGULARITY_SAMPLES: usize = 400;

#[derive(Clone, Debug, PartialEq)]
pub struct ChainCertificate {
    pub rho: Form<RingSpec>,
    pub alpha: Form<RingSpec>,
    pub beta: Form<RingSpec>,
    pub decomposition_holds: bool,
    pub chain_identity_holds: bool,
    pub correction_identity_holds: bool,
}

impl ChainCertificate {
    pub fn passed(&self) -> bool {
        self.decomposition_holds && self.chain_identity_holds && self.correction_identity_holds
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegularityReport {
    pub jacobian_zero_dimensional: bool,
    pub mu: Option<usize>,
    pub points_on_locus: usize,
    pub rank_failures: usize,
}

impl RegularityReport {
    /// When false the maps are still computed, but the isomorphism on
    /// cohomology is not guaranteed.
    pub fn isomorphism_guaranteed(&self) -> bool {
        self.jacobian_zero_dimensional && self.rank_failures == 0
    }
}

/// Encodes a k-form as a polynomial in `x1..xn, e1..en` with `dx_S ↦ e^S`.
fn form_to_poly(w: &Form<RingSpec>) -> Poly<RingSpec> {
    let n = w.nvars();
    let r = w.ring();
    let mut out = Poly::zero(r, 2 * n);
    for (s, p) in w.components() {
        for (m, c) in p.terms() {
            let mut e = m.exponents().to_vec();
            e.extend((0..n).map(|i| u32::from(s.contains(i))));
            out.add_term(Monomial::from_exponents(e), c);
        }
    }
    out
}

fn poly_to_form(p: &Poly<RingSpec>, n: usize) -> Form<RingSpec> {
    let r = p.ring();
    let mut out = Form::zero(r, n);
    for (m, c) in p.terms() {
        let e = m.exponents();
        assert!(e[n..].iter().all(|&k| k <= 1), "square of a differential");
        let idx: Vec<usize> = (0..n).filter(|&i| e[n + i] == 1).collect();
        let xm = Monomial::from_exponents(e[..n].to_vec());
        out.add_component(IndexSet::from_indices(&idx), &Poly::term(r, xm, c.clone()));
    }
    out
}

/// The x-only, e-degree-zero part of a polynomial in `x, e`.
fn e_free_part(p: &Poly<RingSpec>, n: usize) -> Poly<RingSpec> {
    let r = p.ring();
    Poly::from_terms(
        r,
        n,
        p.terms()
            .filter(|(m, _)| m.exponents()[n..].iter().all(|&k| k == 0))
            .map(|(m, c)| (Monomial::from_exponents(m.exponents()[..n].to_vec()), c.clone())),
    )
}

/// Splits a homogeneous k-form `u = ρ + Pα + dP∧β` with `ρ` the normal form
/// of `u` modulo the submodule `P Ω^k + dP ∧ Ω^{k-1}`.
///
/// The submodule is encoded as the e-degree-k part of an ideal in
/// `K[x, e]`; all e-monomials of degree `k+1` are added to keep the basis
/// inside degree `k`.
pub fn split_mod_hypersurface(
    p: &Poly<RingSpec>,
    u: &Form<RingSpec>,
) -> Result<(Form<RingSpec>, Form<RingSpec>, Form<RingSpec>)> {
    let n = p.nvars();
    let r = p.ring();
    if u.is_zero() {
        let z = Form::zero(r, n);
        return Ok((z.clone(), z.clone(), z));
    }
    let k = u.degree().ok_or_else(|| Error::InvalidArgument("form is not homogeneous".into()))?;
    let dp = Form::function(p.clone()).d();

    let mut gens = Vec::new();
    let mut p_slots = Vec::new();
    for s in IndexSet::subsets(n, k) {
        p_slots.push((gens.len(), s));
        gens.push(form_to_poly(&Form::monomial(p.clone(), s)));
    }
    let mut dp_slots = Vec::new();
    if k >= 1 {
        for t in IndexSet::subsets(n, k - 1) {
            let g = form_to_poly(&dp.wedge(&Form::monomial(Poly::one(r, n), t)));
            if !g.is_zero() {
                dp_slots.push((gens.len(), t));
                gens.push(g);
            }
        }
    }
    for m in all_monomials(n, k as u32 + 1) {
        if m.degree() as usize != k + 1 {
            continue;
        }
        let mut e = vec![0u32; n];
        e.extend(m.exponents());
        gens.push(Poly::term(r, Monomial::from_exponents(e), r.one()));
    }
    let gb = GroebnerBasis::new(gens)?;
    let div = gb.divide(&form_to_poly(u));
    let rho = poly_to_form(&div.remainder, n);
    let mut alpha = Form::zero(r, n);
    for (j, s) in p_slots {
        alpha.add_component(s, &e_free_part(&div.quotients[j], n));
    }
    let mut beta = Form::zero(r, n);
    for (j, t) in dp_slots {
        beta.add_component(t, &e_free_part(&div.quotients[j], n));
    }
    Ok((rho, alpha, beta))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> RingSpec {
        RingSpec::Rationals
    }

    fn circle() -> (Poly<RingSpec>, Vec<Poly<RingSpec>>) {
        let r = q();
        let x = Poly::var(&r, 2, 0);
        let y = Poly::var(&r, 2, 1);
        (x.pow(2).add(&y.pow(2)).sub(&Poly::one(&r, 2)), vec![x, y])
    }

    #[test]
    fn point_constraint() {
        let r = q();
        let x = Poly::var(&r, 1, 0);
        let cp = ConstraintProblem::hypersurface(&x).unwrap();
        let out = cp.delta_map(&Form::function(Poly::one(&r, 1))).unwrap();
        assert_eq!(out, Form::top(Poly::one(&r, 2)));
        let reg = cp.regularity(1).unwrap();
        assert_eq!(reg.mu, Some(1));
        assert!(reg.isomorphism_guaranteed());
    }

    #[test]
    fn circle_delta() {
        let r = q();
        let (p, v) = circle();
        let cp = ConstraintProblem::hypersurface(&p).unwrap();
        let out = cp.delta_map(&Form::function(Poly::one(&r, 2))).unwrap();
        assert_eq!(out.to_string(), "2*x1*dx1^dx3 + 2*x2*dx2^dx3");
        let omega = Form::monomial(v[1].clone(), IndexSet::single(0));
        let cert = cp.chain_certificate(&omega).unwrap();
        assert!(cert.passed(), "{cert:?}");
        let reg = cp.regularity(3).unwrap();
        assert!(!reg.jacobian_zero_dimensional);
        assert!(reg.points_on_locus > 0 && reg.rank_failures == 0);
        assert!(!reg.isomorphism_guaranteed());
    }

    #[test]
    fn split_reduces_multiples() {
        let (p, v) = circle();
        // d(y P) = P dy + y dP lies in the submodule
        let u = Form::function(v[1].mul(&p)).d();
        let (rho, alpha, beta) = split_mod_hypersurface(&p, &u).unwrap();
        assert!(rho.is_zero());
        let dp = Form::function(p.clone()).d();
        assert_eq!(alpha.mul_poly(&p).add(&dp.wedge(&beta)), u);
    }

    #[test]
    fn intermediate_maps() {
        let r = q();
        let (p, _) = circle();
        let cp = ConstraintProblem::hypersurface(&p).unwrap();
        let one = Form::function(Poly::one(&r, 2));
        let (first, second) = cp.intermediate_maps(&one, 0).unwrap();
        assert_eq!(first.pole_order, 1);
        // composite: ω dP / P, then the i = 0 map on the numerator
        let (_, composite) = cp.intermediate_maps(&first.numerator, 0).unwrap();
        assert_eq!(composite, cp.delta_map(&one).unwrap());
        assert_eq!(second, Form::dx(&r, 3, 2));

        let dx = Form::dx(&r, 2, 0);
        let (_, s2) = cp.intermediate_maps(&dx, 2).unwrap();
        let half = r.from_rational(&num_rational::BigRational::new(1.into(), 2.into())).unwrap();
        let t2 = Poly::var(&r, 3, 2).pow(2).scale(&half);
        assert_eq!(s2, Form::monomial(t2, IndexSet::from_indices(&[0, 2])));

        let z = RingSpec::Integers;
        let pz = Poly::var(&z, 1, 0);
        let cz = ConstraintProblem::hypersurface(&pz).unwrap();
        let w = Form::function(Poly::one(&z, 1));
        assert!(cz.intermediate_maps(&w, 1).is_ok());
        assert_eq!(cz.intermediate_maps(&w, 2).unwrap_err().name(), "FactorialNotInvertible");
        let z5 = RingSpec::modular(5).unwrap();
        let c5 = ConstraintProblem::hypersurface(&Poly::var(&z5, 1, 0)).unwrap();
        let w5 = Form::function(Poly::one(&z5, 1));
        assert!(c5.intermediate_maps(&w5, 4).is_ok());
        assert!(c5.intermediate_maps(&w5, 5).is_err());
    }

    #[test]
    fn codim_two() {
        let r = q();
        let x = Poly::var(&r, 2, 0);
        let y = Poly::var(&r, 2, 1);
        let cp = ConstraintProblem::new(&Poly::zero(&r, 2), vec![x, y]).unwrap();
        let out = cp.codim_m_map(&Form::function(Poly::one(&r, 2))).unwrap();
        // dx ∧ dt1 ∧ dy ∧ dt2 = -dx ∧ dy ∧ dt1 ∧ dt2
        assert_eq!(out, Form::top(Poly::from_i64(&r, 4, -1)));
        assert_eq!(out.degree(), Some(4));
    }
}
