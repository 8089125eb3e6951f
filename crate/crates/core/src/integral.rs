//! Normalized Gaussian-type integrals `I(g) ∈ K[λ]/(λ^N)` for
//! `f = ½ xᵀAx + λV`, defined by `I(1) = 1` and the vanishing of
//! `I(∂_a h + (∂_a f) h)`.
//!
//! Writing `B = A⁻¹` and expanding the vanishing relation with `h = B_{ka} g'`
//! gives the rewriting rule used here:
//!
//! ```text
//! I(x_k g') = -Σ_a B_{ka} [ I(∂_a g') + λ I((∂_a V) g') ]
//! ```
//!
//! The first summand lowers the degree by two, the second raises the
//! λ-order by one, so the recursion terminates.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::form::TwistedComplex;
use crate::linalg::Matrix;
use crate::poly::{Monomial, Poly};
use crate::ring::{Ring, RingHom, RingSpec, Value};

/// Default bound on the number of memo misses per `integrate` call.
pub const DEFAULT_STEP_CAP: u64 = 20_000_000;

/// An element of `K[λ]/(λ^N)` with its coefficients exposed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaSeries {
    base: RingSpec,
    coeffs: Vec<Value>,
}

impl LambdaSeries {
    pub fn zero(base: &RingSpec, order: usize) -> Self {
        LambdaSeries {
            base: base.clone(),
            coeffs: vec![base.zero(); order],
        }
    }

    pub fn from_coefficients(base: &RingSpec, mut coeffs: Vec<Value>, order: usize) -> Self {
        coeffs.resize(order, base.zero());
        coeffs.truncate(order);
        LambdaSeries {
            base: base.clone(),
            coeffs,
        }
    }

    /// Reads an element of `base[λ]/(λ^N)`.
    pub fn from_value(series_ring: &RingSpec, v: &Value) -> Option<Self> {
        let (base, _, order) = series_ring.series_base()?;
        let cs = series_ring.series_coefficients(v)?;
        Some(Self::from_coefficients(base, cs.to_vec(), order))
    }

    pub fn base(&self) -> &RingSpec {
        &self.base
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coefficients(&self) -> &[Value] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| self.base.is_zero(c))
    }

    pub fn series_ring(&self) -> RingSpec {
        self.base.lambda_series(self.order()).expect("order >= 1")
    }

    pub fn to_value(&self) -> Value {
        Value::Series(self.coeffs.clone())
    }

    pub fn add(&self, other: &Self) -> Self {
        let r = &self.base;
        LambdaSeries {
            base: r.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| r.add(a, b)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let r = &self.base;
        let n = self.order().min(other.order());
        let mut out = vec![r.zero(); n];
        for i in 0..n {
            for j in 0..(n - i) {
                out[i + j] = r.add(&out[i + j], &r.mul(&self.coeffs[i], &other.coeffs[j]));
            }
        }
        LambdaSeries {
            base: r.clone(),
            coeffs: out,
        }
    }

    /// Coefficients as integers, when every coefficient is integral.
    pub fn integer_coefficients(&self) -> Option<Vec<BigInt>> {
        self.coeffs
            .iter()
            .map(|c| match c {
                Value::Int(n) if self.base == RingSpec::Integers => Some(n.clone()),
                Value::Rat(q) if q.is_integer() => Some(q.to_integer()),
                _ => None,
            })
            .collect()
    }

    pub fn base_change(&self, h: &RingHom) -> Result<Self> {
        Ok(LambdaSeries {
            base: h.codomain().clone(),
            coeffs: self.coeffs.iter().map(|c| h.apply_value(c)).collect::<Result<_>>()?,
        })
    }
}

impl fmt::Display for LambdaSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = self.series_ring();
        f.write_str(&r.format(&self.to_value()))
    }
}

/// Which variable the rewriting rule peels off a monomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PivotStrategy {
    Leftmost,
    Rightmost,
    /// A pseudo-random variable among those present, from the given seed.
    Seeded(u64),
}

/// The data `(K, A, dV, N)` of a perturbative integral.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianProblem {
    base: RingSpec,
    n: usize,
    a: Matrix<RingSpec>,
    a_inv: Matrix<RingSpec>,
    dv: Vec<Poly<RingSpec>>,
    order: usize,
}

impl GaussianProblem {
    /// `f = ½ xᵀAx + λV`. A constant term of `V` is dropped, since only
    /// `dV` enters the defining relations.
    pub fn new(a: Matrix<RingSpec>, v: &Poly<RingSpec>, order: usize) -> Result<Self> {
        let c = v.constant_term();
        let mut v = v.clone();
        if !v.ring().is_zero(&c) {
            log::warn!("dropping constant term {} of V", v.ring().format(&c));
            v.add_term(Monomial::one(v.nvars()), &v.ring().neg(&c));
        }
        let dv = (0..v.nvars()).map(|i| v.derivative(i)).collect();
        Self::build(a, dv, order, true)
    }

    /// Same, with `dV` given directly as a closed 1-form.
    pub fn with_dv(a: Matrix<RingSpec>, dv: Vec<Poly<RingSpec>>, order: usize) -> Result<Self> {
        if !dv.is_empty() {
            TwistedComplex::from_closed_form(dv.clone())?;
        }
        Self::build(a, dv, order, true)
    }

    fn build(a: Matrix<RingSpec>, dv: Vec<Poly<RingSpec>>, order: usize, torsion_free: bool) -> Result<Self> {
        let base = a.ring().clone();
        if torsion_free && !base.is_torsion_free() {
            return Err(Error::TorsionRing(base.to_string()));
        }
        if matches!(base, RingSpec::TruncatedSeries { .. }) {
            return Err(Error::InvalidArgument(format!(
                "integration base ring {base} is already a series ring"
            )));
        }
        if order == 0 {
            return Err(Error::InvalidArgument("lambda order must be >= 1".into()));
        }
        if !a.is_square() {
            return Err(Error::DimensionMismatch("A must be square".into()));
        }
        let n = a.rows();
        if dv.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "A is {n}x{n} but V lives in {} variables",
                dv.len()
            )));
        }
        for p in &dv {
            if *p.ring() != base {
                return Err(Error::SpecMismatch(p.ring().to_string(), base.to_string()));
            }
            if p.nvars() != n {
                return Err(Error::DimensionMismatch("dV components in wrong number of variables".into()));
            }
        }
        if !a.is_symmetric() {
            return Err(Error::MatrixNotSymmetric);
        }
        let a_inv = a.inverse()?;
        Ok(GaussianProblem {
            base,
            n,
            a,
            a_inv,
            dv,
            order,
        })
    }

    /// The same problem with coefficients pushed through `h`. The target may
    /// have torsion: in top degree the cohomology commutes with base change,
    /// so the rewriting rule stays valid over the image.
    pub fn base_change(&self, h: &RingHom) -> Result<Self> {
        if h.domain() != &self.base {
            return Err(Error::SpecMismatch(h.domain().to_string(), self.base.to_string()));
        }
        let a = self.a.try_map(h.codomain(), |x| h.apply_value(x))?;
        let dv = self.dv.iter().map(|p| p.base_change(h)).collect::<Result<_>>()?;
        Self::build(a, dv, self.order, false)
    }

    pub fn base(&self) -> &RingSpec {
        &self.base
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn matrix(&self) -> &Matrix<RingSpec> {
        &self.a
    }

    pub fn inverse_matrix(&self) -> &Matrix<RingSpec> {
        &self.a_inv
    }

    pub fn dv(&self) -> &[Poly<RingSpec>] {
        &self.dv
    }

    /// `K[λ]/(λ^N)`, the ring of integrands and values.
    pub fn series_ring(&self) -> RingSpec {
        self.base.lambda_series(self.order).expect("order >= 1")
    }

    /// `∂_a f = Σ_b A_{ab} x_b + λ ∂_a V` over `K[λ]/(λ^N)`.
    pub fn partial_f(&self, a: usize) -> Poly<RingSpec> {
        let s = self.series_ring();
        let mut out = Poly::zero(&s, self.n);
        for b in 0..self.n {
            let c = self.a.get(a, b);
            out.add_term(Monomial::var(self.n, b), &s.series_constant(c.clone()));
        }
        let lam = s.series_var_pow(1);
        for (m, c) in self.dv[a].terms() {
            out.add_term(m.clone(), &s.mul(&lam, &s.series_constant(c.clone())));
        }
        out
    }

    /// Lifts a polynomial over `K` (or already over `K[λ]/(λ^N)`) to
    /// `K[λ]/(λ^N)`.
    pub fn lift(&self, g: &Poly<RingSpec>) -> Result<Poly<RingSpec>> {
        let s = self.series_ring();
        if g.nvars() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "integrand in {} variables, problem in {}",
                g.nvars(),
                self.n
            )));
        }
        if *g.ring() == s {
            return Ok(g.clone());
        }
        if *g.ring() == self.base {
            return Ok(g.map_coeffs(&s, |c| s.series_constant(c.clone())));
        }
        Err(Error::SpecMismatch(g.ring().to_string(), s.to_string()))
    }

    pub fn integrate(&self, g: &Poly<RingSpec>) -> Result<LambdaSeries> {
        self.integrate_with(g, PivotStrategy::Leftmost, DEFAULT_STEP_CAP)
    }

    pub fn integrate_with(&self, g: &Poly<RingSpec>, pivot: PivotStrategy, step_cap: u64) -> Result<LambdaSeries> {
        let g = self.lift(g)?;
        let s = g.ring().clone();
        let mut ev = Evaluator::new(self, pivot, step_cap);
        let mut total = vec![self.base.zero(); self.order];
        for (m, c) in g.terms() {
            let cs = s.series_coefficients(c).expect("series coefficient");
            for (j, cj) in cs.iter().enumerate() {
                if self.base.is_zero(cj) {
                    continue;
                }
                let v = ev.eval(m, self.order - j)?;
                for (i, vi) in v.iter().enumerate() {
                    total[i + j] = self.base.add(&total[i + j], &self.base.mul(cj, vi));
                }
            }
        }
        log::debug!("integrate: {} memo entries", ev.memo.len());
        Ok(LambdaSeries {
            base: self.base.clone(),
            coeffs: total,
        })
    }

    /// `I(∂_a h + (∂_a f) h)`, which must vanish.
    pub fn check_vanishing(&self, h: &Poly<RingSpec>, a: usize) -> Result<LambdaSeries> {
        if a >= self.n {
            return Err(Error::InvalidArgument(format!("variable index {} out of range", a + 1)));
        }
        let h = self.lift(h)?;
        let g = h.derivative(a).add(&self.partial_f(a).mul(&h));
        self.integrate(&g)
    }

    /// Runs the integral over `K = ZZ` and reports its integer coefficients,
    /// together with an independent run over the rationals.
    pub fn integrality_report(&self, g: &Poly<RingSpec>) -> Result<IntegralityReport> {
        if self.base != RingSpec::Integers {
            return Err(Error::InvalidArgument(format!(
                "integrality report needs ZZ coefficients, got {}",
                self.base
            )));
        }
        let det = self.a.det()?;
        if !self.base.is_one(&det) && !self.base.is_one(&self.base.neg(&det)) {
            return Err(Error::MatrixNotUnimodular(self.base.format(&det)));
        }
        let over_z = self.integrate(g)?;
        let to_q = RingHom::new(RingSpec::Integers, RingSpec::Rationals)?;
        let q_problem = self.base_change(&to_q)?;
        let g_q = self.lift(g)?.base_change(&RingHom::new(self.series_ring(), q_problem.series_ring())?)?;
        let over_q = q_problem.integrate(&g_q)?;
        let coefficients = over_z.integer_coefficients().expect("integer base");
        let rational_integral = over_q.integer_coefficients();
        let agrees = rational_integral.as_ref() == Some(&coefficients);
        Ok(IntegralityReport {
            coefficients,
            rational_coefficients: over_q,
            integral: rational_integral.is_some(),
            agrees,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntegralityReport {
    pub coefficients: Vec<BigInt>,
    pub rational_coefficients: LambdaSeries,
    /// Every coefficient of the run over the rationals is an integer.
    pub integral: bool,
    /// The runs over ZZ and QQ give the same coefficients.
    pub agrees: bool,
}

struct Evaluator<'a> {
    p: &'a GaussianProblem,
    pivot: PivotStrategy,
    rng: ChaCha8Rng,
    memo: HashMap<(Monomial, usize), Vec<Value>>,
    steps: u64,
    cap: u64,
}

impl<'a> Evaluator<'a> {
    fn new(p: &'a GaussianProblem, pivot: PivotStrategy, cap: u64) -> Self {
        let seed = match pivot {
            PivotStrategy::Seeded(s) => s,
            _ => 0,
        };
        Evaluator {
            p,
            pivot,
            rng: ChaCha8Rng::seed_from_u64(seed),
            memo: HashMap::new(),
            steps: 0,
            cap,
        }
    }

    fn choose(&mut self, m: &Monomial) -> usize {
        let present: Vec<usize> = (0..m.nvars()).filter(|&i| m.exponents()[i] > 0).collect();
        match self.pivot {
            PivotStrategy::Leftmost => present[0],
            PivotStrategy::Rightmost => *present.last().unwrap(),
            PivotStrategy::Seeded(_) => present[self.rng.gen_range(0..present.len())],
        }
    }

    /// `I(m) mod λ^r`.
    fn eval(&mut self, m: &Monomial, r: usize) -> Result<Vec<Value>> {
        let k = &self.p.base;
        if r == 0 {
            return Ok(Vec::new());
        }
        if m.is_one() {
            let mut v = vec![k.zero(); r];
            v[0] = k.one();
            return Ok(v);
        }
        if let Some(v) = self.memo.get(&(m.clone(), r)) {
            return Ok(v.clone());
        }
        self.steps += 1;
        if self.steps > self.cap {
            return Err(Error::NonTerminating(self.cap));
        }
        let n = self.p.n;
        let kv = self.choose(m);
        let g1 = m.lower(kv).unwrap();
        let mut acc = vec![k.zero(); r];
        for a in 0..n {
            let b = self.p.a_inv.get(kv, a).clone();
            if k.is_zero(&b) {
                continue;
            }
            let mut inner = vec![k.zero(); r];
            // I(∂_a g')
            let e = g1.exponents()[a];
            if e > 0 {
                let v = self.eval(&g1.lower(a).unwrap(), r)?;
                let ce = k.from_i64(e as i64);
                for (x, y) in inner.iter_mut().zip(&v) {
                    *x = k.add(x, &k.mul(&ce, y));
                }
            }
            // λ I((∂_a V) g')
            if r > 1 {
                let terms: Vec<(Monomial, Value)> = self.p.dv[a]
                    .terms()
                    .map(|(mm, c)| (mm.mul(&g1), c.clone()))
                    .collect();
                for (mm, c) in terms {
                    let v = self.eval(&mm, r - 1)?;
                    for (i, y) in v.iter().enumerate() {
                        inner[i + 1] = k.add(&inner[i + 1], &k.mul(&c, y));
                    }
                }
            }
            let nb = k.neg(&b);
            for (x, y) in acc.iter_mut().zip(&inner) {
                *x = k.add(x, &k.mul(&nb, y));
            }
        }
        self.memo.insert((m.clone(), r), acc.clone());
        Ok(acc)
    }
}

/// Gaussian moment by explicit Wick contraction: the sum over perfect
/// matchings of the factors of `m` of products of propagators `(-A⁻¹)_{ij}`.
/// Independent of the rewriting in [`GaussianProblem::integrate`].
pub fn wick_oracle<R: Ring>(a: &Matrix<R>, m: &Monomial) -> Result<R::Elem> {
    let r = a.ring();
    let prop = a.inverse()?.neg();
    let mut points = Vec::new();
    for (i, &e) in m.exponents().iter().enumerate() {
        points.extend(std::iter::repeat_n(i, e as usize));
    }
    if points.len() % 2 == 1 {
        return Ok(r.zero());
    }
    fn matchings<R: Ring>(r: &R, prop: &Matrix<R>, pts: &[usize]) -> R::Elem {
        if pts.is_empty() {
            return r.one();
        }
        let first = pts[0];
        let mut acc = r.zero();
        for j in 1..pts.len() {
            let w = prop.get(first, pts[j]);
            if r.is_zero(w) {
                continue;
            }
            let rest: Vec<usize> = pts[1..]
                .iter()
                .enumerate()
                .filter(|(i, _)| i + 1 != j)
                .map(|(_, &p)| p)
                .collect();
            acc = r.add(&acc, &r.mul(w, &matchings(r, prop, &rest)));
        }
        acc
    }
    Ok(matchings(r, &prop, &points))
}

/// `(2k-1)!! = (2k)! / (2^k k!)`, the number of perfect matchings of `2k` points.
pub fn double_factorial(k: u32) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, i| acc * BigInt::from(2 * i - 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn problem(base: &RingSpec, a: &[Vec<i64>], v: Poly<RingSpec>, order: usize) -> GaussianProblem {
        GaussianProblem::new(Matrix::from_i64(base, a).unwrap(), &v, order).unwrap()
    }

    fn ints(s: &LambdaSeries) -> Vec<i64> {
        s.integer_coefficients()
            .unwrap()
            .iter()
            .map(|c| i64::try_from(c).unwrap())
            .collect()
    }

    #[test]
    fn free_moments() {
        let q = RingSpec::Rationals;
        let p = problem(&q, &[vec![-1]], Poly::zero(&q, 1), 1);
        let x = Poly::var(&q, 1, 0);
        assert_eq!(ints(&p.integrate(&Poly::one(&q, 1)).unwrap()), vec![1]);
        assert_eq!(ints(&p.integrate(&x.pow(2)).unwrap()), vec![1]);
        assert_eq!(ints(&p.integrate(&x.pow(4)).unwrap()), vec![3]);
        assert_eq!(ints(&p.integrate(&x.pow(3)).unwrap()), vec![0]);
    }

    #[test]
    fn cubic_perturbation_first_order() {
        let q = RingSpec::Rationals;
        let x = Poly::var(&q, 1, 0);
        let p = problem(&q, &[vec![-1]], x.pow(3), 2);
        assert_eq!(ints(&p.integrate(&x).unwrap()), vec![0, 3]);
    }

    #[test]
    fn constant_in_v_is_dropped() {
        let q = RingSpec::Rationals;
        let x = Poly::var(&q, 1, 0);
        let p1 = problem(&q, &[vec![-1]], x.pow(3), 3);
        let p2 = problem(&q, &[vec![-1]], x.pow(3).add(&Poly::from_i64(&q, 1, 5)), 3);
        assert_eq!(p1, p2);
    }

    #[test]
    fn rejects_torsion_and_bad_matrices() {
        let z6 = RingSpec::modular(6).unwrap();
        let a = Matrix::from_i64(&z6, &[vec![1]]).unwrap();
        let err = GaussianProblem::new(a, &Poly::zero(&z6, 1), 2).unwrap_err();
        assert_eq!(err.name(), "TorsionRing");

        let z = RingSpec::Integers;
        let a = Matrix::from_i64(&z, &[vec![1, 2], vec![0, 1]]).unwrap();
        let err = GaussianProblem::new(a, &Poly::zero(&z, 2), 2).unwrap_err();
        assert_eq!(err, Error::MatrixNotSymmetric);

        let a = Matrix::from_i64(&z, &[vec![2]]).unwrap();
        let err = GaussianProblem::new(a, &Poly::zero(&z, 1), 2).unwrap_err();
        assert_eq!(err.name(), "MatrixNotInvertible");
    }

    #[test]
    fn non_closed_dv_is_rejected() {
        let q = RingSpec::Rationals;
        let x = Poly::var(&q, 2, 0);
        let a = Matrix::from_i64(&q, &[vec![1, 0], vec![0, 1]]).unwrap();
        let err = GaussianProblem::with_dv(a, vec![Poly::var(&q, 2, 1), x.clone().sub(&x)], 2).unwrap_err();
        assert_eq!(err, Error::NotClosed);
    }

    #[test]
    fn wick_examples() {
        let q = RingSpec::Rationals;
        let a = Matrix::from_i64(&q, &[vec![-1]]).unwrap();
        assert_eq!(wick_oracle(&a, &Monomial::from_exponents(vec![4])).unwrap(), q.from_i64(3));
        let a2 = Matrix::from_i64(&q, &[vec![-1, 0], vec![0, -1]]).unwrap();
        assert_eq!(wick_oracle(&a2, &Monomial::from_exponents(vec![1, 0])).unwrap(), q.zero());
        assert_eq!(wick_oracle(&a2, &Monomial::from_exponents(vec![2, 2])).unwrap(), q.one());
        assert_eq!(double_factorial(3), BigInt::from(15));
    }

    #[test]
    fn integrality_examples() {
        let z = RingSpec::Integers;
        let x = Poly::var(&z, 1, 0);
        let p = problem(&z, &[vec![-1]], x.pow(3), 4);
        let rep = p.integrality_report(&x).unwrap();
        assert!(rep.integral && rep.agrees);
        assert_eq!(rep.coefficients, [0, 3, 0, 135].map(BigInt::from).to_vec());

        let p = problem(&z, &[vec![-1]], Poly::zero(&z, 1), 3);
        let rep = p.integrality_report(&x.pow(6)).unwrap();
        assert_eq!(rep.coefficients, [15, 0, 0].map(BigInt::from).to_vec());

        let p = problem(&z, &[vec![2, 1], vec![1, 1]], Poly::zero(&z, 2), 2);
        assert!(p.integrality_report(&Poly::one(&z, 2)).is_ok());
        let p = problem(&RingSpec::Integers, &[vec![-1]], Poly::zero(&z, 1), 2);
        let q = p.base_change(&RingHom::new(z.clone(), RingSpec::Rationals).unwrap()).unwrap();
        assert!(q.integrality_report(&Poly::one(&RingSpec::Rationals, 1)).is_err());
    }

    #[test]
    fn vanishing_examples() {
        let q = RingSpec::Rationals;
        let x = Poly::var(&q, 1, 0);
        let p = problem(&q, &[vec![-1]], x.pow(4), 5);
        assert!(p.check_vanishing(&Poly::one(&q, 1), 0).unwrap().is_zero());
        assert!(p.check_vanishing(&x.pow(5), 0).unwrap().is_zero());
    }
}
