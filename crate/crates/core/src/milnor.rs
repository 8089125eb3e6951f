//! Top-degree twisted cohomology of a single polynomial over a field: the
//! Milnor ring basis and reduction of `g dx¹…dxⁿ` to coordinates in it, with
//! an explicit primitive certifying each reduction.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::form::{Form, IndexSet, TwistedComplex};
use crate::groebner::GroebnerBasis;
use crate::linalg::Matrix;
use crate::poly::{default_names, Monomial, Poly};
use crate::ring::Ring;

#[derive(Clone, Debug)]
pub struct MilnorData<R: Ring> {
    f: Poly<R>,
    complex: TwistedComplex<R>,
    groebner: GroebnerBasis<R>,
    basis: Vec<Monomial>,
}

/// Coordinates of a reduced class plus the primitive `h` with
/// `g dx - Σ c_b b dx = d_f h`.
#[derive(Clone, Debug, PartialEq)]
pub struct Reduction<R: Ring> {
    pub coordinates: Vec<R::Elem>,
    pub witness: Form<R>,
    pub passes: usize,
}

/// `(-1)^a dx_{â}`: the (n-1)-form with `dx_a ∧ (-1)^a dx_{â} = dx¹…dxⁿ`.
pub fn complement(n: usize, a: usize) -> (IndexSet, bool) {
    (IndexSet::full(n).without(a), a % 2 == 1)
}

impl<R: Ring> MilnorData<R> {
    pub fn new(f: &Poly<R>) -> Result<Self> {
        let ring = f.ring();
        if !ring.is_field() {
            return Err(Error::NotAField(ring.to_string()));
        }
        let n = f.nvars();
        if n == 0 {
            return Err(Error::InvalidArgument("f has no variables".into()));
        }
        let grad: Vec<Poly<R>> = (0..n).map(|i| f.derivative(i)).collect();
        let groebner = GroebnerBasis::new(grad)?;
        let basis = groebner.standard_monomials()?;
        Ok(MilnorData {
            f: f.clone(),
            complex: TwistedComplex::new(f),
            groebner,
            basis,
        })
    }

    pub fn f(&self) -> &Poly<R> {
        &self.f
    }

    pub fn complex(&self) -> &TwistedComplex<R> {
        &self.complex
    }

    pub fn groebner(&self) -> &GroebnerBasis<R> {
        &self.groebner
    }

    pub fn basis(&self) -> &[Monomial] {
        &self.basis
    }

    pub fn mu(&self) -> usize {
        self.basis.len()
    }

    pub fn basis_strings(&self) -> Vec<String> {
        let names = default_names(self.f.nvars());
        self.basis.iter().map(|m| m.format(&names)).collect()
    }

    /// Reduction cap: `64 (1 + deg g)` passes.
    pub fn pass_cap(g: &Poly<R>) -> usize {
        64 * (1 + g.degree().unwrap_or(0) as usize)
    }

    /// Coordinates of `[g dx¹…dxⁿ]` in the basis `{b dx¹…dxⁿ}`.
    ///
    /// Each pass divides `g = r + Σ q_a ∂_a f` and uses
    /// `q_a ∂_a f dx = d_f((-1)^a q_a dx_â) - ∂_a q_a dx` to continue with
    /// `-Σ ∂_a q_a`.
    pub fn reduce(&self, g: &Poly<R>) -> Result<Reduction<R>> {
        let n = self.f.nvars();
        let ring = self.f.ring();
        if g.nvars() != n {
            return Err(Error::DimensionMismatch(format!(
                "g in {} variables, f in {n}",
                g.nvars()
            )));
        }
        self.f.compatible(g)?;
        let cap = Self::pass_cap(g);
        let mut remainder = Poly::zero(ring, n);
        let mut witness = Form::zero(ring, n);
        let mut cur = g.clone();
        let mut passes = 0;
        while !cur.is_zero() {
            if passes == cap {
                return Err(Error::IterationCapExceeded(cap));
            }
            passes += 1;
            let div = self.groebner.divide(&cur);
            remainder = remainder.add(&div.remainder);
            let mut next = Poly::zero(ring, n);
            for (a, q) in div.quotients.iter().enumerate() {
                if q.is_zero() {
                    continue;
                }
                let (s, negative) = complement(n, a);
                witness.add_component(s, &if negative { q.neg() } else { q.clone() });
                next = next.sub(&q.derivative(a));
            }
            cur = next;
        }
        let coordinates = self.basis.iter().map(|b| remainder.coeff(b)).collect();
        Ok(Reduction {
            coordinates,
            witness,
            passes,
        })
    }

    /// Just the coordinates.
    pub fn reduce_nform(&self, g: &Poly<R>) -> Result<Vec<R::Elem>> {
        Ok(self.reduce(g)?.coordinates)
    }

    /// `Σ c_b b`.
    pub fn from_coordinates(&self, c: &[R::Elem]) -> Poly<R> {
        let ring = self.f.ring();
        Poly::from_terms(
            ring,
            self.f.nvars(),
            self.basis.iter().cloned().zip(c.iter().cloned()),
        )
    }

    /// Checks `g dx - Σ c_b b dx = d_f h` by expansion.
    pub fn verify_witness(&self, g: &Poly<R>, c: &[R::Elem], h: &Form<R>) -> bool {
        let lhs = Form::top(g.sub(&self.from_coordinates(c)));
        self.complex.d(h) == lhs
    }

    /// The primitive `h` for a reduction `c` of `g`, verified by expansion.
    pub fn exactness_witness(&self, g: &Poly<R>, c: &[R::Elem]) -> Result<Form<R>> {
        let red = self.reduce(g)?;
        if red.coordinates != c || !self.verify_witness(g, c, &red.witness) {
            return Err(Error::WitnessMismatch);
        }
        Ok(red.witness)
    }
}

/// Outcome of [`quadratic_rank_check`].
#[derive(Clone, Debug)]
pub struct QuadraticReport<R: Ring> {
    pub degree_bound: u32,
    /// `x^m dx ≡ c_m dx` for every monomial of degree at most the bound.
    pub classes: Vec<(Monomial, R::Elem)>,
    /// Every `x^m dx - c_m dx = d_f h_m` identity expanded to zero.
    pub witnesses_verified: bool,
    /// The functional `c` kills `d_f` of every basis (n-1)-form of degree
    /// below the bound, so the image of `d_f` is exactly its kernel there.
    pub image_in_kernel: bool,
    /// `[dx¹…dxⁿ]` reduces to 1.
    pub top_class_normalized: bool,
}

impl<R: Ring> QuadraticReport<R> {
    pub fn passed(&self) -> bool {
        self.witnesses_verified && self.image_in_kernel && self.top_class_normalized
    }
}

/// Rank-one check of top cohomology for `f = ½ xᵀAx` over an arbitrary ring,
/// on polynomial degrees up to `degree_bound`.
///
/// Only `df = (Ax)·dx` is used, so no division by 2 is needed. With
/// `B = A⁻¹` one has `x_k = Σ_a B_{ka} ∂_a f`, whence
/// `x_k h dx ≡ -Σ_a B_{ka} ∂_a h dx`.
pub fn quadratic_rank_check<R: Ring>(a: &Matrix<R>, degree_bound: u32) -> Result<QuadraticReport<R>> {
    if !a.is_symmetric() {
        return Err(Error::MatrixNotSymmetric);
    }
    let ring = a.ring().clone();
    let n = a.rows();
    let b = a.inverse()?;
    let x: Vec<Poly<R>> = (0..n).map(|i| Poly::var(&ring, n, i)).collect();
    let df: Vec<Poly<R>> = (0..n)
        .map(|i| {
            let mut p = Poly::zero(&ring, n);
            for (j, xj) in x.iter().enumerate() {
                p = p.add(&xj.scale(a.get(i, j)));
            }
            p
        })
        .collect();
    let complex = TwistedComplex::from_closed_form(df)?;

    let mut monomials: Vec<Monomial> = all_monomials(n, degree_bound);
    monomials.sort();
    let mut table: HashMap<Monomial, (R::Elem, Form<R>)> = HashMap::new();
    for m in &monomials {
        if m.is_one() {
            table.insert(m.clone(), (ring.one(), Form::zero(&ring, n)));
            continue;
        }
        let k = (0..n).find(|&i| m.exponents()[i] > 0).unwrap();
        let g1 = m.lower(k).unwrap();
        let g1_poly = Poly::term(&ring, g1.clone(), ring.one());
        let mut c = ring.zero();
        let mut h = Form::zero(&ring, n);
        for a_idx in 0..n {
            let bk = b.get(k, a_idx);
            if ring.is_zero(bk) {
                continue;
            }
            let (s, negative) = complement(n, a_idx);
            let piece = g1_poly.scale(bk);
            h.add_component(s, &if negative { piece.neg() } else { piece });
            let e = g1.exponents()[a_idx];
            if e > 0 {
                let (c_low, h_low) = &table[&g1.lower(a_idx).unwrap()];
                let coeff = ring.neg(&ring.mul(bk, &ring.from_i64(e as i64)));
                c = ring.add(&c, &ring.mul(&coeff, c_low));
                h = h.add(&h_low.scale(&coeff));
            }
        }
        table.insert(m.clone(), (c, h));
    }

    let mut witnesses_verified = true;
    for m in &monomials {
        let (c, h) = &table[m];
        let lhs = Form::top(Poly::term(&ring, m.clone(), ring.one()).sub(&Poly::constant(&ring, n, c.clone())));
        if complex.d(h) != lhs {
            witnesses_verified = false;
            break;
        }
    }

    let functional = |p: &Poly<R>| -> Option<R::Elem> {
        let mut acc = ring.zero();
        for (m, coeff) in p.terms() {
            let (c, _) = table.get(m)?;
            acc = ring.add(&acc, &ring.mul(coeff, c));
        }
        Some(acc)
    };
    let mut image_in_kernel = true;
    if degree_bound >= 1 {
        'outer: for m in all_monomials(n, degree_bound - 1) {
            for a_idx in 0..n {
                let (s, _) = complement(n, a_idx);
                let w = Form::monomial(Poly::term(&ring, m.clone(), ring.one()), s);
                let top = complex.d(&w).top_coefficient();
                if functional(&top).is_none_or(|v| !ring.is_zero(&v)) {
                    image_in_kernel = false;
                    break 'outer;
                }
            }
        }
    }
    let top_class_normalized = ring.is_one(&table[&Monomial::one(n)].0);
    let classes = monomials
        .iter()
        .map(|m| (m.clone(), table[m].0.clone()))
        .collect();
    Ok(QuadraticReport {
        degree_bound,
        classes,
        witnesses_verified,
        image_in_kernel,
        top_class_normalized,
    })
}

/// All monomials in `n` variables of total degree at most `d`.
pub fn all_monomials(n: usize, d: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut e = vec![0u32; n];
    fn rec(i: usize, left: u32, e: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if i == e.len() {
            out.push(Monomial::from_exponents(e.clone()));
            return;
        }
        for k in 0..=left {
            e[i] = k;
            rec(i + 1, left - k, e, out);
        }
        e[i] = 0;
    }
    rec(0, d, &mut e, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::RingSpec;
    use num_rational::BigRational;

    fn q() -> RingSpec {
        RingSpec::Rationals
    }

    fn rat(n: i64, d: i64) -> <RingSpec as Ring>::Elem {
        q().from_rational(&BigRational::new(n.into(), d.into())).unwrap()
    }

    #[test]
    fn basis_examples() {
        let r = q();
        let x = Poly::var(&r, 1, 0);
        let m = MilnorData::new(&x.pow(3)).unwrap();
        assert_eq!(m.basis_strings(), vec!["1", "x1"]);

        let x = Poly::var(&r, 2, 0);
        let y = Poly::var(&r, 2, 1);
        let m = MilnorData::new(&x.pow(3).add(&y.pow(3))).unwrap();
        assert_eq!(m.basis_strings(), vec!["1", "x1", "x2", "x1*x2"]);
        assert_eq!(m.mu(), 4);

        let x = Poly::var(&r, 1, 0);
        let m = MilnorData::new(&x.pow(2).scale(&rat(1, 2))).unwrap();
        assert_eq!(m.mu(), 1);
    }

    #[test]
    fn non_isolated_is_an_error() {
        let r = q();
        let x = Poly::var(&r, 2, 0);
        let y = Poly::var(&r, 2, 1);
        let err = MilnorData::new(&x.pow(2).mul(&y.pow(2))).unwrap_err();
        assert_eq!(err, Error::NotZeroDimensional);
    }

    #[test]
    fn reductions() {
        let r = q();
        let x = Poly::var(&r, 1, 0);
        let m = MilnorData::new(&x.pow(3).scale(&rat(1, 3))).unwrap();
        assert_eq!(m.reduce_nform(&x.pow(2)).unwrap(), vec![r.zero(), r.zero()]);
        assert_eq!(m.reduce_nform(&x).unwrap(), vec![r.zero(), r.one()]);
        let h = m.exactness_witness(&x.pow(2), &[r.zero(), r.zero()]).unwrap();
        assert_eq!(h, Form::function(Poly::one(&r, 1)));

        // x^5 = x^2 f', and x^2 f' dx = d_f(x^2) - 2x dx
        let m = MilnorData::new(&x.pow(4).scale(&rat(1, 4))).unwrap();
        let c = m.reduce_nform(&x.pow(5)).unwrap();
        assert_eq!(c, vec![r.zero(), r.from_i64(-2), r.zero()]);
        assert!(m.exactness_witness(&x.pow(5), &c).is_ok());
        assert_eq!(
            m.exactness_witness(&x.pow(5), &[r.zero(), r.from_i64(2), r.zero()]).unwrap_err(),
            Error::WitnessMismatch
        );
    }

    #[test]
    fn quartic_moment_witness() {
        let r = q();
        let x = Poly::var(&r, 1, 0);
        let m = MilnorData::new(&x.pow(2).scale(&rat(1, 2))).unwrap();
        let c = m.reduce_nform(&x.pow(4)).unwrap();
        assert_eq!(c, vec![r.from_i64(3)]);
        let h = m.exactness_witness(&x.pow(4), &c).unwrap();
        assert_eq!(
            m.complex().d(&h),
            Form::top(x.pow(4).sub(&Poly::from_i64(&r, 1, 3)))
        );
    }

    #[test]
    fn quadratic_examples() {
        let r = q();
        let a = Matrix::from_i64(&r, &[vec![1]]).unwrap();
        let rep = quadratic_rank_check(&a, 6).unwrap();
        assert!(rep.passed());
        let x2 = rep.classes.iter().find(|(m, _)| m.degree() == 2).unwrap();
        assert_eq!(x2.1, r.from_i64(-1));

        let z = RingSpec::Integers;
        let id = Matrix::from_i64(&z, &[vec![1, 0], vec![0, 1]]).unwrap();
        let rep = quadratic_rank_check(&id, 5).unwrap();
        assert!(rep.passed());
        let class = |e: Vec<u32>| {
            let m = Monomial::from_exponents(e);
            rep.classes.iter().find(|(k, _)| *k == m).unwrap().1.clone()
        };
        assert_eq!(class(vec![1, 1]), z.zero());
        assert_eq!(class(vec![2, 2]), z.one());
        assert_eq!(class(vec![0, 0]), z.one());

        let bad = Matrix::from_i64(&z, &[vec![2]]).unwrap();
        assert_eq!(quadratic_rank_check(&bad, 3).unwrap_err().name(), "MatrixNotInvertible");
    }

    #[test]
    fn quadratic_over_truncated_series() {
        let s = RingSpec::Integers.lambda_series(4).unwrap();
        // A = [[1, λ], [λ, -1]], determinant -1 - λ^2 is a unit
        let lam = s.series_var_pow(1);
        let a = Matrix::from_rows(&s, vec![vec![s.one(), lam.clone()], vec![lam, s.from_i64(-1)]]).unwrap();
        assert!(quadratic_rank_check(&a, 5).unwrap().passed());
    }
}
