//! One-parameter families `f_λ` on a fixed affine space: the Gauss–Manin
//! connection on top-degree classes and Picard–Fuchs operators.
//!
//! Classes are reduced over `QQ(λ)`. For a product family the connection
//! acts on `g dx` as `(∂_λ g + (∂_λ f) g) dx`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::form::{Form, TwistedComplex};
use crate::linalg::Matrix;
use crate::milnor::MilnorData;
use crate::poly::Poly;
use crate::ratfunc::{RatFunc, RatFuncField, UPoly};
use crate::ring::{Ring, RingSpec};

/// Number of rational parameter values used for the genericity test.
pub const GENERICITY_SAMPLES: usize = 3;

#[derive(Clone, Debug)]
pub struct FamilyProblem {
    field: RatFuncField,
    f: Poly<RatFuncField>,
    df_dlambda: Poly<RatFuncField>,
    milnor: MilnorData<RatFuncField>,
    samples: Vec<(BigRational, usize)>,
}

impl FamilyProblem {
    /// Builds the family and checks that `mu` at a few seeded random
    /// rational parameter values equals the generic `mu` (a proxy for the
    /// cohomologies forming a vector bundle).
    pub fn new(f: &Poly<RatFuncField>, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut points = Vec::new();
        let mut attempts = 0;
        while points.len() < GENERICITY_SAMPLES {
            attempts += 1;
            if attempts > 100 * GENERICITY_SAMPLES {
                return Err(Error::GenericityFailure("no admissible sample points".into()));
            }
            let num: i64 = rng.gen_range(-97..=97);
            let den: i64 = rng.gen_range(1..=13);
            let t = BigRational::new(num.into(), den.into());
            if specialize(f, &t).is_some() && !points.contains(&t) {
                points.push(t);
            }
        }
        Self::with_sample_points(f, &points)
    }

    /// Same as [`FamilyProblem::new`] with explicit parameter values.
    pub fn with_sample_points(f: &Poly<RatFuncField>, points: &[BigRational]) -> Result<Self> {
        let field = f.ring().clone();
        let milnor = MilnorData::new(f)?;
        let mu = milnor.mu();
        let mut samples = Vec::new();
        for t in points {
            let ft = specialize(f, t).ok_or_else(|| {
                Error::GenericityFailure(format!("coefficient pole at lambda = {t}"))
            })?;
            let mu_t = match MilnorData::new(&ft) {
                Ok(m) => m.mu(),
                Err(Error::NotZeroDimensional) => {
                    return Err(Error::GenericityFailure(format!(
                        "non-isolated critical points at lambda = {t}"
                    )))
                }
                Err(e) => return Err(e),
            };
            if mu_t != mu {
                return Err(Error::GenericityFailure(format!(
                    "mu = {mu_t} at lambda = {t}, generic mu = {mu}"
                )));
            }
            samples.push((t.clone(), mu_t));
        }
        Ok(FamilyProblem {
            field,
            df_dlambda: d_lambda(f),
            f: f.clone(),
            milnor,
            samples,
        })
    }

    pub fn field(&self) -> &RatFuncField {
        &self.field
    }

    pub fn f(&self) -> &Poly<RatFuncField> {
        &self.f
    }

    pub fn milnor(&self) -> &MilnorData<RatFuncField> {
        &self.milnor
    }

    pub fn mu(&self) -> usize {
        self.milnor.mu()
    }

    /// Parameter values used by the genericity test, with their `mu`.
    pub fn samples(&self) -> &[(BigRational, usize)] {
        &self.samples
    }

    /// `∂_λ g + (∂_λ f) g`.
    pub fn nabla_poly(&self, g: &Poly<RatFuncField>) -> Poly<RatFuncField> {
        d_lambda(g).add(&self.df_dlambda.mul(g))
    }

    /// Gauss–Manin connection on Milnor coordinates.
    pub fn gm_connection_apply(&self, c: &[RatFunc]) -> Result<Vec<RatFunc>> {
        if c.len() != self.mu() {
            return Err(Error::DimensionMismatch(format!(
                "{} coordinates for a basis of size {}",
                c.len(),
                self.mu()
            )));
        }
        let g = self.milnor.from_coordinates(c);
        self.milnor.reduce_nform(&self.nabla_poly(&g))
    }

    pub fn lift_independence_check(&self, eta: &[Poly<RatFuncField>], omega: &Form<RatFuncField>) -> LiftReport<RatFuncField> {
        lift_independence_check(&self.f, eta, omega)
    }

    /// Iterates the connection on `[g0 dx]` until the first linear
    /// dependence over `QQ(λ)` and returns it as a normalized operator.
    pub fn picard_fuchs(&self, g0: &Poly<RatFuncField>) -> Result<PicardFuchsOperator> {
        let k = &self.field;
        let mu = self.mu();
        let mut chain = vec![self.milnor.reduce_nform(g0)?];
        for r in 0..=mu {
            // columns v_0..v_r
            let rows: Vec<Vec<RatFunc>> = (0..mu)
                .map(|i| chain.iter().map(|v| v[i].clone()).collect())
                .collect();
            let ns = if mu == 0 {
                vec![vec![k.one(); chain.len()]]
            } else {
                Matrix::from_rows(k, rows)?.nullspace()
            };
            if let Some(v) = ns.into_iter().find(|v| !k.is_zero(&v[r])) {
                let op = PicardFuchsOperator::from_relation(&v);
                let residual = op.apply(k, &chain);
                if residual.iter().any(|x| !k.is_zero(x)) {
                    return Err(Error::InvalidArgument("operator does not annihilate the chain".into()));
                }
                return Ok(op);
            }
            if r == mu {
                break;
            }
            let next = self.gm_connection_apply(&chain[r])?;
            chain.push(next);
        }
        Err(Error::NoDependence(mu))
    }
}

/// `f` at `λ = t`, or `None` when a coefficient has a pole there.
pub fn specialize(f: &Poly<RatFuncField>, t: &BigRational) -> Option<Poly<RingSpec>> {
    let q = RingSpec::Rationals;
    let mut out = Poly::zero(&q, f.nvars());
    for (m, c) in f.terms() {
        let v = c.eval(t)?;
        out.add_term(m.clone(), &q.from_rational(&v).unwrap());
    }
    Some(out)
}

/// Coefficientwise `∂/∂λ`.
pub fn d_lambda(g: &Poly<RatFuncField>) -> Poly<RatFuncField> {
    g.map_coeffs(g.ring(), RatFunc::derivative)
}

/// `Σ_i p_i(λ) ∂_λ^i` with integer coefficients of content one and a
/// positive leading coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PicardFuchsOperator {
    coefficients: Vec<UPoly>,
}

impl PicardFuchsOperator {
    fn from_relation(v: &[RatFunc]) -> Self {
        // clear the polynomial denominators
        let mut l = UPoly::one();
        for c in v {
            let g = l.gcd(c.denominator());
            l = l.mul(&c.denominator().div_rem(&g).0);
        }
        let mut polys: Vec<UPoly> = v
            .iter()
            .map(|c| c.numerator().mul(&l.div_rem(c.denominator()).0))
            .collect();
        let g = polys.iter().fold(UPoly::zero(), |acc, p| acc.gcd(p));
        if !g.is_zero() {
            polys = polys.iter().map(|p| p.div_rem(&g).0).collect();
        }
        // integer coefficients with content one
        let den = polys.iter().fold(BigInt::one(), |acc, p| acc.lcm(&p.denominator_lcm()));
        let scaled: Vec<UPoly> = polys
            .iter()
            .map(|p| p.scale(&BigRational::from_integer(den.clone())))
            .collect();
        let content = scaled.iter().fold(BigInt::zero(), |acc, p| acc.gcd(&p.content()));
        let mut unit = BigRational::new(BigInt::one(), content);
        let lead = scaled
            .iter()
            .rev()
            .find(|p| !p.is_zero())
            .and_then(|p| p.leading().cloned())
            .unwrap_or_else(BigRational::one);
        if lead.is_negative() {
            unit = -unit;
        }
        let mut coefficients: Vec<UPoly> = scaled.iter().map(|p| p.scale(&unit)).collect();
        while coefficients.last().is_some_and(UPoly::is_zero) {
            coefficients.pop();
        }
        PicardFuchsOperator { coefficients }
    }

    pub fn order(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }

    /// `p_0, …, p_r`.
    pub fn coefficients(&self) -> &[UPoly] {
        &self.coefficients
    }

    pub fn coefficient_strings(&self, var: &str) -> Vec<String> {
        self.coefficients.iter().map(|p| p.format(var)).collect()
    }

    /// `Σ p_i v_i` for a chain `v_i = ∇^i v_0` of coordinate vectors.
    pub fn apply(&self, k: &RatFuncField, chain: &[Vec<RatFunc>]) -> Vec<RatFunc> {
        let dim = chain.first().map(Vec::len).unwrap_or(0);
        let mut out = vec![k.zero(); dim];
        for (p, v) in self.coefficients.iter().zip(chain) {
            let pr = k.from_poly(p.clone());
            for (o, x) in out.iter_mut().zip(v) {
                *o = k.add(o, &k.mul(&pr, x));
            }
        }
        out
    }
}

/// Expansion of `{d_f, ι_η} = L_η + η(f)` on a given form.
#[derive(Clone, Debug)]
pub struct LiftReport<R: Ring> {
    /// `(L_η + η(f)) ω`, with `L_η` from the coordinate formula.
    pub action: Form<R>,
    /// `d_f(ι_η ω) + ι_η(d_f ω)`.
    pub anticommutator: Form<R>,
    /// `ι_η ω`, a primitive of the action whenever `d_f ω = 0`.
    pub primitive: Form<R>,
    pub identity_holds: bool,
    /// `d_f ω = 0`, so the action is `d_f`-exact with the primitive above.
    pub omega_closed: bool,
}

pub fn lift_independence_check<R: Ring>(f: &Poly<R>, eta: &[Poly<R>], omega: &Form<R>) -> LiftReport<R> {
    let c = TwistedComplex::new(f);
    let n = f.nvars();
    let mut eta_f = Poly::zero(f.ring(), n);
    for (i, e) in eta.iter().enumerate() {
        eta_f = eta_f.add(&e.mul(&f.derivative(i)));
    }
    let action = omega.lie_derivative(eta).add(&omega.mul_poly(&eta_f));
    let primitive = omega.contract(eta);
    let d_omega = c.d(omega);
    let anticommutator = c.d(&primitive).add(&d_omega.contract(eta));
    LiftReport {
        identity_holds: action == anticommutator,
        omega_closed: d_omega.is_zero(),
        action,
        anticommutator,
        primitive,
    }
}
