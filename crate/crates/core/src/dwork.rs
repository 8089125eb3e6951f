//! Dwork's Frobenius on the one-variable complex `d + π df` over
//! `Z_p[π]/(π^{p-1} + p)` truncated at `p^N`.
//!
//! Series with factorial denominators (`exp(πz)` and friends) are first
//! computed exactly in `QQ(π)`, where `π^k / k!` cancels, and only then
//! reduced modulo `p^N`. The reduction of `Ψ(dx)` back to `dx` divides by π
//! repeatedly; it runs on [`Approx`] values that carry their π-exponent and
//! absolute precision explicitly.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::milnor::MilnorData;
use crate::poly::Poly;
use crate::ring::{int_valuation, rat_valuation, PiAdicRing, Ring, RingSpec};

/// Exact arithmetic in `QQ(π)`, `π^{p-1} = -p`, used to stage series whose
/// coefficients have factorial denominators.
#[derive(Clone, Debug)]
pub struct QPi {
    p: u64,
}

impl QPi {
    pub fn new(p: u64) -> Self {
        QPi { p }
    }

    fn d(&self) -> usize {
        (self.p - 1) as usize
    }

    pub fn zero(&self) -> Vec<BigRational> {
        vec![BigRational::zero(); self.d()]
    }

    pub fn rational(&self, q: BigRational) -> Vec<BigRational> {
        let mut v = self.zero();
        v[0] = q;
        v
    }

    pub fn pi_pow(&self, k: u64) -> Vec<BigRational> {
        let d = self.d() as u64;
        let mut v = self.zero();
        let c = BigInt::from(-(self.p as i64)).pow((k / d) as u32);
        v[(k % d) as usize] = BigRational::from_integer(c);
        v
    }

    pub fn add(&self, a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    pub fn scale(&self, c: &BigRational, a: &[BigRational]) -> Vec<BigRational> {
        a.iter().map(|x| c * x).collect()
    }

    pub fn mul(&self, a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
        let d = self.d();
        let mut full = vec![BigRational::zero(); 2 * d - 1];
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
        let p = BigRational::from_integer(BigInt::from(self.p));
        let mut out: Vec<BigRational> = full[..d].to_vec();
        for k in d..(2 * d - 1) {
            let t = &p * &full[k];
            out[k - d] -= t;
        }
        out
    }

    /// Valuation in π-units, `None` for zero.
    pub fn valuation(&self, a: &[BigRational]) -> Option<i64> {
        a.iter()
            .enumerate()
            .filter_map(|(i, c)| rat_valuation(c, self.p).map(|v| v * (self.p as i64 - 1) + i as i64))
            .min()
    }

    /// Image in `Z[π]/(π^{p-1}+p, p^N)`; needs π-integral input.
    pub fn reduce(&self, ring: &PiAdicRing, a: &[BigRational]) -> Result<Vec<BigInt>> {
        let mut out = ring.zero();
        for (i, c) in a.iter().enumerate() {
            let v = ring.rational(c).ok_or_else(|| {
                Error::DenominatorNotInvertible(c.to_string(), ring.to_string())
            })?;
            out = ring.add(&out, &ring.mul(&v, &ring.pi_pow(i as u64)));
        }
        Ok(out)
    }
}

/// Power series `a_0 + … + a_D x^D` over the π-adic ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncSeries {
    ring: PiAdicRing,
    coeffs: Vec<Vec<BigInt>>,
    /// p-adic digits known to be unreliable at the top of every coefficient.
    precision_loss: u32,
}

impl TruncSeries {
    pub fn zero(ring: &PiAdicRing, cutoff: usize) -> Self {
        TruncSeries {
            ring: ring.clone(),
            coeffs: vec![ring.zero(); cutoff + 1],
            precision_loss: 0,
        }
    }

    pub fn from_coefficients(ring: &PiAdicRing, cutoff: usize, mut coeffs: Vec<Vec<BigInt>>) -> Self {
        coeffs.resize(cutoff + 1, ring.zero());
        coeffs.truncate(cutoff + 1);
        TruncSeries {
            ring: ring.clone(),
            coeffs,
            precision_loss: 0,
        }
    }

    /// A one-variable polynomial over `ZZ` or `QQ` with p-integral
    /// coefficients.
    pub fn from_poly(ring: &PiAdicRing, cutoff: usize, g: &Poly<RingSpec>) -> Result<Self> {
        let mut s = Self::zero(ring, cutoff);
        for (m, c) in g.terms() {
            let e = m.exponents()[0] as usize;
            if e > cutoff {
                continue;
            }
            let q = spec_rational(g.ring(), c)?;
            s.coeffs[e] = ring
                .rational(&q)
                .ok_or_else(|| Error::DenominatorNotInvertible(q.to_string(), ring.to_string()))?;
        }
        Ok(s)
    }

    pub fn ring(&self) -> &PiAdicRing {
        &self.ring
    }

    pub fn cutoff(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coefficients(&self) -> &[Vec<BigInt>] {
        &self.coeffs
    }

    pub fn coefficient(&self, i: usize) -> &[BigInt] {
        &self.coeffs[i]
    }

    pub fn precision_loss(&self) -> u32 {
        self.precision_loss
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| self.ring.is_zero(c))
    }

    pub fn add(&self, o: &Self) -> Self {
        let r = &self.ring;
        TruncSeries {
            ring: r.clone(),
            coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| r.add(a, b)).collect(),
            precision_loss: self.precision_loss.max(o.precision_loss),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let r = &self.ring;
        TruncSeries {
            ring: r.clone(),
            coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| r.sub(a, b)).collect(),
            precision_loss: self.precision_loss.max(o.precision_loss),
        }
    }

    pub fn scale(&self, c: &[BigInt]) -> Self {
        let r = &self.ring;
        let c = c.to_vec();
        TruncSeries {
            ring: r.clone(),
            coeffs: self.coeffs.iter().map(|a| r.mul(a, &c)).collect(),
            precision_loss: self.precision_loss,
        }
    }

    /// Product truncated at the smaller cutoff.
    pub fn mul(&self, o: &Self) -> Self {
        let r = &self.ring;
        let d = self.cutoff().min(o.cutoff());
        let mut out = vec![r.zero(); d + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(d + 1) {
            if r.is_zero(a) {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate().take(d + 1 - i) {
                if !r.is_zero(b) {
                    out[i + j] = r.add(&out[i + j], &r.mul(a, b));
                }
            }
        }
        TruncSeries {
            ring: r.clone(),
            coeffs: out,
            precision_loss: self.precision_loss.max(o.precision_loss),
        }
    }

    /// `a(x) ↦ x^k a(x)`, truncated.
    pub fn shift(&self, k: usize) -> Self {
        let d = self.cutoff();
        let mut out = vec![self.ring.zero(); d + 1];
        for i in 0..=d {
            if i + k <= d {
                out[i + k] = self.coeffs[i].clone();
            }
        }
        TruncSeries {
            ring: self.ring.clone(),
            coeffs: out,
            precision_loss: self.precision_loss,
        }
    }

    /// `a(x) ↦ a(x^q)`, truncated.
    pub fn substitute_power(&self, q: usize) -> Self {
        let d = self.cutoff();
        let mut out = vec![self.ring.zero(); d + 1];
        for i in 0..=d {
            if i * q <= d {
                out[i * q] = self.coeffs[i].clone();
            }
        }
        TruncSeries {
            ring: self.ring.clone(),
            coeffs: out,
            precision_loss: self.precision_loss,
        }
    }

    /// Formal derivative; the top coefficient becomes unknown and is set to 0.
    pub fn derivative(&self) -> Self {
        let r = &self.ring;
        let d = self.cutoff();
        let mut out = vec![r.zero(); d + 1];
        for i in 1..=d {
            out[i - 1] = r.mul(&self.coeffs[i], &r.from_i64(i as i64));
        }
        TruncSeries {
            ring: r.clone(),
            coeffs: out,
            precision_loss: self.precision_loss,
        }
    }

    /// π-adic valuations of the coefficients (`None` for zero).
    pub fn valuations(&self) -> Vec<Option<i64>> {
        self.coeffs.iter().map(|c| self.ring.valuation(c)).collect()
    }

    /// Largest `c` with `v(a_i) ≥ c·i` for all nonzero `a_i`, `i ≥ 1`,
    /// in p-units (intercept fixed at 0).
    pub fn overconvergence_slope(&self) -> Option<BigRational> {
        let pm1 = self.ring.prime() as i64 - 1;
        self.valuations()
            .iter()
            .enumerate()
            .skip(1)
            .filter_map(|(i, v)| v.map(|v| BigRational::new(v.into(), (pm1 * i as i64).into())))
            .min()
    }
}

fn spec_rational(spec: &RingSpec, c: &crate::ring::Value) -> Result<BigRational> {
    use crate::ring::Value;
    match (spec, c) {
        (RingSpec::Integers, Value::Int(n)) => Ok(BigRational::from_integer(n.clone())),
        (RingSpec::Rationals, Value::Rat(q)) => Ok(q.clone()),
        _ => Err(Error::InvalidArgument(format!(
            "expected integer or rational coefficients, got {spec}"
        ))),
    }
}

/// `exp(πz)·exp(-πz^p)` up to degree `cutoff`, multiplied in `QQ(π)` and
/// then reduced.
pub fn dwork_theta(ring: &PiAdicRing, cutoff: usize) -> Result<TruncSeries> {
    let p = ring.prime();
    // expected valuation at the cutoff, D (p-1)/p^2, must stay below N
    if (cutoff as u64) * (p - 1) >= ring.precision() as u64 * p * p {
        return Err(Error::PrecisionExhausted(format!(
            "cutoff {cutoff} needs more than {} p-adic digits",
            ring.precision()
        )));
    }
    let k = QPi::new(p);
    let mut e1 = Vec::with_capacity(cutoff + 1);
    let mut fact = BigInt::one();
    for i in 0..=cutoff {
        if i > 0 {
            fact *= i;
        }
        e1.push(k.scale(&BigRational::new(BigInt::one(), fact.clone()), &k.pi_pow(i as u64)));
    }
    let mut out = vec![k.zero(); cutoff + 1];
    let mut fact = BigInt::one();
    let mut j = 0usize;
    while j * (p as usize) <= cutoff {
        if j > 0 {
            fact *= j;
        }
        let sign = if j % 2 == 1 { -BigInt::one() } else { BigInt::one() };
        let c = k.scale(&BigRational::new(sign, fact.clone()), &k.pi_pow(j as u64));
        let base = j * p as usize;
        for (i, a) in e1.iter().enumerate().take(cutoff + 1 - base) {
            out[base + i] = k.add(&out[base + i], &k.mul(&c, a));
        }
        j += 1;
    }
    let coeffs = out.iter().map(|c| k.reduce(ring, c)).collect::<Result<_>>()?;
    Ok(TruncSeries::from_coefficients(ring, cutoff, coeffs))
}

/// `exp(π g)` for a polynomial `g` with `g(0) = 0`, exact in `QQ(π)` via
/// `j e_j = π Σ_i i g_i e_{j-i}`.
pub fn exp_pi(p: u64, g: &[BigRational], cutoff: usize) -> Vec<Vec<BigRational>> {
    let k = QPi::new(p);
    let pi = k.pi_pow(1);
    let mut e = vec![k.rational(BigRational::one())];
    for j in 1..=cutoff {
        let mut acc = k.zero();
        for i in 1..=j.min(g.len().saturating_sub(1)) {
            if g[i].is_zero() {
                continue;
            }
            let c = &g[i] * BigRational::from_integer(i.into());
            acc = k.add(&acc, &k.scale(&c, &e[j - i]));
        }
        let acc = k.scale(&BigRational::new(BigInt::one(), j.into()), &k.mul(&pi, &acc));
        e.push(acc);
    }
    e
}

/// Data for Frobenius on the complex `d + π df` in one variable.
#[derive(Clone, Debug)]
pub struct FrobContext {
    ring: PiAdicRing,
    cutoff: usize,
    f: Vec<BigRational>,
    /// `exp(π(f(x^p) - f(x)))` up to the cutoff.
    factor: TruncSeries,
}

impl FrobContext {
    pub fn new(ring: &PiAdicRing, f: &Poly<RingSpec>, cutoff: usize) -> Result<Self> {
        if f.nvars() != 1 {
            return Err(Error::DimensionMismatch(format!(
                "Frobenius is implemented in one variable, f has {}",
                f.nvars()
            )));
        }
        let p = ring.prime();
        let deg = f.degree().unwrap_or(0) as usize;
        let mut fc = vec![BigRational::zero(); deg + 1];
        for (m, c) in f.terms() {
            let q = spec_rational(f.ring(), c)?;
            if rat_valuation(&q, p).is_some_and(|v| v < 0) {
                return Err(Error::DenominatorNotInvertible(q.to_string(), ring.to_string()));
            }
            fc[m.exponents()[0] as usize] = q;
        }
        // g = f(x^p) - f(x), up to the cutoff
        let mut g = vec![BigRational::zero(); cutoff + 1];
        for (i, c) in fc.iter().enumerate() {
            if i <= cutoff {
                g[i] -= c;
            }
            if i * (p as usize) <= cutoff {
                g[i * p as usize] += c;
            }
        }
        let staged = exp_pi(p, &g, cutoff);
        let k = QPi::new(p);
        let coeffs = staged.iter().map(|c| k.reduce(ring, c)).collect::<Result<_>>()?;
        Ok(FrobContext {
            ring: ring.clone(),
            cutoff,
            f: fc,
            factor: TruncSeries::from_coefficients(ring, cutoff, coeffs),
        })
    }

    pub fn ring(&self) -> &PiAdicRing {
        &self.ring
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn correcting_factor(&self) -> &TruncSeries {
        &self.factor
    }

    fn f_prime(&self) -> TruncSeries {
        let r = &self.ring;
        let mut c = vec![r.zero(); self.cutoff + 1];
        for (i, q) in self.f.iter().enumerate().skip(1) {
            if i - 1 <= self.cutoff {
                let v = q * BigRational::from_integer(i.into());
                c[i - 1] = r.rational(&v).expect("p-integral f");
            }
        }
        TruncSeries::from_coefficients(r, self.cutoff, c)
    }

    /// `Ψ(η) = F · η(x^p)` on functions.
    pub fn apply_function(&self, eta: &TruncSeries) -> TruncSeries {
        self.factor.mul(&eta.substitute_power(self.ring.prime() as usize))
    }

    /// `Ψ(ω dx) = F · ω(x^p) · p x^{p-1} dx`, on the coefficient of `dx`.
    pub fn frobenius_apply(&self, omega: &TruncSeries) -> TruncSeries {
        let p = self.ring.prime();
        let pe = self.ring.from_bigint(&BigInt::from(p));
        self.factor
            .mul(&omega.substitute_power(p as usize).shift(p as usize - 1))
            .scale(&pe)
    }

    /// Coefficient of `dx` in `d_{πf} η = (η' + π f' η) dx`.
    pub fn twisted_d(&self, eta: &TruncSeries) -> TruncSeries {
        let pi = self.ring.pi();
        eta.derivative().add(&self.f_prime().mul(eta).scale(&pi))
    }

    /// Highest degree at which both sides of the chain-map identity are
    /// determined by data below the cutoff.
    pub fn reliable_degree(&self) -> usize {
        let fdeg = self.f.len().saturating_sub(1);
        self.cutoff.saturating_sub(fdeg.saturating_sub(1).max(1))
    }

    /// `Ψ(d_{πf} η) - d_{πf}(Ψ η)` restricted to reliable degrees.
    pub fn chain_residual(&self, eta: &TruncSeries) -> TruncSeries {
        let lhs = self.frobenius_apply(&self.twisted_d(eta));
        let rhs = self.twisted_d(&self.apply_function(eta));
        let top = self.reliable_degree();
        let mut diff = lhs.sub(&rhs);
        for c in diff.coeffs.iter_mut().skip(top + 1) {
            *c = self.ring.zero();
        }
        diff
    }
}

/// A π-adic number `π^shift · unit`, known modulo `π^prec` (absolute
/// precision, π-units). The ring stores `unit` modulo `π^{N(p-1)}`, so
/// `prec - shift` never exceeds the ring's capacity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Approx {
    pub unit: Vec<BigInt>,
    pub shift: i64,
    pub prec: i64,
}

impl Approx {
    pub fn exact(ring: &PiAdicRing, y: Vec<BigInt>) -> Self {
        Self::normalized(ring, y, 0, ring.pi_precision())
    }

    pub fn zero(ring: &PiAdicRing, prec: i64) -> Self {
        Approx {
            unit: ring.zero(),
            shift: prec,
            prec,
        }
    }

    fn normalized(ring: &PiAdicRing, y: Vec<BigInt>, shift: i64, prec: i64) -> Self {
        let prec = prec.min(shift + ring.pi_precision());
        match ring.valuation(&y) {
            Some(v) if shift + v < prec => {
                let mut u = y;
                for _ in 0..v {
                    u = ring.div_pi(&u).expect("positive valuation");
                }
                Approx {
                    unit: u,
                    shift: shift + v,
                    prec,
                }
            }
            _ => Self::zero(ring, prec),
        }
    }

    pub fn is_zero(&self, ring: &PiAdicRing) -> bool {
        ring.is_zero(&self.unit)
    }

    /// Valuation, or the precision when the value is indistinguishable from 0.
    pub fn valuation(&self, ring: &PiAdicRing) -> i64 {
        if self.is_zero(ring) {
            self.prec
        } else {
            self.shift
        }
    }

    pub fn add(&self, ring: &PiAdicRing, o: &Self) -> Self {
        if self.is_zero(ring) {
            return Self::normalized(ring, o.unit.clone(), o.shift, o.prec.min(self.prec));
        }
        if o.is_zero(ring) {
            return Self::normalized(ring, self.unit.clone(), self.shift, self.prec.min(o.prec));
        }
        let s = self.shift.min(o.shift);
        let a = ring.mul(&self.unit, &ring.pi_pow((self.shift - s) as u64));
        let b = ring.mul(&o.unit, &ring.pi_pow((o.shift - s) as u64));
        Self::normalized(ring, ring.add(&a, &b), s, self.prec.min(o.prec))
    }

    pub fn neg(&self, ring: &PiAdicRing) -> Self {
        Approx {
            unit: ring.neg(&self.unit),
            shift: self.shift,
            prec: self.prec,
        }
    }

    pub fn mul(&self, ring: &PiAdicRing, o: &Self) -> Self {
        let prec = (self.prec + o.valuation(ring)).min(o.prec + self.valuation(ring));
        if self.is_zero(ring) || o.is_zero(ring) {
            return Self::zero(ring, prec);
        }
        Self::normalized(ring, ring.mul(&self.unit, &o.unit), self.shift + o.shift, prec)
    }

    /// Exact multiplication by an integer `k = p^v u`.
    pub fn mul_int(&self, ring: &PiAdicRing, k: i64) -> Self {
        let p = ring.prime() as i64;
        if k == 0 {
            return Self::zero(ring, self.prec);
        }
        let v = int_valuation(&BigInt::from(k), p as u64).unwrap() as i64;
        let u = k / p.pow(v as u32);
        // p = -π^{p-1}
        let sign = if v % 2 == 1 { -u } else { u };
        let shift = v * (p - 1);
        Approx {
            unit: ring.mul(&self.unit, &ring.from_i64(sign)),
            shift: self.shift + shift,
            prec: self.prec + shift,
        }
    }

    pub fn div_pi(&self) -> Self {
        Approx {
            unit: self.unit.clone(),
            shift: self.shift - 1,
            prec: self.prec - 1,
        }
    }

    /// The value as a ring element, when it is π-integral.
    pub fn to_ring(&self, ring: &PiAdicRing) -> Option<Vec<BigInt>> {
        if self.shift < 0 {
            return None;
        }
        Some(ring.mul(&self.unit, &ring.pi_pow(self.shift as u64)))
    }
}

/// Eigenvalue of Frobenius on the one-dimensional `H¹` of `d + π df`.
#[derive(Clone, Debug, PartialEq)]
pub struct FrobeniusEigen {
    pub prime: u64,
    pub alpha: Approx,
    /// `v(α)` in p-units.
    pub valuation: BigRational,
    /// π-adic precision up to which `α` is trusted: the smaller of the
    /// arithmetic precision and the first neglected contribution.
    pub horizon: i64,
    /// Smallest valuation among the neglected contributions of degree
    /// `cutoff+1 .. 2·cutoff`.
    pub tail_valuation: i64,
    /// π-adic digits of `α` below the horizon.
    pub digits: Vec<u64>,
    /// `α²` modulo `p^k`, `k = ⌊(horizon + v(α)) / (p-1)⌋`, as a
    /// symmetric residue.
    pub alpha_squared_mod: BigInt,
    pub alpha_squared_digits: u32,
}

impl FrobeniusEigen {
    /// `α² ≡ (-1)^{(p-1)/2} p` within the horizon (meaningful for quadratic f).
    pub fn squares_to_gauss_sum_sign(&self, ring: &PiAdicRing) -> bool {
        let p = self.prime as i64;
        let target = if (p - 1) / 2 % 2 == 0 { p } else { -p };
        let a2 = self.alpha.mul(ring, &self.alpha);
        let diff = a2.add(ring, &Approx::exact(ring, ring.from_i64(target)).neg(ring));
        let needed = self.horizon + self.alpha.valuation(ring);
        diff.valuation(ring) >= needed.min(diff.prec)
            && diff.prec >= needed.min(ring.pi_precision())
    }
}

/// Applies Frobenius to `[dx]` and reduces back to the basis `{dx}`.
///
/// Requires `mu(f) = 1`, i.e. `f' = a x + b` with `a` a p-adic unit; then
/// `x^{k+1} dx ≡ -(k / (π a)) x^{k-1} dx - (b / a) x^k dx`.
pub fn frobenius_eigenvalue(ring: &PiAdicRing, f: &Poly<RingSpec>, cutoff: usize) -> Result<FrobeniusEigen> {
    if f.nvars() != 1 {
        return Err(Error::DimensionMismatch("eigenvalue extraction is one-variable".into()));
    }
    let q = RingSpec::Rationals;
    let fq = match f.ring() {
        RingSpec::Rationals => f.clone(),
        RingSpec::Integers => f.map_coeffs(&q, |c| q.from_bigint(match c {
            crate::ring::Value::Int(n) => n,
            _ => unreachable!(),
        })),
        other => {
            return Err(Error::InvalidArgument(format!(
                "f must have integer or rational coefficients, got {other}"
            )))
        }
    };
    let mu = match MilnorData::new(&fq) {
        Ok(m) => m.mu(),
        Err(Error::NotZeroDimensional) => return Err(Error::MilnorMismatch(usize::MAX, 1)),
        Err(e) => return Err(e),
    };
    if mu != 1 {
        return Err(Error::MilnorMismatch(mu, 1));
    }
    let p = ring.prime();
    let df = fq.derivative(0);
    let coeff = |k: u32| spec_rational(&q, &df.coeff(&crate::poly::Monomial::from_exponents(vec![k])));
    let (a, b) = (coeff(1)?, coeff(0)?);
    if rat_valuation(&a, p) != Some(0) {
        return Err(Error::InvalidArgument(format!("leading coefficient {a} of f' is not a p-adic unit")));
    }
    let to_ring = |x: &BigRational| {
        ring.rational(x)
            .ok_or_else(|| Error::DenominatorNotInvertible(x.to_string(), ring.to_string()))
    };
    let a_inv = to_ring(&a.recip())?;
    let b_over_a = Approx::exact(ring, to_ring(&(&b / &a))?);

    // F up to twice the cutoff; degrees above the cutoff estimate the tail
    let ctx = FrobContext::new(ring, f, 2 * cutoff)?;
    let factor = ctx.correcting_factor();
    let top = 2 * cutoff + p as usize - 1;
    let mut red: Vec<Approx> = Vec::with_capacity(top + 1);
    red.push(Approx::exact(ring, ring.one()));
    red.push(b_over_a.neg(ring));
    for k in 1..top {
        let t1 = red[k - 1]
            .mul_int(ring, k as i64)
            .mul(ring, &Approx::exact(ring, a_inv.clone()))
            .div_pi()
            .neg(ring);
        let t2 = red[k].mul(ring, &b_over_a).neg(ring);
        red.push(t1.add(ring, &t2));
    }
    let mut alpha = Approx::zero(ring, ring.pi_precision());
    let mut tail = i64::MAX;
    for (j, e) in factor.coefficients().iter().enumerate() {
        if ring.is_zero(e) {
            continue;
        }
        let term = Approx::exact(ring, e.clone())
            .mul_int(ring, p as i64)
            .mul(ring, &red[j + p as usize - 1]);
        if j <= cutoff {
            alpha = alpha.add(ring, &term);
        } else {
            tail = tail.min(term.valuation(ring));
        }
    }
    let horizon = alpha.prec.min(tail);
    let v = alpha.valuation(ring);
    if alpha.is_zero(ring) || v >= horizon {
        return Err(Error::PrecisionExhausted(format!(
            "alpha not determined below the horizon {horizon}"
        )));
    }
    if tail <= v {
        return Err(Error::ReductionDiverged(format!(
            "neglected terms of valuation {tail} do not contract below v(alpha) = {v}"
        )));
    }
    let value = alpha
        .to_ring(ring)
        .ok_or_else(|| Error::ReductionDiverged("alpha is not integral".into()))?;
    let digits = ring.digits(&value).into_iter().take(horizon as usize).collect();
    let k = ((horizon + v) / (p as i64 - 1)).min(ring.precision() as i64) as u32;
    let a2 = ring.mul(&value, &value);
    let modulus = BigInt::from(p).pow(k);
    let mut c0 = a2[0].mod_floor(&modulus);
    if &c0 * 2 > modulus {
        c0 -= &modulus;
    }
    Ok(FrobeniusEigen {
        prime: p,
        valuation: BigRational::new(v.into(), (p as i64 - 1).into()),
        alpha,
        horizon,
        tail_valuation: tail,
        digits,
        alpha_squared_mod: c0,
        alpha_squared_digits: k,
    })
}

/// `v(α)` as a decimal or fraction string.
pub fn format_valuation(v: &BigRational) -> String {
    if v.is_integer() {
        v.to_integer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::RingSpec;

    #[test]
    fn theta_leading_coefficients() {
        let r = PiAdicRing::new(5, 10).unwrap();
        let t = dwork_theta(&r, 12).unwrap();
        assert_eq!(t.coefficient(0), r.one().as_slice());
        assert_eq!(t.coefficient(1), r.pi().as_slice());
        assert!(dwork_theta(&r, 5000).is_err());
    }

    #[test]
    fn correcting_factor_for_linear_f_inverts_theta() {
        let r = PiAdicRing::new(3, 12).unwrap();
        let q = RingSpec::Rationals;
        let ctx = FrobContext::new(&r, &Poly::var(&q, 1, 0), 30).unwrap();
        let theta = dwork_theta(&r, 30).unwrap();
        let prod = ctx.correcting_factor().mul(&theta);
        assert_eq!(prod, TruncSeries::from_coefficients(&r, 30, vec![r.one()]));
    }

    #[test]
    fn zero_f_gives_plain_substitution() {
        let r = PiAdicRing::new(5, 6).unwrap();
        let q = RingSpec::Rationals;
        let ctx = FrobContext::new(&r, &Poly::zero(&q, 1), 20).unwrap();
        let one = TruncSeries::from_coefficients(&r, 20, vec![r.one()]);
        let img = ctx.frobenius_apply(&one);
        let mut expected = TruncSeries::zero(&r, 20);
        expected.coeffs[4] = r.from_i64(5);
        assert_eq!(img, expected);
    }

    #[test]
    fn approx_tracks_shifts() {
        let r = PiAdicRing::new(3, 5).unwrap();
        let one = Approx::exact(&r, r.one());
        let x = one.div_pi().div_pi();
        assert_eq!((x.shift, x.prec), (-2, 8));
        let y = x.mul_int(&r, 9);
        assert_eq!(y.shift, 2);
        // 9 π^{-2} = π^4 π^{-2} = π^2
        assert_eq!(y.to_ring(&r).unwrap(), r.pi_pow(2));
    }

    #[test]
    fn linear_f_has_no_cohomology() {
        let r = PiAdicRing::new(5, 10).unwrap();
        let q = RingSpec::Rationals;
        let err = frobenius_eigenvalue(&r, &Poly::var(&q, 1, 0), 20).unwrap_err();
        assert_eq!(err, Error::MilnorMismatch(0, 1));
    }

    fn half_square() -> Poly<RingSpec> {
        let q = RingSpec::Rationals;
        let x = Poly::var(&q, 1, 0);
        x.mul(&x).scale(&q.from_rational(&BigRational::new(1.into(), 2.into())).unwrap())
    }

    #[test]
    fn quadratic_eigenvalue_squares_to_signed_prime() {
        for p in [3u64, 5, 7] {
            let r = PiAdicRing::new(p, 20).unwrap();
            let e = frobenius_eigenvalue(&r, &half_square(), 60).unwrap();
            assert_eq!(format_valuation(&e.valuation), "1/2");
            assert!(e.squares_to_gauss_sum_sign(&r), "p = {p}");
            let target = if p % 4 == 1 { p as i64 } else { -(p as i64) };
            assert_eq!(e.alpha_squared_mod, BigInt::from(target));
            eprintln!("p={p} horizon={} tail={} prec={}", e.horizon, e.tail_valuation, e.alpha.prec);
        }
    }

    #[test]
    fn chain_residual_vanishes() {
        let r = PiAdicRing::new(5, 8).unwrap();
        let ctx = FrobContext::new(&r, &half_square(), 40).unwrap();
        let eta = TruncSeries::from_coefficients(&r, 40, (0..12).map(|i| r.from_i64(3 * i - 7)).collect());
        assert!(ctx.chain_residual(&eta).is_zero());
    }
}
