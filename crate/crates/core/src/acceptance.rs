//! The acceptance suite: ten seeded, exact checks shared by the `selftest`
//! subcommand and the `acceptance` test target.

use std::fmt;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::constraints::ConstraintProblem;
use crate::dwork::{dwork_theta, format_valuation, frobenius_eigenvalue};
use crate::error::Result;
use crate::families::FamilyProblem;
use crate::form::{Form, IndexSet};
use crate::integral::{wick_oracle, GaussianProblem};
use crate::linalg::Matrix;
use crate::milnor::{all_monomials, quadratic_rank_check, MilnorData};
use crate::parse::ExprContext;
use crate::poly::{Monomial, Poly};
use crate::ratfunc::RatFuncField;
use crate::ring::{PiAdicRing, Ring, RingHom, RingSpec, Value};

pub const DEFAULT_SEED: u64 = 20_240_611;

/// `(id, description, runtime budget)`.
pub const CRITERIA: [(&str, &str, Option<u64>); 10] = [
    ("wick", "integral at lambda^0 equals the Wick sum", Some(60)),
    ("integrality", "unimodular integrals have integer series", Some(120)),
    ("vanishing", "defining relations integrate to zero", Some(60)),
    ("quadratic", "quadratic top cohomology is free of rank one", None),
    ("milnor", "Milnor numbers and the product law", None),
    ("witness", "certified reductions expand to zero", None),
    ("picard-fuchs", "Airy and Gaussian operators", Some(30)),
    ("constraints", "degree shift and chain-map certificates", None),
    ("frobenius", "Dwork ring, theta overconvergence, eigenvalue", Some(120)),
    ("functoriality", "integrals commute with base change", None),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scale {
    /// Instance counts as stated in the criteria.
    Full,
    /// Smaller counts for a quick self-check.
    Reduced,
}

impl Scale {
    fn pick(self, full: usize, reduced: usize) -> usize {
        match self {
            Scale::Full => full,
            Scale::Reduced => reduced,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CriterionResult {
    pub index: usize,
    pub id: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub budget: Option<Duration>,
}

impl CriterionResult {
    pub fn within_budget(&self) -> bool {
        self.budget.is_none_or(|b| self.elapsed <= b)
    }

    pub fn ok(&self) -> bool {
        self.passed && self.within_budget()
    }
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let budget = match self.budget {
            Some(b) => format!(", budget {}s", b.as_secs()),
            None => String::new(),
        };
        let late = if self.within_budget() { "" } else { " OVER BUDGET" };
        write!(
            f,
            "[{}] {:>2} {:<13} {} ({:.2}s{budget}){late}",
            if self.ok() { "PASS" } else { "FAIL" },
            self.index,
            self.id,
            self.detail,
            self.elapsed.as_secs_f64()
        )
    }
}

pub fn criterion_ids() -> Vec<&'static str> {
    CRITERIA.iter().map(|c| c.0).collect()
}

/// Runs one criterion; errors count as failures.
pub fn run_criterion(id: &str, scale: Scale, seed: u64) -> Option<CriterionResult> {
    let index = CRITERIA.iter().position(|c| c.0 == id)?;
    let (id, _, budget) = CRITERIA[index];
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((index as u64 + 1) << 32));
    let start = Instant::now();
    let outcome = match id {
        "wick" => wick(&mut rng, scale),
        "integrality" => integrality(&mut rng, scale),
        "vanishing" => vanishing(&mut rng, scale),
        "quadratic" => quadratic(&mut rng, scale),
        "milnor" => milnor(&mut rng, scale),
        "witness" => witness(&mut rng, scale),
        "picard-fuchs" => picard_fuchs(),
        "constraints" => constraints(&mut rng, scale),
        "frobenius" => frobenius(),
        "functoriality" => functoriality(&mut rng, scale),
        _ => unreachable!(),
    };
    let (passed, detail) = match outcome {
        Ok(r) => r,
        Err(e) => (false, format!("error {}: {e}", e.name())),
    };
    Some(CriterionResult {
        index: index + 1,
        id,
        passed,
        detail,
        elapsed: start.elapsed(),
        budget: budget.map(Duration::from_secs),
    })
}

pub fn run_all(scale: Scale, seed: u64) -> Vec<CriterionResult> {
    CRITERIA
        .iter()
        .filter_map(|c| run_criterion(c.0, scale, seed))
        .collect()
}

type Outcome = Result<(bool, String)>;

fn count_line(good: usize, total: usize, what: &str) -> (bool, String) {
    (good == total, format!("{good}/{total} {what}"))
}

pub fn random_rational(rng: &mut impl Rng, bound: i64) -> BigRational {
    let n = rng.gen_range(-bound..=bound);
    let d = rng.gen_range(1..=bound.max(1));
    BigRational::new(n.into(), d.into())
}

/// Random symmetric matrix over `QQ` with nonzero determinant.
pub fn random_symmetric_invertible(rng: &mut impl Rng, n: usize) -> Matrix<RingSpec> {
    let q = RingSpec::Rationals;
    loop {
        let mut m = Matrix::zeros(&q, n, n);
        for i in 0..n {
            for j in i..n {
                let v = q.from_rational(&random_rational(rng, 3)).unwrap();
                m.set(i, j, v.clone());
                m.set(j, i, v);
            }
        }
        if !q.is_zero(&m.det().expect("square")) {
            return m;
        }
    }
}

/// `Uᵀ D U` with `U` unipotent upper triangular and `D = diag(±1)`.
pub fn random_unimodular_symmetric(rng: &mut impl Rng, n: usize) -> Matrix<RingSpec> {
    let z = RingSpec::Integers;
    let mut u = Matrix::identity(&z, n);
    for i in 0..n {
        for j in i + 1..n {
            u.set(i, j, z.from_i64(rng.gen_range(-2..=2)));
        }
    }
    let mut d = Matrix::zeros(&z, n, n);
    for i in 0..n {
        d.set(i, i, z.from_i64(if rng.gen_bool(0.5) { 1 } else { -1 }));
    }
    u.transpose().mul(&d).unwrap().mul(&u).unwrap()
}

/// Random polynomial with `terms` terms of degree at most `deg` and integer
/// coefficients in `[-c, c]`.
pub fn random_poly(rng: &mut impl Rng, ring: &RingSpec, n: usize, deg: u32, terms: usize, c: i64) -> Poly<RingSpec> {
    let mut g = Poly::zero(ring, n);
    for _ in 0..terms {
        let d = rng.gen_range(0..=deg);
        let mut e = vec![0u32; n];
        for _ in 0..d {
            if n > 0 {
                e[rng.gen_range(0..n)] += 1;
            }
        }
        g.add_term(Monomial::from_exponents(e), &ring.from_i64(rng.gen_range(-c..=c)));
    }
    g
}

/// Polynomial with an isolated critical locus: `Σ x_i^{a_i}` plus random
/// terms of lower weighted degree.
pub fn random_isolated(rng: &mut impl Rng, ring: &RingSpec, n: usize, max_exp: u32) -> Poly<RingSpec> {
    let exps: Vec<u32> = (0..n).map(|_| rng.gen_range(2..=max_exp)).collect();
    let mut f = Poly::zero(ring, n);
    for (i, &a) in exps.iter().enumerate() {
        let mut e = vec![0u32; n];
        e[i] = a;
        f.add_term(Monomial::from_exponents(e), &ring.from_i64(rng.gen_range(1..=2)));
    }
    for _ in 0..rng.gen_range(0..=3) {
        let e: Vec<u32> = exps.iter().map(|&a| rng.gen_range(0..a)).collect();
        // weighted degree Σ e_i / a_i < 1 keeps the leading part intact
        let w: f64 = e.iter().zip(&exps).map(|(&x, &a)| x as f64 / a as f64).sum();
        if w < 1.0 {
            f.add_term(Monomial::from_exponents(e), &ring.from_i64(rng.gen_range(-2..=2)));
        }
    }
    f
}

fn wick(rng: &mut impl Rng, scale: Scale) -> Outcome {
    let q = RingSpec::Rationals;
    let matrices = scale.pick(25, 6);
    let deg = scale.pick(8, 6) as u32;
    let (mut good, mut total) = (0, 0);
    for k in 0..matrices {
        let n = 1 + k % 3;
        let a = random_symmetric_invertible(rng, n);
        let problem = GaussianProblem::new(a.clone(), &Poly::zero(&q, n), 1)?;
        for d in 0..=deg {
            for m in all_monomials(n, d) {
                let got = problem.integrate(&Poly::term(&q, m.clone(), q.one()))?;
                total += 1;
                if got.coefficients()[0] == wick_oracle(&a, &m)? {
                    good += 1;
                }
            }
        }
    }
    Ok(count_line(good, total, &format!("monomials of degree <= {deg} over {matrices} matrices")))
}

fn integrality(rng: &mut impl Rng, scale: Scale) -> Outcome {
    let z = RingSpec::Integers;
    let count = scale.pick(20, 6);
    let mut good = 0;
    for k in 0..count {
        let n = 1 + k % 2;
        let a = random_unimodular_symmetric(rng, n);
        let v = random_poly(rng, &z, n, 4, 3, 3);
        let g = random_poly(rng, &z, n, 4, 3, 3);
        let report = GaussianProblem::new(a, &v, 8)?.integrality_report(&g)?;
        if report.integral && report.agrees {
            good += 1;
        }
    }
    Ok(count_line(good, count, "instances integral over QQ and equal to the ZZ run"))
}

fn vanishing(rng: &mut impl Rng, scale: Scale) -> Outcome {
    let q = RingSpec::Rationals;
    let count = scale.pick(500, 100);
    let mut good = 0;
    for k in 0..count {
        let n = 1 + k % 3;
        let a = random_symmetric_invertible(rng, n);
        let v = random_poly(rng, &q, n, 3, 3, 3);
        let h = random_poly(rng, &q, n, 3, 3, 3);
        let problem = GaussianProblem::new(a, &v, 3)?;
        if problem.check_vanishing(&h, rng.gen_range(0..n))?.is_zero() {
            good += 1;
        }
    }
    Ok(count_line(good, count, "relations vanish"))
}

fn quadratic(rng: &mut impl Rng, scale: Scale) -> Outcome {
    let count = scale.pick(10, 4);
    let bound = scale.pick(4, 3) as u32;
    let series = RingSpec::Integers.lambda_series(4)?;
    let lam = series.series_var_pow(1);
    let mut good = 0;
    for k in 0..count {
        let n = 1 + k % 3;
        let a = random_unimodular_symmetric(rng, n);
        if quadratic_rank_check(&a, bound)?.passed() {
            good += 1;
        }
        // A + λ S stays invertible over ZZ[λ]/(λ^4)
        let s = random_unimodular_symmetric(rng, n);
        let lift = |v: &Value| match v {
            Value::Int(x) => series.from_bigint(x),
            _ => unreachable!("integer matrix"),
        };
        let mut b = a.map(&series, lift);
        for i in 0..n {
            for j in 0..n {
                let t = series.mul(&lam, &lift(s.get(i, j)));
                b.set(i, j, series.add(b.get(i, j), &t));
            }
        }
        if quadratic_rank_check(&b, bound)?.passed() {
            good += 1;
        }
    }
    Ok(count_line(good, 2 * count, &format!("matrices over ZZ and ZZ[lambda]/(lambda^4), degree <= {bound}")))
}

fn mu_of(f: &Poly<RingSpec>) -> Result<usize> {
    Ok(MilnorData::new(f)?.mu())
}

fn milnor(rng: &mut impl Rng, scale: Scale) -> Outcome {
    let q = RingSpec::Rationals;
    let mut failures = Vec::new();
    for d in 1..=9u32 {
        let f = Poly::var(&q, 1, 0).pow(d + 1);
        if mu_of(&f)? != d as usize {
            failures.push(format!("x^{}", d + 1));
        }
    }
    let ctx = ExprContext::new(&q, 2);
    for (s, mu) in [("x1^3+x2^3", 4), ("x1^3+x2^4", 6)] {
        if mu_of(&ctx.parse_poly(s)?)? != mu {
            failures.push(s.to_string());
        }
    }
    let count = scale.pick(10, 4);
    let mut good = 0;
    for _ in 0..count {
        let (a, b) = if rng.gen_bool(0.5) { (1, 1) } else { (1, 2) };
        let f = random_isolated(rng, &q, a, 4);
        let g = random_isolated(rng, &q, b, 3);
        let shifted: Vec<usize> = (a..a + b).collect();
        let sum = f.embed(a + b, &(0..a).collect::<Vec<_>>()).add(&g.embed(a + b, &shifted));
        if mu_of(&sum)? == mu_of(&f)? * mu_of(&g)? {
            good += 1;
        }
    }
    let passed = failures.is_empty() && good == count;
    let mut detail = format!("11 fixed cases, {good}/{count} products");
    if !failures.is_empty() {
        detail.push_str(&format!("; wrong: {}", failures.join(", ")));
    }
    Ok((passed, detail))
}

fn witness(rng: &mut impl Rng, scale: Scale) -> Outcome {
    let q = RingSpec::Rationals;
    let count = scale.pick(200, 40);
    let mut good = 0;
    let mut k = 0;
    while k < count {
        let n = 1 + k % 2;
        let f = random_isolated(rng, &q, n, if n == 1 { 5 } else { 3 });
        let data = MilnorData::new(&f)?;
        for _ in 0..4.min(count - k) {
            let g = random_poly(rng, &q, n, 4, 4, 5);
            let red = data.reduce(&g)?;
            if data.verify_witness(&g, &red.coordinates, &red.witness) {
                good += 1;
            }
            k += 1;
        }
    }
    Ok(count_line(good, count, "witnesses expand to zero"))
}

fn picard_fuchs() -> Outcome {
    let k = RatFuncField::new("lambda");
    let ctx = ExprContext::new(&k, 1).with_param("lambda", k.param());
    let one = Poly::one(&k, 1);
    let mut fails = Vec::new();
    for (src, expected) in [
        ("x1^3/3 - lambda*x1", vec!["-lambda", "0", "1"]),
        ("-lambda*x1^2/2", vec!["1", "2*lambda"]),
    ] {
        let op = FamilyProblem::new(&ctx.parse_poly(src)?, DEFAULT_SEED)?.picard_fuchs(&one)?;
        let got = op.coefficient_strings("lambda");
        if got != expected {
            fails.push(format!("{src}: got [{}]", got.join(", ")));
        }
    }
    Ok(if fails.is_empty() {
        (true, "lambda - d^2/dlambda^2 and 1 + 2 lambda d/dlambda".into())
    } else {
        (false, fails.join("; "))
    })
}

fn random_form(rng: &mut impl Rng, ring: &RingSpec, n: usize) -> Form<RingSpec> {
    let mut w = Form::zero(ring, n);
    let k = rng.gen_range(0..=n);
    for s in IndexSet::subsets(n, k) {
        let mut c = random_poly(rng, ring, n, 2, 2, 3);
        if c.is_zero() {
            c = Poly::one(ring, n);
        }
        w.add_component(s, &c);
    }
    w
}

fn constraints(rng: &mut impl Rng, scale: Scale) -> Outcome {
    let q = RingSpec::Rationals;
    let count = scale.pick(200, 30);
    let mut shift_ok = 0;
    let mut good = 0;
    for k in 0..count {
        let n = 1 + k % 2;
        let mut p = random_poly(rng, &q, n, 2, 3, 3);
        p.add_term(Monomial::var(n, 0), &q.one());
        let f = random_poly(rng, &q, n, 2, 2, 2);
        let omega = random_form(rng, &q, n);
        let problem = ConstraintProblem::new(&f, vec![p.clone()])?;
        if problem.chain_certificate(&omega)?.passed() {
            good += 1;
        }
        // degree shift, codimension 1 and 2
        let p2 = random_poly(rng, &q, n, 2, 2, 3);
        let two = ConstraintProblem::new(&f, vec![p, p2])?;
        let ok = [problem.delta_map(&omega)?, two.codim_m_map(&omega)?]
            .iter()
            .zip([2usize, 4])
            .all(|(img, s)| img.degrees().iter().all(|d| omega.degrees().contains(&(d - s))));
        if ok {
            shift_ok += 1;
        }
    }
    Ok((
        good == count && shift_ok == count,
        format!("{good}/{count} chain certificates, {shift_ok}/{count} degree shifts"),
    ))
}

fn frobenius() -> Outcome {
    let mut fails = Vec::new();
    for p in [3u64, 5, 7, 11] {
        let r = PiAdicRing::new(p, 20)?;
        if r.pow(&r.pi(), p - 1) != r.from_i64(-(p as i64)) {
            fails.push(format!("pi^{} != -{p}", p - 1));
        }
    }
    let r3 = PiAdicRing::new(3, 20)?;
    let slope = dwork_theta(&r3, 40)?.overconvergence_slope();
    if !slope.as_ref().is_some_and(|c| c > &BigRational::zero()) {
        fails.push("theta slope not positive".into());
    }
    let q = RingSpec::Rationals;
    let half = q.from_rational(&BigRational::new(BigInt::one(), 2.into())).unwrap();
    let f = Poly::var(&q, 1, 0).pow(2).scale(&half);
    let mut horizons = Vec::new();
    for p in [3u64, 5, 7] {
        let r = PiAdicRing::new(p, 20)?;
        let e = frobenius_eigenvalue(&r, &f, 60)?;
        if format_valuation(&e.valuation) != "1/2" {
            fails.push(format!("v(alpha) = {} at p = {p}", format_valuation(&e.valuation)));
        }
        if !e.squares_to_gauss_sum_sign(&r) {
            fails.push(format!("alpha^2 mismatch at p = {p}"));
        }
        horizons.push(format!("p={p}:{}", e.horizon));
    }
    let slope = slope.map(|c| c.to_string()).unwrap_or_else(|| "none".into());
    Ok(if fails.is_empty() {
        (true, format!("slope {slope}, horizons {}", horizons.join(" ")))
    } else {
        (false, fails.join("; "))
    })
}

fn functoriality(rng: &mut impl Rng, scale: Scale) -> Outcome {
    let z = RingSpec::Integers;
    let count = scale.pick(100, 25);
    let targets = [RingSpec::modular(7)?, RingSpec::Rationals];
    let mut good = 0;
    for k in 0..count {
        let n = 1 + k % 2;
        let a = random_unimodular_symmetric(rng, n);
        let v = random_poly(rng, &z, n, 3, 3, 3);
        let g = random_poly(rng, &z, n, 3, 3, 3);
        let problem = GaussianProblem::new(a, &v, 4)?;
        let over_z = problem.integrate(&g)?;
        let mut ok = true;
        for t in &targets {
            let h = RingHom::new(z.clone(), t.clone())?;
            let pushed = problem.base_change(&h)?.integrate(&g.base_change(&h)?)?;
            ok &= pushed == over_z.base_change(&h)?;
        }
        if ok {
            good += 1;
        }
    }
    Ok(count_line(good, count, "instances commute with ZZ -> ZZ/7 and ZZ -> QQ"))
}
