//! Independent recomputations of values the library produces.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use twderham_core::acceptance::random_poly;
use twderham_core::families::FamilyProblem;
use twderham_core::integral::GaussianProblem;
use twderham_core::linalg::Matrix;
use twderham_core::milnor::MilnorData;
use twderham_core::parse::{spec_context, ExprContext};
use twderham_core::ratfunc::{RatFunc, RatFuncField, UPoly};
use twderham_core::{Form, IndexSet, Monomial, Poly, Ring, RingSpec, Value};

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn rat(v: &Value) -> BigRational {
    match v {
        Value::Rat(x) => x.clone(),
        Value::Int(x) => BigRational::from_integer(x.clone()),
        _ => panic!("scalar expected"),
    }
}

/// One-variable Gaussian expectation `E[x^k]` for weight `exp(a x^2 / 2)`,
/// `a < 0` formally: `E[x^{2m}] = (2m-1)!! (-1/a)^m`.
fn moment(a: &BigRational, k: usize) -> BigRational {
    if k % 2 == 1 {
        return BigRational::zero();
    }
    let m = k / 2;
    let mut df = BigInt::one();
    let mut j = 1;
    while j < k {
        df *= j;
        j += 2;
    }
    let c = -a.recip();
    let mut pw = BigRational::one();
    for _ in 0..m {
        pw *= &c;
    }
    BigRational::from_integer(df) * pw
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// `<g e^{λV}> / <e^{λV}>` expanded to order `N` by Taylor series of the
/// exponential and division of power series.
fn ratio_oracle(a: &BigRational, v: &[BigRational], g: &[BigRational], order: usize) -> Vec<BigRational> {
    let expect = |p: &[BigRational]| -> BigRational {
        p.iter().enumerate().map(|(k, c)| c * moment(a, k)).sum()
    };
    let mut num = Vec::new();
    let mut den = Vec::new();
    let mut vk = vec![BigRational::one()];
    let mut fact = BigRational::one();
    for k in 0..order {
        if k > 0 {
            vk = poly_mul(&vk, v);
            fact *= BigRational::from_integer(k.into());
        }
        num.push(expect(&poly_mul(&vk, g)) / &fact);
        den.push(expect(&vk) / &fact);
    }
    // num / den with den[0] = 1
    let mut out = vec![BigRational::zero(); order];
    for i in 0..order {
        let mut s = num[i].clone();
        for j in 1..=i {
            s -= &den[j] * &out[i - j];
        }
        out[i] = s / &den[0];
    }
    out
}

#[test]
fn cubic_perturbation_series() {
    let zz = RingSpec::Integers;
    let ctx = ExprContext::new(&zz, 1);
    let a = ctx.parse_matrix("[-1]").unwrap();
    let p = GaussianProblem::new(a, &ctx.parse_poly("x1^3").unwrap(), 4).unwrap();
    let got = p.integrate(&ctx.parse_poly("x1").unwrap()).unwrap();
    let oracle = ratio_oracle(&q(-1, 1), &[q(0, 1), q(0, 1), q(0, 1), q(1, 1)], &[q(0, 1), q(1, 1)], 4);
    let got: Vec<BigRational> = got.coefficients().iter().map(rat).collect();
    assert_eq!(got, oracle);
    assert_eq!(oracle, vec![q(0, 1), q(3, 1), q(0, 1), q(135, 1)]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn one_variable_series_match_ratio_oracle(seed in any::<u64>()) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let qq = RingSpec::Rationals;
        let a = loop {
            let x = q(r.gen_range(-4..=4), r.gen_range(1..=3));
            if !x.is_zero() { break x; }
        };
        let coeffs = |r: &mut ChaCha8Rng, d: usize| -> Vec<BigRational> {
            (0..=d).map(|_| q(r.gen_range(-3..=3), 1)).collect()
        };
        let mut v = coeffs(&mut r, 3);
        v[0] = BigRational::zero();
        let g = coeffs(&mut r, 3);
        let to_poly = |c: &[BigRational]| Poly::from_terms(&qq, 1, c.iter().enumerate().map(|(k, x)| {
            (Monomial::from_exponents(vec![k as u32]), Value::Rat(x.clone()))
        }));
        let am = Matrix::from_rows(&qq, vec![vec![Value::Rat(a.clone())]]).unwrap();
        let p = GaussianProblem::new(am, &to_poly(&v), 4).unwrap();
        let got: Vec<BigRational> = p.integrate(&to_poly(&g)).unwrap().coefficients().iter().map(rat).collect();
        prop_assert_eq!(got, ratio_oracle(&a, &v, &g, 4));
    }

    /// Global Milnor number of a quasi-homogeneous leading part plus lower
    /// weighted terms is `Π (a_i - 1)`.
    #[test]
    fn milnor_number_of_weighted_polynomials(seed in any::<u64>(), n in 1usize..3) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let qq = RingSpec::Rationals;
        let exps: Vec<u32> = (0..n).map(|_| r.gen_range(2..=4)).collect();
        let mut f = Poly::zero(&qq, n);
        for (i, &a) in exps.iter().enumerate() {
            let mut e = vec![0; n];
            e[i] = a;
            f.add_term(Monomial::from_exponents(e), &qq.from_i64(r.gen_range(1..=3)));
        }
        for _ in 0..3 {
            let e: Vec<u32> = exps.iter().map(|&a| r.gen_range(0..a)).collect();
            let below: bool = e.iter().zip(&exps).map(|(&x, &a)| x as f64 / a as f64).sum::<f64>() < 1.0;
            if below {
                f.add_term(Monomial::from_exponents(e), &qq.from_i64(r.gen_range(-3..=3)));
            }
        }
        let expected: usize = exps.iter().map(|&a| a as usize - 1).product();
        prop_assert_eq!(MilnorData::new(&f).unwrap().mu(), expected);
    }

    /// `(L_η + η(f))(g dx) = d_f(ι_η g dx)` has zero class.
    #[test]
    fn vertical_action_reduces_to_zero(seed in any::<u64>(), n in 1usize..3) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let qq = RingSpec::Rationals;
        let f = twderham_core::acceptance::random_isolated(&mut r, &qq, n, 3);
        let data = MilnorData::new(&f).unwrap();
        let eta: Vec<_> = (0..n).map(|_| random_poly(&mut r, &qq, n, 2, 2, 3)).collect();
        let omega = Form::top(random_poly(&mut r, &qq, n, 3, 3, 3));
        let report = twderham_core::families::lift_independence_check(&f, &eta, &omega);
        prop_assert!(report.identity_holds);
        let red = data.reduce(&report.action.component(IndexSet::full(n))).unwrap();
        prop_assert!(red.coordinates.iter().all(|c| qq.is_zero(c)));
    }

    /// `∇(h g) = h' g + h ∇g` on classes.
    #[test]
    fn connection_is_a_derivation(seed in any::<u64>()) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let k = RatFuncField::new("lambda");
        let ctx = ExprContext::new(&k, 1).with_param("lambda", k.param());
        let fam = FamilyProblem::new(&ctx.parse_poly("x1^3/3 - lambda*x1").unwrap(), 7).unwrap();
        let c: Vec<RatFunc> = (0..fam.mu())
            .map(|_| RatFunc::from_poly(UPoly::from_i64(&[r.gen_range(-3..=3), r.gen_range(-3..=3)])))
            .collect();
        let h = RatFunc::new(
            UPoly::from_i64(&[r.gen_range(-3..=3), r.gen_range(1..=3)]),
            UPoly::from_i64(&[r.gen_range(1..=3), 1]),
        );
        let hc: Vec<RatFunc> = c.iter().map(|x| k.mul(&h, x)).collect();
        let lhs = fam.gm_connection_apply(&hc).unwrap();
        let nc = fam.gm_connection_apply(&c).unwrap();
        let hp = h.derivative();
        let rhs: Vec<RatFunc> = c
            .iter()
            .zip(&nc)
            .map(|(x, y)| k.add(&k.mul(&hp, x), &k.mul(&h, y)))
            .collect();
        prop_assert_eq!(lhs, rhs);
    }
}

#[test]
fn series_context_reads_lambda() {
    let s = RingSpec::Integers.lambda_series(4).unwrap();
    let g = spec_context(&s, 1).parse_poly("x1 + lambda*x1^3").unwrap();
    assert_eq!(g.len(), 2);
}
