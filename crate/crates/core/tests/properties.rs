use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use twderham_core::acceptance::{random_isolated, random_poly, random_symmetric_invertible, random_unimodular_symmetric};
use twderham_core::integral::{GaussianProblem, PivotStrategy, DEFAULT_STEP_CAP};
use twderham_core::milnor::MilnorData;
use twderham_core::{Form, IndexSet, PiAdicRing, Poly, Ring, RingHom, RingSpec, TwistedComplex, Value};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_form(r: &mut ChaCha8Rng, ring: &RingSpec, n: usize, k: usize) -> Form<RingSpec> {
    let mut w = Form::zero(ring, n);
    for s in IndexSet::subsets(n, k) {
        if r.gen_bool(0.7) {
            w.add_component(s, &random_poly(r, ring, n, 3, 3, 4));
        }
    }
    w
}

fn sign(k: usize) -> bool {
    k % 2 == 1
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn d_squared_vanishes(seed in any::<u64>(), n in 1usize..4, k in 0usize..3) {
        let mut r = rng(seed);
        let z = RingSpec::Integers;
        let w = random_form(&mut r, &z, n, k.min(n));
        prop_assert!(w.d().d().is_zero());
    }

    #[test]
    fn twisted_d_squared_vanishes(seed in any::<u64>(), n in 1usize..4, k in 0usize..3) {
        let mut r = rng(seed);
        let z = RingSpec::Integers;
        let f = random_poly(&mut r, &z, n, 4, 4, 5);
        let c = TwistedComplex::new(&f);
        let w = random_form(&mut r, &z, n, k.min(n));
        prop_assert!(c.d(&c.d(&w)).is_zero());
    }

    #[test]
    fn leibniz_rule(seed in any::<u64>(), n in 1usize..4, k in 0usize..3, l in 0usize..3) {
        let mut r = rng(seed);
        let q = RingSpec::Rationals;
        let (k, l) = (k.min(n), l.min(n));
        let a = random_form(&mut r, &q, n, k);
        let b = random_form(&mut r, &q, n, l);
        let second = a.wedge(&b.d());
        let rhs = a.d().wedge(&b).add(&if sign(k) { second.neg() } else { second });
        prop_assert_eq!(a.wedge(&b).d(), rhs);
    }

    #[test]
    fn twisted_leibniz_rule(seed in any::<u64>(), n in 1usize..3, k in 0usize..3) {
        // d_f(a ∧ b) = d_f a ∧ b ± a ∧ d b
        let mut r = rng(seed);
        let q = RingSpec::Rationals;
        let f = random_poly(&mut r, &q, n, 3, 3, 3);
        let c = TwistedComplex::new(&f);
        let k = k.min(n);
        let a = random_form(&mut r, &q, n, k);
        let b = random_form(&mut r, &q, n, 0);
        let second = a.wedge(&b.d());
        let rhs = c.d(&a).wedge(&b).add(&if sign(k) { second.neg() } else { second });
        prop_assert_eq!(c.d(&a.wedge(&b)), rhs);
    }

    #[test]
    fn pullback_commutes_with_d_and_composes(seed in any::<u64>(), n in 1usize..3, k in 0usize..3) {
        let mut r = rng(seed);
        let z = RingSpec::Integers;
        let w = random_form(&mut r, &z, n, k.min(n));
        let phi: Vec<_> = (0..n).map(|_| random_poly(&mut r, &z, n, 2, 3, 3)).collect();
        let psi: Vec<_> = (0..n).map(|_| random_poly(&mut r, &z, n, 2, 2, 3)).collect();
        prop_assert_eq!(w.d().pullback(&phi).unwrap(), w.pullback(&phi).unwrap().d());
        // (φ∘ψ)^* = ψ^* φ^*
        let composite: Vec<_> = phi.iter().map(|p| p.compose(&psi)).collect();
        prop_assert_eq!(
            w.pullback(&composite).unwrap(),
            w.pullback(&phi).unwrap().pullback(&psi).unwrap()
        );
    }

    #[test]
    fn forms_commute_with_base_change(seed in any::<u64>(), n in 1usize..3, m in 2i64..30) {
        let mut r = rng(seed);
        let z = RingSpec::Integers;
        let target = RingSpec::modular(m).unwrap();
        let h = RingHom::new(z.clone(), target).unwrap();
        let f = random_poly(&mut r, &z, n, 3, 3, 5);
        let w = random_form(&mut r, &z, n, 1.min(n));
        let c = TwistedComplex::new(&f);
        let fh = f.base_change(&h).unwrap();
        let ch = TwistedComplex::new(&fh);
        prop_assert_eq!(c.d(&w).base_change(&h).unwrap(), ch.d(&w.base_change(&h).unwrap()));
    }

    #[test]
    fn integral_is_linear(seed in any::<u64>(), n in 1usize..3) {
        let mut r = rng(seed);
        let q = RingSpec::Rationals;
        let a = random_symmetric_invertible(&mut r, n);
        let v = random_poly(&mut r, &q, n, 3, 3, 3);
        let p = GaussianProblem::new(a, &v, 4).unwrap();
        let g = random_poly(&mut r, &q, n, 3, 3, 3);
        let h = random_poly(&mut r, &q, n, 3, 3, 3);
        let c = q.from_i64(r.gen_range(-5..=5));
        let lhs = p.integrate(&g.scale(&c).add(&h)).unwrap();
        let ig = p.integrate(&g).unwrap();
        let ih = p.integrate(&h).unwrap();
        let scaled: Vec<Value> = ig.coefficients().iter().map(|x| q.mul(x, &c)).collect();
        let rhs = twderham_core::integral::LambdaSeries::from_coefficients(&q, scaled, 4).add(&ih);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn pivot_choice_does_not_matter(seed in any::<u64>(), n in 1usize..4) {
        let mut r = rng(seed);
        let q = RingSpec::Rationals;
        let a = random_symmetric_invertible(&mut r, n);
        let v = random_poly(&mut r, &q, n, 3, 3, 3);
        let p = GaussianProblem::new(a, &v, 3).unwrap();
        let g = random_poly(&mut r, &q, n, 4, 4, 3);
        let left = p.integrate_with(&g, PivotStrategy::Leftmost, DEFAULT_STEP_CAP).unwrap();
        let right = p.integrate_with(&g, PivotStrategy::Rightmost, DEFAULT_STEP_CAP).unwrap();
        let seeded = p.integrate_with(&g, PivotStrategy::Seeded(seed), DEFAULT_STEP_CAP).unwrap();
        prop_assert_eq!(&left, &right);
        prop_assert_eq!(&left, &seeded);
    }

    #[test]
    fn relations_integrate_to_zero(seed in any::<u64>(), n in 1usize..4) {
        let mut r = rng(seed);
        let z = RingSpec::Integers;
        let a = random_unimodular_symmetric(&mut r, n);
        let v = random_poly(&mut r, &z, n, 3, 3, 3);
        let p = GaussianProblem::new(a, &v, 4).unwrap();
        let h = random_poly(&mut r, &z, n, 3, 3, 3);
        prop_assert!(p.check_vanishing(&h, r.gen_range(0..n)).unwrap().is_zero());
    }

    #[test]
    fn integrals_commute_with_reduction_mod_m(seed in any::<u64>(), n in 1usize..3, m in 2i64..50) {
        let mut r = rng(seed);
        let z = RingSpec::Integers;
        let a = random_unimodular_symmetric(&mut r, n);
        let v = random_poly(&mut r, &z, n, 3, 3, 3);
        let g = random_poly(&mut r, &z, n, 3, 3, 3);
        let p = GaussianProblem::new(a, &v, 4).unwrap();
        let h = RingHom::new(z, RingSpec::modular(m).unwrap()).unwrap();
        let down = p.base_change(&h).unwrap().integrate(&g.base_change(&h).unwrap()).unwrap();
        prop_assert_eq!(down, p.integrate(&g).unwrap().base_change(&h).unwrap());
    }

    #[test]
    fn milnor_numbers_multiply(seed in any::<u64>()) {
        let mut r = rng(seed);
        let q = RingSpec::Rationals;
        let f = random_isolated(&mut r, &q, 1, 5);
        let g = random_isolated(&mut r, &q, 1, 4);
        let sum = f.embed(2, &[0]).add(&g.embed(2, &[1]));
        let mu = |p: &Poly<RingSpec>| MilnorData::new(p).unwrap().mu();
        prop_assert_eq!(mu(&sum), mu(&f) * mu(&g));
    }

    #[test]
    fn reduction_is_linear_and_certified(seed in any::<u64>(), n in 1usize..3) {
        let mut r = rng(seed);
        let q = RingSpec::Rationals;
        let f = random_isolated(&mut r, &q, n, 3);
        let data = MilnorData::new(&f).unwrap();
        let g = random_poly(&mut r, &q, n, 4, 4, 4);
        let h = random_poly(&mut r, &q, n, 4, 4, 4);
        let rg = data.reduce(&g).unwrap();
        let rh = data.reduce(&h).unwrap();
        let rs = data.reduce(&g.add(&h)).unwrap();
        let sum: Vec<Value> = rg.coordinates.iter().zip(&rh.coordinates).map(|(a, b)| q.add(a, b)).collect();
        prop_assert_eq!(rs.coordinates, sum);
        prop_assert!(data.verify_witness(&g, &rg.coordinates, &rg.witness));
    }
}

fn random_elem(r: &mut ChaCha8Rng, ring: &RingSpec) -> Value {
    match ring {
        RingSpec::TruncatedSeries { .. } => {
            let mut acc = ring.zero();
            for k in 0..3 {
                let c = ring.from_i64(r.gen_range(-4..=4));
                acc = ring.add(&acc, &ring.mul(&c, &ring.series_var_pow(k)));
            }
            acc
        }
        RingSpec::PiAdic(p) => {
            let mut acc = p.zero();
            for k in 0..4 {
                let c = p.from_i64(r.gen_range(-30..=30));
                acc = p.add(&acc, &p.mul(&c, &p.pi_pow(k)));
            }
            Value::PiAdic(acc)
        }
        _ => ring.from_i64(r.gen_range(-1000..=1000)),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn ring_axioms(seed in any::<u64>(), which in 0usize..5) {
        let ring = match which {
            0 => RingSpec::Integers,
            1 => RingSpec::Rationals,
            2 => RingSpec::modular(343).unwrap(),
            3 => RingSpec::Rationals.lambda_series(5).unwrap(),
            _ => RingSpec::PiAdic(PiAdicRing::new(5, 3).unwrap()),
        };
        let mut r = rng(seed);
        let (a, b, c) = (random_elem(&mut r, &ring), random_elem(&mut r, &ring), random_elem(&mut r, &ring));
        prop_assert_eq!(ring.add(&a, &b), ring.add(&b, &a));
        prop_assert_eq!(ring.mul(&a, &b), ring.mul(&b, &a));
        prop_assert_eq!(ring.mul(&a, &ring.mul(&b, &c)), ring.mul(&ring.mul(&a, &b), &c));
        prop_assert_eq!(ring.mul(&a, &ring.add(&b, &c)), ring.add(&ring.mul(&a, &b), &ring.mul(&a, &c)));
        prop_assert!(ring.is_zero(&ring.add(&a, &ring.neg(&a))));
        prop_assert_eq!(ring.mul(&a, &ring.one()), a.clone());
        if let Some(inv) = ring.inv(&a) {
            prop_assert!(ring.is_one(&ring.mul(&a, &inv)));
        }
    }
}
