use std::f64::consts::PI;

use cltlab::charfun::{
    charfun, charfun_distance, charfun_of_sum, levy_invert, levy_invert_auto, levy_invert_damped,
    normal_charfun, second_order_bound, second_order_check, CharFn,
};
use cltlab::distribution::{convolution_power, convolve_discrete, DiscreteDist, Dist};
use cltlab::numerics::ComplexValue;
use proptest::prelude::*;

fn sign() -> DiscreteDist {
    DiscreteDist::new(vec![(-1.0, 0.5), (1.0, 0.5)]).unwrap()
}

fn grid20() -> Vec<f64> {
    (0..20)
        .map(|i| -10.0 + 20.0 * f64::from(i) / 19.0)
        .collect()
}

/// Fixed family of centered test distributions.
fn family() -> Vec<Dist> {
    let die = DiscreteDist::uniform(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
    let skew = DiscreteDist::new(vec![(-1.0, 0.75), (3.0, 0.25)]).unwrap();
    vec![
        Dist::from(sign()),
        Dist::from(die.shift_scale(3.5, 1.0).unwrap()),
        Dist::from(skew),
        Dist::point_mass(0.0).unwrap(),
        Dist::standard_normal(),
    ]
}

#[test]
fn charfun_examples() {
    let pm = Dist::point_mass(0.0).unwrap();
    for t in [-7.0, 0.0, 2.5] {
        assert_eq!(charfun(&pm, t).unwrap(), ComplexValue::new(1.0, 0.0));
        // oracle: average of e^{it} and e^{-it}
        let avg = 0.5 * (ComplexValue::new(0.0, t).exp() + ComplexValue::new(0.0, -t).exp());
        let z = charfun(&Dist::from(sign()), t).unwrap();
        assert!((z - avg).norm() < 1e-15);
    }
}

#[test]
fn normal_closed_form_matches_quadrature() {
    let n = Dist::standard_normal();
    assert_eq!(normal_charfun(0.0), ComplexValue::new(1.0, 0.0));
    assert!((normal_charfun(1.0).re - 0.606_530_7).abs() < 1e-7);
    assert!((normal_charfun(2.0).re - 0.135_335_3).abs() < 1e-7);
    for t in [0.0, 0.5, 1.0, 2.0, 4.0] {
        let z = charfun(&n, t).unwrap();
        assert!((z - normal_charfun(t)).norm() < 1e-6, "t={t}: {z}");
    }
}

#[test]
fn product_rule_examples() {
    let s = Dist::from(sign());
    for t in grid20() {
        assert_eq!(
            charfun_of_sum(std::slice::from_ref(&s), t).unwrap(),
            charfun(&s, t).unwrap()
        );
        let three = charfun_of_sum(&[s.clone(), s.clone(), s.clone()], t).unwrap();
        let conv = Dist::from(convolution_power(&sign(), 3).unwrap());
        assert!((three - charfun(&conv, t).unwrap()).norm() < 1e-9);
        assert!((three.re - t.cos().powi(3)).abs() < 1e-12);
        let with_zero = charfun_of_sum(&[s.clone(), Dist::point_mass(0.0).unwrap()], t).unwrap();
        assert_eq!(with_zero, charfun(&s, t).unwrap());
    }
}

#[test]
fn second_order_examples() {
    let s = Dist::from(sign());
    assert_eq!(second_order_check(&s, 0.0).unwrap(), 0.0);
    let v = second_order_check(&s, 0.1).unwrap();
    // cos(0.1) - 0.995 from the cosine series: t^4/24 - t^6/720
    let series = 0.1f64.powi(4) / 24.0 - 0.1f64.powi(6) / 720.0;
    assert!((v - series).abs() < 1e-12);
    assert!((v - 4.2e-6).abs() < 1e-7);
    assert!(v <= second_order_bound(&s, 0.1).unwrap());
    assert!((second_order_bound(&s, 0.1).unwrap() - 0.001 / 6.0).abs() < 1e-15);
    let w = second_order_check(&s, 1.0).unwrap();
    assert!((w - (1f64.cos() - 0.5).abs()).abs() < 1e-15);
    assert!(w <= 1.0 / 6.0 + 1e-15);
}

#[test]
fn inversion_examples() {
    // oracle: quadrature of the density over the interval
    let n = Dist::standard_normal();
    let oracle = n.interval_prob(-1.96, 1.96).unwrap();
    assert!((oracle - 0.950_004_2).abs() < 1e-7);
    let got = levy_invert(&CharFn::StandardNormal, -1.96, 1.96, 50.0, 1e-8).unwrap();
    assert!((got - oracle).abs() < 1e-3, "{got}");

    let one = CharFn::custom(|_| ComplexValue::new(1.0, 0.0));
    let got = levy_invert(&one, -1.0, 1.0, 1e3, 1e-8).unwrap();
    assert!((got - 1.0).abs() < 1e-2, "{got}");

    let cos = CharFn::custom(|t: f64| ComplexValue::new(t.cos(), 0.0));
    let got = levy_invert(&cos, 0.0, 2.0, 1e3, 1e-8).unwrap();
    assert!((got - 0.5).abs() < 1e-2, "{got}");
}

#[test]
fn inversion_of_normal_from_density_charfun() {
    let phi = CharFn::Of(Dist::standard_normal());
    let got = levy_invert(&phi, -1.0, 0.5, 12.0, 1e-7).unwrap();
    let want = Dist::standard_normal().interval_prob(-1.0, 0.5).unwrap();
    assert!((got - want).abs() < 1e-5);
}

#[test]
fn automatic_truncation() {
    let got = levy_invert_auto(&CharFn::StandardNormal, -1.96, 1.96, 1e-8).unwrap();
    assert!((got - 0.950_004_2).abs() < 1e-6);
    let cos = CharFn::custom(|t: f64| ComplexValue::new(t.cos(), 0.0));
    let got = levy_invert_auto(&cos, 0.0, 2.0, 1e-3).unwrap();
    assert!((got - 0.5).abs() < 1e-2);
}

#[test]
fn damping_smooths_atoms() {
    let cos = CharFn::custom(|t: f64| ComplexValue::new(t.cos(), 0.0));
    let plain = levy_invert(&cos, -0.5, 2.0, 1e4, 1e-8).unwrap();
    let damped = levy_invert_damped(&cos, -0.5, 2.0, 1e4, 1e-8, 1e-6).unwrap();
    assert!((plain - 0.5).abs() < 1e-3 && (damped - 0.5).abs() < 1e-3);
}

#[test]
fn inversion_consistency_over_truncations() {
    let mu = DiscreteDist::new(vec![(-1.0, 0.2), (0.5, 0.3), (2.0, 0.5)]).unwrap();
    let d = Dist::from(mu);
    let phi = CharFn::Of(d.clone());
    for (a, b) in [(-2.0, 0.0), (0.0, 1.0), (-1.5, 2.5), (0.25, 1.75)] {
        let want = d.interval_prob(a, b).unwrap();
        let errs: Vec<f64> = [1e2, 1e3, 1e4]
            .iter()
            .map(|&t| (levy_invert(&phi, a, b, t, 1e-8).unwrap() - want).abs())
            .collect();
        assert!(errs[1] < 1e-2, "({a},{b}]: {errs:?}");
        assert!(errs[2] <= errs[0] + 1e-2, "({a},{b}]: {errs:?}");
    }
}

#[test]
fn distance_examples() {
    let s = Dist::from(sign());
    assert!(charfun_distance(&s, &s, &grid20()).unwrap() < 1e-12);
    let d = charfun_distance(&s, &Dist::point_mass(0.0).unwrap(), &[PI]).unwrap();
    assert!((d - 2.0).abs() < 1e-15);
    let closed = CharFn::StandardNormal;
    let mut worst = 0.0f64;
    for t in [0.0, 0.5, 1.0, 2.0] {
        let z = charfun(&Dist::standard_normal(), t).unwrap();
        worst = worst.max((z - closed.eval(t).unwrap()).norm());
    }
    assert!(worst <= 1e-6);
}

#[test]
fn invariants_on_the_family() {
    for mu in family() {
        for i in 0..=40 {
            let t = -10.0 + 0.5 * f64::from(i);
            let z = charfun(&mu, t).unwrap();
            assert!(z.norm() <= 1.0 + 1e-9);
            let zm = charfun(&mu, -t).unwrap();
            assert!((zm - z.conj()).norm() < 1e-9);
        }
        for i in 0..=40 {
            let t = -2.0 + 0.1 * f64::from(i);
            let v = second_order_check(&mu, t).unwrap();
            let bound = second_order_bound(&mu, t).unwrap();
            assert!(v <= bound + 1e-12, "{mu:?} t={t}: {v} > {bound}");
        }
    }
}

fn arb_discrete() -> impl Strategy<Value = DiscreteDist> {
    prop::collection::btree_map(-30i32..30, 1u32..9, 1..6).prop_map(|m| {
        let total: u32 = m.values().sum();
        DiscreteDist::new(
            m.into_iter()
                .map(|(x, w)| (f64::from(x) / 3.0, f64::from(w) / f64::from(total)))
                .collect(),
        )
        .unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn product_law(a in arb_discrete(), b in arb_discrete()) {
        let c = Dist::from(convolve_discrete(&a, &b).unwrap());
        let (a, b) = (Dist::from(a), Dist::from(b));
        for t in grid20() {
            let lhs = charfun(&c, t).unwrap();
            let rhs = charfun(&a, t).unwrap() * charfun(&b, t).unwrap();
            prop_assert!((lhs - rhs).norm() < 1e-9);
        }
    }

    #[test]
    fn shift_scale_covariance(d in arb_discrete(), a in -3.0f64..3.0, b in prop_oneof![-3.0f64..-0.2, 0.2f64..3.0]) {
        let mapped = Dist::from(d.shift_scale(a, b).unwrap());
        let orig = Dist::from(d);
        for t in grid20() {
            let lhs = charfun(&mapped, t).unwrap();
            let rhs = ComplexValue::new(0.0, -t * a / b).exp() * charfun(&orig, t / b).unwrap();
            prop_assert!((lhs - rhs).norm() < 1e-9);
        }
    }

    #[test]
    fn unit_modulus_bound_and_conjugate_symmetry(d in arb_discrete(), t in -50.0f64..50.0) {
        let d = Dist::from(d);
        let z = charfun(&d, t).unwrap();
        prop_assert!(z.norm() <= 1.0 + 1e-9);
        prop_assert!((charfun(&d, -t).unwrap() - z.conj()).norm() < 1e-9);
        prop_assert!((charfun(&d, 0.0).unwrap() - ComplexValue::new(1.0, 0.0)).norm() < 1e-12);
    }
}
