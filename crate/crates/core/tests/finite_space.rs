use std::collections::BTreeSet;

use cltlab::finite_space::{
    are_independent, are_independent_groups, check_probability_measure, expectation,
    generate_sigma_algebra, is_probability_measure, pushforward, variance, Event, FiniteProbSpace,
    FiniteRV, MeasureViolation,
};
use proptest::prelude::*;

/// Closes `generators ∪ {∅}` under complement and pairwise union by
/// iterating to a fixpoint over explicit subsets.
fn brute_force_closure(n: usize, generators: &[Vec<usize>]) -> BTreeSet<u32> {
    let full = (1u32 << n) - 1;
    let mut family: BTreeSet<u32> = generators
        .iter()
        .map(|g| g.iter().fold(0, |acc, &i| acc | 1 << i))
        .collect();
    family.insert(0);
    loop {
        let mut next = family.clone();
        for &a in &family {
            next.insert(!a & full);
            for &b in &family {
                next.insert(a | b);
            }
        }
        if next == family {
            return family;
        }
        family = next;
    }
}

/// Scans all 2^n subsets: the family has ∅ and is closed under complement
/// and union.
fn is_closed(n: usize, family: &BTreeSet<u32>) -> bool {
    let full = (1u32 << n) - 1;
    family.contains(&0)
        && family.iter().all(|&a| {
            family.contains(&(!a & full)) && family.iter().all(|&b| family.contains(&(a | b)))
        })
}

fn bits(f: &cltlab::finite_space::EventFamily) -> BTreeSet<u32> {
    f.iter().map(|e| e.0 as u32).collect()
}

#[test]
fn sigma_algebra_examples() {
    let trivial = generate_sigma_algebra(4, &[]).unwrap();
    assert_eq!(bits(&trivial), BTreeSet::from([0, 0b1111]));

    let halves = generate_sigma_algebra(4, &[vec![0, 1]]).unwrap();
    assert_eq!(bits(&halves), BTreeSet::from([0, 0b0011, 0b1100, 0b1111]));
    assert_eq!(bits(&halves), brute_force_closure(4, &[vec![0, 1]]));

    let full = generate_sigma_algebra(3, &[vec![0], vec![1]]).unwrap();
    assert_eq!(bits(&full), (0..8).collect());
    assert_eq!(bits(&full), brute_force_closure(3, &[vec![0], vec![1]]));
}

#[test]
fn generated_algebras_are_closed_and_minimal_up_to_eight_outcomes() {
    let mut seed = 0x9e37_79b9u32;
    let mut next = || {
        seed ^= seed << 13;
        seed ^= seed >> 17;
        seed ^= seed << 5;
        seed
    };
    for n in 1..=8usize {
        for _ in 0..12 {
            let k = (next() % 4) as usize;
            let gens: Vec<Vec<usize>> = (0..k)
                .map(|_| (0..n).filter(|_| next() % 2 == 0).collect())
                .collect();
            let got = bits(&generate_sigma_algebra(n, &gens).unwrap());
            assert!(is_closed(n, &got), "n={n} gens={gens:?}");
            assert_eq!(got, brute_force_closure(n, &gens), "n={n} gens={gens:?}");
        }
    }
}

#[test]
fn measure_axioms() {
    let die = FiniteProbSpace::fair_die();
    let power = die.powerset().unwrap();
    assert!(is_probability_measure(&die, &power, |e| die.prob(e)));

    let shifted = |e: Event| if e == Event::EMPTY { 0.1 } else { die.prob(e) };
    assert_eq!(
        check_probability_measure(&die, &power, shifted),
        Err(MeasureViolation::EmptySetNonzero)
    );

    let three = FiniteProbSpace::uniform(&["a", "b", "c"]).unwrap();
    let fam = three.powerset().unwrap();
    // mu({0}) = mu({1}) = 0.5 but mu({0,1}) = 0.9
    let table = |e: Event| match e.0 {
        0 => 0.0,
        0b001 | 0b010 => 0.5,
        0b011 => 0.9,
        0b100 => 0.0,
        0b101 | 0b110 => 0.5,
        _ => 1.0,
    };
    assert_eq!(
        check_probability_measure(&three, &fam, table),
        Err(MeasureViolation::NotAdditive)
    );

    // brute-force pairwise check agrees with the block-based one
    let pairwise_ok = |mu: &dyn Fn(Event) -> f64| {
        fam.iter().all(|a| {
            fam.iter()
                .filter(|b| a.is_disjoint(*b))
                .all(|b| (mu(a.union(b)) - mu(a) - mu(b)).abs() <= 1e-12)
        })
    };
    assert!(!pairwise_ok(&table));
    assert!(pairwise_ok(&|e| three.prob(e)));
}

#[test]
fn independence_examples() {
    let coin = FiniteProbSpace::uniform(&["H", "T"]).unwrap();
    let two = coin.product(&coin).unwrap();
    let x = FiniteRV::new(vec![1.0, 1.0, 0.0, 0.0]).unwrap();
    let y = FiniteRV::new(vec![1.0, 0.0, 1.0, 0.0]).unwrap();
    assert!(are_independent(&two, &[x.clone(), y.clone()]).unwrap());
    assert!(are_independent(&two, &[y.clone(), x.clone()]).unwrap());
    // oracle: P(X=1, X=1) = 1/2 but P(X=1)^2 = 1/4
    assert!(!are_independent(&two, &[x.clone(), x.clone()]).unwrap());
    assert!(are_independent(&two, std::slice::from_ref(&x)).unwrap());
    assert!(are_independent_groups(
        &two,
        &[x.clone(), y.clone(), x.clone()],
        &[vec![0, 1], vec![1, 2]]
    )
    .unwrap());
    assert!(!are_independent_groups(&two, &[x.clone(), y, x], &[vec![0, 2]]).unwrap());
}

#[test]
fn pairwise_but_not_mutually_independent() {
    // X, Y fair coins, Z = X xor Y
    let coin = FiniteProbSpace::uniform(&["0", "1"]).unwrap();
    let two = coin.product(&coin).unwrap();
    let x = FiniteRV::new(vec![0.0, 0.0, 1.0, 1.0]).unwrap();
    let y = FiniteRV::new(vec![0.0, 1.0, 0.0, 1.0]).unwrap();
    let z = FiniteRV::new(vec![0.0, 1.0, 1.0, 0.0]).unwrap();
    assert!(are_independent(&two, &[x.clone(), z.clone()]).unwrap());
    assert!(are_independent(&two, &[y.clone(), z.clone()]).unwrap());
    assert!(!are_independent(&two, &[x, y, z]).unwrap());
}

#[test]
fn pushforward_examples() {
    let die = FiniteProbSpace::fair_die();
    let id = FiniteRV::identity_on(&die).unwrap();
    let d = pushforward(&die, &id).unwrap();
    assert_eq!(d.points(), &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
    assert!(d.weights().iter().all(|&w| (w - 1.0 / 6.0).abs() < 1e-15));

    let c = pushforward(&die, &FiniteRV::constant(&die, 2.5).unwrap()).unwrap();
    assert_eq!(c.points(), &[2.5]);
    assert!((c.weights()[0] - 1.0).abs() < 1e-12);

    let s = FiniteProbSpace::new(
        vec!["a".into(), "b".into(), "c".into()],
        vec![0.2, 0.3, 0.5],
    )
    .unwrap();
    let rv = FiniteRV::new(vec![1.0, 1.0, 2.0]).unwrap();
    let p = pushforward(&s, &rv).unwrap();
    assert_eq!(p.points(), &[1.0, 2.0]);
    assert!((p.weights()[0] - 0.5).abs() < 1e-15 && (p.weights()[1] - 0.5).abs() < 1e-15);
}

#[test]
fn die_moments() {
    let die = FiniteProbSpace::fair_die();
    let id = FiniteRV::identity_on(&die).unwrap();
    assert!((expectation(&die, &id).unwrap() - 3.5).abs() < 1e-12);
    let oracle: f64 = (1..=6).map(|k| (f64::from(k) - 3.5).powi(2) / 6.0).sum();
    assert!((variance(&die, &id).unwrap() - oracle).abs() < 1e-12);
    assert!((variance(&die, &id).unwrap() - 35.0 / 12.0).abs() < 1e-12);
    assert!(
        variance(&die, &FiniteRV::constant(&die, 4.0).unwrap())
            .unwrap()
            .abs()
            < 1e-12
    );
}

fn arb_space() -> impl Strategy<Value = FiniteProbSpace> {
    prop::collection::vec(0u32..10, 1..9).prop_filter_map("zero mass", |raw| {
        let total: u32 = raw.iter().sum();
        (total > 0)
            .then(|| {
                let labels = (0..raw.len()).map(|i| format!("w{i}")).collect();
                let weights = raw
                    .iter()
                    .map(|&w| f64::from(w) / f64::from(total))
                    .collect::<Vec<_>>();
                let s: f64 = weights.iter().sum();
                FiniteProbSpace::new(labels, weights.iter().map(|w| w / s).collect())
            })?
            .ok()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pushforward_preserves_mass_and_mean(space in arb_space(), vals in prop::collection::vec(-5i32..5, 9)) {
        let rv = FiniteRV::new(vals[..space.len()].iter().map(|&v| f64::from(v)).collect()).unwrap();
        let d = pushforward(&space, &rv).unwrap();
        prop_assert!((d.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!((d.mean() - expectation(&space, &rv).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn coordinates_of_products_are_independent(a in arb_space(), b in arb_space()) {
        prop_assume!(a.len() * b.len() <= 20);
        let prod = a.product(&b).unwrap();
        let first = FiniteRV::new((0..prod.len()).map(|k| (k / b.len()) as f64).collect()).unwrap();
        let second = FiniteRV::new((0..prod.len()).map(|k| (k % b.len()) as f64).collect()).unwrap();
        prop_assert!(are_independent(&prod, &[first.clone(), second.clone()]).unwrap());
        prop_assert!(are_independent(&prod, &[second, first]).unwrap());
    }

    #[test]
    fn independence_is_permutation_invariant(space in arb_space(), vals in prop::collection::vec(0i32..3, 27)) {
        let n = space.len();
        let rvs: Vec<FiniteRV> = (0..3)
            .map(|k| FiniteRV::new(vals[k * 9..k * 9 + n].iter().map(|&v| f64::from(v)).collect()).unwrap())
            .collect();
        let forward = are_independent(&space, &rvs).unwrap();
        let rev: Vec<FiniteRV> = rvs.iter().rev().cloned().collect();
        let rot = vec![rvs[1].clone(), rvs[2].clone(), rvs[0].clone()];
        prop_assert_eq!(forward, are_independent(&space, &rev).unwrap());
        prop_assert_eq!(forward, are_independent(&space, &rot).unwrap());
    }
}
