#![allow(dead_code)]

use cltlab::weak_convergence::{
    boundary_null_check, cdf_distance, continuity_grid, default_test_fns, portmanteau_testfn,
    ConvergenceProbe, IntervalUnion,
};
use cltlab::Dist;

pub const VERDICT_TOL: f64 = 1e-3;

/// A sequence of discrete laws indexed by n, with a fixed reference law.
pub struct Case {
    pub name: &'static str,
    pub member: fn(u32) -> Dist,
    pub limit: Dist,
    pub converges: bool,
}

fn pm(x: f64) -> Dist {
    Dist::point_mass(x).unwrap()
}

pub fn suite() -> Vec<Case> {
    vec![
        Case {
            name: "point mass at 1/n",
            member: |n| pm(1.0 / f64::from(n)),
            limit: pm(0.0),
            converges: true,
        },
        Case {
            name: "signs scaled by 1/n",
            member: |n| {
                let h = 1.0 / f64::from(n);
                Dist::discrete(vec![(-h, 0.5), (h, 0.5)]).unwrap()
            },
            limit: pm(0.0),
            converges: true,
        },
        Case {
            name: "vanishing outlier",
            member: |n| {
                let w = 1.0 / f64::from(n);
                Dist::discrete(vec![(0.0, 1.0 - w), (5.0, w)]).unwrap()
            },
            limit: pm(0.0),
            converges: true,
        },
        Case {
            name: "point mass at 1 + 1/n",
            member: |n| pm(1.0 + 1.0 / f64::from(n)),
            limit: pm(1.0),
            converges: true,
        },
        Case {
            name: "wrong constant",
            member: |_| pm(1.0),
            limit: pm(0.0),
            converges: false,
        },
        Case {
            name: "signs against zero",
            member: |_| Dist::discrete(vec![(-1.0, 0.5), (1.0, 0.5)]).unwrap(),
            limit: pm(0.0),
            converges: false,
        },
        Case {
            name: "mass escaping to infinity",
            member: |n| pm(f64::from(n)),
            limit: pm(0.0),
            converges: false,
        },
    ]
}

/// Continuity grid of the limit plus a few extra continuity points, so that
/// sequences whose atoms sit on the default grid are still told apart.
pub fn probe_for(limit: &Dist) -> ConvergenceProbe {
    let mut grid = continuity_grid(limit).unwrap();
    for x in [-2.0, -0.5, -0.25, 0.25, 0.5, 0.75, 1.25, 1.5, 2.0] {
        if limit.mass_at(x) == 0.0 {
            grid.push(x);
        }
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    ConvergenceProbe::new(limit.clone(), grid, default_test_fns()).unwrap()
}

pub fn test_sets() -> Vec<IntervalUnion> {
    [
        vec![(-0.5, 0.5)],
        vec![(-1.0, 1.0)],
        vec![(0.5, 1.5)],
        vec![(0.0, 1.0)],
        vec![(-2.0, -0.25), (0.25, 2.0)],
        vec![(-3.0, -1.0), (-1.0, 0.75)],
    ]
    .into_iter()
    .map(|p| IntervalUnion::new(p).unwrap())
    .collect()
}

/// The three convergence verdicts at index `n`: CDF grid, test functions,
/// boundary-null interval sets.
pub fn verdicts(case: &Case, n: u32) -> [bool; 3] {
    let mu = (case.member)(n);
    let probe = probe_for(&case.limit);
    let cdf = cdf_distance(&mu, &probe).unwrap();
    let tf = portmanteau_testfn(&mu, &probe)
        .unwrap()
        .into_iter()
        .fold(0.0f64, f64::max);
    let mut sets = 0.0f64;
    for s in test_sets() {
        let (a, b, boundary) = boundary_null_check(&mu, &case.limit, &s).unwrap();
        if boundary == 0.0 {
            sets = sets.max((a - b).abs());
        }
    }
    [cdf <= VERDICT_TOL, tf <= VERDICT_TOL, sets <= VERDICT_TOL]
}
