//! Weak-convergence diagnostics: CDF gaps on continuity grids, the Lévy
//! metric, and Portmanteau-style checks with test functions and interval
//! sets.

use std::fmt;
use std::sync::Arc;

use crate::distribution::Dist;
use crate::error::{Error, Result};

const SWEEP_POINTS: usize = 10_001;
const SWEEP_HALF_WIDTH: f64 = 1e3;
const DENSITY_GRID_POINTS: usize = 101;
const LEVY_SCAN_POINTS: usize = 2001;

/// A bounded continuous function with its declared bound.
///
/// Outside `domain` the function is extended by its boundary values, so a
/// function that is only bounded on a finite window stays bounded on ℝ.
#[derive(Clone)]
pub struct TestFn {
    pub name: String,
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub bound: f64,
    pub domain: (f64, f64),
}

impl fmt::Debug for TestFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFn")
            .field("name", &self.name)
            .field("bound", &self.bound)
            .field("domain", &self.domain)
            .finish()
    }
}

impl TestFn {
    pub fn new(
        name: impl Into<String>,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        bound: f64,
    ) -> Self {
        Self::on_domain(name, f, bound, (f64::NEG_INFINITY, f64::INFINITY))
    }

    pub fn on_domain(
        name: impl Into<String>,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        bound: f64,
        domain: (f64, f64),
    ) -> Self {
        TestFn {
            name: name.into(),
            f: Arc::new(f),
            bound,
            domain,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.f)(x.clamp(self.domain.0, self.domain.1))
    }

    /// Checks the bound on an evenly spaced sweep of the domain (clipped to
    /// `[-1000, 1000]`).
    fn check_bound(&self) -> Result<()> {
        let (lo, hi) = self.domain;
        if !(self.bound.is_finite() && self.bound >= 0.0) || !(lo < hi) {
            return Err(Error::UnboundedTestFn(format!(
                "{}: bound {} on [{lo}, {hi}]",
                self.name, self.bound
            )));
        }
        let a = lo.max(-SWEEP_HALF_WIDTH);
        let b = hi.min(SWEEP_HALF_WIDTH);
        for i in 0..SWEEP_POINTS {
            let x = a + (b - a) * i as f64 / (SWEEP_POINTS - 1) as f64;
            let y = self.eval(x);
            if !(y.abs() <= self.bound) {
                return Err(Error::UnboundedTestFn(format!(
                    "{}: |f({x})| = {} exceeds declared bound {}",
                    self.name,
                    y.abs(),
                    self.bound
                )));
            }
        }
        Ok(())
    }
}

/// `clamp(x, 0, 1)`, `1/(1+x²)`, `cos x` and the bump `exp(-1/(1-x²))`.
pub fn default_test_fns() -> Vec<TestFn> {
    vec![
        TestFn::new("clamp01", |x: f64| x.clamp(0.0, 1.0), 1.0),
        TestFn::new("lorentz", |x: f64| 1.0 / (1.0 + x * x), 1.0),
        TestFn::new("cos", f64::cos, 1.0),
        TestFn::new(
            "bump",
            |x: f64| {
                if x.abs() < 1.0 {
                    (-1.0 / (1.0 - x * x)).exp()
                } else {
                    0.0
                }
            },
            (-1.0f64).exp(),
        ),
    ]
}

/// Points where the CDF of `limit` is continuous: midpoints between atoms
/// plus one unit beyond each extreme atom, or 101 points over `mean ± 4σ`
/// for a density.
pub fn continuity_grid(limit: &Dist) -> Result<Vec<f64>> {
    match limit {
        Dist::Density(_) => {
            let (lo, hi) = limit.effective_range(4.0)?;
            Ok((0..DENSITY_GRID_POINTS)
                .map(|i| lo + (hi - lo) * i as f64 / (DENSITY_GRID_POINTS - 1) as f64)
                .collect())
        }
        _ => {
            let atoms = limit.discontinuity_points();
            let mut grid = Vec::with_capacity(atoms.len() + 1);
            grid.push(atoms[0] - 1.0);
            grid.extend(atoms.windows(2).map(|w| 0.5 * (w[0] + w[1])));
            grid.push(atoms[atoms.len() - 1] + 1.0);
            Ok(grid)
        }
    }
}

/// A limit distribution with a grid of its continuity points and a
/// dictionary of bounded test functions.
#[derive(Debug, Clone)]
pub struct ConvergenceProbe {
    limit: Dist,
    grid: Vec<f64>,
    test_fns: Vec<TestFn>,
}

impl ConvergenceProbe {
    pub fn new(limit: Dist, grid: Vec<f64>, test_fns: Vec<TestFn>) -> Result<Self> {
        check_grid(&limit, &grid)?;
        for f in &test_fns {
            f.check_bound()?;
        }
        Ok(ConvergenceProbe {
            limit,
            grid,
            test_fns,
        })
    }

    /// Probe with [`continuity_grid`] and [`default_test_fns`].
    pub fn with_defaults(limit: Dist) -> Result<Self> {
        let grid = continuity_grid(&limit)?;
        Self::new(limit, grid, default_test_fns())
    }

    pub fn limit(&self) -> &Dist {
        &self.limit
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn test_fns(&self) -> &[TestFn] {
        &self.test_fns
    }
}

fn check_grid(limit: &Dist, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::EmptyInput("empty continuity grid".into()));
    }
    if let Some(&x) = grid
        .iter()
        .find(|&&x| !x.is_finite() || limit.mass_at(x) > 0.0)
    {
        return Err(Error::AtomOnGrid(x));
    }
    Ok(())
}

/// `max |F_mu(x) − F_limit(x)|` over the probe grid.
pub fn cdf_distance(mu: &Dist, probe: &ConvergenceProbe) -> Result<f64> {
    check_grid(&probe.limit, &probe.grid)?;
    let a = mu.cdf_many(&probe.grid)?;
    let b = probe.limit.cdf_many(&probe.grid)?;
    Ok(a.iter()
        .zip(&b)
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs())))
}

/// `|∫f dmu − ∫f dlimit|` for each test function of the probe.
pub fn portmanteau_testfn(mu: &Dist, probe: &ConvergenceProbe) -> Result<Vec<f64>> {
    probe
        .test_fns
        .iter()
        .map(|f| {
            let a = mu.expect(|x| f.eval(x))?;
            let b = probe.limit.expect(|x| f.eval(x))?;
            Ok((a - b).abs())
        })
        .collect()
}

/// Lévy distance `inf{ε > 0 : F_mu(x−ε) − ε ≤ F_nu(x) ≤ F_mu(x+ε) + ε ∀x}`,
/// found by bisection on `[0, 1]` to within `tol`.
///
/// For a given ε both sides are compared at the atoms of each law (shifted
/// by ±ε where needed), using right values and left limits. Between those
/// points one side is constant and the other monotone, so the check is exact
/// unless both laws are densities; then a 2001-point grid over their joint
/// range is added.
pub fn levy_metric(mu: &Dist, nu: &Dist, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidTolerance(tol));
    }
    let mut base = mu.discontinuity_points();
    base.extend(nu.discontinuity_points());
    if base.is_empty() {
        let (a, b) = mu.effective_range(8.0)?;
        let (c, d) = nu.effective_range(8.0)?;
        let (lo, hi) = (a.min(c), b.max(d));
        base.extend(
            (0..LEVY_SCAN_POINTS)
                .map(|i| lo + (hi - lo) * i as f64 / (LEVY_SCAN_POINTS - 1) as f64),
        );
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    if corridor_holds(mu, nu, &base, 0.0)? {
        return Ok(0.0);
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if corridor_holds(mu, nu, &base, mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

fn corridor_holds(mu: &Dist, nu: &Dist, base: &[f64], eps: f64) -> Result<bool> {
    // (x, x − ε, x + ε) with the shifted arguments taken from the base points
    // themselves, so rounding in p − ε + ε never steps across a jump
    let mut xs = Vec::with_capacity(3 * base.len());
    let mut below = Vec::with_capacity(3 * base.len());
    let mut above = Vec::with_capacity(3 * base.len());
    for &p in base {
        for (x, b, a) in [
            (p, p - eps, p + eps),
            (p - eps, p - 2.0 * eps, p),
            (p + eps, p, p + 2.0 * eps),
        ] {
            xs.push(x);
            below.push(b);
            above.push(a);
        }
    }
    let slack = 1e-12;
    let violated = |g: &[f64], fb: &[f64], fa: &[f64]| {
        (0..g.len()).any(|i| fb[i] - eps > g[i] + slack || g[i] > fa[i] + eps + slack)
    };
    if violated(
        &nu.cdf_many(&xs)?,
        &mu.cdf_many(&below)?,
        &mu.cdf_many(&above)?,
    ) {
        return Ok(false);
    }
    let left = |d: &Dist, pts: &[f64]| -> Result<Vec<f64>> {
        match d {
            Dist::Density(_) => d.cdf_many(pts),
            _ => pts.iter().map(|&x| d.cdf_left(x)).collect(),
        }
    };
    Ok(!violated(
        &left(nu, &xs)?,
        &left(mu, &below)?,
        &left(mu, &above)?,
    ))
}

/// A finite union of disjoint half-open intervals `(a, b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalUnion {
    parts: Vec<(f64, f64)>,
}

impl IntervalUnion {
    /// Sorts the pieces. Pieces may touch at an endpoint but not overlap.
    pub fn new(mut parts: Vec<(f64, f64)>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::MalformedSet("no intervals".into()));
        }
        if let Some(&(a, b)) = parts
            .iter()
            .find(|(a, b)| !(a < b) || !a.is_finite() || !b.is_finite())
        {
            return Err(Error::MalformedSet(format!(
                "({a}, {b}] is not a proper interval"
            )));
        }
        parts.sort_by(|x, y| x.0.total_cmp(&y.0));
        if let Some(w) = parts.windows(2).find(|w| w[1].0 < w[0].1) {
            return Err(Error::MalformedSet(format!(
                "({}, {}] overlaps ({}, {}]",
                w[0].0, w[0].1, w[1].0, w[1].1
            )));
        }
        Ok(IntervalUnion { parts })
    }

    pub fn parts(&self) -> &[(f64, f64)] {
        &self.parts
    }

    /// All endpoints, each once.
    pub fn boundary(&self) -> Vec<f64> {
        let mut pts: Vec<f64> = self.parts.iter().flat_map(|&(a, b)| [a, b]).collect();
        pts.dedup();
        pts
    }

    pub fn measure(&self, mu: &Dist) -> Result<f64> {
        self.parts
            .iter()
            .map(|&(a, b)| mu.interval_prob(a, b))
            .sum()
    }
}

/// `(mu(A), limit(A), limit(∂A))` for an interval union `A`. When the last
/// entry is zero, weak convergence predicts `mu(A) → limit(A)`.
pub fn boundary_null_check(
    mu: &Dist,
    limit: &Dist,
    set: &IntervalUnion,
) -> Result<(f64, f64, f64)> {
    let boundary_mass = set.boundary().iter().map(|&x| limit.mass_at(x)).sum();
    Ok((set.measure(mu)?, set.measure(limit)?, boundary_mass))
}
