use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numerics::{integrate_real, kronrod15, ExtendedReal, OrientedInterval, DEFAULT_TOL};

use super::NormalParams;

pub type DensityFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Tolerance for the short incremental integrals used by `cdf_sorted` and
/// `quantile`.
const STEP_TOL: f64 = 1e-12;

/// Absolutely continuous distribution given by a density on its support.
#[derive(Clone)]
pub struct DensityDist {
    shape: Shape,
    lo: ExtendedReal,
    hi: ExtendedReal,
    mass_tol: f64,
}

#[derive(Clone)]
enum Shape {
    Function(DensityFn),
    Tabulated(Arc<Table>),
}

/// Piecewise-linear density on a grid; integrals of the interpolant are exact.
struct Table {
    xs: Vec<f64>,
    ys: Vec<f64>,
    cum: Vec<f64>,
}

impl Table {
    fn new(xs: Vec<f64>, ys: Vec<f64>) -> Self {
        let mut cum = Vec::with_capacity(xs.len());
        let mut acc = 0.0;
        cum.push(0.0);
        for i in 1..xs.len() {
            acc += 0.5 * (xs[i] - xs[i - 1]) * (ys[i] + ys[i - 1]);
            cum.push(acc);
        }
        let total = acc;
        let ys = ys.into_iter().map(|y| y / total).collect();
        for c in cum.iter_mut() {
            *c /= total;
        }
        Table { xs, ys, cum }
    }

    fn cell(&self, x: f64) -> Option<usize> {
        let n = self.xs.len();
        if !(x >= self.xs[0]) || x > self.xs[n - 1] {
            return None;
        }
        Some(
            self.xs
                .partition_point(|&g| g <= x)
                .saturating_sub(1)
                .min(n - 2),
        )
    }

    fn eval(&self, x: f64) -> f64 {
        match self.cell(x) {
            None => 0.0,
            Some(i) => {
                let t = (x - self.xs[i]) / (self.xs[i + 1] - self.xs[i]);
                self.ys[i] + t * (self.ys[i + 1] - self.ys[i])
            }
        }
    }

    fn cdf(&self, x: f64) -> f64 {
        if x <= self.xs[0] {
            return 0.0;
        }
        match self.cell(x) {
            None => 1.0,
            Some(i) => {
                let partial = 0.5 * (x - self.xs[i]) * (self.ys[i] + self.eval(x));
                (self.cum[i] + partial).clamp(0.0, 1.0)
            }
        }
    }

    fn integrate_product(&self, g: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        let start = self.xs.partition_point(|&x| x <= a).saturating_sub(1);
        let mut total = 0.0;
        for i in start..self.xs.len() - 1 {
            let left = self.xs[i].max(a);
            let right = self.xs[i + 1].min(b);
            if left >= b {
                break;
            }
            if right > left {
                let (x0, x1, y0, y1) = (self.xs[i], self.xs[i + 1], self.ys[i], self.ys[i + 1]);
                let lin = |x: f64| y0 + (x - x0) / (x1 - x0) * (y1 - y0);
                total += kronrod15(&|x| g(x) * lin(x), left, right);
            }
        }
        total
    }
}

impl fmt::Debug for DensityDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.shape {
            Shape::Function(_) => "function".to_string(),
            Shape::Tabulated(t) => format!("tabulated({} points)", t.xs.len()),
        };
        f.debug_struct("DensityDist")
            .field("shape", &kind)
            .field("lo", &self.lo)
            .field("hi", &self.hi)
            .field("mass_tol", &self.mass_tol)
            .finish()
    }
}

fn sweep_points(lo: ExtendedReal, hi: ExtendedReal) -> Vec<f64> {
    match (lo.as_finite(), hi.as_finite()) {
        (Some(a), Some(b)) => (0..=1024)
            .map(|i| a + (b - a) * f64::from(i) / 1024.0)
            .collect(),
        (a, b) => {
            let mut pts: Vec<f64> = (-512..=512).map(|i| f64::from(i) / 8.0).collect();
            for j in 0..30 {
                let r = 64.0 * 2f64.powi(j);
                pts.push(r);
                pts.push(-r);
            }
            if let Some(a) = a {
                pts.push(a);
            }
            if let Some(b) = b {
                pts.push(b);
            }
            let iv = OrientedInterval { lo, hi };
            pts.retain(|&x| iv.contains(x));
            pts
        }
    }
}

fn map_endpoint(e: ExtendedReal, a: f64, b: f64) -> ExtendedReal {
    match e {
        ExtendedReal::Finite(x) => ExtendedReal::Finite((x - a) / b),
        ExtendedReal::PosInf if b > 0.0 => ExtendedReal::PosInf,
        ExtendedReal::PosInf => ExtendedReal::NegInf,
        ExtendedReal::NegInf if b > 0.0 => ExtendedReal::NegInf,
        ExtendedReal::NegInf => ExtendedReal::PosInf,
    }
}

impl DensityDist {
    /// Validates nonnegativity on a sweep of the support and unit mass
    /// within `mass_tol`.
    pub fn new(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        support: OrientedInterval,
        mass_tol: f64,
    ) -> Result<Self> {
        if !(mass_tol > 0.0) {
            return Err(Error::InvalidTolerance(mass_tol));
        }
        let (lo, hi) = (support.lo, support.hi);
        if !(lo < hi) {
            return Err(Error::InvalidDistribution(
                "density support must be a nondegenerate increasing interval".into(),
            ));
        }
        for x in sweep_points(lo, hi) {
            let v = f(x);
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidDistribution(format!(
                    "density value {v} at {x} is not a finite nonnegative number"
                )));
            }
        }
        let mass = integrate_real(&f, support, mass_tol / 2.0)?;
        if (mass - 1.0).abs() > mass_tol {
            return Err(Error::InvalidDistribution(format!(
                "density integrates to {mass}, expected 1 within {mass_tol}"
            )));
        }
        Ok(DensityDist {
            shape: Shape::Function(Arc::new(f)),
            lo,
            hi,
            mass_tol,
        })
    }

    pub fn normal(params: NormalParams) -> Self {
        DensityDist {
            shape: Shape::Function(Arc::new(move |x| params.density(x))),
            lo: ExtendedReal::NegInf,
            hi: ExtendedReal::PosInf,
            mass_tol: DEFAULT_TOL,
        }
    }

    /// Piecewise-linear density through `(xs[i], ys[i])`, rescaled to unit
    /// mass. `xs` must be strictly increasing with at least two points.
    pub(crate) fn tabulated(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() < 2 || xs.len() != ys.len() || xs.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidDistribution("malformed density table".into()));
        }
        if ys.iter().any(|&y| !(y >= 0.0) || !y.is_finite()) {
            return Err(Error::InvalidDistribution(
                "negative density table value".into(),
            ));
        }
        let (lo, hi) = (xs[0], xs[xs.len() - 1]);
        let table = Table::new(xs, ys);
        if !table.cum.last().is_some_and(|c| c.is_finite()) {
            return Err(Error::InvalidDistribution(
                "density table has zero mass".into(),
            ));
        }
        Ok(DensityDist {
            shape: Shape::Tabulated(Arc::new(table)),
            lo: ExtendedReal::Finite(lo),
            hi: ExtendedReal::Finite(hi),
            mass_tol: 1e-12,
        })
    }

    pub fn support(&self) -> OrientedInterval {
        OrientedInterval {
            lo: self.lo,
            hi: self.hi,
        }
    }

    pub fn mass_tol(&self) -> f64 {
        self.mass_tol
    }

    pub fn eval(&self, x: f64) -> f64 {
        match &self.shape {
            Shape::Tabulated(t) => t.eval(x),
            Shape::Function(f) => {
                if self.support().contains(x) {
                    f(x)
                } else {
                    0.0
                }
            }
        }
    }

    /// Mass of `[a, b]` for finite `a ≤ b`.
    pub fn mass_between(&self, a: f64, b: f64, tol: f64) -> Result<f64> {
        let a_cl = clip(a, self.lo, self.hi);
        let b_cl = clip(b, self.lo, self.hi);
        if b_cl <= a_cl {
            return Ok(0.0);
        }
        match &self.shape {
            Shape::Tabulated(t) => Ok(t.cdf(b_cl) - t.cdf(a_cl)),
            Shape::Function(f) => integrate_real(|x| f(x), OrientedInterval::new(a_cl, b_cl), tol),
        }
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        if ExtendedReal::Finite(x) <= self.lo {
            return Ok(0.0);
        }
        if ExtendedReal::Finite(x) >= self.hi {
            return Ok(1.0);
        }
        match &self.shape {
            Shape::Tabulated(t) => Ok(t.cdf(x)),
            Shape::Function(f) => {
                let v = integrate_real(|y| f(y), OrientedInterval::new(self.lo, x), DEFAULT_TOL)?;
                Ok(v.clamp(0.0, 1.0))
            }
        }
    }

    /// CDF at ascending points, integrating only the gaps between them.
    pub fn cdf_sorted(&self, xs: &[f64]) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(xs.len());
        let mut prev: Option<(f64, f64)> = None;
        for &x in xs {
            let v = match prev {
                Some((px, pv)) if px <= x => {
                    (pv + self.mass_between(px, x, STEP_TOL)?).clamp(0.0, 1.0)
                }
                _ => self.cdf(x)?,
            };
            out.push(v);
            prev = Some((x, v));
        }
        Ok(out)
    }

    /// ∫ g f over the support.
    pub fn expect(&self, g: impl Fn(f64) -> f64) -> Result<f64> {
        match &self.shape {
            Shape::Tabulated(t) => {
                let (a, b) = (t.xs[0], t.xs[t.xs.len() - 1]);
                Ok(t.integrate_product(&g, a, b))
            }
            Shape::Function(f) => integrate_real(|x| g(x) * f(x), self.support(), DEFAULT_TOL),
        }
    }

    pub fn mean(&self) -> Result<f64> {
        self.expect(|x| x)
    }

    pub fn variance(&self) -> Result<f64> {
        let m = self.mean()?;
        Ok(self.expect(|x| (x - m) * (x - m))?.max(0.0))
    }

    /// `[mean - k·sd, mean + k·sd]` clipped to the support.
    pub fn effective_range(&self, k: f64) -> Result<(f64, f64)> {
        let m = self.mean()?;
        let sd = self.variance()?.sqrt();
        Ok((
            clip(m - k * sd, self.lo, self.hi),
            clip(m + k * sd, self.lo, self.hi),
        ))
    }

    /// Generalized inverse of the CDF by bracketing and bisection on
    /// incrementally integrated mass.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        let (mut lo, mut f_lo, mut hi) = self.bracket(p)?;
        for _ in 0..200 {
            if hi - lo <= 1e-13 * (1.0 + lo.abs().max(hi.abs())) {
                break;
            }
            let mid = 0.5 * (lo + hi);
            let f_mid = f_lo + self.mass_between(lo, mid, STEP_TOL)?;
            if f_mid >= p {
                hi = mid;
            } else {
                lo = mid;
                f_lo = f_mid;
            }
        }
        Ok(hi)
    }

    /// Returns `(lo, F(lo), hi)` with `F(lo) < p ≤ F(hi)`.
    fn bracket(&self, p: f64) -> Result<(f64, f64, f64)> {
        let start = match (self.lo.as_finite(), self.hi.as_finite()) {
            (Some(a), Some(b)) => return Ok((a, 0.0, b)),
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (None, None) => 0.0,
        };
        let f_start = self.cdf(start)?;
        let mut step = 1.0;
        if f_start < p {
            let (mut x, mut fx) = (start, f_start);
            for _ in 0..1100 {
                let next = x + step;
                let f_next = (fx + self.mass_between(x, next, STEP_TOL)?).min(1.0);
                if f_next >= p {
                    return Ok((x, fx, next));
                }
                if ExtendedReal::Finite(next) >= self.hi {
                    return Ok((x, fx, next));
                }
                (x, fx) = (next, f_next);
                step *= 2.0;
            }
        } else {
            let (mut x, mut fx) = (start, f_start);
            for _ in 0..1100 {
                let prev = x - step;
                let f_prev = (fx - self.mass_between(prev, x, STEP_TOL)?).max(0.0);
                if f_prev < p {
                    return Ok((prev, f_prev, x));
                }
                (x, fx) = (prev, f_prev);
                step *= 2.0;
            }
        }
        Err(Error::NonConvergence(format!(
            "could not bracket quantile {p}"
        )))
    }

    pub fn shift_scale(&self, a: f64, b: f64) -> Result<Self> {
        if b == 0.0 || !b.is_finite() || !a.is_finite() {
            return Err(Error::InvalidScale);
        }
        let (mut lo, mut hi) = (map_endpoint(self.lo, a, b), map_endpoint(self.hi, a, b));
        if b < 0.0 {
            std::mem::swap(&mut lo, &mut hi);
        }
        let shape = match &self.shape {
            Shape::Function(f) => {
                let f = Arc::clone(f);
                let scale = b.abs();
                Shape::Function(Arc::new(move |y| scale * f(b * y + a)))
            }
            Shape::Tabulated(t) => {
                let mut pts: Vec<(f64, f64)> =
                    t.xs.iter()
                        .zip(&t.ys)
                        .map(|(&x, &y)| ((x - a) / b, y * b.abs()))
                        .collect();
                if b < 0.0 {
                    pts.reverse();
                }
                let (xs, ys) = pts.into_iter().unzip();
                return Self::tabulated(xs, ys);
            }
        };
        Ok(DensityDist {
            shape,
            lo,
            hi,
            mass_tol: self.mass_tol,
        })
    }
}

fn clip(x: f64, lo: ExtendedReal, hi: ExtendedReal) -> f64 {
    let x = match lo {
        ExtendedReal::Finite(a) => x.max(a),
        _ => x,
    };
    match hi {
        ExtendedReal::Finite(b) => x.min(b),
        _ => x,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform01() -> DensityDist {
        DensityDist::new(|_| 1.0, OrientedInterval::new(0.0, 1.0), 1e-10).unwrap()
    }

    #[test]
    fn uniform_density_basics() {
        let u = uniform01();
        assert_eq!(u.cdf(-1.0).unwrap(), 0.0);
        assert!((u.cdf(0.25).unwrap() - 0.25).abs() < 1e-12);
        assert_eq!(u.cdf(2.0).unwrap(), 1.0);
        assert!((u.mean().unwrap() - 0.5).abs() < 1e-12);
        assert!((u.variance().unwrap() - 1.0 / 12.0).abs() < 1e-12);
        assert!((u.quantile(0.3).unwrap() - 0.3).abs() < 1e-10);
        assert_eq!(u.eval(1.5), 0.0);
    }

    #[test]
    fn rejects_bad_densities() {
        assert!(DensityDist::new(|_| 2.0, OrientedInterval::new(0.0, 1.0), 1e-8).is_err());
        assert!(
            DensityDist::new(|x| x - 0.5 + 1.0, OrientedInterval::new(-1.0, 0.0), 1e-8).is_err()
        );
        assert!(DensityDist::new(|_| 1.0, OrientedInterval::new(1.0, 0.0), 1e-8).is_err());
        assert!(DensityDist::new(|_| 1.0, OrientedInterval::new(0.0, 1.0), 0.0).is_err());
    }

    #[test]
    fn tabulated_is_exact_for_triangle() {
        let t = DensityDist::tabulated(vec![-1.0, 0.0, 1.0], vec![0.0, 7.0, 0.0]).unwrap();
        assert!((t.eval(0.0) - 1.0).abs() < 1e-15);
        assert!((t.cdf(0.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((t.cdf(-0.5).unwrap() - 0.125).abs() < 1e-15);
        assert!(t.mean().unwrap().abs() < 1e-15);
        assert!((t.variance().unwrap() - 1.0 / 6.0).abs() < 1e-14);
        let s = t.shift_scale(1.0, -2.0).unwrap();
        assert!((s.cdf(0.5).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn shifted_function_density() {
        let u = uniform01().shift_scale(1.0, 0.5).unwrap();
        // (X - 1) / 0.5 is uniform on [-2, 0]
        assert_eq!(u.support(), OrientedInterval::new(-2.0, 0.0));
        assert!((u.eval(-1.0) - 0.5).abs() < 1e-15);
        assert!((u.cdf(-1.0).unwrap() - 0.5).abs() < 1e-12);
    }
}
