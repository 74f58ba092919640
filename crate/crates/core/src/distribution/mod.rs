//! Real distributions in three representations: finite atom lists,
//! densities and empirical samples.

mod convolve;
mod density;
mod discrete;
mod empirical;
mod text;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::numerics::OrientedInterval;

pub use convolve::{
    convolution_power, convolve, convolve_discrete, iid_sum_normalized, DENSITY_GRID, MAX_ATOMS,
    MERGE_TOL,
};
pub use density::{DensityDist, DensityFn};
pub use discrete::{DiscreteDist, MASS_TOL};
pub use empirical::EmpiricalDist;
pub use text::HEADER as DISCRETE_TEXT_HEADER;

/// Mean and variance of a normal law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalParams {
    m: f64,
    sigma2: f64,
}

impl NormalParams {
    pub fn new(m: f64, sigma2: f64) -> Result<Self> {
        if !m.is_finite() || !(sigma2 > 0.0) || !sigma2.is_finite() {
            return Err(Error::InvalidParams(format!(
                "normal needs finite mean and positive variance, got m={m}, sigma2={sigma2}"
            )));
        }
        Ok(NormalParams { m, sigma2 })
    }

    pub fn standard() -> Self {
        NormalParams {
            m: 0.0,
            sigma2: 1.0,
        }
    }

    pub fn mean(&self) -> f64 {
        self.m
    }

    pub fn variance(&self) -> f64 {
        self.sigma2
    }

    pub fn density(&self, x: f64) -> f64 {
        let z = x - self.m;
        (-z * z / (2.0 * self.sigma2)).exp() / (2.0 * std::f64::consts::PI * self.sigma2).sqrt()
    }
}

/// `(1 / σ√(2π)) · exp(-(x - m)² / 2σ²)`.
pub fn normal_density(params: &NormalParams, x: f64) -> f64 {
    params.density(x)
}

#[derive(Debug, Clone)]
pub enum Dist {
    Discrete(DiscreteDist),
    Density(DensityDist),
    Empirical(EmpiricalDist),
}

impl From<DiscreteDist> for Dist {
    fn from(d: DiscreteDist) -> Self {
        Dist::Discrete(d)
    }
}

impl From<DensityDist> for Dist {
    fn from(d: DensityDist) -> Self {
        Dist::Density(d)
    }
}

impl From<EmpiricalDist> for Dist {
    fn from(d: EmpiricalDist) -> Self {
        Dist::Empirical(d)
    }
}

impl Dist {
    pub fn normal(params: NormalParams) -> Self {
        Dist::Density(DensityDist::normal(params))
    }

    pub fn standard_normal() -> Self {
        Dist::normal(NormalParams::standard())
    }

    pub fn point_mass(x: f64) -> Result<Self> {
        DiscreteDist::point_mass(x).map(Dist::Discrete)
    }

    pub fn discrete(atoms: Vec<(f64, f64)>) -> Result<Self> {
        DiscreteDist::new(atoms).map(Dist::Discrete)
    }

    pub fn density(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        support: OrientedInterval,
        mass_tol: f64,
    ) -> Result<Self> {
        DensityDist::new(f, support, mass_tol).map(Dist::Density)
    }

    pub fn empirical(samples: Vec<f64>) -> Result<Self> {
        EmpiricalDist::new(samples).map(Dist::Empirical)
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Dist::Discrete(_) => "Discrete",
            Dist::Density(_) => "Density",
            Dist::Empirical(_) => "Empirical",
        }
    }

    pub fn as_discrete(&self) -> Option<&DiscreteDist> {
        match self {
            Dist::Discrete(d) => Some(d),
            _ => None,
        }
    }

    /// `F(x) = μ((-∞, x])`.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        match self {
            Dist::Discrete(d) => Ok(d.cdf(x)),
            Dist::Density(d) => d.cdf(x),
            Dist::Empirical(e) => Ok(e.cdf(x)),
        }
    }

    /// Left limit `F(x-) = μ((-∞, x))`.
    pub fn cdf_left(&self, x: f64) -> Result<f64> {
        match self {
            Dist::Discrete(d) => Ok(d.cdf_left(x)),
            Dist::Density(d) => d.cdf(x),
            Dist::Empirical(e) => Ok(e.cdf_left(x)),
        }
    }

    /// CDF at many points; densities integrate only between consecutive
    /// sorted points.
    pub fn cdf_many(&self, xs: &[f64]) -> Result<Vec<f64>> {
        match self {
            Dist::Density(d) => {
                let mut order: Vec<usize> = (0..xs.len()).collect();
                order.sort_by(|&i, &j| xs[i].total_cmp(&xs[j]));
                let sorted: Vec<f64> = order.iter().map(|&i| xs[i]).collect();
                let values = d.cdf_sorted(&sorted)?;
                let mut out = vec![0.0; xs.len()];
                for (k, &i) in order.iter().enumerate() {
                    out[i] = values[k];
                }
                Ok(out)
            }
            _ => xs.iter().map(|&x| self.cdf(x)).collect(),
        }
    }

    /// `μ({x})`.
    pub fn mass_at(&self, x: f64) -> f64 {
        match self {
            Dist::Discrete(d) => d.mass_at(x),
            Dist::Density(_) => 0.0,
            Dist::Empirical(e) => e.mass_at(x),
        }
    }

    /// `μ((a, b])`.
    pub fn interval_prob(&self, a: f64, b: f64) -> Result<f64> {
        if !(a < b) {
            return Err(Error::DegenerateInterval { a, b });
        }
        match self {
            Dist::Density(d) => d.mass_between(a, b, crate::numerics::DEFAULT_TOL),
            _ => Ok((self.cdf(b)? - self.cdf(a)?).max(0.0)),
        }
    }

    /// `inf { x : F(x) ≥ p }` for `0 < p < 1`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::OutOfRange(format!(
                "quantile level {p} outside (0, 1)"
            )));
        }
        match self {
            Dist::Discrete(d) => Ok(d.quantile(p)),
            Dist::Density(d) => d.quantile(p),
            Dist::Empirical(e) => Ok(e.quantile(p)),
        }
    }

    /// `∫ g dμ`.
    pub fn expect(&self, g: impl Fn(f64) -> f64) -> Result<f64> {
        match self {
            Dist::Discrete(d) => Ok(d.expect(g)),
            Dist::Density(d) => d.expect(g),
            Dist::Empirical(e) => Ok(e.expect(g)),
        }
    }

    pub fn mean(&self) -> Result<f64> {
        match self {
            Dist::Discrete(d) => Ok(d.mean()),
            Dist::Density(d) => d.mean(),
            Dist::Empirical(e) => Ok(e.mean()),
        }
    }

    pub fn variance(&self) -> Result<f64> {
        match self {
            Dist::Discrete(d) => Ok(d.variance()),
            Dist::Density(d) => d.variance(),
            Dist::Empirical(e) => Ok(e.variance()),
        }
    }

    /// Law of `(X - a) / b`.
    pub fn shift_scale(&self, a: f64, b: f64) -> Result<Dist> {
        match self {
            Dist::Discrete(d) => d.shift_scale(a, b).map(Dist::Discrete),
            Dist::Density(d) => d.shift_scale(a, b).map(Dist::Density),
            Dist::Empirical(e) => e.shift_scale(a, b).map(Dist::Empirical),
        }
    }

    /// Jump points of the CDF. Densities have none.
    pub fn discontinuity_points(&self) -> Vec<f64> {
        match self {
            Dist::Discrete(d) => d.points().to_vec(),
            Dist::Density(_) => Vec::new(),
            Dist::Empirical(e) => e.support(),
        }
    }

    /// Smallest and largest atoms, or `mean ± k·sd` for densities.
    pub fn effective_range(&self, k: f64) -> Result<(f64, f64)> {
        match self {
            Dist::Discrete(d) => Ok((d.points()[0], d.points()[d.len() - 1])),
            Dist::Empirical(e) => Ok((e.samples()[0], e.samples()[e.len() - 1])),
            Dist::Density(d) => d.effective_range(k),
        }
    }

    /// `n` i.i.d. draws by inverse-CDF sampling from a ChaCha8 stream
    /// seeded with `seed`.
    pub fn sample(&self, n: usize, seed: u64) -> Result<EmpiricalDist> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.sample_with(n, &mut rng)
    }

    pub fn sample_with<R: Rng>(&self, n: usize, rng: &mut R) -> Result<EmpiricalDist> {
        if n == 0 {
            return Err(Error::OutOfRange("sample size must be at least 1".into()));
        }
        let draws = (0..n)
            .map(|_| self.quantile(open_unit(rng)))
            .collect::<Result<Vec<f64>>>()?;
        EmpiricalDist::new(draws)
    }
}

/// Uniform draw on the open interval (0, 1).
pub(crate) fn open_unit<R: Rng>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.gen();
        if u > 0.0 {
            return u;
        }
    }
}
