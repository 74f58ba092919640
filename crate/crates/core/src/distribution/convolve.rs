use crate::error::{Error, Result};

use super::{DensityDist, DiscreteDist, Dist};

/// Atoms closer than this are merged after a pairwise convolution.
pub const MERGE_TOL: f64 = 1e-12;
/// Largest atom count a convolution may produce.
pub const MAX_ATOMS: usize = 1_000_000;
/// Pair-enumeration budget for non-lattice supports.
const MAX_PAIRS: usize = 50_000_000;
/// Above this many pairs, lattice supports are accumulated densely.
const LATTICE_THRESHOLD: usize = 100_000;
/// Grid size for density convolution.
pub const DENSITY_GRID: usize = 1 << 12;

/// Distribution of the sum of independent variables with the given laws.
pub fn convolve(mu: &Dist, nu: &Dist) -> Result<Dist> {
    match (mu, nu) {
        (Dist::Discrete(a), Dist::Discrete(b)) => convolve_discrete(a, b).map(Dist::Discrete),
        (Dist::Density(a), Dist::Density(b)) => convolve_density(a, b).map(Dist::Density),
        _ => Err(Error::UnsupportedPair(format!(
            "{} * {}",
            mu.kind_name(),
            nu.kind_name()
        ))),
    }
}

pub fn convolve_discrete(a: &DiscreteDist, b: &DiscreteDist) -> Result<DiscreteDist> {
    let pairs = a.len().saturating_mul(b.len());
    if pairs > LATTICE_THRESHOLD {
        if let Some(d) = convolve_lattice(a, b)? {
            return Ok(d);
        }
    }
    if pairs > MAX_PAIRS {
        return Err(Error::SizeLimit(format!(
            "{} x {} atom pairs exceed the pairwise budget",
            a.len(),
            b.len()
        )));
    }
    let mut sums: Vec<(f64, f64)> = Vec::with_capacity(pairs);
    for (x, wx) in a.atoms() {
        for (y, wy) in b.atoms() {
            sums.push((x + y, wx * wy));
        }
    }
    sums.sort_by(|p, q| p.0.total_cmp(&q.0));
    let mut points: Vec<f64> = Vec::new();
    let mut weights: Vec<f64> = Vec::new();
    let mut group_start = f64::NAN;
    for (x, w) in sums {
        if !points.is_empty() && x - group_start <= MERGE_TOL {
            *weights.last_mut().unwrap() += w;
        } else {
            points.push(x);
            weights.push(w);
            group_start = x;
        }
    }
    finish(points, weights)
}

fn finish(points: Vec<f64>, weights: Vec<f64>) -> Result<DiscreteDist> {
    let (points, weights): (Vec<f64>, Vec<f64>) = points
        .into_iter()
        .zip(weights)
        .filter(|&(_, w)| w > 0.0)
        .unzip();
    if points.len() > MAX_ATOMS {
        return Err(Error::SizeLimit(format!(
            "convolution has {} atoms, limit is {MAX_ATOMS}",
            points.len()
        )));
    }
    if points.is_empty() {
        return Err(Error::InvalidDistribution(
            "all convolution weights underflowed".into(),
        ));
    }
    Ok(DiscreteDist::from_sorted(points, weights))
}

/// Integer offsets of `points` from `points[0]` in units of `step`, if all
/// are within 1e-9 of an integer.
fn lattice_offsets(points: &[f64], step: f64) -> Option<Vec<i64>> {
    let base = points[0];
    points
        .iter()
        .map(|&p| {
            let k = (p - base) / step;
            let r = k.round();
            ((k - r).abs() <= 1e-9 && r.abs() < 1e15).then_some(r as i64)
        })
        .collect()
}

fn min_gap(points: &[f64]) -> Option<f64> {
    points
        .windows(2)
        .map(|w| w[1] - w[0])
        .min_by(f64::total_cmp)
}

fn convolve_lattice(a: &DiscreteDist, b: &DiscreteDist) -> Result<Option<DiscreteDist>> {
    let step = match (min_gap(a.points()), min_gap(b.points())) {
        (Some(x), Some(y)) => x.min(y),
        (Some(x), None) | (None, Some(x)) => x,
        (None, None) => return Ok(None),
    };
    let (Some(ka), Some(kb)) = (
        lattice_offsets(a.points(), step),
        lattice_offsets(b.points(), step),
    ) else {
        return Ok(None);
    };
    let span = (ka.last().unwrap() + kb.last().unwrap() + 1) as usize;
    if span > MAX_ATOMS {
        return Err(Error::SizeLimit(format!(
            "lattice convolution spans {span} sites, limit is {MAX_ATOMS}"
        )));
    }
    let mut acc = vec![0.0; span];
    for (&i, &wa) in ka.iter().zip(a.weights()) {
        for (&j, &wb) in kb.iter().zip(b.weights()) {
            acc[(i + j) as usize] += wa * wb;
        }
    }
    let origin = a.points()[0] + b.points()[0];
    let points = (0..span).map(|k| origin + k as f64 * step).collect();
    finish(points, acc).map(Some)
}

/// Grid convolution over the combined ±4σ range.
fn convolve_density(a: &DensityDist, b: &DensityDist) -> Result<DensityDist> {
    let (ma, va) = (a.mean()?, a.variance()?);
    let (mb, vb) = (b.mean()?, b.variance()?);
    let sd = (va + vb).sqrt();
    if !(sd > 0.0) || !sd.is_finite() {
        return Err(Error::NonConvergence(
            "density convolution needs finite positive variance".into(),
        ));
    }
    let n = DENSITY_GRID;
    let h = 8.0 * sd / (n - 1) as f64;
    let (a0, b0) = (ma - 4.0 * sd, mb - 4.0 * sd);
    let fa: Vec<f64> = (0..n).map(|i| a.eval(a0 + i as f64 * h)).collect();
    let fb: Vec<f64> = (0..n).map(|i| b.eval(b0 + i as f64 * h)).collect();
    let mut out = vec![0.0; 2 * n - 1];
    for (i, &x) in fa.iter().enumerate() {
        if x == 0.0 {
            continue;
        }
        for (j, &y) in fb.iter().enumerate() {
            out[i + j] += h * x * y;
        }
    }
    let xs = (0..2 * n - 1).map(|k| a0 + b0 + k as f64 * h).collect();
    DensityDist::tabulated(xs, out)
}

/// Law of `(X_1 + … + X_n) / √(nσ²)` for i.i.d. `X_i ~ mu` with mean 0.
///
/// The n-fold convolution is built by binary powering.
pub fn iid_sum_normalized(mu: &DiscreteDist, n: usize) -> Result<DiscreteDist> {
    if n == 0 {
        return Err(Error::OutOfRange(
            "number of summands must be at least 1".into(),
        ));
    }
    let mean = mu.mean();
    if mean.abs() > 1e-9 {
        return Err(Error::NonZeroMean(mean));
    }
    let sigma2 = mu.variance();
    if !(sigma2 > 0.0) {
        return Err(Error::ZeroVariance);
    }
    let sum = convolution_power(mu, n)?;
    sum.shift_scale(0.0, (n as f64 * sigma2).sqrt())
}

/// `mu^{*n}` by repeated squaring.
pub fn convolution_power(mu: &DiscreteDist, n: usize) -> Result<DiscreteDist> {
    if n == 0 {
        return DiscreteDist::point_mass(0.0);
    }
    let mut result: Option<DiscreteDist> = None;
    let mut base = mu.clone();
    let mut k = n;
    loop {
        if k & 1 == 1 {
            result = Some(match result {
                None => base.clone(),
                Some(r) => convolve_discrete(&r, &base)?,
            });
        }
        k >>= 1;
        if k == 0 {
            break;
        }
        base = convolve_discrete(&base, &base)?;
    }
    Ok(result.expect("n >= 1"))
}
