//! Central limit experiments: normalized i.i.d. sums of a discrete base,
//! measured against the standard normal.

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::charfun::{charfun, normal_charfun};
use crate::distribution::{iid_sum_normalized, open_unit, DiscreteDist, Dist, EmpiricalDist};
use crate::error::{Error, Result};
use crate::weak_convergence::{cdf_distance, levy_metric, ConvergenceProbe};

pub const DEFAULT_T_GRID: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 4.0];
pub const CSV_HEADER: &str = "n,cdf_sup,levy,charfun_sup";
const MEAN_TOL: f64 = 1e-9;
const GRID_POINTS: usize = 101;

/// Law of `X − E[X]`.
pub fn center(mu: &Dist) -> Result<Dist> {
    let m = mu.mean()?;
    if !m.is_finite() {
        return Err(Error::NonConvergence(format!("mean {m} is not finite")));
    }
    if m == 0.0 {
        return Ok(mu.clone());
    }
    let c = mu.shift_scale(m, 1.0)?;
    let m2 = c.mean()?;
    if m2.abs() > MEAN_TOL {
        return Err(Error::NonConvergence(format!("centered mean still {m2}")));
    }
    Ok(c)
}

#[derive(Debug, Clone)]
pub struct CltExperiment {
    base: DiscreteDist,
    sigma2: f64,
    ns: Vec<usize>,
    t_grid: Vec<f64>,
    grid: Vec<f64>,
    seed: u64,
    mc_draws: Option<usize>,
    tol: f64,
}

impl CltExperiment {
    /// Centers `base` if needed. `ns` must be strictly increasing and
    /// start at 1 or more.
    pub fn new(base: &Dist, ns: Vec<usize>) -> Result<Self> {
        let Dist::Discrete(_) = base else {
            return Err(Error::UnsupportedRepresentation(format!(
                "experiment bases must be discrete, got {}",
                base.kind_name()
            )));
        };
        let centered = center(base)?;
        let base = centered
            .as_discrete()
            .cloned()
            .expect("centering keeps the representation");
        let sigma2 = base.variance();
        if !(sigma2 > 1e-15) {
            return Err(Error::ZeroVariance);
        }
        if ns.first() == Some(&0) || ns.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParams(format!(
                "sample sizes must be strictly increasing and at least 1, got {ns:?}"
            )));
        }
        Ok(CltExperiment {
            base,
            sigma2,
            ns,
            t_grid: DEFAULT_T_GRID.to_vec(),
            grid: (0..GRID_POINTS)
                .map(|i| -4.0 + 8.0 * i as f64 / (GRID_POINTS - 1) as f64)
                .collect(),
            seed: 0,
            mc_draws: None,
            tol: crate::numerics::DEFAULT_TOL,
        })
    }

    pub fn with_t_grid(mut self, t_grid: Vec<f64>) -> Result<Self> {
        if t_grid.is_empty() {
            return Err(Error::EmptyInput("empty t grid".into()));
        }
        self.t_grid = t_grid;
        Ok(self)
    }

    pub fn with_grid(mut self, grid: Vec<f64>) -> Result<Self> {
        if grid.is_empty() {
            return Err(Error::EmptyInput("empty continuity grid".into()));
        }
        self.grid = grid;
        Ok(self)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Replace exact convolution by `draws` simulated normalized sums.
    pub fn with_monte_carlo(mut self, draws: usize) -> Result<Self> {
        if draws == 0 {
            return Err(Error::InvalidParams(
                "Monte Carlo needs at least one draw".into(),
            ));
        }
        self.mc_draws = Some(draws);
        Ok(self)
    }

    pub fn with_tol(mut self, tol: f64) -> Result<Self> {
        if !(tol > 0.0) {
            return Err(Error::InvalidTolerance(tol));
        }
        self.tol = tol;
        Ok(self)
    }

    pub fn base(&self) -> &DiscreteDist {
        &self.base
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn ns(&self) -> &[usize] {
        &self.ns
    }

    pub fn t_grid(&self) -> &[f64] {
        &self.t_grid
    }

    /// Law of `S_n / √(nσ²)`: exact, or the empirical law of simulated sums.
    pub fn normalized_sum(&self, n: usize) -> Result<Dist> {
        match self.mc_draws {
            None => iid_sum_normalized(&self.base, n).map(Dist::Discrete),
            Some(draws) => self.simulate(n, draws).map(Dist::Empirical),
        }
    }

    fn simulate(&self, n: usize, draws: usize) -> Result<EmpiricalDist> {
        // one stream per n so rows do not depend on which others were asked for
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(n as u64);
        let scale = (n as f64 * self.sigma2).sqrt();
        let sums = (0..draws)
            .map(|_| {
                (0..n)
                    .map(|_| self.base.quantile(open_unit(&mut rng)))
                    .sum::<f64>()
                    / scale
            })
            .collect();
        EmpiricalDist::new(sums)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportRow {
    pub n: usize,
    pub cdf_sup: f64,
    pub levy: f64,
    pub charfun_sup: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConvergenceReport {
    pub rows: Vec<ReportRow>,
}

/// One row per `n`: sup CDF gap on the grid, Lévy distance and sup
/// characteristic-function gap on the t grid, all against N(0, 1).
pub fn run_clt(exp: &CltExperiment) -> Result<ConvergenceReport> {
    let normal = Dist::standard_normal();
    let probe = ConvergenceProbe::new(normal.clone(), exp.grid.clone(), Vec::new())?;
    let rows = exp
        .ns
        .iter()
        .map(|&n| {
            let sum = exp.normalized_sum(n)?;
            let mut charfun_sup = 0.0f64;
            for &t in &exp.t_grid {
                charfun_sup = charfun_sup.max((charfun(&sum, t)? - normal_charfun(t)).norm());
            }
            Ok(ReportRow {
                n,
                cdf_sup: cdf_distance(&sum, &probe)?,
                levy: levy_metric(&sum, &normal, exp.tol)?,
                charfun_sup,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceReport { rows })
}

/// `(n, t, |φ(t/√(nσ²))ⁿ − e^{−t²/2}|)` from the base characteristic
/// function alone.
pub fn charfun_convergence_curve(exp: &CltExperiment) -> Result<Vec<(usize, f64, f64)>> {
    let base = Dist::Discrete(exp.base.clone());
    let mut out = Vec::with_capacity(exp.ns.len() * exp.t_grid.len());
    for &n in &exp.ns {
        let power = i32::try_from(n)
            .map_err(|_| Error::SizeLimit(format!("n = {n} too large for the product rule")))?;
        let scale = (n as f64 * exp.sigma2).sqrt();
        for &t in &exp.t_grid {
            let phi = charfun(&base, t / scale)?.powi(power);
            out.push((n, t, (phi - normal_charfun(t)).norm()));
        }
    }
    Ok(out)
}

/// Round to 12 significant digits, then print the shortest decimal that
/// reads back to the rounded value.
pub fn format_number(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let rounded: f64 = format!("{v:.11e}").parse().expect("formatted float parses");
    if (1e-5..1e12).contains(&rounded.abs()) {
        rounded.to_string()
    } else {
        format!("{rounded:e}")
    }
}

/// Header line then one row per `n`, each newline-terminated.
pub fn emit_csv(report: &ConvergenceReport, out: &mut impl Write) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in &report.rows {
        writeln!(
            out,
            "{},{},{},{}",
            r.n,
            format_number(r.cdf_sup),
            format_number(r.levy),
            format_number(r.charfun_sup)
        )?;
    }
    out.flush()?;
    Ok(())
}
