use crate::error::{Error, Result};

/// Mass tolerance for constructor validation.
pub const MASS_TOL: f64 = 1e-12;

/// Finite atomic distribution with strictly increasing points and positive
/// weights.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDist {
    points: Vec<f64>,
    weights: Vec<f64>,
    // cumulative[i] = sum of weights[..=i]; the last entry is pinned to 1
    cumulative: Vec<f64>,
}

impl DiscreteDist {
    /// Builds a distribution from `(point, weight)` pairs in any order.
    pub fn new(mut atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidDistribution("no atoms".into()));
        }
        for &(x, w) in &atoms {
            if !x.is_finite() {
                return Err(Error::InvalidDistribution(format!("non-finite point {x}")));
            }
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::InvalidDistribution(format!(
                    "weight {w} at point {x} is not positive"
                )));
            }
        }
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        if let Some(pair) = atoms.windows(2).find(|p| p[0].0 == p[1].0) {
            return Err(Error::InvalidDistribution(format!(
                "duplicate point {}",
                pair[0].0
            )));
        }
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidDistribution(format!(
                "weights sum to {total}, expected 1"
            )));
        }
        let (points, weights) = atoms.into_iter().unzip();
        Ok(Self::from_sorted(points, weights))
    }

    /// Point mass (Dirac measure) at `x`.
    pub fn point_mass(x: f64) -> Result<Self> {
        Self::new(vec![(x, 1.0)])
    }

    /// Equal weights on the given distinct points.
    pub fn uniform(points: &[f64]) -> Result<Self> {
        let w = 1.0 / points.len() as f64;
        let atoms: Vec<_> = points.iter().map(|&x| (x, w)).collect();
        // 1/n summed n times can miss 1 by a few ulps only
        Self::new(atoms)
    }

    /// Trusted constructor: points strictly increasing, weights positive.
    pub(crate) fn from_sorted(points: Vec<f64>, weights: Vec<f64>) -> Self {
        debug_assert_eq!(points.len(), weights.len());
        debug_assert!(points.windows(2).all(|p| p[0] < p[1]));
        let mut acc = 0.0;
        let mut cumulative: Vec<f64> = weights
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        if let Some(last) = cumulative.last_mut() {
            *last = 1.0;
        }
        for c in cumulative.iter_mut() {
            *c = c.min(1.0);
        }
        DiscreteDist {
            points,
            weights,
            cumulative,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn atoms(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.points
            .iter()
            .copied()
            .zip(self.weights.iter().copied())
    }

    /// F(x) = mass of (-inf, x].
    pub fn cdf(&self, x: f64) -> f64 {
        match self.points.partition_point(|&p| p <= x) {
            0 => 0.0,
            k => self.cumulative[k - 1],
        }
    }

    /// F(x-) = mass of (-inf, x).
    pub fn cdf_left(&self, x: f64) -> f64 {
        match self.points.partition_point(|&p| p < x) {
            0 => 0.0,
            k => self.cumulative[k - 1],
        }
    }

    pub fn mass_at(&self, x: f64) -> f64 {
        match self.points.binary_search_by(|p| p.total_cmp(&x)) {
            Ok(i) => self.weights[i],
            Err(_) => 0.0,
        }
    }

    /// Generalized inverse: smallest atom whose cumulative weight reaches `p`.
    pub fn quantile(&self, p: f64) -> f64 {
        let i = self.cumulative.partition_point(|&c| c < p);
        self.points[i.min(self.points.len() - 1)]
    }

    pub fn expect(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.atoms().map(|(x, w)| w * g(x)).sum()
    }

    pub fn mean(&self) -> f64 {
        self.expect(|x| x)
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.expect(|x| (x - m) * (x - m))
    }

    /// Distribution of `(X - a) / b`.
    pub fn shift_scale(&self, a: f64, b: f64) -> Result<Self> {
        if b == 0.0 || !b.is_finite() || !a.is_finite() {
            return Err(Error::InvalidScale);
        }
        let mut atoms: Vec<(f64, f64)> = self.atoms().map(|(x, w)| ((x - a) / b, w)).collect();
        if b < 0.0 {
            atoms.reverse();
        }
        let (points, weights): (Vec<f64>, Vec<f64>) = atoms.into_iter().unzip();
        if points.windows(2).any(|p| p[0] >= p[1]) {
            return Err(Error::InvalidDistribution(
                "shift/scale collapsed distinct atoms".into(),
            ));
        }
        Ok(Self::from_sorted(points, weights))
    }
}
