use crate::error::{Error, Result};

/// Sorted, nonempty sample; its CDF is the right-continuous step function
/// `#{s ≤ x} / n`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDist {
    samples: Vec<f64>,
}

impl EmpiricalDist {
    pub fn new(mut samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidDistribution("empty sample".into()));
        }
        if let Some(x) = samples.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidDistribution(format!("non-finite sample {x}")));
        }
        samples.sort_by(f64::total_cmp);
        Ok(EmpiricalDist { samples })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    fn fraction(&self, count: usize) -> f64 {
        count as f64 / self.samples.len() as f64
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.fraction(self.samples.partition_point(|&s| s <= x))
    }

    pub fn cdf_left(&self, x: f64) -> f64 {
        self.fraction(self.samples.partition_point(|&s| s < x))
    }

    pub fn mass_at(&self, x: f64) -> f64 {
        self.cdf(x) - self.cdf_left(x)
    }

    pub fn quantile(&self, p: f64) -> f64 {
        // same arithmetic as `cdf`, so quantile(p) <= x iff p <= cdf(x)
        let n = self.samples.len();
        let mut lo = 0;
        let mut hi = n - 1;
        while lo < hi {
            let mid = (lo + hi) / 2;
            if self.fraction(mid + 1) >= p {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        self.samples[lo]
    }

    /// Distinct sample values, ascending.
    pub fn support(&self) -> Vec<f64> {
        let mut v = self.samples.clone();
        v.dedup();
        v
    }

    pub fn expect(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.samples.iter().map(|&x| g(x)).sum::<f64>() / self.samples.len() as f64
    }

    pub fn mean(&self) -> f64 {
        self.expect(|x| x)
    }

    /// Variance of the empirical measure (divisor n).
    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.expect(|x| (x - m) * (x - m))
    }

    pub fn shift_scale(&self, a: f64, b: f64) -> Result<Self> {
        if b == 0.0 || !b.is_finite() || !a.is_finite() {
            return Err(Error::InvalidScale);
        }
        Self::new(self.samples.iter().map(|&x| (x - a) / b).collect())
    }
}
