//! Characteristic functions `φ(t) = ∫ e^{itx} μ(dx)` and numerical Lévy
//! inversion.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::distribution::Dist;
use crate::error::{Error, Result};
use crate::numerics::{integrate_real, sinc, ComplexValue, OrientedInterval};

/// Damping used by [`levy_invert_damped`] callers that do not pick their own.
pub const DEFAULT_DAMPING: f64 = 1e-6;
const AUTO_T_START: f64 = 64.0;
const AUTO_T_CAP: f64 = 1e5;

/// A characteristic function: either derived from a distribution, the
/// standard normal closed form, or an arbitrary caller-supplied function.
#[derive(Clone)]
pub enum CharFn {
    Of(Dist),
    StandardNormal,
    Custom(Arc<dyn Fn(f64) -> ComplexValue + Send + Sync>),
}

impl fmt::Debug for CharFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CharFn::Of(d) => f.debug_tuple("Of").field(d).finish(),
            CharFn::StandardNormal => f.write_str("StandardNormal"),
            CharFn::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl CharFn {
    pub fn custom(f: impl Fn(f64) -> ComplexValue + Send + Sync + 'static) -> Self {
        CharFn::Custom(Arc::new(f))
    }

    pub fn eval(&self, t: f64) -> Result<ComplexValue> {
        match self {
            CharFn::Of(d) => charfun(d, t),
            CharFn::StandardNormal => Ok(normal_charfun(t)),
            CharFn::Custom(f) => Ok(f(t)),
        }
    }

    /// Rough upper bound on |x| over the mass, used to size integration
    /// panels.
    fn spatial_extent(&self) -> f64 {
        match self {
            CharFn::Of(d) => d
                .effective_range(8.0)
                .map(|(lo, hi)| lo.abs().max(hi.abs()))
                .unwrap_or(1.0),
            CharFn::StandardNormal => 8.0,
            CharFn::Custom(_) => 1.0,
        }
    }
}

impl From<Dist> for CharFn {
    fn from(d: Dist) -> Self {
        CharFn::Of(d)
    }
}

/// `φ_μ(t)`: an exact finite sum for atoms and samples, quadrature of
/// `cos(tx) f(x)` and `sin(tx) f(x)` for densities.
pub fn charfun(mu: &Dist, t: f64) -> Result<ComplexValue> {
    match mu {
        Dist::Discrete(d) => Ok(d
            .atoms()
            .map(|(x, w)| ComplexValue::new(w * (t * x).cos(), w * (t * x).sin()))
            .sum()),
        Dist::Empirical(e) => {
            let n = e.len() as f64;
            let s: ComplexValue = e
                .samples()
                .iter()
                .map(|&x| ComplexValue::new((t * x).cos(), (t * x).sin()))
                .sum();
            Ok(s / n)
        }
        Dist::Density(d) => {
            if t == 0.0 {
                return Ok(ComplexValue::new(1.0, 0.0));
            }
            let re = d.expect(|x| (t * x).cos())?;
            let im = d.expect(|x| (t * x).sin())?;
            Ok(ComplexValue::new(re, im))
        }
    }
}

/// `e^{-t²/2}`.
pub fn normal_charfun(t: f64) -> ComplexValue {
    ComplexValue::new((-0.5 * t * t).exp(), 0.0)
}

/// `Π φ_{μ_i}(t)`: the characteristic function of a sum of independent
/// variables.
pub fn charfun_of_sum(mus: &[Dist], t: f64) -> Result<ComplexValue> {
    if mus.is_empty() {
        return Err(Error::EmptyInput("no distributions to sum".into()));
    }
    mus.iter().try_fold(ComplexValue::new(1.0, 0.0), |acc, mu| {
        Ok(acc * charfun(mu, t)?)
    })
}

fn require_centered(mu: &Dist) -> Result<(f64, f64)> {
    let mean = mu.mean()?;
    if mean.abs() > 1e-9 {
        return Err(Error::NonZeroMean(mean));
    }
    Ok((mean, mu.variance()?))
}

/// `|φ(t) − (1 − σ²t²/2)|` for a centered distribution.
pub fn second_order_check(mu: &Dist, t: f64) -> Result<f64> {
    let (_, sigma2) = require_centered(mu)?;
    let phi = charfun(mu, t)?;
    Ok((phi - ComplexValue::new(1.0 - 0.5 * sigma2 * t * t, 0.0)).norm())
}

/// `E[min(|tX|³/6, |tX|²)]`, the bound that [`second_order_check`] obeys.
pub fn second_order_bound(mu: &Dist, t: f64) -> Result<f64> {
    require_centered(mu)?;
    mu.expect(|x| {
        let y = (t * x).abs();
        (y * y * y / 6.0).min(y * y)
    })
}

/// Truncated inversion integral
/// `(1/2π) ∫_{-T}^{T} (e^{-ita} − e^{-itb}) / (it) · φ(t) dt`.
///
/// For a characteristic function of a real measure the integrand's real part
/// is even in `t` and its imaginary part odd, so the integral is evaluated as
/// `(1/π) ∫_0^T` of the real part. The kernel is written as
/// `(b − a)·sinc(t(b − a)/2)·e^{-it(a+b)/2}`, which takes the value `b − a`
/// at `t = 0`.
///
/// As `T → ∞` this tends to `μ((a, b))` plus half the masses at `a` and `b`;
/// pick endpoints that are not atoms to recover `μ((a, b])`.
pub fn levy_invert(phi: &CharFn, a: f64, b: f64, t_max: f64, tol: f64) -> Result<f64> {
    invert(phi, a, b, t_max, tol, None)
}

/// [`levy_invert`] with `φ(t)` multiplied by `e^{-εt²}`.
pub fn levy_invert_damped(
    phi: &CharFn,
    a: f64,
    b: f64,
    t_max: f64,
    tol: f64,
    damping: f64,
) -> Result<f64> {
    if !(damping >= 0.0) {
        return Err(Error::InvalidParams(format!(
            "damping {damping} must be nonnegative"
        )));
    }
    invert(phi, a, b, t_max, tol, Some(damping))
}

/// Doubles `T` from 64 until successive inversions differ by less than
/// `tol`; gives up beyond `T = 1e5`.
pub fn levy_invert_auto(phi: &CharFn, a: f64, b: f64, tol: f64) -> Result<f64> {
    let mut t_max = AUTO_T_START;
    let mut prev = levy_invert(phi, a, b, t_max, tol / 4.0)?;
    while t_max * 2.0 <= AUTO_T_CAP {
        t_max *= 2.0;
        let next = levy_invert(phi, a, b, t_max, tol / 4.0)?;
        if (next - prev).abs() < tol {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::NonConvergence(format!(
        "inversion over ({a}, {b}] still moving by more than {tol:e} at T = {t_max}"
    )))
}

fn invert(phi: &CharFn, a: f64, b: f64, t_max: f64, tol: f64, damping: Option<f64>) -> Result<f64> {
    if !(a < b) {
        return Err(Error::DegenerateInterval { a, b });
    }
    if !(t_max > 0.0) || !t_max.is_finite() {
        return Err(Error::InvalidParams(format!(
            "truncation T = {t_max} must be positive"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidTolerance(tol));
    }
    let half = 0.5 * (b - a);
    let center = 0.5 * (a + b);
    let eps = damping.unwrap_or(0.0);

    // evaluation failures inside the integrand are surfaced after the fact
    let failure = std::sync::Mutex::new(None::<Error>);
    let integrand = |t: f64| -> f64 {
        let value = match phi.eval(t) {
            Ok(v) => v,
            Err(e) => {
                failure.lock().unwrap().get_or_insert(e);
                return 0.0;
            }
        };
        let rotated = ComplexValue::new((t * center).cos(), -(t * center).sin()) * value;
        2.0 * half * sinc(t * half) * rotated.re * (-eps * t * t).exp()
    };

    let omega = a.abs().max(b.abs()) + phi.spatial_extent() + 1.0;
    let width = PI / omega;
    let panels = ((t_max / width).ceil() as usize).max(1);
    let panel_tol = tol * PI / panels as f64;
    let mut total = 0.0;
    for k in 0..panels {
        let lo = t_max * k as f64 / panels as f64;
        let hi = t_max * (k + 1) as f64 / panels as f64;
        total += integrate_real(integrand, OrientedInterval::new(lo, hi), panel_tol)?;
    }
    if let Some(e) = failure.into_inner().unwrap() {
        return Err(e);
    }
    Ok(total / PI)
}

/// `max_t |φ_μ(t) − φ_ν(t)|` over the grid.
pub fn charfun_distance(mu: &Dist, nu: &Dist, t_grid: &[f64]) -> Result<f64> {
    if t_grid.is_empty() {
        return Err(Error::EmptyInput("empty t grid".into()));
    }
    t_grid.iter().try_fold(0.0f64, |acc, &t| {
        Ok(acc.max((charfun(mu, t)? - charfun(nu, t)?).norm()))
    })
}

/// `(t, φ(t))` on `steps` evenly spaced points of `[t_min, t_max]`.
pub fn charfun_grid(
    phi: &CharFn,
    t_min: f64,
    t_max: f64,
    steps: usize,
) -> Result<Vec<(f64, ComplexValue)>> {
    if steps == 0 {
        return Err(Error::EmptyInput("zero grid steps".into()));
    }
    if !(t_min <= t_max) {
        return Err(Error::InvalidParams(format!(
            "t range [{t_min}, {t_max}] is empty"
        )));
    }
    (0..steps)
        .map(|i| {
            let t = if steps == 1 {
                t_min
            } else {
                t_min + (t_max - t_min) * i as f64 / (steps - 1) as f64
            };
            Ok((t, phi.eval(t)?))
        })
        .collect()
}
