//! Oriented integration over extended-real intervals.
//!
//! Finite pieces are handled by globally adaptive Gauss–Kronrod (7/15)
//! bisection. Infinite endpoints are handled by summing panels of doubling
//! width until both the last panel's signed value and its absolute mass drop
//! below a quarter of the tolerance. Oscillatory integrals over half-lines are
//! summed between sign changes and accelerated with the Euler transform.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex value `re + i·im`; the range of characteristic functions.
pub type ComplexValue = Complex64;

pub const DEFAULT_TOL: f64 = 1e-8;

const MAX_SUBDIVISIONS: usize = 5_000;
const FIRST_PANEL_WIDTH: f64 = 16.0;
const MAX_PANELS: usize = 48;
const MAX_HALF_PERIODS: usize = 10_000;
const EULER_DEPTH: usize = 24;
const SINC_SERIES_CUTOFF: f64 = 1e-4;

/// A real number or one of the two infinities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedReal {
    NegInf,
    Finite(f64),
    PosInf,
}

impl ExtendedReal {
    /// Maps `±inf` onto the infinite variants; rejects NaN.
    pub fn from_f64(x: f64) -> Result<Self> {
        if x.is_nan() {
            Err(Error::InvalidInterval("NaN endpoint".into()))
        } else if x == f64::INFINITY {
            Ok(ExtendedReal::PosInf)
        } else if x == f64::NEG_INFINITY {
            Ok(ExtendedReal::NegInf)
        } else {
            Ok(ExtendedReal::Finite(x))
        }
    }

    pub fn as_finite(self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(x) => Some(x),
            _ => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    fn validate(self) -> Result<Self> {
        match self {
            ExtendedReal::Finite(x) if !x.is_finite() => Err(Error::InvalidInterval(format!(
                "non-finite value {x} inside a finite endpoint"
            ))),
            other => Ok(other),
        }
    }

    fn rank(self) -> (i8, f64) {
        match self {
            ExtendedReal::NegInf => (-1, 0.0),
            ExtendedReal::Finite(x) => (0, x),
            ExtendedReal::PosInf => (1, 0.0),
        }
    }
}

impl PartialOrd for ExtendedReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        let (ra, xa) = self.rank();
        let (rb, xb) = other.rank();
        match ra.cmp(&rb) {
            Ordering::Equal => xa.partial_cmp(&xb),
            ord => Some(ord),
        }
    }
}

impl From<f64> for ExtendedReal {
    /// Infinite inputs map to the infinite variants. NaN is carried into
    /// `Finite` and rejected when the interval is used.
    fn from(x: f64) -> Self {
        ExtendedReal::from_f64(x).unwrap_or(ExtendedReal::Finite(x))
    }
}

/// Integration interval; `lo > hi` denotes the negated integral over the
/// reversed interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrientedInterval {
    pub lo: ExtendedReal,
    pub hi: ExtendedReal,
}

impl OrientedInterval {
    pub fn new(lo: impl Into<ExtendedReal>, hi: impl Into<ExtendedReal>) -> Self {
        OrientedInterval {
            lo: lo.into(),
            hi: hi.into(),
        }
    }

    pub fn real_line() -> Self {
        OrientedInterval::new(ExtendedReal::NegInf, ExtendedReal::PosInf)
    }

    pub fn reversed(self) -> Self {
        OrientedInterval {
            lo: self.hi,
            hi: self.lo,
        }
    }

    /// True when `x` lies in the closed interval between the endpoints.
    pub fn contains(&self, x: f64) -> bool {
        let x = ExtendedReal::Finite(x);
        let (a, b) = if self.lo <= self.hi {
            (self.lo, self.hi)
        } else {
            (self.hi, self.lo)
        };
        a <= x && x <= b
    }
}

/// Gauss–Kronrod 15-point abscissae (positive half, center last).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
/// Embedded 7-point Gauss weights for XGK[1], XGK[3], XGK[5] and the center.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    abs_value: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Segment> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);
    let mut kronrod = WGK[7] * f_center;
    let mut gauss = WG[3] * f_center;
    let mut abs_sum = WGK[7] * f_center.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    if !kronrod.is_finite() || !abs_sum.is_finite() {
        return Err(Error::NonConvergence(format!(
            "non-finite integrand on [{a}, {b}]"
        )));
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let scale = half.abs();
    let value = kronrod * half;
    let abs_value = abs_sum * scale;
    let asc = asc * scale;
    let mut error = ((kronrod - gauss) * half).abs();
    if asc != 0.0 && error != 0.0 {
        error = asc * (200.0 * error / asc).powf(1.5).min(1.0);
    }
    if abs_value > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * abs_value);
    }
    Ok(Segment {
        a,
        b,
        value,
        error,
        abs_value,
    })
}

/// Single 15-point Kronrod estimate without adaptivity, for integrands
/// known to be smooth on `[a, b]`.
pub(crate) fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut sum = WGK[7] * f(center);
    for j in 0..7 {
        let dx = half * XGK[j];
        sum += WGK[j] * (f(center - dx) + f(center + dx));
    }
    sum * half
}

/// Integral over a finite, correctly ordered interval.
/// Returns `(value, error estimate, integral of |f|)`.
fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Result<(f64, f64, f64)> {
    if a == b {
        return Ok((0.0, 0.0, 0.0));
    }
    let first = gauss_kronrod(f, a, b)?;
    if first.error <= tol {
        return Ok((first.value, first.error, first.abs_value));
    }
    let mut heap = BinaryHeap::new();
    let mut total_err = first.error;
    heap.push(first);
    // Segments too narrow to split further; they still count towards the sums.
    let mut frozen: Vec<Segment> = Vec::new();
    let mut frozen_err = 0.0;
    for _ in 0..MAX_SUBDIVISIONS {
        if total_err + frozen_err <= tol {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b || (worst.b - worst.a) < 1e3 * f64::EPSILON * mid.abs()
        {
            total_err -= worst.error;
            frozen_err += worst.error;
            frozen.push(worst);
            continue;
        }
        let left = gauss_kronrod(f, worst.a, mid)?;
        let right = gauss_kronrod(f, mid, worst.b)?;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    let segments = heap.into_vec();
    let err: f64 = segments.iter().chain(&frozen).map(|s| s.error).sum();
    if err > tol {
        return Err(Error::NonConvergence(format!(
            "error estimate {err:e} above tolerance {tol:e} on [{a}, {b}]"
        )));
    }
    let mut all: Vec<&Segment> = segments.iter().chain(&frozen).collect();
    all.sort_by(|x, y| x.a.total_cmp(&y.a));
    let value = all.iter().map(|s| s.value).sum();
    let abs_value = all.iter().map(|s| s.abs_value).sum();
    Ok((value, err, abs_value))
}

/// ∫ f over [a, ∞) by panels of doubling width.
fn upper_tail<F: Fn(f64) -> f64>(f: &F, a: f64, tol: f64) -> Result<f64> {
    let mut total = 0.0;
    let mut left = a;
    let mut width = FIRST_PANEL_WIDTH;
    let mut panel_tol = tol / 8.0;
    for k in 0..MAX_PANELS {
        let right = left + width;
        let (value, _, abs_value) = adaptive(f, left, right, panel_tol)?;
        total += value;
        if k > 0 && value.abs() < tol / 4.0 && abs_value < tol / 4.0 {
            return Ok(total);
        }
        left = right;
        width *= 2.0;
        panel_tol /= 2.0;
    }
    Err(Error::NonConvergence(format!(
        "tail beyond {left:e} did not vanish"
    )))
}

/// Integral of `f` over an oriented interval with absolute error at most
/// `tol` (as estimated).
pub fn integrate_real<F: Fn(f64) -> f64>(f: F, iv: OrientedInterval, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidTolerance(tol));
    }
    let lo = iv.lo.validate()?;
    let hi = iv.hi.validate()?;
    if lo == hi {
        return Ok(0.0);
    }
    if lo > hi {
        return integrate_real(f, iv.reversed(), tol).map(|v| -v);
    }
    use ExtendedReal::*;
    match (lo, hi) {
        (Finite(a), Finite(b)) => adaptive(&f, a, b, tol).map(|r| r.0),
        (Finite(a), PosInf) => upper_tail(&f, a, tol),
        (NegInf, Finite(b)) => upper_tail(&|x: f64| f(-x), -b, tol),
        (NegInf, PosInf) => {
            let right = upper_tail(&f, 0.0, tol / 2.0)?;
            let left = upper_tail(&|x: f64| f(-x), 0.0, tol / 2.0)?;
            Ok(left + right)
        }
        _ => unreachable!("ordered distinct endpoints"),
    }
}

/// Componentwise integral of a complex-valued integrand.
pub fn integrate_complex<F: Fn(f64) -> ComplexValue>(
    f: F,
    iv: OrientedInterval,
    tol: f64,
) -> Result<ComplexValue> {
    let re = integrate_real(|x| f(x).re, iv, tol)?;
    let im = integrate_real(|x| f(x).im, iv, tol)?;
    Ok(ComplexValue::new(re, im))
}

/// Binomially weighted average of the last `depth + 1` partial sums,
/// i.e. `depth` rounds of neighbour averaging.
fn euler_average(partials: &[f64], depth: usize) -> f64 {
    let start = partials.len() - depth - 1;
    let mut row: Vec<f64> = partials[start..].to_vec();
    for _ in 0..depth {
        for i in 0..row.len() - 1 {
            row[i] = 0.5 * (row[i] + row[i + 1]);
        }
        row.pop();
    }
    row[0]
}

/// ∫ f over `[lo, ∞)` for an integrand whose sign changes at the points
/// `zeros(0) < zeros(1) < …`.
///
/// The integrals between consecutive zeros form an alternating series; its
/// partial sums are accelerated with the Euler transform.
pub fn integrate_oscillatory<F, Z>(f: F, zeros: Z, iv: OrientedInterval, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
    Z: Fn(usize) -> f64,
{
    if !(tol > 0.0) {
        return Err(Error::InvalidTolerance(tol));
    }
    let lo = match (iv.lo.validate()?, iv.hi) {
        (ExtendedReal::Finite(a), ExtendedReal::PosInf) => a,
        _ => {
            return Err(Error::InvalidInterval(
                "oscillatory integration needs a finite lower and infinite upper endpoint".into(),
            ))
        }
    };
    let segment_tol = (tol * 1e-3).max(1e-15);

    let mut k = 0;
    while zeros(k) <= lo {
        k += 1;
        if k > MAX_HALF_PERIODS {
            return Err(Error::NotOscillatory(format!("no zero found above {lo}")));
        }
    }
    let mut left = zeros(k);
    let head = adaptive(&f, lo, left, segment_tol)?.0;

    let mut partials = vec![head];
    let mut prev_term: Option<f64> = None;
    let mut prev_estimate: Option<f64> = None;
    let mut calm = 0;
    for _ in 0..MAX_HALF_PERIODS {
        k += 1;
        let right = zeros(k);
        if !(right > left) {
            return Err(Error::InvalidParams(format!(
                "zeros must be strictly increasing, got {left} then {right}"
            )));
        }
        let term = adaptive(&f, left, right, segment_tol)?.0;
        if let Some(p) = prev_term {
            if p != 0.0 && term != 0.0 && p.signum() == term.signum() {
                return Err(Error::NotOscillatory(format!(
                    "consecutive half-period integrals {p:e} and {term:e} share a sign"
                )));
            }
        }
        prev_term = Some(term);
        partials.push(partials.last().unwrap() + term);
        left = right;

        let depth = EULER_DEPTH.min(partials.len() - 1);
        let estimate = euler_average(&partials, depth);
        match prev_estimate {
            Some(prev) if depth == EULER_DEPTH && (estimate - prev).abs() < tol => {
                calm += 1;
                if calm >= 2 {
                    return Ok(estimate);
                }
            }
            _ => calm = 0,
        }
        prev_estimate = Some(estimate);
    }
    Err(Error::NonConvergence(format!(
        "Euler acceleration stalled after {MAX_HALF_PERIODS} half-periods"
    )))
}

/// `sin(x)/x`, with the Taylor series on `|x| ≤ 1e-4`.
pub fn sinc(x: f64) -> f64 {
    if x.abs() <= SINC_SERIES_CUTOFF {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// ∫₀^∞ sin(x)/x dx.
pub fn dirichlet_integral(tol: f64) -> Result<f64> {
    integrate_oscillatory(
        sinc,
        |k| k as f64 * std::f64::consts::PI,
        OrientedInterval::new(0.0, f64::INFINITY),
        tol,
    )
}

/// k-th moment of the standard normal by quadrature over the real line.
pub fn gaussian_moment(k: u32, tol: f64) -> Result<f64> {
    let norm = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
    let k = i32::try_from(k).map_err(|_| Error::OutOfRange(format!("moment order {k}")))?;
    integrate_real(
        move |x| x.powi(k) * (-0.5 * x * x).exp() * norm,
        OrientedInterval::real_line(),
        tol,
    )
}

/// `|e^{ix} − Σ_{j≤n} (ix)^j / j!|`.
///
/// Below the point where the series terms start decreasing the tail
/// `Σ_{j>n}` is summed directly, which avoids cancellation when the
/// remainder is far below one.
pub fn exp_taylor_remainder(x: f64, n: u32) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let i = ComplexValue::i();
    if x.abs() < f64::from(n) + 2.0 {
        // first tail term (ix)^{n+1}/(n+1)!
        let mut term = ComplexValue::new(1.0, 0.0);
        for j in 1..=n + 1 {
            term = term * i * x / f64::from(j);
        }
        let mut tail = ComplexValue::new(0.0, 0.0);
        let mut j = n + 1;
        loop {
            tail += term;
            j += 1;
            term = term * i * x / f64::from(j);
            if term.norm() <= f64::EPSILON * 1e-3 * tail.norm() || term.norm() == 0.0 {
                break;
            }
        }
        tail.norm()
    } else {
        let mut term = ComplexValue::new(1.0, 0.0);
        let mut partial = term;
        for j in 1..=n {
            term = term * i * x / f64::from(j);
            partial += term;
        }
        (ComplexValue::new(x.cos(), x.sin()) - partial).norm()
    }
}
