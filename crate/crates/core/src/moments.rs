//! Window moments of sampled curves and log-log exponent fits.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::error_terms::SampledCurve;
use crate::quadrature::pairwise_sum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowKind {
    /// `∫_0^T`
    ZeroToT,
    /// `∫_T^{2T}`
    TTo2T,
}

impl WindowKind {
    pub fn bounds(self, t: f64) -> (f64, f64) {
        match self {
            WindowKind::ZeroToT => (0.0, t),
            WindowKind::TTo2T => (t, 2.0 * t),
        }
    }
}

/// `(T, ∫_window |f|^m)` pairs, sorted by `T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentCurve {
    pub m: f64,
    pub points: Vec<(f64, f64)>,
    pub window_kind: WindowKind,
}

impl MomentCurve {
    pub fn new(m: f64, mut points: Vec<(f64, f64)>, window_kind: WindowKind) -> Result<Self> {
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        if points.iter().any(|&(_, v)| !(v >= 0.0)) {
            return Err(Error::Domain("moment values must be nonnegative".into()));
        }
        Ok(Self {
            m,
            points,
            window_kind,
        })
    }
}

/// Trapezoid integral of `|f|^m` over `[a, b]`, with linearly interpolated
/// partial cells at the ends.
pub fn integrate_power(f: &SampledCurve, m: f64, a: f64, b: f64) -> Result<f64> {
    if !(m >= 1.0) {
        return Err(Error::Domain(format!(
            "moment order must be at least 1, got {m}"
        )));
    }
    if !(a <= b) {
        return Err(Error::Domain(format!("empty window [{a}, {b}]")));
    }
    f.check_covers(a, b)?;
    let pow = |v: f64| v.abs().powf(m);
    let value_at = |t: f64| f.linear_at(t).map(pow);
    let first = ((a - f.t0) / f.dt).ceil() as usize;
    let last = (((b - f.t0) / f.dt).floor() as usize).min(f.len() - 1);
    if first > last {
        // both ends inside one cell
        return Ok(0.5 * (b - a) * (value_at(a)? + value_at(b)?));
    }
    let mut pieces = Vec::with_capacity(last - first + 2);
    let (ta, tl) = (f.t_at(first), f.t_at(last));
    pieces.push(0.5 * (ta - a) * (value_at(a)? + pow(f.values[first])));
    if last > first {
        let inner: Vec<f64> = f.values[first + 1..last].iter().map(|&v| pow(v)).collect();
        pieces.push(
            f.dt * (pairwise_sum(&inner) + 0.5 * (pow(f.values[first]) + pow(f.values[last]))),
        );
    }
    pieces.push(0.5 * (b - tl) * (pow(f.values[last]) + value_at(b)?));
    Ok(pairwise_sum(&pieces))
}

/// `∫ |f|^m` over `[0, T]` or `[T, 2T]`.
pub fn window_moment(f: &SampledCurve, m: f64, t: f64, kind: WindowKind) -> Result<f64> {
    let (a, b) = kind.bounds(t);
    integrate_power(f, m, a, b)
}

pub fn moment_curve(f: &SampledCurve, m: f64, ts: &[f64], kind: WindowKind) -> Result<MomentCurve> {
    let points = ts
        .iter()
        .map(|&t| Ok((t, window_moment(f, m, t, kind)?)))
        .collect::<Result<Vec<_>>>()?;
    MomentCurve::new(m, points, kind)
}

/// `T = 1000 · 2^j` up to `t_max`.
pub fn geometric_t_list(t_max: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut t = 1000.0;
    while t <= t_max * (1.0 + 1e-12) {
        out.push(t);
        t *= 2.0;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub max_residual: f64,
    pub t_range: (f64, f64),
}

pub const MIN_FIT_POINTS: usize = 5;

fn check_fit_input(curve: &MomentCurve) -> Result<()> {
    if curve.points.len() < MIN_FIT_POINTS {
        return Err(Error::Fit(format!(
            "{} points, at least {MIN_FIT_POINTS} needed",
            curve.points.len()
        )));
    }
    let (lo, hi) = (curve.points[0].0, curve.points[curve.points.len() - 1].0);
    if !(lo > 0.0) || hi / lo < 10.0 * (1.0 - 1e-12) {
        return Err(Error::Fit(format!(
            "T range [{lo}, {hi}] spans less than a decade"
        )));
    }
    if let Some(&(t, v)) = curve.points.iter().find(|&&(_, v)| !(v > 0.0)) {
        return Err(Error::Domain(format!(
            "nonpositive value {v} at T = {t}; the log-log fit is undefined"
        )));
    }
    Ok(())
}

/// Least-squares line through `(ln T, ln value)`.
pub fn fit_exponent(curve: &MomentCurve) -> Result<FitResult> {
    check_fit_input(curve)?;
    let xs: Vec<f64> = curve.points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = curve.points.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let mx = pairwise_sum(&xs) / n;
    let my = pairwise_sum(&ys) / n;
    let sxy: Vec<f64> = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - mx) * (y - my))
        .collect();
    let sxx: Vec<f64> = xs.iter().map(|x| (x - mx) * (x - mx)).collect();
    let slope = pairwise_sum(&sxy) / pairwise_sum(&sxx);
    let intercept = my - slope * mx;
    let max_residual = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).abs())
        .fold(0.0, f64::max);
    Ok(FitResult {
        slope,
        intercept,
        max_residual,
        t_range: (curve.points[0].0, curve.points[curve.points.len() - 1].0),
    })
}

/// Fit `value ≈ T^a (c0 + c1 L + c2 L² + c3 L³)`, `L = ln T`, for a given
/// exponent `a`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogCubicFit {
    pub exponent: f64,
    pub coefficients: [f64; 4],
    /// Largest `|fitted / value - 1|` over the points.
    pub max_relative_residual: f64,
}

pub fn fit_log_cubic(curve: &MomentCurve, exponent: f64) -> Result<LogCubicFit> {
    check_fit_input(curve)?;
    let n = curve.points.len();
    // rows scaled by 1/value so residuals are relative
    let mut a = DMatrix::<f64>::zeros(n, 4);
    let b = DVector::<f64>::from_element(n, 1.0);
    for (i, &(t, v)) in curve.points.iter().enumerate() {
        let l = t.ln();
        let scale = t.powf(exponent) / v;
        for j in 0..4 {
            a[(i, j)] = scale * l.powi(j as i32);
        }
    }
    let svd = a.clone().svd(true, true);
    let c = svd
        .solve(&b, 1e-14)
        .map_err(|e| Error::Fit(format!("log-cubic least squares failed: {e}")))?;
    let fitted = &a * &c;
    let max_relative_residual = fitted.iter().map(|f| (f - 1.0).abs()).fold(0.0, f64::max);
    Ok(LogCubicFit {
        exponent,
        coefficients: [c[0], c[1], c[2], c[3]],
        max_relative_residual,
    })
}
