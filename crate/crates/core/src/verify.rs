//! Verification suites: each check becomes a [`VerificationReport`] with a
//! measured left side, the bound it is held to, and a pass flag.
//!
//! The bounds are asymptotic statements with unspecified constants, so at
//! desk scale they are checked as exponent fits with a fixed slack, or as a
//! measured constant held below a generous cap. Measured constants are always
//! reported, whether or not the check passes.

use std::f64::consts::PI;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::error_terms::{ErrorTermBundle, SampledCurve};
use crate::moments::{
    fit_exponent, fit_log_cubic, moment_curve, FitResult, MomentCurve, WindowKind,
};
use crate::quadrature::{cumulative_trapezoid, pairwise_sum, trapezoid_uniform};
use crate::smoothing::{GaussKernel, SmoothingParams};
use crate::zeta::{ZGrid, ZetaSqSource};

/// Slack added to a target exponent before a fitted slope counts as a failure.
pub const SLOPE_SLACK: f64 = 0.15;

/// Cap on fitted slopes of `∫_T^{2T} J_1^m`.
pub const SMOOTHED_SLOPE_CAP: f64 = 1.2;

/// Cap on the measured constant of the smoothed-moment inequality.
pub const INEQUALITY_CONSTANT_CAP: f64 = 100.0;

/// Stand-in for `ε` in exponents of `G`.
pub const EPSILON_EXPONENT: f64 = 0.01;

/// `∫_0^T E² ~ c T^{3/2}`, `c = (2/3)(2π)^{-1/2} ζ⁴(3/2)/ζ(3)`.
pub const E2_CONSTANT: f64 = 10.304_717_439_500_138;

/// Relative window around [`E2_CONSTANT`] accepted at the largest `T`.
pub const E2_TOLERANCE: f64 = 0.25;

/// Exponent `593/912` of the pointwise bound on `R(T)`.
pub const R_POINTWISE_EXPONENT: f64 = 593.0 / 912.0;

/// Largest allowed `|R(T)| / T^{3/4}` over the grid.
pub const R_T34_CAP: f64 = 5.0;

/// Samples of `J_1` per unit `G` when integrating `J_1^m` over `[T, 2T]`.
pub const J_SAMPLES_PER_G: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub constant_used: f64,
    /// `lhs <= rhs`; false whenever either side is NaN.
    pub passed: bool,
    pub notes: String,
}

impl VerificationReport {
    pub fn new(
        name: impl Into<String>,
        lhs: f64,
        rhs: f64,
        constant_used: f64,
        notes: impl Into<String>,
    ) -> Self {
        Self {
            name: name.into(),
            lhs,
            rhs,
            constant_used,
            passed: lhs <= rhs,
            notes: notes.into(),
        }
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: {:.6} <= {:.6} (constant {:.6}) {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.lhs,
            self.rhs,
            self.constant_used,
            self.notes
        )
    }
}

/// Exact rational with a positive denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ratio {
    pub num: i64,
    pub den: i64,
}

impl Ratio {
    pub const fn new(num: i64, den: i64) -> Self {
        assert!(den > 0);
        let g = gcd(num.unsigned_abs(), den as u64) as i64;
        Self {
            num: num / g,
            den: den / g,
        }
    }

    pub const fn int(n: i64) -> Self {
        Self { num: n, den: 1 }
    }

    pub fn value(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub const fn add(self, o: Self) -> Self {
        Self::new(self.num * o.den + o.num * self.den, self.den * o.den)
    }

    pub const fn mul(self, o: Self) -> Self {
        Self::new(self.num * o.num, self.den * o.den)
    }
}

const fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    if a == 0 {
        1
    } else {
        a
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// Inputs of the reductions from smoothed or `E*` moments to moments of zeta.
///
/// * `alpha(1, m)`: if `∫_T^{2T} J_1^m ≪ T^{1+ε}` for `G ≥ T^{α}`, then
///   `I_m(T) ≪ T^{1 + (m-1)α + ε}`.
/// * `c(k)`: if `∫_0^T |E*|^k ≪ T^{c(k)+ε}`, then
///   `∫_0^T |ζ|^{2k+2} ≪ T^{c(k)+ε}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZetaMomentParams {
    /// `((k, m), α_{k,m})`
    pub alpha: Vec<((u32, u32), Ratio)>,
    /// `(k, c(k))`
    pub c: Vec<(u32, Ratio)>,
}

impl Default for ZetaMomentParams {
    fn default() -> Self {
        Self {
            alpha: vec![
                ((1, 4), Ratio::new(7, 36)),
                ((1, 5), Ratio::new(1, 5)),
                ((1, 6), Ratio::new(2, 9)),
            ],
            c: vec![(5, Ratio::int(2)), (6, Ratio::new(7, 3))],
        }
    }
}

impl ZetaMomentParams {
    pub fn alpha(&self, k: u32, m: u32) -> Option<Ratio> {
        self.alpha
            .iter()
            .find(|(km, _)| *km == (k, m))
            .map(|(_, a)| *a)
    }

    pub fn c(&self, k: u32) -> Option<Ratio> {
        self.c.iter().find(|(kk, _)| *kk == k).map(|(_, c)| *c)
    }

    /// `1 + (m - 1) α_{1,m}`: exponent of `I_m` implied by `α_{1,m}`.
    pub fn implied_moment_exponent(&self, m: u32) -> Option<Ratio> {
        self.alpha(1, m)
            .map(|a| Ratio::int(1).add(Ratio::int(i64::from(m) - 1).mul(a)))
    }
}

/// Exponents of `I_m` stated for `m = 4, 5, 6`.
pub const STATED_MOMENT_EXPONENTS: [(u32, Ratio); 3] = [
    (4, Ratio::new(19, 12)),
    (5, Ratio::new(9, 5)),
    (6, Ratio::new(19, 9)),
];

/// Smallest admissible exponent `α` in `G = T^α` for `∫_T^{2T} J_1^m ≪ T^{1+ε}`.
pub fn smoothing_threshold(m: u32) -> Result<Ratio> {
    match m {
        1 | 2 => Ok(Ratio::int(0)),
        3 => Ok(Ratio::new(1, 7)),
        4 => Ok(Ratio::new(7, 36)),
        5 => Ok(Ratio::new(1, 5)),
        6 => Ok(Ratio::new(2, 9)),
        _ => Err(Error::Domain(format!("no threshold known for m = {m}"))),
    }
}

/// `L(y) = (log y)^{1/4} (log₂ y)^{(3/4)(2^{4/3}-1)} (log₃ y)^{-5/8}`, with
/// `log₂ = log log` and `log₃ = log log log`. Needs `y > e^e`.
pub fn iterated_log_factor(y: f64) -> Result<f64> {
    let threshold = std::f64::consts::E.exp();
    if !(y > threshold) || !y.is_finite() {
        return Err(Error::Domain(format!("L(y) needs finite y > e^e, got {y}")));
    }
    let l1 = y.ln();
    let l2 = l1.ln();
    let l3 = l2.ln();
    let e2 = 0.75 * (2f64.powf(4.0 / 3.0) - 1.0);
    Ok(l1.powf(0.25) * l2.powf(e2) * l3.powf(-0.625))
}

fn fit_note(fit: &FitResult, curve: &MomentCurve) -> String {
    let local = local_slopes(curve)
        .iter()
        .map(|s| format!("{s:.3}"))
        .collect::<Vec<_>>()
        .join(", ");
    format!(
        "slope {:.4} over T in [{}, {}], max log residual {:.2e}, local slopes [{local}]",
        fit.slope, fit.t_range.0, fit.t_range.1, fit.max_residual
    )
}

/// Slopes between consecutive points on log-log axes; a steady drift
/// downward is the signature of logarithmic factors.
pub fn local_slopes(curve: &MomentCurve) -> Vec<f64> {
    curve
        .points
        .windows(2)
        .map(|w| (w[1].1 / w[0].1).ln() / (w[1].0 / w[0].0).ln())
        .collect()
}

fn cubic_note(curve: &MomentCurve, exponent: f64) -> String {
    match fit_log_cubic(curve, exponent) {
        Ok(c) => format!(
            "; log-cubic fit at exponent {:.4}: [{:.4e}, {:.4e}, {:.4e}, {:.4e}], max rel residual {:.2e}",
            exponent, c.coefficients[0], c.coefficients[1], c.coefficients[2], c.coefficients[3], c.max_relative_residual
        ),
        Err(e) => format!("; log-cubic fit unavailable: {e}"),
    }
}

/// Slopes of `∫_0^T |E*|^m` for `m = 2, 4, 5, 6` against `4/3, 16/9, 2, 7/3`
/// plus [`SLOPE_SLACK`]. For `m = 2` the slope must also lie in
/// `[1.15, 1.48]`.
pub fn verify_estar_moments(
    bundle: &ErrorTermBundle,
    ts: &[f64],
) -> Result<Vec<VerificationReport>> {
    let e_star = bundle.e_star_curve();
    let targets = [
        (2.0, Ratio::new(4, 3)),
        (4.0, Ratio::new(16, 9)),
        (5.0, Ratio::int(2)),
        (6.0, Ratio::new(7, 3)),
    ];
    let curves = targets
        .par_iter()
        .map(|&(m, _)| moment_curve(&e_star, m, ts, WindowKind::ZeroToT))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::new();
    for ((m, target), curve) in targets.iter().zip(&curves) {
        let fit = fit_exponent(curve)?;
        let mut notes = format!("target {target}; {}", fit_note(&fit, curve));
        if *m == 2.0 {
            notes.push_str(&cubic_note(curve, target.value()));
            out.push(VerificationReport::new(
                "estar_m2_slope_upper",
                fit.slope,
                1.48,
                target.value(),
                notes.clone(),
            ));
            out.push(VerificationReport::new(
                "estar_m2_slope_lower",
                1.15,
                fit.slope,
                target.value(),
                notes,
            ));
        } else {
            out.push(VerificationReport::new(
                format!("estar_m{m}_slope"),
                fit.slope,
                target.value() + SLOPE_SLACK,
                target.value(),
                notes,
            ));
        }
    }
    Ok(out)
}

/// `∫_0^T E² / T^{3/2}` at each `T`; passes when the ratio at the largest `T`
/// is within [`E2_TOLERANCE`] of [`E2_CONSTANT`].
pub fn verify_e2_asymptotic(e: &SampledCurve, ts: &[f64]) -> Result<VerificationReport> {
    let t_last = *ts
        .iter()
        .max_by(|a, b| a.total_cmp(b))
        .ok_or_else(|| Error::Fit("empty T list".into()))?;
    let curve = moment_curve(e, 2.0, ts, WindowKind::ZeroToT)?;
    let ratios: Vec<(f64, f64)> = curve
        .points
        .iter()
        .map(|&(t, v)| (t, v / t.powf(1.5)))
        .collect();
    let last = ratios
        .iter()
        .find(|r| r.0 == t_last)
        .map_or(f64::NAN, |r| r.1);
    let mut notes = ratios
        .iter()
        .map(|(t, r)| format!("T={t}: {r:.5}"))
        .collect::<Vec<_>>()
        .join(", ");
    if last == 0.0 {
        notes.push_str("; E vanishes identically on the grid");
    }
    Ok(VerificationReport::new(
        "e2_constant",
        (last - E2_CONSTANT).abs(),
        E2_TOLERANCE * E2_CONSTANT,
        E2_CONSTANT,
        notes,
    ))
}

/// Slopes of `∫_0^T R²` (in `[1.8, 2.2]`) and `∫_0^T R⁴` (at most `3.15`),
/// and `max |R(T)| / T^{3/4}` (at most [`R_T34_CAP`]). The constant in
/// `|R(T)| ≤ C T^{593/912}` is measured and recorded in the notes only.
pub fn verify_r_moments(bundle: &ErrorTermBundle, ts: &[f64]) -> Result<Vec<VerificationReport>> {
    let r = bundle.r_curve();
    let r2 = moment_curve(&r, 2.0, ts, WindowKind::ZeroToT)?;
    let r4 = moment_curve(&r, 4.0, ts, WindowKind::ZeroToT)?;
    let f2 = fit_exponent(&r2)?;
    let f4 = fit_exponent(&r4)?;
    let notes2 = format!("target 2; {}{}", fit_note(&f2, &r2), cubic_note(&r2, 2.0));

    // pointwise size, ignoring the start-up region t < 100
    let (mut worst34, mut worst_b, mut at) = (0.0f64, 0.0f64, 0.0);
    for (i, &v) in r.values.iter().enumerate() {
        let t = r.t_at(i);
        if t < 100.0 {
            continue;
        }
        let q = v.abs() / t.powf(0.75);
        if q > worst34 {
            worst34 = q;
            at = t;
        }
        worst_b = worst_b.max(v.abs() / t.powf(R_POINTWISE_EXPONENT));
    }
    Ok(vec![
        VerificationReport::new("r2_slope_upper", f2.slope, 2.2, 2.0, notes2.clone()),
        VerificationReport::new("r2_slope_lower", 1.8, f2.slope, 2.0, notes2),
        VerificationReport::new(
            "r4_slope",
            f4.slope,
            3.0 + SLOPE_SLACK,
            3.0,
            format!("target 3; {}", fit_note(&f4, &r4)),
        ),
        VerificationReport::new(
            "r_pointwise",
            worst34,
            R_T34_CAP,
            R_T34_CAP,
            format!(
                "max |R|/T^(3/4) = {worst34:.4} at T = {at}; max |R|/T^(593/912) = {worst_b:.4} over T >= 100 (recorded only)"
            ),
        ),
    ])
}

/// `∫_T^{2T} J_1(t, G)^m dt` for each `m` in `ms`, from `J_1` sampled at
/// spacing about `G / J_SAMPLES_PER_G` and the trapezoid rule.
pub fn smoothed_power_integrals<S: ZetaSqSource + ?Sized>(
    source: &S,
    t: f64,
    g: f64,
    ms: &[u32],
) -> Result<Vec<f64>> {
    if !(t > 1.0) {
        return Err(Error::Domain(format!("T must exceed 1, got {t}")));
    }
    let kernel = GaussKernel::new(&SmoothingParams::log_truncated(g, 1, t))?;
    let n = (J_SAMPLES_PER_G * t / g).ceil().max(2.0) as usize;
    let h = t / n as f64;
    let j: Vec<f64> = (0..=n)
        .into_par_iter()
        .map(|i| kernel.apply(t + i as f64 * h, source))
        .collect::<Result<_>>()?;
    Ok(ms
        .iter()
        .map(|&m| {
            let p: Vec<f64> = j.iter().map(|v| v.powi(m as i32)).collect();
            trapezoid_uniform(&p, h)
        })
        .collect())
}

/// Cumulative trapezoid of `|f|^m` and exact evaluation of its piecewise-linear
/// integrand's antiderivative at any `t` in range.
struct PowerPrefix<'a> {
    curve: &'a SampledCurve,
    pow: Vec<f64>,
    prefix: Vec<f64>,
}

impl<'a> PowerPrefix<'a> {
    fn new(curve: &'a SampledCurve, m: u32) -> Self {
        let pow: Vec<f64> = curve
            .values
            .iter()
            .map(|v| v.abs().powi(m as i32))
            .collect();
        let prefix = cumulative_trapezoid(&pow, curve.dt);
        Self { curve, pow, prefix }
    }

    fn at(&self, t: f64) -> Result<f64> {
        self.curve.check_covers(t, t)?;
        let x = (t - self.curve.t0) / self.curve.dt;
        let k = (x.floor() as usize).min(self.pow.len() - 1);
        let s = x - k as f64;
        if s == 0.0 || k + 1 >= self.pow.len() {
            return Ok(self.prefix[k]);
        }
        let (a, b) = (self.pow[k], self.pow[k + 1]);
        Ok(self.prefix[k] + self.curve.dt * s * (a + 0.5 * s * (b - a)))
    }
}

/// Smoothed-moment inequality
///
/// ```text
/// ∫_T^{2T} J_1^m(t, G) dt ≤ G^{-1-m} ∫_{-GL}^{GL} ∫_T^{2T} |E*(t+x)|^m dt dx + C T L^{2m},   L = log T
/// ```
///
/// The report's `lhs` is the smallest `C ≥ 1` (to 1%) making the inequality
/// hold and `rhs` is [`INEQUALITY_CONSTANT_CAP`].
pub fn verify_smoothed_inequality<S: ZetaSqSource + ?Sized>(
    bundle: &ErrorTermBundle,
    source: &S,
    m: u32,
    g: f64,
    t: f64,
) -> Result<VerificationReport> {
    if m == 0 {
        return Err(Error::Domain("m must be at least 1".into()));
    }
    if !(t > std::f64::consts::E) {
        return Err(Error::Domain(format!("T must exceed e, got {t}")));
    }
    if !(g > 0.0 && g <= t) {
        return Err(Error::Range(format!("G = {g} must lie in (0, T = {t}]")));
    }
    let l = t.ln();
    let lhs = smoothed_power_integrals(source, t, g, &[m])?[0];

    let e_star = bundle.e_star_curve();
    e_star.check_covers(t - g * l, 2.0 * t + g * l)?;
    let prefix = PowerPrefix::new(&e_star, m);
    let nx = (2.0 * g * l / e_star.dt).ceil() as usize;
    let hx = 2.0 * g * l / nx as f64;
    let inner: Vec<f64> = (0..=nx)
        .into_par_iter()
        .map(|i| {
            let x = -g * l + i as f64 * hx;
            Ok(prefix.at(2.0 * t + x)? - prefix.at(t + x)?)
        })
        .collect::<Result<_>>()?;
    let mean_term = g.powi(-1 - m as i32) * trapezoid_uniform(&inner, hx);
    let scale = t * l.powi(2 * m as i32);
    let rhs = |c: f64| mean_term + c * scale;

    let mut hi = 1.0;
    let c = if lhs <= rhs(1.0) {
        1.0
    } else {
        while lhs > rhs(hi) {
            hi *= 2.0;
            if hi > 1e15 {
                return Err(Error::Accuracy(format!(
                    "no constant below 1e15 satisfies the inequality (lhs {lhs})"
                )));
            }
        }
        let mut lo = hi / 2.0;
        while (hi - lo) > 0.01 * hi {
            let mid = 0.5 * (lo + hi);
            if lhs <= rhs(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    };
    Ok(VerificationReport::new(
        format!("smoothed_inequality_m{m}"),
        c,
        INEQUALITY_CONSTANT_CAP,
        INEQUALITY_CONSTANT_CAP,
        format!(
            "T = {t}, G = {g:.4}: lhs integral {lhs:.6e}, E* term {mean_term:.6e}, T log^{}T = {scale:.6e}",
            2 * m
        ),
    ))
}

/// Fitted `T`-slopes of `∫_T^{2T} J_1^m dt` with `G = T^{α_m + ε}` at each
/// threshold `α_m`; each must stay below [`SMOOTHED_SLOPE_CAP`].
pub fn verify_smoothed_slopes<S: ZetaSqSource + ?Sized>(
    source: &S,
    ms: &[u32],
    ts: &[f64],
) -> Result<Vec<VerificationReport>> {
    // m sharing a threshold share their J_1 samples
    let mut groups: Vec<(Ratio, Vec<u32>)> = Vec::new();
    for &m in ms {
        let a = smoothing_threshold(m)?;
        match groups.iter_mut().find(|(ga, _)| *ga == a) {
            Some((_, v)) => v.push(m),
            None => groups.push((a, vec![m])),
        }
    }
    let mut by_m: Vec<(u32, Ratio, Vec<(f64, f64)>)> = Vec::new();
    for (alpha, group) in &groups {
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for &t in ts {
            let g = t.powf(alpha.value() + EPSILON_EXPONENT);
            rows.push(smoothed_power_integrals(source, t, g, group)?);
        }
        for (i, &m) in group.iter().enumerate() {
            by_m.push((
                m,
                *alpha,
                ts.iter().zip(&rows).map(|(&t, r)| (t, r[i])).collect(),
            ));
        }
    }
    by_m.sort_by_key(|e| e.0);
    by_m.into_iter()
        .map(|(m, alpha, points)| {
            let curve = MomentCurve::new(f64::from(m), points, WindowKind::TTo2T)?;
            let fit = fit_exponent(&curve)?;
            let means = curve
                .points
                .iter()
                .map(|(t, v)| format!("{:.3}", (v / t).powf(1.0 / f64::from(m))))
                .collect::<Vec<_>>()
                .join(", ");
            Ok(VerificationReport::new(
                format!("smoothed_slope_m{m}"),
                fit.slope,
                SMOOTHED_SLOPE_CAP,
                alpha.value() + EPSILON_EXPONENT,
                format!(
                    "G = T^({alpha} + {EPSILON_EXPONENT}); {}; (mean J_1^m)^(1/m) per T: {means}",
                    fit_note(&fit, &curve)
                ),
            ))
        })
        .collect()
}

/// `I_k(T) = ∫_0^T |ζ(1/2+it)|^{2k} dt` from a tabulated `Z`.
pub fn zeta_moment_curve(zgrid: &ZGrid, k: u32, ts: &[f64]) -> Result<MomentCurve> {
    let t_end = ts.iter().copied().fold(0.0, f64::max);
    if t_end > zgrid.t_max() {
        return Err(Error::coverage(0.0, t_end, 0.0, zgrid.t_max()));
    }
    let curve = zgrid.to_curve();
    moment_curve(&curve, f64::from(2 * k), ts, WindowKind::ZeroToT)
}

/// Fitted slopes of `I_4, I_5, I_6` against the implied exponents `19/12,
/// 9/5, 19/9` (and `I_6` against `2`), plus the reduction arithmetic itself.
pub fn zeta_moment_report(
    zgrid: &ZGrid,
    params: &ZetaMomentParams,
    ts: &[f64],
) -> Result<Vec<VerificationReport>> {
    let mut out = Vec::new();
    for (m, stated) in STATED_MOMENT_EXPONENTS {
        let derived = params
            .implied_moment_exponent(m)
            .ok_or_else(|| Error::Config(format!("no alpha(1, {m}) given")))?;
        let diff = derived.add(stated.mul(Ratio::int(-1)));
        out.push(VerificationReport::new(
            format!("reduction_alpha_m{m}"),
            diff.value().abs(),
            0.0,
            params.alpha(1, m).map_or(f64::NAN, Ratio::value),
            format!(
                "1 + ({m} - 1) * {} = {derived}, stated {stated}",
                params.alpha(1, m).unwrap_or(Ratio::int(0))
            ),
        ));
    }
    for (k, twice, stated) in [(5, 12, Ratio::int(2)), (6, 14, Ratio::new(7, 3))] {
        let c = params
            .c(k)
            .ok_or_else(|| Error::Config(format!("no c({k}) given")))?;
        let diff = c.add(stated.mul(Ratio::int(-1)));
        out.push(VerificationReport::new(
            format!("reduction_c{k}"),
            diff.value().abs(),
            0.0,
            c.value(),
            format!("c({k}) = {c} gives a {twice}th-moment exponent {c}, stated {stated}"),
        ));
    }

    let curves = [4u32, 5, 6]
        .par_iter()
        .map(|&k| zeta_moment_curve(zgrid, k, ts))
        .collect::<Result<Vec<_>>>()?;
    for ((m, bound), curve) in STATED_MOMENT_EXPONENTS.iter().zip(&curves) {
        let fit = fit_exponent(curve)?;
        out.push(VerificationReport::new(
            format!("zeta_moment_{}th_slope", 2 * m),
            fit.slope,
            bound.value(),
            bound.value(),
            fit_note(&fit, curve),
        ));
    }
    let fit12 = fit_exponent(&curves[2])?;
    out.push(VerificationReport::new(
        "zeta_moment_12th_slope_vs_2",
        fit12.slope,
        2.0,
        2.0,
        fit_note(&fit12, &curves[2]),
    ));
    Ok(out)
}

/// Mean of `E*` over `[0, T]` against `3π/4`, and of `E` against `π`.
pub fn verify_means(bundle: &ErrorTermBundle, t: f64) -> Result<Vec<VerificationReport>> {
    let e = bundle.e_curve();
    let es = bundle.e_star_curve();
    let mean = |c: &SampledCurve| -> Result<f64> {
        c.check_covers(0.0, t)?;
        let n = ((t - c.t0) / c.dt).round() as usize;
        Ok(trapezoid_uniform(&c.values[..=n], c.dt) / t)
    };
    let me = mean(&e)?;
    let mes = mean(&es)?;
    Ok(vec![
        VerificationReport::new(
            "mean_e",
            (me - PI).abs(),
            0.2,
            PI,
            format!("mean of E on [0, {t}] = {me:.6}"),
        ),
        VerificationReport::new(
            "mean_estar",
            (mes - 0.75 * PI).abs(),
            0.12,
            0.75 * PI,
            format!("mean of E* on [0, {t}] = {mes:.6}"),
        ),
    ])
}

/// Total of reports that failed.
pub fn failures(reports: &[VerificationReport]) -> usize {
    reports.iter().filter(|r| !r.passed).count()
}

/// Sum of `lhs` over reports, used as a cheap fingerprint in tests.
pub fn lhs_checksum(reports: &[VerificationReport]) -> f64 {
    pairwise_sum(&reports.iter().map(|r| r.lhs).collect::<Vec<_>>())
}
