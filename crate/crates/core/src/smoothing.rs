//! Gaussian-smoothed local moments
//!
//! ```text
//! J_k(t, G) = (1 / (√π G)) ∫ |ζ(1/2 + i(t+u))|^{2k} e^{-(u/G)²} du
//! ```
//!
//! evaluated directly, and for `k = 1` through the representation
//! `(2 / (√π G³)) ∫ x E*(t+x) e^{-(x/G)²} dx`, which differs from `J_1` by
//! `O(log² t)` when `t^ε <= G <= t^{1/3}`.
//!
//! Both integrals are truncated at `±G M` and summed with the trapezoid rule
//! at spacing `G / nodes_per_g`. With the choice `M = ln T` the
//! neglected Gaussian mass is `1 - erf(M)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::error_terms::{ErrorTermBundle, SampledCurve};
use crate::quadrature::pairwise_sum;
use crate::zeta::ZetaSqSource;

/// Trapezoid nodes per unit of `G` used unless stated otherwise.
pub const DEFAULT_NODES_PER_G: usize = 64;

/// Truncation multiple of the fast mode (relative truncation error `e^{-64}`).
pub const FAST_TRUNCATION: f64 = 8.0;

/// `∫ exp(Ax - Bx²) dx = √(π/B) exp(A²/4B)` over the real line, `Re B > 0`.
pub fn gaussian_integral(a: Complex64, b: Complex64) -> Result<Complex64> {
    if !(b.re > 0.0) {
        return Err(Error::Domain(format!(
            "Gaussian integral needs Re B > 0, got {b}"
        )));
    }
    Ok((PI / b).sqrt() * (a * a / (4.0 * b)).exp())
}

pub fn gaussian_integral_real(a: f64, b: f64) -> Result<f64> {
    gaussian_integral(Complex64::new(a, 0.0), Complex64::new(b, 0.0)).map(|z| z.re)
}

/// Mass of the normalised weight `e^{-(u/G)²} / (√π G)` inside `|u| <= G M`.
pub fn weight_mass(trunc_mult: f64) -> f64 {
    libm::erf(trunc_mult)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothingParams {
    /// Smoothing width `G`.
    pub g: f64,
    /// Moment order `k`.
    pub k: u32,
    /// Integration runs over `|u| <= g * trunc_mult`.
    pub trunc_mult: f64,
    pub nodes_per_g: usize,
}

impl SmoothingParams {
    /// Truncation at `±G ln T`.
    pub fn log_truncated(g: f64, k: u32, t: f64) -> Self {
        Self {
            g,
            k,
            trunc_mult: t.ln(),
            nodes_per_g: DEFAULT_NODES_PER_G,
        }
    }

    /// Truncation at `±8G`.
    pub fn fast(g: f64, k: u32) -> Self {
        Self {
            g,
            k,
            trunc_mult: FAST_TRUNCATION,
            nodes_per_g: DEFAULT_NODES_PER_G,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.g > 0.0) || !self.g.is_finite() {
            return Err(Error::Config(format!("G must be positive, got {}", self.g)));
        }
        if self.k == 0 {
            return Err(Error::Config("moment order k must be positive".into()));
        }
        if !(self.trunc_mult > 0.0) || !self.trunc_mult.is_finite() {
            return Err(Error::Config(format!(
                "trunc_mult must be positive, got {}",
                self.trunc_mult
            )));
        }
        if self.nodes_per_g < 16 {
            return Err(Error::Config(format!(
                "nodes_per_g must be at least 16, got {}",
                self.nodes_per_g
            )));
        }
        Ok(())
    }

    pub fn half_width(&self) -> f64 {
        self.g * self.trunc_mult
    }

    /// Trapezoid spacing and the number of nodes on each side of the centre.
    /// The outermost node sits exactly at `±G M`.
    fn nodes(&self) -> (f64, usize) {
        let half = (self.trunc_mult * self.nodes_per_g as f64).ceil() as usize;
        (self.half_width() / half as f64, half)
    }
}

/// Trapezoid weights of the truncated Gaussian, built once and applied at any
/// number of centres.
#[derive(Debug, Clone)]
pub struct GaussKernel {
    params: SmoothingParams,
    offsets: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussKernel {
    pub fn new(p: &SmoothingParams) -> Result<Self> {
        p.validate()?;
        let (h, half) = p.nodes();
        let norm = h / (PI.sqrt() * p.g);
        let (offsets, weights) = (0..=2 * half)
            .map(|j| {
                let u = (j as f64 - half as f64) * h;
                let end = if j == 0 || j == 2 * half { 0.5 } else { 1.0 };
                (u, end * norm * (-(u / p.g) * (u / p.g)).exp())
            })
            .unzip();
        Ok(Self {
            params: *p,
            offsets,
            weights,
        })
    }

    pub fn params(&self) -> &SmoothingParams {
        &self.params
    }

    /// `J_k(t, G)` for this kernel's `G` and `k`.
    pub fn apply<S: ZetaSqSource + ?Sized>(&self, t: f64, source: &S) -> Result<f64> {
        let half_width = self.params.half_width();
        let (lo, hi) = (t - half_width, t + half_width);
        let (have_lo, have_hi) = source.coverage();
        if lo < 0.0_f64.max(have_lo) || hi > have_hi {
            return Err(Error::coverage(lo, hi, have_lo.max(0.0), have_hi));
        }
        let k = self.params.k as i32;
        let terms = self
            .offsets
            .iter()
            .zip(&self.weights)
            .map(|(&u, &w)| Ok(w * source.zeta_sq(t + u)?.powi(k)))
            .collect::<Result<Vec<f64>>>()?;
        Ok(pairwise_sum(&terms))
    }
}

/// `J_k(t, G)` straight from its definition.
pub fn j_k_direct<S: ZetaSqSource + ?Sized>(
    t: f64,
    p: &SmoothingParams,
    source: &S,
) -> Result<f64> {
    GaussKernel::new(p)?.apply(t, source)
}

/// `J_k_direct` at many centres; output order follows `ts`.
pub fn j_k_direct_batch<S: ZetaSqSource + ?Sized>(
    ts: &[f64],
    p: &SmoothingParams,
    source: &S,
) -> Result<Vec<f64>> {
    let kernel = GaussKernel::new(p)?;
    ts.par_iter().map(|&t| kernel.apply(t, source)).collect()
}

/// Value of the `E*` representation of `J_1` with its stated uncertainty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstarRepresentation {
    pub value: f64,
    /// Size of the additive `O(log² t)` term, here `ln² t`; never folded into `value`.
    pub uncertainty: f64,
}

/// `(2 / (√π G³)) ∫_{-GM}^{GM} x E*(t+x) e^{-(x/G)²} dx` from a bundle.
///
/// `E*` between grid nodes comes from the nearest node when the grid is at
/// least 256 times finer than `G`, otherwise from monotone cubic
/// interpolation. Only `1 <= G <= t^{1/3}` is accepted.
pub fn j1_via_estar(
    t: f64,
    p: &SmoothingParams,
    bundle: &ErrorTermBundle,
) -> Result<EstarRepresentation> {
    p.validate()?;
    if p.k != 1 {
        return Err(Error::Config(format!(
            "the E* representation exists only for k = 1, got {}",
            p.k
        )));
    }
    if !(t > 1.0) {
        return Err(Error::Range(format!("t must exceed 1, got {t}")));
    }
    let g_max = t.cbrt();
    if p.g < 1.0 || p.g > g_max {
        return Err(Error::Range(format!(
            "G = {} outside [1, t^(1/3) = {g_max}] where the representation holds",
            p.g
        )));
    }
    let curve = bundle.e_star_curve();
    j1_via_curve(t, p, &curve)
}

/// The same representation over any sampled `E*`-like curve (no range check).
pub fn j1_via_curve(
    t: f64,
    p: &SmoothingParams,
    curve: &SampledCurve,
) -> Result<EstarRepresentation> {
    p.validate()?;
    let half_width = p.half_width();
    curve.check_covers(t - half_width, t + half_width)?;
    let (h, half) = p.nodes();
    let nearest = curve.dt <= p.g / 256.0;
    let interp = (!nearest).then(|| curve.interpolator());
    let terms = (0..=2 * half)
        .map(|j| {
            let x = (j as f64 - half as f64) * h;
            let w = if j == 0 || j == 2 * half { 0.5 } else { 1.0 };
            let e = match &interp {
                Some(f) => f.at(t + x)?,
                None => curve.values[curve.nearest_index(t + x)?],
            };
            Ok(w * x * e * (-(x / p.g) * (x / p.g)).exp())
        })
        .collect::<Result<Vec<f64>>>()?;
    let value = 2.0 * h * pairwise_sum(&terms) / (PI.sqrt() * p.g.powi(3));
    Ok(EstarRepresentation {
        value,
        uncertainty: t.ln().powi(2),
    })
}
