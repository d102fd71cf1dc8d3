//! Riemann–Siegel main sum and remainder corrections for Hardy's `Z(t)`.
//!
//! With `a = sqrt(t / 2π)`, `N = floor(a)` and `p = a - N`,
//!
//! ```text
//! Z(t) = 2 Σ_{n<=N} n^{-1/2} cos(θ(t) - t ln n)
//!        + (-1)^{N-1} a^{-1/2} (C0(p) + C1(p)/a + C2(p)/a² + ...)
//! ```
//!
//! where the `C_j` are built from `Ψ(p) = cos(2π(p² - p - 1/16)) / cos(2πp)`
//! and its derivatives. `Ψ` is entire, so its Taylor series about `p = 1/2`
//! converges everywhere; the coefficients are recovered once by a discrete
//! Cauchy integral on the unit circle, which avoids dividing power series
//! (numerically unstable because `cos(2πp)` vanishes at `p = 1/4, 3/4`).

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use super::theta::{theta, theta_dd};
use crate::dd::DoubleDouble;

/// Number of Taylor coefficients kept for `Ψ` around `p = 1/2`.
const PSI_TERMS: usize = 48;
/// Sample count on the Cauchy circle.
const CAUCHY_POINTS: usize = 256;

/// Ordinates above which phases are reduced in double-double arithmetic.
pub const DD_PHASE_FROM: f64 = 1.0e5;

/// Cached `ln n` (double-double) and `n^{-1/2}` for the main sum.
const TABLE_LEN: usize = 1 << 13;

struct Tables {
    psi: [f64; PSI_TERMS],
    ln_hi: Vec<f64>,
    ln_lo: Vec<f64>,
    inv_sqrt: Vec<f64>,
}

fn tables() -> &'static Tables {
    static TABLES: OnceLock<Tables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let mut ln_hi = vec![0.0; TABLE_LEN];
        let mut ln_lo = vec![0.0; TABLE_LEN];
        let mut inv_sqrt = vec![0.0; TABLE_LEN];
        for n in 1..TABLE_LEN {
            let l = DoubleDouble::from_f64(n as f64).ln();
            ln_hi[n] = l.hi;
            ln_lo[n] = l.lo;
            inv_sqrt[n] = (n as f64).sqrt().recip();
        }
        Tables {
            psi: psi_taylor(),
            ln_hi,
            ln_lo,
            inv_sqrt,
        }
    })
}

fn psi_complex(p: Complex64) -> Complex64 {
    let num = (2.0 * PI * (p * p - p - 1.0 / 16.0)).cos();
    let den = (2.0 * PI * p).cos();
    num / den
}

/// Taylor coefficients `c_k` with `Ψ(1/2 + x) = Σ c_k x^k`.
fn psi_taylor() -> [f64; PSI_TERMS] {
    let mut c = [0.0; PSI_TERMS];
    let samples: Vec<Complex64> = (0..CAUCHY_POINTS)
        .map(|j| {
            let phi = 2.0 * PI * (j as f64 + 0.5) / CAUCHY_POINTS as f64;
            psi_complex(Complex64::new(0.5, 0.0) + Complex64::from_polar(1.0, phi))
        })
        .collect();
    for (k, ck) in c.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, v) in samples.iter().enumerate() {
            let phi = 2.0 * PI * (j as f64 + 0.5) / CAUCHY_POINTS as f64;
            acc += v * Complex64::from_polar(1.0, -(k as f64) * phi);
        }
        *ck = acc.re / CAUCHY_POINTS as f64;
    }
    c
}

/// `d^order Ψ / dp^order` at `p`.
pub(crate) fn psi_derivative(p: f64, order: usize) -> f64 {
    let c = &tables().psi;
    let x = p - 0.5;
    let mut acc = 0.0;
    for k in (order..PSI_TERMS).rev() {
        let mut falling = 1.0;
        for j in 0..order {
            falling *= (k - j) as f64;
        }
        acc = acc * x + falling * c[k];
    }
    acc
}

fn correction(p: f64, order: usize) -> f64 {
    let pi2 = PI * PI;
    match order {
        0 => psi_derivative(p, 0),
        1 => -psi_derivative(p, 3) / (96.0 * pi2),
        2 => psi_derivative(p, 2) / (64.0 * pi2) + psi_derivative(p, 6) / (18432.0 * pi2 * pi2),
        _ => unreachable!("correction order validated by EvalConfig"),
    }
}

/// Hardy's `Z(t)` by the Riemann–Siegel formula with `corrections + 1`
/// remainder terms (`C0` through `C_corrections`). Requires `t > 2π`.
pub fn z_riemann_siegel(t: f64, corrections: usize) -> f64 {
    let tab = tables();
    let a = (t / (2.0 * PI)).sqrt();
    let n_max = a.floor() as usize;
    let p = a - n_max as f64;

    let mut main = 0.0;
    if t > DD_PHASE_FROM {
        let th = theta_dd(t);
        for n in 1..=n_max {
            let ln_n = if n < TABLE_LEN {
                DoubleDouble::new(tab.ln_hi[n], tab.ln_lo[n])
            } else {
                DoubleDouble::from_f64(n as f64).ln()
            };
            let phase = (th - ln_n.mul_f64(t)).rem_two_pi().to_f64();
            main += inv_sqrt(tab, n) * phase.cos();
        }
    } else {
        let th = theta(t);
        for n in 1..=n_max {
            let ln_n = if n < TABLE_LEN {
                tab.ln_hi[n]
            } else {
                (n as f64).ln()
            };
            main += inv_sqrt(tab, n) * (th - t * ln_n).cos();
        }
    }
    main *= 2.0;

    let mut rem = 0.0;
    let inv_a = a.recip();
    let mut scale = 1.0;
    for k in 0..=corrections {
        rem += scale * correction(p, k);
        scale *= inv_a;
    }
    let sign = if n_max % 2 == 1 { 1.0 } else { -1.0 };
    main + sign * inv_a.sqrt() * rem
}

#[inline]
fn inv_sqrt(tab: &Tables, n: usize) -> f64 {
    if n < TABLE_LEN {
        tab.inv_sqrt[n]
    } else {
        (n as f64).sqrt().recip()
    }
}
