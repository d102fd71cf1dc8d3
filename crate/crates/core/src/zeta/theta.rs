//! The Riemann–Siegel theta function and the complex log-gamma it rests on.

use num_complex::Complex64;

use crate::dd::{self, DoubleDouble};

/// Below this ordinate theta comes from the log-gamma function; above it from
/// the asymptotic series.
pub const THETA_ASYMPTOTIC_FROM: f64 = 10.0;

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// `B_{2k} / (2k (2k-1))` for k = 1..=8, the Stirling series coefficients.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

/// Principal-branch-continuous `ln Γ(z)` for `Re z > 0`.
///
/// The argument is shifted to `Re z >= 12` by the recurrence, then Stirling's
/// series is summed. Imaginary parts add without wrapping because every
/// shifted factor lies in the right half plane.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    let mut shift = Complex64::new(0.0, 0.0);
    let mut w = z;
    while w.re < 12.0 {
        shift += w.ln();
        w += 1.0;
    }
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut pow = inv;
    for c in STIRLING {
        series += pow * c;
        pow *= inv2;
    }
    (w - 0.5) * w.ln() - w + HALF_LN_2PI + series - shift
}

/// `θ(t) = arg Γ(1/4 + it/2) - (t/2) ln π`, continuous in `t`.
pub fn theta(t: f64) -> f64 {
    if t.abs() < THETA_ASYMPTOTIC_FROM {
        ln_gamma(Complex64::new(0.25, 0.5 * t)).im - 0.5 * t * std::f64::consts::PI.ln()
    } else {
        theta_asymptotic(t)
    }
}

fn theta_tail(t: f64) -> f64 {
    let inv = 1.0 / t;
    let inv2 = inv * inv;
    inv * (1.0 / 48.0 + inv2 * (7.0 / 5760.0 + inv2 * (31.0 / 80640.0)))
}

fn theta_asymptotic(t: f64) -> f64 {
    if t < 0.0 {
        return -theta_asymptotic(-t);
    }
    0.5 * t * (t / std::f64::consts::TAU).ln() - 0.5 * t - std::f64::consts::FRAC_PI_8
        + theta_tail(t)
}

/// Theta as a double-double, for phase reduction at large `t` (requires `t >= 10`).
pub fn theta_dd(t: f64) -> DoubleDouble {
    debug_assert!(t >= THETA_ASYMPTOTIC_FROM);
    let log_t = DoubleDouble::from_f64(t).ln() - dd::LN_2PI;
    let half_t = 0.5 * t;
    (log_t.mul_f64(half_t) - DoubleDouble::from_f64(half_t) - dd::PI.ldexp(-3))
        .add_f64(theta_tail(t))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_gamma_matches_real_values() {
        // Γ(1/2) = √π, Γ(5) = 24
        let a = ln_gamma(Complex64::new(0.5, 0.0));
        assert!((a.re - 0.5 * std::f64::consts::PI.ln()).abs() < 1e-14);
        assert!(a.im.abs() < 1e-15);
        let b = ln_gamma(Complex64::new(5.0, 0.0));
        assert!((b.re - 24f64.ln()).abs() < 1e-13);
    }

    #[test]
    fn theta_branches_agree_at_the_switch() {
        for t in [10.0, 12.5, 20.0, 50.0] {
            let from_gamma =
                ln_gamma(Complex64::new(0.25, 0.5 * t)).im - 0.5 * t * std::f64::consts::PI.ln();
            assert!((from_gamma - theta_asymptotic(t)).abs() < 1e-10, "t = {t}");
        }
    }

    #[test]
    fn theta_is_odd() {
        for t in [0.3, 4.0, 17.0] {
            assert!((theta(t) + theta(-t)).abs() < 1e-13);
        }
    }

    #[test]
    fn theta_dd_agrees_with_double() {
        for t in [11.0, 1234.5, 2.0e5, 9.9e5] {
            let a = theta_dd(t).to_f64();
            let b = theta(t);
            assert!(
                (a - b).abs() <= 1e-15 * b.abs().max(1.0) * 8.0,
                "t = {t}: {a} vs {b}"
            );
        }
    }
}
