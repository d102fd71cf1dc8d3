//! Euler–Maclaurin summation for `ζ(1/2 + it)`.
//!
//! Slow (`O(terms)` complex powers) but independent of the Riemann–Siegel
//! machinery, so it serves as the oracle for [`super::z_function`].

use num_complex::Complex64;

use crate::error::{Error, Result};

/// `B_{2k} / (2k)!` for k = 1..=30.
const BERNOULLI_OVER_FACTORIAL: [f64; 30] = [
    0.08333333333333333,
    -0.001388888888888889,
    3.306878306878307e-05,
    -8.267195767195768e-07,
    2.08767569878681e-08,
    -5.284190138687493e-10,
    1.3382536530684679e-11,
    -3.3896802963225827e-13,
    8.586062056277845e-15,
    -2.174868698558062e-16,
    5.5090028283602295e-18,
    -1.3954464685812522e-19,
    3.534707039629467e-21,
    -8.953517427037546e-23,
    2.267952452337683e-24,
    -5.744790668872202e-26,
    1.455172475614865e-27,
    -3.6859949406653103e-29,
    9.336734257095045e-31,
    -2.36502241570063e-32,
    5.990671762482134e-34,
    -1.5174548844682903e-35,
    3.843758125454189e-37,
    -9.736353072646691e-39,
    2.466247044200681e-40,
    -6.247076741820743e-42,
    1.5824030244644914e-43,
    -4.008273685948936e-45,
    1.0153075855569557e-46,
    -2.5718041582418717e-48,
];

/// Smallest accepted truncation length.
pub const MIN_TERMS: usize = 10;

/// Relative size below which the tail corrections are considered converged.
const TAIL_TOLERANCE: f64 = 1e-12;

/// A truncation length that is comfortably sufficient at ordinate `t`.
pub fn terms_for(t: f64) -> usize {
    ((t.abs() + 64.0) / std::f64::consts::PI).ceil() as usize
}

/// `ζ(1/2 + it)` by Euler–Maclaurin summation with `terms` direct terms.
///
/// The Bernoulli corrections are added until they fall below `1e-12` of the
/// running value; if the asymptotic series starts to diverge first, the
/// truncation length was too short for this `t` and an accuracy error is
/// returned.
pub fn euler_maclaurin_zeta_half(t: f64, terms: usize) -> Result<Complex64> {
    if !t.is_finite() {
        return Err(Error::Domain(format!("non-finite ordinate {t}")));
    }
    if terms < MIN_TERMS {
        return Err(Error::Accuracy(format!(
            "{terms} terms requested, at least {MIN_TERMS} required"
        )));
    }
    let s = Complex64::new(0.5, t);
    let n = terms as f64;

    let mut direct = Complex64::new(0.0, 0.0);
    for k in (1..terms).rev() {
        direct += power_minus_s(k as f64, t);
    }

    let n_pow = power_minus_s(n, t);
    let mut sum = direct + n_pow * n / (s - 1.0) + 0.5 * n_pow;

    // running factor s (s+1) ... (s+2k-2) N^{-s-2k+1}
    let mut factor = s * n_pow / n;
    let mut previous = f64::INFINITY;
    for (k, &b) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        let term = factor * b;
        let size = term.norm();
        if size <= TAIL_TOLERANCE * sum.norm().max(1e-3) {
            return Ok(sum + term);
        }
        if size > previous {
            break;
        }
        previous = size;
        sum += term;
        let j = 2.0 * k as f64 + 1.0;
        factor *= (s + j) * (s + j + 1.0) / (n * n);
    }
    Err(Error::Accuracy(format!(
        "{terms} terms do not reach the tolerance at t = {t}; use at least {}",
        terms_for(t)
    )))
}

#[inline]
fn power_minus_s(n: f64, t: f64) -> Complex64 {
    let phase = -t * n.ln();
    Complex64::from_polar(n.sqrt().recip(), phase)
}
