//! Evaluation of Hardy's `Z(t)` and `|ζ(1/2 + it)|²` on the critical line.
//!
//! The fast path is the Riemann–Siegel formula ([`riemann_siegel`]); below
//! [`EvalConfig::crossover_t`] the Euler–Maclaurin oracle
//! ([`euler_maclaurin`]) is used instead, combined with the theta phase.

pub mod euler_maclaurin;
pub mod riemann_siegel;
pub mod theta;
mod zgrid;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use euler_maclaurin::euler_maclaurin_zeta_half;
pub use theta::theta;
pub use zgrid::ZGrid;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    /// Riemann–Siegel remainder terms beyond `C0` (0, 1 or 2).
    pub rs_correction_order: usize,
    /// Truncation length handed to the Euler–Maclaurin oracle.
    pub oracle_terms: usize,
    /// Ordinate below which the oracle is the primary evaluator.
    pub crossover_t: f64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            rs_correction_order: 2,
            oracle_terms: 128,
            crossover_t: 250.0,
        }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<()> {
        if self.rs_correction_order > 2 {
            return Err(Error::Config(format!(
                "rs_correction_order must be 0, 1 or 2 (got {})",
                self.rs_correction_order
            )));
        }
        if self.oracle_terms < euler_maclaurin::MIN_TERMS {
            return Err(Error::Config(format!(
                "oracle_terms must be at least {} (got {})",
                euler_maclaurin::MIN_TERMS,
                self.oracle_terms
            )));
        }
        // the Riemann–Siegel main sum is empty below 2π
        if !(self.crossover_t >= 2.0 * std::f64::consts::PI) {
            return Err(Error::Config(format!(
                "crossover_t must be at least 2π (got {})",
                self.crossover_t
            )));
        }
        Ok(())
    }

    /// Stable 64-bit fingerprint used to key on-disk caches.
    pub fn fingerprint(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut feed = |bytes: &[u8]| {
            for b in bytes {
                h ^= u64::from(*b);
                h = h.wrapping_mul(0x0100_0000_01b3);
            }
        };
        feed(&(self.rs_correction_order as u64).to_le_bytes());
        feed(&(self.oracle_terms as u64).to_le_bytes());
        feed(&self.crossover_t.to_bits().to_le_bytes());
        h
    }
}

/// One evaluated point on the critical line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalLinePoint {
    pub t: f64,
    pub z: f64,
    pub zeta_sq: f64,
}

impl CriticalLinePoint {
    pub fn evaluate(t: f64, cfg: &EvalConfig) -> Result<Self> {
        let z = z_function(t, cfg)?;
        Ok(Self {
            t,
            z,
            zeta_sq: z * z,
        })
    }
}

/// Hardy's `Z(t)`; real, with `|Z(t)| = |ζ(1/2 + it)|`.
pub fn z_function(t: f64, cfg: &EvalConfig) -> Result<f64> {
    if !t.is_finite() {
        return Err(Error::Domain(format!("non-finite ordinate {t}")));
    }
    if t < 0.0 {
        return Err(Error::Domain(format!("negative ordinate {t}")));
    }
    cfg.validate()?;
    if t < cfg.crossover_t {
        z_via_oracle(t, cfg.oracle_terms.max(euler_maclaurin::terms_for(t)))
    } else {
        Ok(riemann_siegel::z_riemann_siegel(t, cfg.rs_correction_order))
    }
}

/// `Z(t)` from the Euler–Maclaurin value rotated by the theta phase.
pub fn z_via_oracle(t: f64, terms: usize) -> Result<f64> {
    let zeta = euler_maclaurin_zeta_half(t, terms)?;
    Ok((Complex64::from_polar(1.0, theta(t)) * zeta).re)
}

/// `|ζ(1/2 + it)|²`, computed as `Z(t)²`.
pub fn zeta_sq(t: f64, cfg: &EvalConfig) -> Result<f64> {
    let z = z_function(t, cfg)?;
    Ok(z * z)
}

/// Anything that can report `|ζ(1/2 + it)|²` at an arbitrary ordinate.
pub trait ZetaSqSource: Sync {
    fn zeta_sq(&self, t: f64) -> Result<f64>;
    /// Range of ordinates the source can serve.
    fn coverage(&self) -> (f64, f64);
}

/// Direct evaluation, covering all `t >= 0`.
#[derive(Debug, Clone, Copy, Default)]
pub struct DirectZeta {
    pub cfg: EvalConfig,
}

impl DirectZeta {
    pub fn new(cfg: EvalConfig) -> Self {
        Self { cfg }
    }
}

impl ZetaSqSource for DirectZeta {
    fn zeta_sq(&self, t: f64) -> Result<f64> {
        zeta_sq(t, &self.cfg)
    }

    fn coverage(&self) -> (f64, f64) {
        (0.0, f64::INFINITY)
    }
}
