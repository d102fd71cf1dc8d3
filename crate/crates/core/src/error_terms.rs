//! The mean-square error term `E(T)` and the derived `E*(t)` and `R(T)`.
//!
//! ```text
//! E(T)   = ∫_0^T |ζ(1/2+it)|² dt - T (ln(T/2π) + 2γ - 1)
//! E*(t)  = E(t) - 2π Δ*(t / 2π)
//! R(T)   = ∫_0^T E*(t) dt - (3π/4) T
//! ```
//!
//! The cumulative integral is built from independent 8-node Gauss–Legendre
//! panels (computed in parallel) followed by one compensated prefix pass in
//! panel order, so the result is the same for any thread count. Grids always
//! start at `t = 0`, which pins `E(0) = 0`.

use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dd::{self, DoubleDouble};
use crate::divisor::DivisorSums;
use crate::error::{Error, Result};
use crate::quadrature::{
    compensated_prefix, cumulative_trapezoid, hermite, pchip_slopes, GaussLegendre,
};
use crate::zeta::{z_function, EvalConfig};

/// Default panel width.
pub const DEFAULT_DT: f64 = 0.125;

/// Quadrature error allowance per unit length of the grid.
pub const ERROR_BUDGET_PER_UNIT: f64 = 1e-4;

const EGRD_MAGIC: &[u8; 4] = b"EGRD";

/// Uniformly sampled real function starting at `t0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledCurve {
    pub t0: f64,
    pub dt: f64,
    pub values: Vec<f64>,
    pub label: String,
}

impl SampledCurve {
    pub fn new(t0: f64, dt: f64, values: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        let c = Self {
            t0,
            dt,
            values,
            label: label.into(),
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::Config(format!(
                "curve '{}' has no samples",
                self.label
            )));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() || !self.t0.is_finite() {
            return Err(Error::Config(format!(
                "curve '{}' has invalid spacing",
                self.label
            )));
        }
        if let Some(i) = self.values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Config(format!(
                "curve '{}' has a non-finite sample at index {i}",
                self.label
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn t_at(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    pub fn t_end(&self) -> f64 {
        self.t_at(self.values.len() - 1)
    }

    /// Index of the node nearest to `t`, if `t` lies within the grid.
    pub fn nearest_index(&self, t: f64) -> Result<usize> {
        self.check_covers(t, t)?;
        let i = ((t - self.t0) / self.dt).round() as usize;
        Ok(i.min(self.values.len() - 1))
    }

    pub fn check_covers(&self, start: f64, end: f64) -> Result<()> {
        // tolerate round-off at the end points
        let slack = 1e-9 * self.dt;
        if start < self.t0 - slack || end > self.t_end() + slack {
            return Err(Error::coverage(start, end, self.t0, self.t_end()));
        }
        Ok(())
    }

    /// Split `t` into a cell index and a local offset in `[0, 1]`.
    pub(crate) fn locate(&self, t: f64) -> Result<(usize, f64)> {
        self.check_covers(t, t)?;
        let n = self.values.len();
        if n == 1 {
            return Ok((0, 0.0));
        }
        let x = ((t - self.t0) / self.dt).clamp(0.0, (n - 1) as f64);
        let k = (x.floor() as usize).min(n - 2);
        Ok((k, x - k as f64))
    }

    /// Monotone cubic (Fritsch–Carlson) interpolant of the samples.
    pub fn interpolator(&self) -> MonotoneInterpolator<'_> {
        MonotoneInterpolator {
            curve: self,
            slopes: pchip_slopes(&self.values, self.dt),
        }
    }

    pub fn linear_at(&self, t: f64) -> Result<f64> {
        let (k, s) = self.locate(t)?;
        if self.values.len() == 1 {
            return Ok(self.values[0]);
        }
        Ok(self.values[k] + s * (self.values[k + 1] - self.values[k]))
    }
}

pub struct MonotoneInterpolator<'a> {
    curve: &'a SampledCurve,
    slopes: Vec<f64>,
}

impl MonotoneInterpolator<'_> {
    pub fn at(&self, t: f64) -> Result<f64> {
        let (k, s) = self.curve.locate(t)?;
        if self.curve.values.len() == 1 {
            return Ok(self.curve.values[0]);
        }
        Ok(hermite(
            &self.curve.values,
            &self.slopes,
            self.curve.dt,
            k,
            s,
        ))
    }
}

/// `F(t) = ∫_0^t f` on a grid, with per-panel quadrature error estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CumulativeIntegral {
    pub curve: SampledCurve,
    pub panel_error: Vec<f64>,
    /// Upper bound the summed panel errors must respect.
    pub error_budget: f64,
}

impl CumulativeIntegral {
    pub fn total_error(&self) -> f64 {
        crate::quadrature::pairwise_sum(&self.panel_error)
    }
}

/// `T (ln(T/2π) + 2γ - 1)`, the main term of the mean square.
pub fn mean_square_main_term(t: f64) -> Result<f64> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!(
            "main term requires finite T >= 0, got {t}"
        )));
    }
    Ok(main_term_dd(t).to_f64())
}

fn main_term_dd(t: f64) -> DoubleDouble {
    if t == 0.0 {
        return DoubleDouble::ZERO;
    }
    let bracket =
        DoubleDouble::from_f64(t).ln() - dd::LN_2PI + dd::EULER_GAMMA.ldexp(1) - DoubleDouble::ONE;
    bracket.mul_f64(t)
}

fn rules() -> &'static (GaussLegendre, GaussLegendre) {
    static RULES: OnceLock<(GaussLegendre, GaussLegendre)> = OnceLock::new();
    RULES.get_or_init(|| (GaussLegendre::new(8), GaussLegendre::new(6)))
}

/// Cumulative mean square of `|ζ(1/2+it)|` and `E(t)` on the panel boundaries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EGrid {
    pub cumulative: CumulativeIntegral,
    /// `E(t_k)` at `t_k = k dt`.
    pub e: Vec<f64>,
    pub eval_fingerprint: u64,
}

impl EGrid {
    pub fn dt(&self) -> f64 {
        self.cumulative.curve.dt
    }

    pub fn t_max(&self) -> f64 {
        self.cumulative.curve.t_end()
    }

    pub fn e_curve(&self) -> SampledCurve {
        SampledCurve {
            t0: 0.0,
            dt: self.dt(),
            values: self.e.clone(),
            label: "E".into(),
        }
    }

    /// `∫_0^t |ζ|²` between nodes by monotone cubic interpolation.
    pub fn cumulative_at(&self, t: f64) -> Result<f64> {
        self.cumulative.curve.interpolator().at(t)
    }

    /// `E(t)` between nodes: interpolated cumulative minus the exact main term.
    pub fn e_at(&self, t: f64) -> Result<f64> {
        Ok(self.cumulative_at(t)? - mean_square_main_term(t)?)
    }
}

/// Largest panel width accepted for a grid reaching `t_max`.
pub fn max_dt_for(t_max: f64) -> f64 {
    let l = (t_max / (2.0 * PI)).ln();
    if l <= 0.0 {
        f64::INFINITY
    } else {
        2.0 * PI / l
    }
}

/// Build `∫_0^t |ζ(1/2+iu)|² du` and `E(t)` on `t_k = k dt`, `k = 0..=ceil(t_max/dt)`.
pub fn build_e_grid(t_max: f64, dt: f64, cfg: &EvalConfig) -> Result<EGrid> {
    if !(dt > 0.0 && dt <= 0.25) {
        return Err(Error::Config(format!("dt must lie in (0, 0.25], got {dt}")));
    }
    if !(t_max >= 10.0) || !t_max.is_finite() {
        return Err(Error::Config(format!(
            "t_max must be at least 10, got {t_max}"
        )));
    }
    if dt > max_dt_for(t_max) {
        return Err(Error::Config(format!(
            "dt = {dt} exceeds the oscillation scale 2π/ln(t_max/2π) = {}",
            max_dt_for(t_max)
        )));
    }
    cfg.validate()?;

    let panels = (t_max / dt).ceil() as usize;
    let (g8, g6) = rules();
    let per_panel: Vec<(f64, f64)> = (0..panels)
        .into_par_iter()
        .map(|k| {
            let a = k as f64 * dt;
            let b = (k + 1) as f64 * dt;
            let mut err = None;
            let mut f = |t: f64| match z_function(t, cfg) {
                Ok(z) => z * z,
                Err(e) => {
                    err.get_or_insert(e);
                    0.0
                }
            };
            let fine = g8.integrate(a, b, &mut f);
            let coarse = g6.integrate(a, b, &mut f);
            match err {
                Some(e) => Err(e),
                None => Ok((fine, (fine - coarse).abs())),
            }
        })
        .collect::<Result<_>>()?;

    let (values, panel_error): (Vec<f64>, Vec<f64>) = per_panel.into_iter().unzip();
    let cumulative = compensated_prefix(&values);
    let e: Vec<f64> = cumulative
        .iter()
        .enumerate()
        .map(|(k, &f)| (DoubleDouble::from_f64(f) - main_term_dd(k as f64 * dt)).to_f64())
        .collect();

    let error_budget = ERROR_BUDGET_PER_UNIT * panels as f64 * dt;
    let grid = EGrid {
        cumulative: CumulativeIntegral {
            curve: SampledCurve::new(0.0, dt, cumulative, "cumulative |zeta|^2")?,
            panel_error,
            error_budget,
        },
        e,
        eval_fingerprint: cfg.fingerprint(),
    };
    let total = grid.cumulative.total_error();
    if total > error_budget {
        return Err(Error::Accuracy(format!(
            "estimated quadrature error {total:e} exceeds the budget {error_budget:e}"
        )));
    }
    Ok(grid)
}

/// `E`, `2πΔ*(t/2π)`, `E*` and `R` aligned on one grid starting at zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorTermBundle {
    pub t0: f64,
    pub dt: f64,
    pub cumulative: Vec<f64>,
    pub e: Vec<f64>,
    pub two_pi_delta_star: Vec<f64>,
    pub e_star: Vec<f64>,
    pub r: Vec<f64>,
}

/// Form `E*` and `R` from an E-grid and divisor data covering `4 t_max / 2π`.
pub fn build_error_bundle(grid: &EGrid, divisors: &DivisorSums) -> Result<ErrorTermBundle> {
    let dt = grid.dt();
    let t_end = grid.t_max();
    let needed = (4.0 * t_end / (2.0 * PI)).floor();
    if needed > divisors.coverage() as f64 {
        return Err(Error::coverage(
            0.0,
            needed,
            0.0,
            divisors.coverage() as f64,
        ));
    }
    let two_pi_delta_star = (0..grid.e.len())
        .into_par_iter()
        .map(|k| {
            let t = k as f64 * dt;
            Ok(2.0 * PI * divisors.delta_star_extended(t / (2.0 * PI))?)
        })
        .collect::<Result<Vec<f64>>>()?;
    let e_star: Vec<f64> = grid
        .e
        .iter()
        .zip(&two_pi_delta_star)
        .map(|(e, d)| e - d)
        .collect();
    let integral = cumulative_trapezoid(&e_star, dt);
    let r = integral
        .iter()
        .enumerate()
        .map(|(k, v)| v - 0.75 * PI * (k as f64 * dt))
        .collect();
    Ok(ErrorTermBundle {
        t0: 0.0,
        dt,
        cumulative: grid.cumulative.curve.values.clone(),
        e: grid.e.clone(),
        two_pi_delta_star,
        e_star,
        r,
    })
}

impl ErrorTermBundle {
    pub fn len(&self) -> usize {
        self.e.len()
    }

    pub fn is_empty(&self) -> bool {
        self.e.is_empty()
    }

    pub fn t_at(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    pub fn t_max(&self) -> f64 {
        self.t_at(self.len() - 1)
    }

    fn curve(&self, values: &[f64], label: &str) -> SampledCurve {
        SampledCurve {
            t0: self.t0,
            dt: self.dt,
            values: values.to_vec(),
            label: label.into(),
        }
    }

    pub fn e_curve(&self) -> SampledCurve {
        self.curve(&self.e, "E")
    }

    pub fn e_star_curve(&self) -> SampledCurve {
        self.curve(&self.e_star, "Estar")
    }

    pub fn r_curve(&self) -> SampledCurve {
        self.curve(&self.r, "R")
    }

    pub fn cumulative_curve(&self) -> SampledCurve {
        self.curve(&self.cumulative, "cumulative |zeta|^2")
    }

    /// Rebuild the E-grid view (panel errors are not persisted and come back empty).
    pub fn to_e_grid(&self, eval_fingerprint: u64) -> Result<EGrid> {
        Ok(EGrid {
            cumulative: CumulativeIntegral {
                curve: SampledCurve::new(
                    self.t0,
                    self.dt,
                    self.cumulative.clone(),
                    "cumulative |zeta|^2",
                )?,
                panel_error: Vec::new(),
                error_budget: ERROR_BUDGET_PER_UNIT * self.t_max(),
            },
            e: self.e.clone(),
            eval_fingerprint,
        })
    }

    /// Write the `EGRD` cache: magic, `u64` count, `f64 t0`, `f64 dt`, then the
    /// cumulative, `E`, `E*` and `R` arrays, all little-endian.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(EGRD_MAGIC)?;
        w.write_all(&(self.len() as u64).to_le_bytes())?;
        w.write_all(&self.t0.to_le_bytes())?;
        w.write_all(&self.dt.to_le_bytes())?;
        for array in [&self.cumulative, &self.e, &self.e_star, &self.r] {
            for v in array {
                w.write_all(&v.to_le_bytes())?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Read an `EGRD` cache. `2πΔ*(t/2π)` is restored as `E - E*`.
    pub fn load(path: &Path) -> Result<Self> {
        let mut r = BufReader::new(File::open(path)?);
        let header = read_egrd_header(&mut r, path)?;
        let n = header.count as usize;
        let mut bytes = vec![0u8; 8 * 4 * n];
        r.read_exact(&mut bytes)
            .map_err(|_| Error::Format(format!("{}: truncated grid", path.display())))?;
        let mut arrays = bytes.chunks_exact(8 * n).map(|chunk| {
            chunk
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
                .collect::<Vec<f64>>()
        });
        let cumulative = arrays.next().unwrap_or_default();
        let e = arrays.next().unwrap_or_default();
        let e_star = arrays.next().unwrap_or_default();
        let rr = arrays.next().unwrap_or_default();
        let two_pi_delta_star = e.iter().zip(&e_star).map(|(a, b)| a - b).collect();
        Ok(Self {
            t0: header.t0,
            dt: header.dt,
            cumulative,
            e,
            two_pi_delta_star,
            e_star,
            r: rr,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EgrdHeader {
    pub count: u64,
    pub t0: f64,
    pub dt: f64,
}

fn read_egrd_header(r: &mut impl Read, path: &Path) -> Result<EgrdHeader> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)
        .map_err(|_| Error::Format(format!("{}: truncated header", path.display())))?;
    if &magic != EGRD_MAGIC {
        return Err(Error::Format(format!("{}: bad grid magic", path.display())));
    }
    let mut word = [0u8; 8];
    let mut next = |r: &mut dyn Read| -> Result<[u8; 8]> {
        r.read_exact(&mut word)
            .map_err(|_| Error::Format(format!("{}: truncated header", path.display())))?;
        Ok(word)
    };
    let count = u64::from_le_bytes(next(r)?);
    let t0 = f64::from_le_bytes(next(r)?);
    let dt = f64::from_le_bytes(next(r)?);
    if count == 0 || !(dt > 0.0) {
        return Err(Error::Format(format!(
            "{}: implausible header",
            path.display()
        )));
    }
    Ok(EgrdHeader { count, t0, dt })
}

/// Header of an `EGRD` file without reading its arrays.
pub fn egrd_info(path: &Path) -> Result<EgrdHeader> {
    let mut r = BufReader::new(File::open(path)?);
    read_egrd_header(&mut r, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn main_term_values() {
        assert_eq!(mean_square_main_term(0.0).unwrap(), 0.0);
        // 2π(2γ - 1) from a 50-digit evaluation
        assert!((mean_square_main_term(2.0 * PI).unwrap() - 0.9703206623868275).abs() < 1e-14);
        let root = 2.0 * PI * (1.0 - 2.0 * crate::divisor::EULER_GAMMA).exp();
        assert!(mean_square_main_term(root).unwrap().abs() < 1e-14);
        assert!(matches!(mean_square_main_term(-1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn rejects_bad_grid_configuration() {
        let cfg = EvalConfig::default();
        assert!(matches!(
            build_e_grid(100.0, 0.3, &cfg),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            build_e_grid(5.0, 0.1, &cfg),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            build_e_grid(100.0, 0.0, &cfg),
            Err(Error::Config(_))
        ));
        // dt inside (0, 0.25] but beyond the oscillation scale: needs a huge t_max
        assert!(max_dt_for(1e30) < 0.25);
    }

    #[test]
    fn small_grid_properties() {
        let cfg = EvalConfig::default();
        let grid = build_e_grid(400.0, 0.125, &cfg).unwrap();
        assert_eq!(grid.e[0], 0.0);
        let c = &grid.cumulative.curve.values;
        assert!(c.windows(2).all(|w| w[1] >= w[0]));
        assert!(grid.cumulative.total_error() <= grid.cumulative.error_budget);
        // ∫_0^{t} |ζ|² by a finer independent rule
        let gl = GaussLegendre::new(20);
        let t = 50.0;
        let mut acc = 0.0;
        for k in 0..500 {
            let a = k as f64 * 0.1;
            acc += gl.integrate(a, a + 0.1, |u| crate::zeta::zeta_sq(u, &cfg).unwrap());
        }
        assert!((grid.cumulative_at(t).unwrap() - acc).abs() < 1e-9);
        // interpolation between nodes stays close to a direct evaluation
        let mid = 123.0625;
        let mut direct = c[984];
        direct += gl.integrate(123.0, mid, |u| crate::zeta::zeta_sq(u, &cfg).unwrap());
        assert!((grid.cumulative_at(mid).unwrap() - direct).abs() < 1e-3);
    }

    #[test]
    fn curve_validation() {
        assert!(SampledCurve::new(0.0, 0.1, vec![], "x").is_err());
        assert!(SampledCurve::new(0.0, 0.0, vec![1.0], "x").is_err());
        assert!(SampledCurve::new(0.0, 0.1, vec![1.0, f64::NAN], "x").is_err());
        let c = SampledCurve::new(1.0, 0.5, vec![0.0, 1.0, 4.0], "x").unwrap();
        assert_eq!(c.t_end(), 2.0);
        assert_eq!(c.nearest_index(1.7).unwrap(), 1);
        assert!((c.linear_at(1.25).unwrap() - 0.5).abs() < 1e-15);
        assert!(matches!(c.linear_at(2.5), Err(Error::Coverage { .. })));
    }

    #[test]
    fn bundle_identity_and_round_trip() {
        let cfg = EvalConfig::default();
        let grid = build_e_grid(300.0, 0.125, &cfg).unwrap();
        let div = DivisorSums::new(1000).unwrap();
        let b = build_error_bundle(&grid, &div).unwrap();
        assert_eq!(b.r[0], 0.0);
        for i in 0..b.len() {
            assert!((b.e_star[i] + b.two_pi_delta_star[i] - b.e[i]).abs() < 1e-9);
        }
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.egrd");
        b.save(&path).unwrap();
        let back = ErrorTermBundle::load(&path).unwrap();
        assert_eq!(back.len(), b.len());
        for (x, y) in [
            (&back.cumulative, &b.cumulative),
            (&back.e, &b.e),
            (&back.e_star, &b.e_star),
            (&back.r, &b.r),
        ] {
            assert!(x
                .iter()
                .zip(y.iter())
                .all(|(a, c)| a.to_bits() == c.to_bits()));
        }
        let info = egrd_info(&path).unwrap();
        assert_eq!(info.count as usize, b.len());
        assert_eq!(info.dt, 0.125);

        let tiny = DivisorSums::table_only(crate::divisor::DivisorTable::build(10).unwrap());
        assert!(matches!(
            build_error_bundle(&grid, &tiny),
            Err(Error::Coverage { .. })
        ));
    }
}
