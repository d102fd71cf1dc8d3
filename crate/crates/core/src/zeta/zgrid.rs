use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use rayon::prelude::*;

use super::{z_function, EvalConfig, ZetaSqSource};
use crate::error::{Error, Result};
use crate::error_terms::SampledCurve;

const ZGRD_MAGIC: &[u8; 4] = b"ZGRD";

/// Half-width of the Lagrange interpolation stencil.
const STENCIL: usize = 4;

/// `Z(t)` tabulated on `t_j = j h`, `j = 0..len`, served at arbitrary `t` by
/// 8-point Lagrange interpolation.
///
/// `Z` oscillates at angular frequency at most `ln(t / 2π) / 2`, so with the
/// default `h = 1/32` the stencil resolves it to about `1e-9` relative at
/// `t = 10⁶`. `Z` is even, so points near `t = 0` use the mirrored samples.
#[derive(Debug, Clone, PartialEq)]
pub struct ZGrid {
    pub h: f64,
    pub values: Vec<f64>,
}

impl ZGrid {
    pub const DEFAULT_SPACING: f64 = 1.0 / 32.0;

    pub fn build(t_max: f64, h: f64, cfg: &EvalConfig) -> Result<Self> {
        if !(h > 0.0 && h <= 0.25) {
            return Err(Error::Config(format!(
                "grid spacing must lie in (0, 0.25], got {h}"
            )));
        }
        if !(t_max > 0.0) || !t_max.is_finite() {
            return Err(Error::Config(format!(
                "t_max must be positive, got {t_max}"
            )));
        }
        cfg.validate()?;
        let len = (t_max / h).ceil() as usize + STENCIL + 1;
        let values = (0..len)
            .into_par_iter()
            .map(|j| z_function(j as f64 * h, cfg))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { h, values })
    }

    /// Largest `t` that can be interpolated with a full stencil.
    pub fn t_max(&self) -> f64 {
        (self.values.len() - STENCIL - 1) as f64 * self.h
    }

    fn sample(&self, j: i64) -> f64 {
        self.values[j.unsigned_abs() as usize]
    }

    /// The raw samples `Z(j h)` as a curve starting at `t = 0`.
    pub fn to_curve(&self) -> SampledCurve {
        SampledCurve {
            t0: 0.0,
            dt: self.h,
            values: self.values.clone(),
            label: "Z".into(),
        }
    }

    /// `ZGRD`, `u64` sample count, `f64` spacing, samples; little-endian.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(ZGRD_MAGIC)?;
        w.write_all(&(self.values.len() as u64).to_le_bytes())?;
        w.write_all(&self.h.to_le_bytes())?;
        for v in &self.values {
            w.write_all(&v.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut r = BufReader::new(File::open(path)?);
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != ZGRD_MAGIC {
            return Err(Error::Format(format!(
                "{}: bad Z grid magic",
                path.display()
            )));
        }
        let mut word = [0u8; 8];
        r.read_exact(&mut word)?;
        let len = u64::from_le_bytes(word) as usize;
        r.read_exact(&mut word)?;
        let h = f64::from_le_bytes(word);
        if len <= 2 * STENCIL || len > 1 << 32 || !(h > 0.0 && h <= 0.25) {
            return Err(Error::Format(format!(
                "{}: implausible Z grid header",
                path.display()
            )));
        }
        let mut bytes = vec![0u8; 8 * len];
        r.read_exact(&mut bytes)?;
        let values = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
            .collect();
        Ok(Self { h, values })
    }

    pub fn z_at(&self, t: f64) -> Result<f64> {
        if !(0.0..=self.t_max()).contains(&t) {
            return Err(Error::coverage(t, t, 0.0, self.t_max()));
        }
        let x = t / self.h;
        let base = x.floor() as i64;
        let frac = x - base as f64;
        if frac == 0.0 {
            return Ok(self.sample(base));
        }
        // barycentric weights for nodes base-3 ..= base+4
        let lo = base - STENCIL as i64 + 1;
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..2 * STENCIL {
            let node = lo + i as i64;
            let w = BARY[i] / (x - node as f64);
            num += w * self.sample(node);
            den += w;
        }
        Ok(num / den)
    }
}

/// Barycentric weights `(-1)^i C(7, i)` for 8 equispaced nodes.
const BARY: [f64; 2 * STENCIL] = [1.0, -7.0, 21.0, -35.0, 35.0, -21.0, 7.0, -1.0];

impl ZetaSqSource for ZGrid {
    fn zeta_sq(&self, t: f64) -> Result<f64> {
        let z = self.z_at(t)?;
        Ok(z * z)
    }

    fn coverage(&self) -> (f64, f64) {
        (0.0, self.t_max())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn save_load_round_trip() {
        let grid = ZGrid::build(20.0, 0.25, &EvalConfig::default()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("z.zgrd");
        grid.save(&path).unwrap();
        assert_eq!(ZGrid::load(&path).unwrap(), grid);
        std::fs::write(&path, b"XGRD").unwrap();
        assert!(ZGrid::load(&path).is_err());
    }

    #[test]
    fn interpolation_tracks_direct_evaluation() {
        let cfg = EvalConfig::default();
        let grid = ZGrid::build(3000.0, ZGrid::DEFAULT_SPACING, &cfg).unwrap();
        for t in [0.01, 3.3, 14.13, 500.017, 2999.99] {
            let want = z_function(t, &cfg).unwrap();
            let got = grid.z_at(t).unwrap();
            assert!((got - want).abs() < 1e-7, "t = {t}: {got} vs {want}");
        }
        assert_eq!(grid.z_at(2.0).unwrap(), z_function(2.0, &cfg).unwrap());
        assert!(matches!(grid.z_at(3001.0), Err(Error::Coverage { .. })));
    }
}
