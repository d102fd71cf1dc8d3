//! The divisor function and the error terms of the Dirichlet divisor problem.
//!
//! * `D(x) = Σ_{n<=x} d(n)` and `Δ(x) = D(x) - x(ln x + 2γ - 1)`;
//! * `Δ*(x) = -Δ(x) + 2Δ(2x) - Δ(4x)/2`, which also equals
//!   `(1/2) Σ_{n<=4x} (-1)^n d(n) - x(ln x + 2γ - 1)`.
//!
//! Sums over `n <= y` for real `y` run to `floor(y)`, boundary included.
//! Small arguments are served from a sieved [`DivisorTable`]; larger ones by
//! the Dirichlet hyperbola identity in `O(sqrt x)`. Main terms are formed in
//! double-double arithmetic so that `Δ` keeps its absolute accuracy even when
//! `x ln x` is many orders of magnitude larger than `Δ` itself.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::dd::{self, DoubleDouble};
use crate::error::{Error, Result};

/// Euler's constant `γ = -Γ'(1)`.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Table size beyond which the hyperbola path takes over.
pub const DEFAULT_TABLE_LIMIT: usize = 20_000_000;

/// Largest table that will be sieved.
pub const MAX_TABLE_LIMIT: usize = 1_000_000_000;

const DIVT_MAGIC: &[u8; 4] = b"DIVT";

/// Sieved `d(n)` with ordinary and alternating prefix sums.
#[derive(Debug, Clone, PartialEq)]
pub struct DivisorTable {
    limit: usize,
    d: Vec<u32>,
    prefix: Vec<u64>,
    alt_prefix: Vec<i64>,
}

impl DivisorTable {
    /// Sieve `d(1..=limit)` by marking every multiple of every `i`.
    pub fn build(limit: usize) -> Result<Self> {
        if limit == 0 {
            return Err(Error::Size("divisor table limit must be at least 1".into()));
        }
        if limit > MAX_TABLE_LIMIT {
            return Err(Error::Size(format!(
                "divisor table limit {limit} exceeds {MAX_TABLE_LIMIT}"
            )));
        }
        let mut d = vec![0u32; limit + 1];
        for i in 1..=limit {
            for j in (i..=limit).step_by(i) {
                d[j] += 1;
            }
        }
        Self::from_counts(d)
    }

    fn from_counts(d: Vec<u32>) -> Result<Self> {
        let limit = d.len() - 1;
        let mut prefix = vec![0u64; limit + 1];
        let mut alt_prefix = vec![0i64; limit + 1];
        for n in 1..=limit {
            prefix[n] = prefix[n - 1]
                .checked_add(u64::from(d[n]))
                .ok_or_else(|| Error::Size("divisor prefix sum overflow".into()))?;
            let signed = if n % 2 == 0 {
                i64::from(d[n])
            } else {
                -i64::from(d[n])
            };
            alt_prefix[n] = alt_prefix[n - 1] + signed;
        }
        Ok(Self {
            limit,
            d,
            prefix,
            alt_prefix,
        })
    }

    pub fn limit(&self) -> usize {
        self.limit
    }

    /// `d(n)` for `1 <= n <= limit`.
    pub fn d(&self, n: usize) -> u32 {
        self.d[n]
    }

    /// `D(n) = Σ_{m<=n} d(m)`, with `D(0) = 0`.
    pub fn prefix(&self, n: usize) -> u64 {
        self.prefix[n]
    }

    /// `Σ_{m<=n} (-1)^m d(m)`.
    pub fn alt_prefix(&self, n: usize) -> i64 {
        self.alt_prefix[n]
    }

    /// Write `"DIVT"`, `u64 N`, then `d(1..=N)` as `u32`, all little-endian.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(DIVT_MAGIC)?;
        w.write_all(&(self.limit as u64).to_le_bytes())?;
        for &v in &self.d[1..] {
            w.write_all(&v.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut r = BufReader::new(File::open(path)?);
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != DIVT_MAGIC {
            return Err(Error::Format(format!(
                "{}: bad divisor table magic",
                path.display()
            )));
        }
        let mut word = [0u8; 8];
        r.read_exact(&mut word)?;
        let n = u64::from_le_bytes(word) as usize;
        if n == 0 || n > MAX_TABLE_LIMIT {
            return Err(Error::Format(format!(
                "{}: implausible table size {n}",
                path.display()
            )));
        }
        let mut bytes = vec![0u8; 4 * n];
        r.read_exact(&mut bytes)?;
        let mut d = Vec::with_capacity(n + 1);
        d.push(0);
        d.extend(
            bytes
                .chunks_exact(4)
                .map(|c| u32::from_le_bytes([c[0], c[1], c[2], c[3]])),
        );
        if d[1] != 1 {
            return Err(Error::Format(format!("{}: d(1) != 1", path.display())));
        }
        Self::from_counts(d)
    }
}

/// Exact integer square root.
pub fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r.checked_mul(r).is_none_or(|sq| sq > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|sq| sq <= n) {
        r += 1;
    }
    r
}

/// `D(n)` by the hyperbola identity `2 Σ_{k<=√n} floor(n/k) - floor(√n)²`.
pub fn hyperbola_d(n: u64) -> u128 {
    let s = isqrt(n);
    let mut acc: u128 = 0;
    for k in 1..=s {
        acc += u128::from(n / k);
    }
    2 * acc - u128::from(s) * u128::from(s)
}

/// `Σ_{m<=n} (-1)^m d(m)` without a table.
///
/// `(-1)^{ab} = -1` exactly when `a` and `b` are both odd, so the sum is
/// `D(n) - 2 #{(a, b) odd : ab <= n}`, and the odd-pair count has its own
/// hyperbola identity.
pub fn hyperbola_alt(n: u64) -> i128 {
    let s = isqrt(n);
    let odd_upto = |m: u64| m.div_ceil(2);
    let mut acc: u128 = 0;
    for a in (1..=s).step_by(2) {
        acc += u128::from(odd_upto(n / a));
    }
    let so = u128::from(odd_upto(s));
    let odd_pairs = 2 * acc - so * so;
    hyperbola_d(n) as i128 - 2 * odd_pairs as i128
}

fn floor_arg(x: f64) -> Result<u64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("non-finite argument {x}")));
    }
    if x >= 1.8e19 {
        return Err(Error::Size(format!("argument {x} too large")));
    }
    Ok(x.floor() as u64)
}

/// `x (ln x + 2γ - 1)` in double-double; zero at `x = 0`.
pub fn divisor_main_term(x: f64) -> DoubleDouble {
    if x == 0.0 {
        return DoubleDouble::ZERO;
    }
    let bracket = DoubleDouble::from_f64(x).ln() + dd::EULER_GAMMA.ldexp(1) - DoubleDouble::ONE;
    bracket.mul_f64(x)
}

fn from_u128(v: u128) -> DoubleDouble {
    let hi = v as f64;
    // hi is v rounded; the remainder is exactly representable
    let rem = v as i128 - hi as i128;
    DoubleDouble::sum(hi, rem as f64)
}

/// Divisor-problem quantities served from a table where possible.
#[derive(Debug, Clone)]
pub struct DivisorSums {
    table: Option<DivisorTable>,
    allow_hyperbola: bool,
}

impl DivisorSums {
    pub fn with_table(table: DivisorTable) -> Self {
        Self {
            table: Some(table),
            allow_hyperbola: true,
        }
    }

    /// Sieve a table of the given size; beyond it the hyperbola path is used.
    pub fn new(table_limit: usize) -> Result<Self> {
        Ok(Self::with_table(DivisorTable::build(table_limit)?))
    }

    /// No table at all; every query goes through the hyperbola identity.
    pub fn hyperbola_only() -> Self {
        Self {
            table: None,
            allow_hyperbola: true,
        }
    }

    /// Serve only what the table covers; larger arguments are a coverage error.
    pub fn table_only(table: DivisorTable) -> Self {
        Self {
            table: Some(table),
            allow_hyperbola: false,
        }
    }

    pub fn table(&self) -> Option<&DivisorTable> {
        self.table.as_ref()
    }

    /// Largest integer argument answerable (`u64::MAX` with the hyperbola path).
    pub fn coverage(&self) -> u64 {
        if self.allow_hyperbola {
            u64::MAX
        } else {
            self.table.as_ref().map_or(0, |t| t.limit as u64)
        }
    }

    fn table_for(&self, n: u64) -> Result<Option<&DivisorTable>> {
        match &self.table {
            Some(t) if n as usize <= t.limit => Ok(Some(t)),
            _ if self.allow_hyperbola => Ok(None),
            _ => Err(Error::coverage(0.0, n as f64, 0.0, self.coverage() as f64)),
        }
    }

    fn d_upto(&self, n: u64) -> Result<u128> {
        Ok(match self.table_for(n)? {
            Some(t) => u128::from(t.prefix[n as usize]),
            None => hyperbola_d(n),
        })
    }

    fn alt_upto(&self, n: u64) -> Result<i128> {
        Ok(match self.table_for(n)? {
            Some(t) => i128::from(t.alt_prefix[n as usize]),
            None => hyperbola_alt(n),
        })
    }

    /// `D(x) = Σ_{n<=x} d(n)` for `x >= 1`.
    pub fn big_d(&self, x: f64) -> Result<u64> {
        if !(x >= 1.0) {
            return Err(Error::Domain(format!("D(x) requires x >= 1, got {x}")));
        }
        let v = self.d_upto(floor_arg(x)?)?;
        u64::try_from(v).map_err(|_| Error::Size(format!("D({x}) overflows u64")))
    }

    /// `Σ_{n<=y} (-1)^n d(n)` for `y >= 0`.
    pub fn alternating_sum(&self, y: f64) -> Result<i64> {
        if !(y >= 0.0) {
            return Err(Error::Domain(format!(
                "alternating sum requires y >= 0, got {y}"
            )));
        }
        let v = self.alt_upto(floor_arg(y)?)?;
        i64::try_from(v).map_err(|_| Error::Size(format!("alternating sum at {y} overflows")))
    }

    fn delta_dd(&self, x: f64) -> Result<DoubleDouble> {
        let d = self.d_upto(floor_arg(x)?)?;
        Ok(from_u128(d) - divisor_main_term(x))
    }

    /// `Δ(x) = D(x) - x(ln x + 2γ - 1)` for `x >= 1`.
    pub fn delta(&self, x: f64) -> Result<f64> {
        if !(x >= 1.0) {
            return Err(Error::Domain(format!("Δ(x) requires x >= 1, got {x}")));
        }
        Ok(self.delta_dd(x)?.to_f64())
    }

    /// `Δ*(x)` for `x >= 1` through the alternating-sum form.
    pub fn delta_star(&self, x: f64) -> Result<f64> {
        if !(x >= 1.0) {
            return Err(Error::Domain(format!("Δ*(x) requires x >= 1, got {x}")));
        }
        self.delta_star_extended(x)
    }

    /// `Δ*(x)` for every `x >= 0` through the alternating-sum form.
    ///
    /// Below `x = 1` the sum is short (or empty below `1/4`) and the main
    /// term tends to zero, so `Δ*(0) = 0`; the mean-square error-term bundle
    /// needs this range because its grid starts at `t = 0`.
    pub fn delta_star_extended(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) {
            return Err(Error::Domain(format!("Δ*(x) requires x >= 0, got {x}")));
        }
        let a = self.alt_upto(floor_arg(4.0 * x)?)?;
        let half_a = from_u128(a.unsigned_abs()).ldexp(-1);
        let half_a = if a < 0 { -half_a } else { half_a };
        Ok((half_a - divisor_main_term(x)).to_f64())
    }

    /// `Δ*(x)` through `-Δ(x) + 2Δ(2x) - Δ(4x)/2`.
    pub fn delta_star_three_delta(&self, x: f64) -> Result<f64> {
        if !(x >= 1.0) {
            return Err(Error::Domain(format!("Δ*(x) requires x >= 1, got {x}")));
        }
        let v = -self.delta_dd(x)? + self.delta_dd(2.0 * x)?.ldexp(1)
            - self.delta_dd(4.0 * x)?.ldexp(-1);
        Ok(v.to_f64())
    }

    /// `Σ d(n)` over `2t/π - GL <= n <= 2t/π + GL`.
    pub fn shiu_window_sum(&self, t: f64, g: f64, l: f64) -> Result<u64> {
        let centre = 2.0 * t / std::f64::consts::PI;
        let half = g * l;
        let (lo, hi) = (centre - half, centre + half);
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Domain("non-finite window".into()));
        }
        if lo < 1.0 {
            return Err(Error::Domain(format!("window start {lo} below 1")));
        }
        let first = lo.ceil() as u64;
        let last = floor_arg(hi)?;
        if last < first {
            return Ok(0);
        }
        let v = self.d_upto(last)? - self.d_upto(first - 1)?;
        u64::try_from(v).map_err(|_| Error::Size("window sum overflows".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn divisors_by_enumeration(n: u64) -> u64 {
        (1..=n).filter(|k| n.is_multiple_of(*k)).count() as u64
    }

    #[test]
    fn small_table_values() {
        let t = DivisorTable::build(12).unwrap();
        assert_eq!(t.d(12), 6);
        assert_eq!(t.d(1), 1);
        for p in [2, 3, 5, 7, 11] {
            assert_eq!(t.d(p), 2);
        }
        assert_eq!(
            t.prefix(10),
            (1..=10).map(divisors_by_enumeration).sum::<u64>()
        );
        assert_eq!(t.prefix(10), 27);
        assert_eq!(t.alt_prefix(4), -1 + 2 - 2 + 3);
    }

    #[test]
    fn table_invariants() {
        let t = DivisorTable::build(5000).unwrap();
        for n in 1..=5000 {
            assert_eq!(u64::from(t.d(n)), divisors_by_enumeration(n as u64));
            assert_eq!(t.prefix(n) - t.prefix(n - 1), u64::from(t.d(n)));
            let sign = if n % 2 == 0 { 1 } else { -1 };
            assert_eq!(
                t.alt_prefix(n) - t.alt_prefix(n - 1),
                sign * i64::from(t.d(n))
            );
        }
    }

    #[test]
    fn zero_limit_is_a_size_error() {
        assert!(matches!(DivisorTable::build(0), Err(Error::Size(_))));
    }

    #[test]
    fn big_d_small_values_and_domain() {
        let s = DivisorSums::new(100).unwrap();
        assert_eq!(s.big_d(10.0).unwrap(), 27);
        assert_eq!(s.big_d(10.9).unwrap(), 27);
        assert_eq!(s.big_d(1.0).unwrap(), 1);
        assert!(matches!(s.big_d(0.5), Err(Error::Domain(_))));
        assert!(matches!(s.big_d(f64::NAN), Err(Error::Domain(_))));
    }

    #[test]
    fn table_and_hyperbola_agree_at_one_million() {
        let table = DivisorSums::new(1_000_000).unwrap();
        let hyper = DivisorSums::hyperbola_only();
        assert_eq!(table.big_d(1e6).unwrap(), hyper.big_d(1e6).unwrap());
        assert_eq!(
            table.alternating_sum(1e6).unwrap(),
            hyper.alternating_sum(1e6).unwrap()
        );
    }

    #[test]
    fn delta_reference_values() {
        let s = DivisorSums::new(100).unwrap();
        // 2 - 2γ and 27 - 10(ln 10 + 2γ - 1) from a 50-digit evaluation
        assert!((s.delta(1.0).unwrap() - 0.8455686701969343).abs() < 1e-14);
        assert!((s.delta(10.0).unwrap() - 2.429835772028886).abs() < 1e-13);
        assert!(matches!(s.delta(0.99), Err(Error::Domain(_))));
    }

    #[test]
    fn delta_drifts_only_by_main_term_between_integers() {
        let s = DivisorSums::new(100).unwrap();
        let (a, b) = (7.1, 7.8);
        let drift = s.delta(b).unwrap() - s.delta(a).unwrap();
        let main = divisor_main_term(b).to_f64() - divisor_main_term(a).to_f64();
        assert!((drift + main).abs() < 1e-13);
    }

    #[test]
    fn delta_star_at_one() {
        let s = DivisorSums::new(100).unwrap();
        let want = 0.5 * f64::from(-1 + 2 - 2 + 3) - (2.0 * EULER_GAMMA - 1.0);
        let a = s.delta_star(1.0).unwrap();
        let b = s.delta_star_three_delta(1.0).unwrap();
        assert!((a - want).abs() < 1e-14);
        assert!((a - b).abs() < 1e-9);
        let a = s.delta_star(2.5).unwrap();
        let b = s.delta_star_three_delta(2.5).unwrap();
        assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn delta_star_extended_near_zero() {
        let s = DivisorSums::new(100).unwrap();
        assert_eq!(s.delta_star_extended(0.0).unwrap(), 0.0);
        // empty sum below 1/4
        let x: f64 = 0.2;
        let want = -x * (x.ln() + 2.0 * EULER_GAMMA - 1.0);
        assert!((s.delta_star_extended(x).unwrap() - want).abs() < 1e-15);
        assert!(matches!(s.delta_star(0.5), Err(Error::Domain(_))));
    }

    #[test]
    fn shiu_window() {
        let s = DivisorSums::new(1000).unwrap();
        let t = 3.0 * std::f64::consts::PI; // 2t/π = 6
        assert_eq!(s.shiu_window_sum(t, 0.5, 1.0).unwrap(), 4);
        // window (6.1, 6.9) holds no integer
        let t = 6.5 * std::f64::consts::FRAC_PI_2;
        assert_eq!(s.shiu_window_sum(t, 0.4, 1.0).unwrap(), 0);
        assert!(matches!(
            s.shiu_window_sum(1.0, 1.0, 1.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn table_only_mode_reports_coverage() {
        let s = DivisorSums::table_only(DivisorTable::build(50).unwrap());
        assert!(s.big_d(50.0).is_ok());
        assert!(matches!(s.big_d(51.0), Err(Error::Coverage { .. })));
    }

    #[test]
    fn divt_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.divt");
        let t = DivisorTable::build(777).unwrap();
        t.save(&path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        assert_eq!(&bytes[..4], b"DIVT");
        assert_eq!(u64::from_le_bytes(bytes[4..12].try_into().unwrap()), 777);
        assert_eq!(bytes.len(), 12 + 4 * 777);
        assert_eq!(DivisorTable::load(&path).unwrap(), t);
        let mut bad = bytes.clone();
        bad[0] = b'X';
        std::fs::write(&path, bad).unwrap();
        assert!(matches!(DivisorTable::load(&path), Err(Error::Format(_))));
    }

    #[test]
    fn isqrt_exact() {
        for n in [0u64, 1, 3, 4, 15, 16, 17, 999_999_999_999, u64::MAX] {
            let r = isqrt(n);
            assert!(u128::from(r) * u128::from(r) <= u128::from(n));
            assert!(u128::from(r + 1) * u128::from(r + 1) > u128::from(n));
        }
    }

    proptest! {
        #[test]
        fn hyperbola_matches_table(x in 1u64..200_000) {
            let table = DivisorSums::new(200_000).unwrap();
            prop_assert_eq!(u128::from(table.big_d(x as f64).unwrap()), hyperbola_d(x));
            prop_assert_eq!(i128::from(table.alternating_sum(x as f64).unwrap()), hyperbola_alt(x));
        }
    }
}
