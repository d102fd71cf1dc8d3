//! End-to-end runs: cached grids, verification suites, reports and curve
//! exports.
//!
//! A run keeps three caches in `cache_dir`, each a binary file plus a `.meta`
//! sidecar of `key=value` lines: the divisor table (`divisors.divt`), the
//! error-term bundle (`egrid.egrd`) and, for suites that need `Z` directly,
//! the `Z` grid (`zgrid.zgrd`). A cache is reused only when its sidecar
//! matches the current configuration exactly; anything else, including an
//! unreadable file, triggers a rebuild and a warning.

use std::fmt;
use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::divisor::{DivisorSums, DivisorTable, DEFAULT_TABLE_LIMIT};
use crate::error::{Error, Result};
use crate::error_terms::{
    build_e_grid, build_error_bundle, ErrorTermBundle, DEFAULT_DT, ERROR_BUDGET_PER_UNIT,
};
use crate::moments::{geometric_t_list, moment_curve, MomentCurve, WindowKind};
use crate::verify::{self, VerificationReport, ZetaMomentParams, EPSILON_EXPONENT};
use crate::zeta::{EvalConfig, ZGrid};

/// Bumped whenever any cache file layout or its meaning changes.
pub const CACHE_FORMAT_VERSION: u32 = 1;

/// Name of the lock file that keeps two runs out of one cache directory.
pub const LOCK_FILE: &str = ".zeta.lock";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    /// Means of `E` and `E*`.
    Means,
    /// Exponent fits of `∫|E*|^m`.
    Estar,
    /// The `∫E²` constant.
    E2,
    /// Exponent fits and pointwise size of `R`.
    R,
    /// Slopes of `∫_T^{2T} J_1^m` at the smoothing thresholds.
    Thm1,
    /// The smoothed-moment inequality and its constant.
    Thm2,
    /// Slopes of the 8th, 10th and 12th moments and the reduction arithmetic.
    ZetaMoments,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Means,
        Suite::Estar,
        Suite::E2,
        Suite::R,
        Suite::Thm1,
        Suite::Thm2,
        Suite::ZetaMoments,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Means => "means",
            Suite::Estar => "estar",
            Suite::E2 => "e2",
            Suite::R => "r",
            Suite::Thm1 => "thm1",
            Suite::Thm2 => "thm2",
            Suite::ZetaMoments => "zeta-moments",
        }
    }

    pub fn needs_zgrid(self) -> bool {
        matches!(self, Suite::Thm1 | Suite::Thm2 | Suite::ZetaMoments)
    }

    pub fn needs_bundle(self) -> bool {
        !matches!(self, Suite::Thm1 | Suite::ZetaMoments)
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s.trim())
            .ok_or_else(|| {
                let names: Vec<_> = Suite::ALL.iter().map(|s| s.name()).collect();
                Error::Config(format!(
                    "unknown suite {s:?}; expected one of {}",
                    names.join(", ")
                ))
            })
    }
}

pub fn parse_suites(list: &str) -> Result<Vec<Suite>> {
    let mut out: Vec<Suite> = list
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(str::parse)
        .collect::<Result<_>>()?;
    out.sort();
    out.dedup();
    Ok(out)
}

/// Everything a run depends on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub t_max: f64,
    pub dt: f64,
    /// Largest divisor table to sieve; arguments beyond it use the hyperbola
    /// identity.
    pub table_limit: usize,
    pub suites: Vec<Suite>,
    pub cache_dir: PathBuf,
    pub threads: usize,
    pub output: PathBuf,
    pub eval: EvalConfig,
    /// `T` for the smoothed-moment inequality (`G = T^{1/4}`).
    pub inequality_t: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            t_max: 5e4,
            dt: DEFAULT_DT,
            table_limit: DEFAULT_TABLE_LIMIT,
            suites: Suite::ALL.to_vec(),
            cache_dir: PathBuf::from("zeta-cache"),
            threads: std::thread::available_parallelism().map_or(1, |n| n.get()),
            output: PathBuf::from("zeta-out"),
            eval: EvalConfig::default(),
            inequality_t: 1e4,
        }
    }
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("invalid value {value:?} for {key}")))
}

impl RunConfig {
    /// Set one field from its textual form, as in a config file line.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim() {
            "t_max" => self.t_max = parse_value(key, value)?,
            "dt" => self.dt = parse_value(key, value)?,
            "table_limit" => self.table_limit = parse_value(key, value)?,
            "suites" => self.suites = parse_suites(value)?,
            "cache_dir" => self.cache_dir = PathBuf::from(value),
            "threads" => self.threads = parse_value(key, value)?,
            "output" => self.output = PathBuf::from(value),
            "rs_correction_order" => self.eval.rs_correction_order = parse_value(key, value)?,
            "oracle_terms" => self.eval.oracle_terms = parse_value(key, value)?,
            "crossover_t" => self.eval.crossover_t = parse_value(key, value)?,
            "inequality_t" => self.inequality_t = parse_value(key, value)?,
            other => return Err(Error::Config(format!("unknown config key {other:?}"))),
        }
        Ok(())
    }

    /// Apply `key = value` lines on top of `self`; `#` starts a comment.
    pub fn apply_kv(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected key = value, got {raw:?}", i + 1))
            })?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn from_kv(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.apply_kv(text)?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_kv(&fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_max >= 1e3) || !self.t_max.is_finite() {
            return Err(Error::Config(format!(
                "t_max must be at least 1000, got {}",
                self.t_max
            )));
        }
        if !(self.dt > 0.0 && self.dt <= 0.25) {
            return Err(Error::Config(format!(
                "dt must lie in (0, 0.25], got {}",
                self.dt
            )));
        }
        if self.threads == 0 {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        if self.table_limit == 0 {
            return Err(Error::Config("table_limit must be positive".into()));
        }
        if !(self.inequality_t > 10.0) {
            return Err(Error::Config(format!(
                "inequality_t must exceed 10, got {}",
                self.inequality_t
            )));
        }
        self.eval.validate()
    }

    /// `T` values for the exponent fits.
    pub fn t_list(&self) -> Vec<f64> {
        geometric_t_list(self.t_max)
    }

    /// Extent of the `Z` grid the selected suites need.
    pub fn zgrid_extent(&self) -> f64 {
        let t_last = self.t_list().last().copied().unwrap_or(self.t_max);
        let mut need: f64 = 0.0;
        for s in &self.suites {
            let e = match s {
                Suite::Thm1 => {
                    let g = t_last.powf(2.0 / 9.0 + EPSILON_EXPONENT);
                    2.0 * t_last + g * t_last.ln()
                }
                Suite::Thm2 => {
                    let t = self.inequality_t;
                    2.0 * t + t.powf(0.25) * t.ln()
                }
                Suite::ZetaMoments => t_last,
                _ => 0.0,
            };
            need = need.max(e);
        }
        if need > 0.0 {
            need.ceil() + 1.0
        } else {
            0.0
        }
    }
}

/// Exclusive claim on a cache directory, released on drop.
#[derive(Debug)]
pub struct RunLock {
    path: PathBuf,
}

impl RunLock {
    pub fn acquire(cache_dir: &Path) -> Result<Self> {
        fs::create_dir_all(cache_dir)?;
        let path = cache_dir.join(LOCK_FILE);
        match OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(mut f) => {
                writeln!(f, "pid={}", std::process::id())?;
                Ok(Self { path })
            }
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => Err(Error::Config(format!(
                "cache directory {} is in use by another run (remove {} if that run died)",
                cache_dir.display(),
                path.display()
            ))),
            Err(e) => Err(e.into()),
        }
    }
}

impl Drop for RunLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CacheStatus {
    Loaded,
    Built,
    Rebuilt,
}

/// Sidecar key: ordered `key=value` lines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CacheKey(Vec<(String, String)>);

impl CacheKey {
    pub fn new(kind: &str) -> Self {
        Self(vec![
            ("kind".into(), kind.into()),
            ("version".into(), CACHE_FORMAT_VERSION.to_string()),
        ])
    }

    pub fn with(mut self, key: &str, value: impl fmt::Display) -> Self {
        self.0.push((key.into(), value.to_string()));
        self
    }

    /// Floats go in as their bit patterns so that equality is exact.
    pub fn with_f64(self, key: &str, value: f64) -> Self {
        self.with(key, format!("{:016x}", value.to_bits()))
    }

    pub fn render(&self) -> String {
        self.0.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    pub fn parse(text: &str) -> Self {
        Self(
            text.lines()
                .filter_map(|l| l.split_once('='))
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect(),
        )
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }
}

fn meta_path(data: &Path) -> PathBuf {
    let mut s = data.as_os_str().to_owned();
    s.push(".meta");
    PathBuf::from(s)
}

/// Write through a temporary file and rename, so a crash never leaves a
/// half-written cache under the real name.
fn write_atomic(path: &Path, write: impl FnOnce(&Path) -> Result<()>) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    write(&tmp)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Load `path` if its sidecar satisfies `accept`; otherwise build, save and
/// record why.
fn cached<T>(
    path: &Path,
    key: &CacheKey,
    accept: impl Fn(&CacheKey) -> bool,
    load: impl Fn(&Path) -> Result<T>,
    build: impl FnOnce() -> Result<T>,
    save: impl Fn(&T, &Path) -> Result<()>,
    warnings: &mut Vec<String>,
) -> Result<(T, CacheStatus)> {
    let meta = meta_path(path);
    let first_new = warnings.len();
    let mut status = CacheStatus::Built;
    if path.exists() {
        status = CacheStatus::Rebuilt;
        match fs::read_to_string(&meta).map(|t| CacheKey::parse(&t)) {
            Ok(found) if accept(&found) => match load(path) {
                Ok(v) => return Ok((v, CacheStatus::Loaded)),
                Err(e) => warnings.push(format!(
                    "{}: unreadable cache ({e}); rebuilding",
                    path.display()
                )),
            },
            Ok(_) => warnings.push(format!(
                "{}: cache key mismatch; rebuilding",
                path.display()
            )),
            Err(_) => warnings.push(format!(
                "{}: missing cache metadata; rebuilding",
                path.display()
            )),
        }
    }
    for w in &warnings[first_new..] {
        log::warn!("{w}");
    }
    let value = build()?;
    // data first, sidecar last: the sidecar marks a complete cache
    let _ = fs::remove_file(&meta);
    write_atomic(path, |p| save(&value, p))?;
    write_atomic(&meta, |p| Ok(fs::write(p, key.render())?))?;
    Ok((value, status))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheSummary {
    pub divisors: CacheStatus,
    pub egrid: CacheStatus,
    pub zgrid: Option<CacheStatus>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub reports: Vec<VerificationReport>,
    pub warnings: Vec<String>,
    pub caches: CacheSummary,
}

impl RunOutcome {
    /// 0 when every report passed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        i32::from(verify::failures(&self.reports) > 0)
    }
}

/// Exit code for an error: configuration and coverage problems alike map to 2.
pub fn error_exit_code(_: &Error) -> i32 {
    2
}

/// Load or build the divisor table covering `4 t_max / 2π`.
pub fn load_divisors(
    cfg: &RunConfig,
    warnings: &mut Vec<String>,
) -> Result<(DivisorSums, CacheStatus)> {
    let needed = (4.0 * cfg.t_max / (2.0 * std::f64::consts::PI)).floor() as usize + 1;
    let limit = needed.min(cfg.table_limit);
    let key = CacheKey::new("divisors").with("limit", limit);
    let (table, status) = cached(
        &cfg.cache_dir.join("divisors.divt"),
        &key,
        |k| *k == key,
        DivisorTable::load,
        || DivisorTable::build(limit),
        |t, p| t.save(p),
        warnings,
    )?;
    Ok((DivisorSums::with_table(table), status))
}

fn egrid_key(cfg: &RunConfig) -> CacheKey {
    CacheKey::new("egrid")
        .with_f64("dt", cfg.dt)
        .with_f64("t_max", cfg.t_max)
        .with("eval", format!("{:016x}", cfg.eval.fingerprint()))
        .with_f64("budget", ERROR_BUDGET_PER_UNIT)
}

/// Load or build the error-term bundle for `cfg`.
pub fn load_bundle(
    cfg: &RunConfig,
    divisors: &DivisorSums,
    warnings: &mut Vec<String>,
) -> Result<(ErrorTermBundle, CacheStatus)> {
    let key = egrid_key(cfg);
    cached(
        &cfg.cache_dir.join("egrid.egrd"),
        &key,
        |k| *k == key,
        ErrorTermBundle::load,
        || {
            let grid = build_e_grid(cfg.t_max, cfg.dt, &cfg.eval)?;
            build_error_bundle(&grid, divisors)
        },
        |b, p| b.save(p),
        warnings,
    )
}

/// Load or build a `Z` grid reaching at least `extent`; a cached grid that
/// reaches further is reused.
pub fn load_zgrid(
    cfg: &RunConfig,
    extent: f64,
    warnings: &mut Vec<String>,
) -> Result<(ZGrid, CacheStatus)> {
    let h = ZGrid::DEFAULT_SPACING;
    let fingerprint = format!("{:016x}", cfg.eval.fingerprint());
    let key = CacheKey::new("zgrid")
        .with_f64("h", h)
        .with("eval", &fingerprint)
        .with("extent", extent);
    let reusable = |k: &CacheKey| {
        let base = CacheKey::new("zgrid")
            .with_f64("h", h)
            .with("eval", &fingerprint);
        base.0.iter().all(|(kk, v)| k.get(kk) == Some(v.as_str()))
            && k.get("extent")
                .and_then(|e| e.parse::<f64>().ok())
                .is_some_and(|e| e >= extent)
    };
    cached(
        &cfg.cache_dir.join("zgrid.zgrd"),
        &key,
        reusable,
        |p| {
            let z = ZGrid::load(p)?;
            if z.t_max() < extent {
                return Err(Error::coverage(0.0, extent, 0.0, z.t_max()));
            }
            Ok(z)
        },
        || ZGrid::build(extent, h, &cfg.eval),
        |z, p| z.save(p),
        warnings,
    )
}

/// Inputs shared by all suites.
pub struct SuiteInputs<'a> {
    pub bundle: Option<&'a ErrorTermBundle>,
    pub zgrid: Option<&'a ZGrid>,
    pub t_list: Vec<f64>,
    pub inequality_t: f64,
}

fn need<'a, T>(v: Option<&'a T>, suite: Suite, what: &str) -> Result<&'a T> {
    v.ok_or_else(|| Error::Config(format!("suite {suite} needs {what}")))
}

pub fn run_suite(suite: Suite, inputs: &SuiteInputs<'_>) -> Result<Vec<VerificationReport>> {
    let ts = &inputs.t_list;
    match suite {
        Suite::Means => {
            let b = need(inputs.bundle, suite, "an error-term bundle")?;
            let t = ts
                .last()
                .copied()
                .unwrap_or(b.t_max())
                .max(b.t_max().floor());
            verify::verify_means(b, t)
        }
        Suite::Estar => {
            verify::verify_estar_moments(need(inputs.bundle, suite, "an error-term bundle")?, ts)
        }
        Suite::E2 => {
            // the constant is judged at the far end of the grid
            let b = need(inputs.bundle, suite, "an error-term bundle")?;
            let mut ts = ts.clone();
            let end = b.t_max().floor();
            if ts.last().is_some_and(|&t| t < end) {
                ts.push(end);
            }
            Ok(vec![verify::verify_e2_asymptotic(&b.e_curve(), &ts)?])
        }
        Suite::R => {
            verify::verify_r_moments(need(inputs.bundle, suite, "an error-term bundle")?, ts)
        }
        Suite::Thm1 => verify::verify_smoothed_slopes(
            need(inputs.zgrid, suite, "a Z grid")?,
            &[1, 2, 3, 4, 5, 6],
            ts,
        ),
        Suite::Thm2 => {
            let b = need(inputs.bundle, suite, "an error-term bundle")?;
            let z = need(inputs.zgrid, suite, "a Z grid")?;
            let t = inputs.inequality_t;
            [1, 2]
                .iter()
                .map(|&m| verify::verify_smoothed_inequality(b, z, m, t.powf(0.25), t))
                .collect()
        }
        Suite::ZetaMoments => verify::zeta_moment_report(
            need(inputs.zgrid, suite, "a Z grid")?,
            &ZetaMomentParams::default(),
            ts,
        ),
    }
}

/// Moment curves written alongside the reports.
pub fn standard_curves(bundle: &ErrorTermBundle, ts: &[f64]) -> Result<Vec<(String, MomentCurve)>> {
    let e = bundle.e_curve();
    let es = bundle.e_star_curve();
    let r = bundle.r_curve();
    let mut out = vec![(
        "e_m2".to_string(),
        moment_curve(&e, 2.0, ts, WindowKind::ZeroToT)?,
    )];
    for m in [2.0, 4.0, 5.0, 6.0] {
        out.push((
            format!("estar_m{m}"),
            moment_curve(&es, m, ts, WindowKind::ZeroToT)?,
        ));
    }
    for m in [2.0, 4.0] {
        out.push((
            format!("r_m{m}"),
            moment_curve(&r, m, ts, WindowKind::ZeroToT)?,
        ));
    }
    Ok(out)
}

/// Serialize reports exactly as stored in `reports.json`.
pub fn reports_json(reports: &[VerificationReport]) -> Result<String> {
    Ok(serde_json::to_string_pretty(reports)? + "\n")
}

#[derive(Debug, Serialize)]
struct RunMeta<'a> {
    generated_unix_seconds: u64,
    elapsed_seconds: f64,
    threads: usize,
    caches: &'a CacheSummary,
    warnings: &'a [String],
    config: &'a RunConfig,
}

/// Build or load caches, run the configured suites and write
/// `reports.json`, `reports.meta.json` and `curves/*.csv` under `output`.
///
/// `reports.json` depends only on the configuration and the caches; wall
/// clock data goes to `reports.meta.json`.
pub fn run(cfg: &RunConfig) -> Result<RunOutcome> {
    cfg.validate()?;
    let started = Instant::now();
    let _lock = RunLock::acquire(&cfg.cache_dir)?;
    fs::create_dir_all(&cfg.output)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {} worker threads: {e}", cfg.threads)))?;

    let outcome = pool.install(|| -> Result<RunOutcome> {
        let mut warnings = Vec::new();
        let (divisors, div_status) = load_divisors(cfg, &mut warnings)?;
        let (bundle, egrid_status) = load_bundle(cfg, &divisors, &mut warnings)?;
        let extent = cfg.zgrid_extent();
        let zgrid = if cfg.suites.iter().any(|s| s.needs_zgrid()) {
            Some(load_zgrid(cfg, extent, &mut warnings)?)
        } else {
            None
        };
        let inputs = SuiteInputs {
            bundle: Some(&bundle),
            zgrid: zgrid.as_ref().map(|z| &z.0),
            t_list: cfg.t_list(),
            inequality_t: cfg.inequality_t,
        };
        let mut reports = Vec::new();
        for &suite in &cfg.suites {
            reports.extend(run_suite(suite, &inputs)?);
        }
        let curves_dir = cfg.output.join("curves");
        fs::create_dir_all(&curves_dir)?;
        for (name, curve) in standard_curves(&bundle, &inputs.t_list)? {
            Table::from_moment_curve(&curve)
                .write(&curves_dir.join(format!("{name}.csv")), ExportFormat::Csv)?;
        }
        Ok(RunOutcome {
            reports,
            warnings,
            caches: CacheSummary {
                divisors: div_status,
                egrid: egrid_status,
                zgrid: zgrid.map(|z| z.1),
            },
        })
    })?;

    fs::write(
        cfg.output.join("reports.json"),
        reports_json(&outcome.reports)?,
    )?;
    let meta = RunMeta {
        generated_unix_seconds: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs()),
        elapsed_seconds: started.elapsed().as_secs_f64(),
        threads: cfg.threads,
        caches: &outcome.caches,
        warnings: &outcome.warnings,
        config: cfg,
    };
    fs::write(
        cfg.output.join("reports.meta.json"),
        serde_json::to_string_pretty(&meta)? + "\n",
    )?;
    Ok(outcome)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExportFormat {
    Csv,
    Json,
}

impl FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            _ => Err(Error::Config(format!(
                "unknown export format {s:?}; expected csv or json"
            ))),
        }
    }
}

impl ExportFormat {
    /// Guess from a file extension.
    pub fn from_path(path: &Path) -> Option<Self> {
        path.extension()?.to_str()?.parse().ok()
    }
}

/// Named numeric columns; the common shape of every exported curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    /// Columns `t, E, Estar, R`.
    pub fn from_bundle(b: &ErrorTermBundle) -> Self {
        Self {
            columns: ["t", "E", "Estar", "R"].map(String::from).to_vec(),
            rows: (0..b.len())
                .map(|i| vec![b.t_at(i), b.e[i], b.e_star[i], b.r[i]])
                .collect(),
        }
    }

    /// Columns `T, value`.
    pub fn from_moment_curve(c: &MomentCurve) -> Self {
        Self {
            columns: vec!["T".into(), "value".into()],
            rows: c.points.iter().map(|&(t, v)| vec![t, v]).collect(),
        }
    }

    /// CSV numbers carry 17 significant digits, enough to round-trip any `f64`.
    pub fn write(&self, path: &Path, format: ExportFormat) -> Result<()> {
        match format {
            ExportFormat::Csv => {
                let mut w = csv::Writer::from_writer(File::create(path)?);
                w.write_record(&self.columns).map_err(csv_err)?;
                for row in &self.rows {
                    w.write_record(row.iter().map(|v| format!("{v:.16e}")))
                        .map_err(csv_err)?;
                }
                w.flush()?;
            }
            ExportFormat::Json => {
                let mut f = File::create(path)?;
                serde_json::to_writer(&mut f, self)?;
                f.write_all(b"\n")?;
            }
        }
        Ok(())
    }

    pub fn read(path: &Path, format: ExportFormat) -> Result<Self> {
        match format {
            ExportFormat::Csv => {
                let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
                let columns = r
                    .headers()
                    .map_err(csv_err)?
                    .iter()
                    .map(String::from)
                    .collect();
                let rows = r
                    .records()
                    .map(|rec| {
                        let rec = rec.map_err(csv_err)?;
                        rec.iter()
                            .map(|v| {
                                v.parse::<f64>()
                                    .map_err(|e| Error::Format(format!("{v:?}: {e}")))
                            })
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<_>>()?;
                Ok(Self { columns, rows })
            }
            ExportFormat::Json => Ok(serde_json::from_reader(std::io::BufReader::new(
                File::open(path)?,
            ))?),
        }
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Format(format!("csv: {e}"))
}

/// Write a table to `path`.
pub fn export_curves(table: &Table, format: ExportFormat, path: &Path) -> Result<()> {
    table.write(path, format)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_text_and_validation() {
        let cfg = RunConfig::from_kv(
            "# comment\nt_max = 2000\n dt=0.0625 \nsuites = r, estar,r\nthreads=3\n",
        )
        .unwrap();
        assert_eq!(cfg.t_max, 2000.0);
        assert_eq!(cfg.dt, 0.0625);
        assert_eq!(cfg.suites, vec![Suite::Estar, Suite::R]);
        assert_eq!(cfg.threads, 3);
        cfg.validate().unwrap();
        assert!(RunConfig::from_kv("bogus = 1").is_err());
        assert!(RunConfig::from_kv("dt 0.1").is_err());
        assert!(RunConfig::from_kv("suites = nope").is_err());
        for bad in ["t_max = 999", "dt = 0.3", "threads = 0", "dt = 0"] {
            assert!(
                RunConfig::from_kv(bad).unwrap().validate().is_err(),
                "{bad}"
            );
        }
        let empty = RunConfig::from_kv("suites =").unwrap();
        assert!(empty.suites.is_empty());
        assert_eq!(empty.zgrid_extent(), 0.0);
    }

    #[test]
    fn cache_keys_are_exact() {
        let k = CacheKey::new("egrid").with_f64("dt", 0.125).with("eval", 7);
        assert_eq!(CacheKey::parse(&k.render()), k);
        let other = CacheKey::new("egrid")
            .with_f64("dt", 0.125 + 1e-17)
            .with("eval", 7);
        assert_eq!(k, other); // 1e-17 is below an ulp of 0.125
        let other = CacheKey::new("egrid")
            .with_f64("dt", 0.0625)
            .with("eval", 7);
        assert_ne!(k, other);
    }

    #[test]
    fn lock_is_exclusive() {
        let dir = tempfile::tempdir().unwrap();
        let lock = RunLock::acquire(dir.path()).unwrap();
        assert!(matches!(
            RunLock::acquire(dir.path()),
            Err(Error::Config(_))
        ));
        drop(lock);
        RunLock::acquire(dir.path()).unwrap();
    }

    #[test]
    fn tables_round_trip_in_both_formats() {
        let dir = tempfile::tempdir().unwrap();
        let t = Table {
            columns: vec!["T".into(), "value".into()],
            rows: vec![
                vec![0.1, 1.0 / 3.0],
                vec![1e300, -5e-324],
                vec![2.0, f64::MIN_POSITIVE],
            ],
        };
        for fmt in [ExportFormat::Csv, ExportFormat::Json] {
            let p = dir.path().join("t");
            t.write(&p, fmt).unwrap();
            assert_eq!(Table::read(&p, fmt).unwrap(), t);
        }
        let empty = Table {
            columns: vec!["T".into(), "value".into()],
            rows: vec![],
        };
        let p = dir.path().join("e.csv");
        empty.write(&p, ExportFormat::Csv).unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "T,value\n");
        assert_eq!(Table::read(&p, ExportFormat::Csv).unwrap(), empty);
    }
}
