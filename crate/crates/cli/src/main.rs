//! `zeta`: command-line front end to `zeta-core`.
//!
//! Exit status: 0 when everything requested passed, 1 when a verification
//! report failed, 2 for configuration, coverage and I/O errors.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use zeta_core::divisor::DivisorSums;
use zeta_core::error_terms::{
    build_e_grid, build_error_bundle, egrd_info, ErrorTermBundle, DEFAULT_DT,
};
use zeta_core::moments::{geometric_t_list, moment_curve, WindowKind};
use zeta_core::pipeline::{self, ExportFormat, RunConfig, SuiteInputs, Table};
use zeta_core::smoothing::{j1_via_estar, j_k_direct, SmoothingParams};
use zeta_core::verify::VerificationReport;
use zeta_core::zeta::{z_function, z_via_oracle, DirectZeta, EvalConfig, ZGrid};
use zeta_core::{divisor, zeta};

#[derive(Parser)]
#[command(
    name = "zeta",
    version,
    about = "Mean-square error terms and smoothed moments of zeta on the critical line"
)]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = "ZETA_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print t, Z(t), |zeta(1/2+it)|^2 as CSV.
    Eval(EvalArgs),
    /// Divisor sums D(x), Delta(x), Delta*(x), or sieve a divisor table to disk.
    Divisor(DivisorArgs),
    /// Build an E-grid (with E*, R) and save it, or describe a saved one.
    Egrid(EgridArgs),
    /// Gaussian-smoothed moment J_k(t, G) as CSV, optionally beside its E* representation.
    Smooth(SmoothArgs),
    /// Run verification suites against a saved grid.
    Verify(VerifyArgs),
    /// Export a saved grid, or moment curves computed from it, as CSV or JSON.
    Export(ExportArgs),
    /// Full pipeline: caches, suites, reports and curves.
    Run(RunArgs),
}

#[derive(Args)]
struct EvalArgs {
    /// Points to evaluate.
    #[arg(long = "t", num_args = 1.., allow_negative_numbers = true)]
    t: Vec<f64>,
    /// Range start (with --to and --step).
    #[arg(long)]
    from: Option<f64>,
    #[arg(long)]
    to: Option<f64>,
    #[arg(long)]
    step: Option<f64>,
    /// Use the Euler–Maclaurin oracle at every point.
    #[arg(long)]
    oracle: bool,
    /// Riemann–Siegel correction terms (0..=2).
    #[arg(long)]
    rs_order: Option<usize>,
}

#[derive(Args)]
struct DivisorArgs {
    /// Arguments x at which to print D, Delta and Delta*.
    #[arg(long = "x", num_args = 1..)]
    x: Vec<f64>,
    /// Sieve d(n) for n <= N and save the table (needs --out).
    #[arg(long, value_name = "N")]
    sieve: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EgridArgs {
    #[arg(long, default_value_t = 5e4)]
    tmax: f64,
    #[arg(long, default_value_t = DEFAULT_DT)]
    dt: f64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the header of a saved grid instead of building one.
    #[arg(long, value_name = "PATH", conflicts_with = "out")]
    info: Option<PathBuf>,
}

#[derive(Args)]
struct SmoothArgs {
    #[arg(long = "t")]
    t: f64,
    /// Smoothing width G.
    #[arg(long = "G", alias = "g")]
    g: f64,
    #[arg(long, default_value_t = 1)]
    k: u32,
    /// Use the E* representation (k = 1 only) from --grid.
    #[arg(long, requires = "grid")]
    via_estar: bool,
    #[arg(long)]
    grid: Option<PathBuf>,
    /// Truncate the Gaussian at 8G instead of G log t.
    #[arg(long)]
    fast: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suites, comma separated: means, estar, e2, r, thm1, thm2, zeta-moments.
    #[arg(long, value_delimiter = ',', required = true)]
    suite: Vec<String>,
    /// Saved E-grid (needed by means, estar, e2, r, thm2).
    #[arg(long)]
    grid: Option<PathBuf>,
    /// Saved Z grid; built in memory when absent.
    #[arg(long)]
    zgrid: Option<PathBuf>,
    /// Largest T for suites that use only Z, when no --grid is given.
    #[arg(long, default_value_t = 5e4)]
    tmax: f64,
    /// T of the smoothed-moment inequality (thm2).
    #[arg(long, default_value_t = 1e4)]
    inequality_t: f64,
    /// Write the reports here as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long)]
    grid: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// csv or json; guessed from --out when omitted.
    #[arg(long)]
    format: Option<String>,
    /// Export the moment curve T -> int_0^T |f|^m instead of the grid.
    #[arg(long)]
    moment: Option<f64>,
    /// Curve for --moment: e, estar or r.
    #[arg(long, default_value = "estar")]
    of: String,
}

#[derive(Args)]
struct RunArgs {
    /// key = value config file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    tmax: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    table_limit: Option<usize>,
    /// Comma-separated suites; empty builds caches only.
    #[arg(long)]
    suites: Option<String>,
    #[arg(long, env = "ZETA_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
    #[arg(long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> anyhow::Result<u8> {
    if let Some(n) = cli.threads {
        if n == 0 {
            bail!("threads must be at least 1");
        }
        if !matches!(cli.command, Command::Run(_)) {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()?;
        }
    }
    match cli.command {
        Command::Eval(a) => eval(a),
        Command::Divisor(a) => divisor_cmd(a),
        Command::Egrid(a) => egrid(a),
        Command::Smooth(a) => smooth(a),
        Command::Verify(a) => verify(a),
        Command::Export(a) => export(a),
        Command::Run(a) => run(a, cli.threads),
    }
}

fn eval(a: EvalArgs) -> anyhow::Result<u8> {
    let mut cfg = EvalConfig::default();
    if let Some(o) = a.rs_order {
        cfg.rs_correction_order = o;
    }
    cfg.validate()?;
    let mut ts = a.t;
    match (a.from, a.to, a.step) {
        (Some(from), Some(to), Some(step)) => {
            if !(step > 0.0) || to < from {
                bail!("--from/--to/--step need from <= to and step > 0");
            }
            let n = ((to - from) / step + 1e-9).floor() as usize;
            ts.extend((0..=n).map(|i| from + i as f64 * step));
        }
        (None, None, None) => {}
        _ => bail!("--from, --to and --step go together"),
    }
    if ts.is_empty() {
        bail!("nothing to evaluate: give --t or --from/--to/--step");
    }
    println!("t,Z,zeta_sq");
    for t in ts {
        let z = if a.oracle {
            z_via_oracle(t, cfg.oracle_terms.max(zeta::euler_maclaurin::terms_for(t)))?
        } else {
            z_function(t, &cfg)?
        };
        println!("{t},{z:.17e},{:.17e}", z * z);
    }
    Ok(0)
}

fn divisor_cmd(a: DivisorArgs) -> anyhow::Result<u8> {
    if let Some(n) = a.sieve {
        let out = a.out.context("--sieve needs --out")?;
        let table = divisor::DivisorTable::build(n)?;
        table
            .save(&out)
            .with_context(|| format!("writing {}", out.display()))?;
        println!(
            "sieved d(n) for n <= {n} into {} (D({n}) = {})",
            out.display(),
            table.prefix(n)
        );
    }
    if !a.x.is_empty() {
        let max = a.x.iter().copied().fold(0.0, f64::max);
        let sums = if max <= 1e7 {
            DivisorSums::new((4.0 * max).ceil().max(1.0) as usize)?
        } else {
            DivisorSums::hyperbola_only()
        };
        println!("x,D,Delta,Delta_star");
        for x in a.x {
            println!(
                "{x},{},{:.17e},{:.17e}",
                sums.big_d(x)?,
                sums.delta(x)?,
                sums.delta_star(x)?
            );
        }
    } else if a.sieve.is_none() {
        bail!("give --x or --sieve");
    }
    Ok(0)
}

fn egrid(a: EgridArgs) -> anyhow::Result<u8> {
    if let Some(path) = a.info {
        let h = egrd_info(&path)?;
        println!(
            "count={} t0={} dt={} t_max={}",
            h.count,
            h.t0,
            h.dt,
            h.t0 + (h.count - 1) as f64 * h.dt
        );
        return Ok(0);
    }
    let out = a.out.context("give --out or --info")?;
    let bundle = build_bundle(a.tmax, a.dt)?;
    bundle
        .save(&out)
        .with_context(|| format!("writing {}", out.display()))?;
    println!("wrote {} points to {}", bundle.len(), out.display());
    Ok(0)
}

fn build_bundle(t_max: f64, dt: f64) -> anyhow::Result<ErrorTermBundle> {
    let cfg = EvalConfig::default();
    let grid = build_e_grid(t_max, dt, &cfg)?;
    let needed = (4.0 * t_max / (2.0 * std::f64::consts::PI)).floor() as usize + 1;
    let sums = DivisorSums::new(needed)?;
    Ok(build_error_bundle(&grid, &sums)?)
}

fn load_grid(path: &Path) -> anyhow::Result<ErrorTermBundle> {
    ErrorTermBundle::load(path).with_context(|| format!("loading {}", path.display()))
}

fn smooth(a: SmoothArgs) -> anyhow::Result<u8> {
    let p = if a.fast {
        SmoothingParams::fast(a.g, a.k)
    } else {
        SmoothingParams::log_truncated(a.g, a.k, a.t)
    };
    let direct = j_k_direct(a.t, &p, &DirectZeta::new(EvalConfig::default()))?;
    if a.via_estar {
        let bundle = load_grid(a.grid.as_deref().context("--via-estar needs --grid")?)?;
        let r = j1_via_estar(a.t, &p, &bundle)?;
        println!("t,G,k,J_direct,J_via_estar,difference,log2_t");
        println!(
            "{},{},{},{:.16e},{:.16e},{:.16e},{:.16e}",
            a.t,
            a.g,
            a.k,
            direct,
            r.value,
            direct - r.value,
            r.uncertainty
        );
    } else {
        println!("t,G,k,J_direct");
        println!("{},{},{},{direct:.16e}", a.t, a.g, a.k);
    }
    Ok(0)
}

fn print_reports(reports: &[VerificationReport]) {
    for r in reports {
        println!("{r}");
    }
}

fn verify(a: VerifyArgs) -> anyhow::Result<u8> {
    let suites = pipeline::parse_suites(&a.suite.join(","))?;
    let bundle = match &a.grid {
        Some(p) => Some(load_grid(p)?),
        None if suites.iter().any(|s| s.needs_bundle()) => bail!("suites needing E* need --grid"),
        None => None,
    };
    let t_max = bundle.as_ref().map_or(a.tmax, |b| b.t_max().floor());
    let cfg = RunConfig {
        t_max,
        suites: suites.clone(),
        inequality_t: a.inequality_t,
        ..RunConfig::default()
    };
    let zgrid = if suites.iter().any(|s| s.needs_zgrid()) {
        Some(match &a.zgrid {
            Some(p) => ZGrid::load(p).with_context(|| format!("loading {}", p.display()))?,
            None => ZGrid::build(cfg.zgrid_extent(), ZGrid::DEFAULT_SPACING, &cfg.eval)?,
        })
    } else {
        None
    };
    let inputs = SuiteInputs {
        bundle: bundle.as_ref(),
        zgrid: zgrid.as_ref(),
        t_list: cfg.t_list(),
        inequality_t: cfg.inequality_t,
    };
    let mut reports = Vec::new();
    for s in suites {
        reports.extend(pipeline::run_suite(s, &inputs)?);
    }
    print_reports(&reports);
    if let Some(path) = a.json {
        std::fs::write(&path, pipeline::reports_json(&reports)?)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(exit_for(&reports))
}

fn exit_for(reports: &[VerificationReport]) -> u8 {
    u8::from(reports.iter().any(|r| !r.passed))
}

fn export(a: ExportArgs) -> anyhow::Result<u8> {
    let format = match &a.format {
        Some(f) => f.parse()?,
        None => ExportFormat::from_path(&a.out).unwrap_or(ExportFormat::Csv),
    };
    let bundle = load_grid(&a.grid)?;
    let table = match a.moment {
        None => Table::from_bundle(&bundle),
        Some(m) => {
            let curve = match a.of.as_str() {
                "e" => bundle.e_curve(),
                "estar" => bundle.e_star_curve(),
                "r" => bundle.r_curve(),
                other => bail!("--of must be e, estar or r, got {other:?}"),
            };
            let ts = geometric_t_list(bundle.t_max());
            Table::from_moment_curve(&moment_curve(&curve, m, &ts, WindowKind::ZeroToT)?)
        }
    };
    pipeline::export_curves(&table, format, &a.out)
        .with_context(|| format!("writing {}", a.out.display()))?;
    Ok(0)
}

fn run(a: RunArgs, threads: Option<usize>) -> anyhow::Result<u8> {
    let mut cfg = match &a.config {
        Some(p) => RunConfig::from_file(p).with_context(|| format!("reading {}", p.display()))?,
        None => RunConfig::default(),
    };
    if let Some(v) = a.tmax {
        cfg.t_max = v;
    }
    if let Some(v) = a.dt {
        cfg.dt = v;
    }
    if let Some(v) = a.table_limit {
        cfg.table_limit = v;
    }
    if let Some(v) = &a.suites {
        cfg.suites = pipeline::parse_suites(v)?;
    }
    if let Some(v) = a.cache_dir {
        cfg.cache_dir = v;
    }
    if let Some(v) = a.output {
        cfg.output = v;
    }
    if let Some(v) = threads {
        cfg.threads = v;
    }
    let outcome = pipeline::run(&cfg)?;
    print_reports(&outcome.reports);
    let failed = outcome.reports.iter().filter(|r| !r.passed).count();
    println!(
        "{} reports, {failed} failed; reports in {}",
        outcome.reports.len(),
        cfg.output.join("reports.json").display()
    );
    Ok(outcome.exit_code() as u8)
}
