//! Acceptance criteria. Each criterion prints one `PASS`/`FAIL` line,
//! preceded by one line per sub-check; the process exits non-zero if any
//! criterion fails or panics.
//!
//! Run with `cargo test -p zeta-core --test acceptance`.

use std::f64::consts::PI;
use std::panic;
use std::path::Path;
use std::process::ExitCode;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zeta_core::divisor::{hyperbola_d, DivisorSums, DivisorTable};
use zeta_core::error_terms::{build_e_grid, build_error_bundle, ErrorTermBundle, DEFAULT_DT};
use zeta_core::moments::geometric_t_list;
use zeta_core::pipeline::{self, RunConfig, Suite};
use zeta_core::quadrature::GaussLegendre;
use zeta_core::smoothing::{
    gaussian_integral, j1_via_estar, j_k_direct, weight_mass, SmoothingParams,
};
use zeta_core::verify::{self, VerificationReport};
use zeta_core::zeta::riemann_siegel::z_riemann_siegel;
use zeta_core::zeta::{
    euler_maclaurin::terms_for, euler_maclaurin_zeta_half, z_function, EvalConfig, ZGrid,
    ZetaSqSource,
};

const T_BIG: f64 = 5e4;

struct Fixture {
    bundle: ErrorTermBundle,
    build_time: Duration,
    zgrid: ZGrid,
}

fn fixture() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| {
        let cfg = EvalConfig::default();
        let start = Instant::now();
        // margin so smoothing windows centred at T_BIG stay on the grid
        let t_grid = T_BIG + 400.0;
        let grid = build_e_grid(t_grid, DEFAULT_DT, &cfg).expect("E grid");
        let divisors =
            DivisorSums::new((4.0 * t_grid / (2.0 * PI)) as usize + 1).expect("divisor table");
        let bundle = build_error_bundle(&grid, &divisors).expect("bundle");
        let build_time = start.elapsed();
        // enough for ∫_T^{2T} J_1^m at the largest T of the fit list
        let t_last = *geometric_t_list(T_BIG).last().unwrap();
        let extent =
            2.0 * t_last + t_last.powf(2.0 / 9.0 + verify::EPSILON_EXPONENT) * t_last.ln() + 1.0;
        let zgrid =
            ZGrid::build(extent.max(T_BIG + 200.0), ZGrid::DEFAULT_SPACING, &cfg).expect("Z grid");
        Fixture {
            bundle,
            build_time,
            zgrid,
        }
    })
}

fn line(criterion: u32, ok: bool, what: &str) {
    println!(
        "criterion {criterion}: {} {what}",
        if ok { "PASS" } else { "FAIL" }
    );
}

fn sub(ok: bool, what: &str) -> bool {
    println!("    {} {what}", if ok { "ok  " } else { "FAIL" });
    ok
}

fn report_line(r: &VerificationReport) -> bool {
    sub(
        r.passed,
        &format!("{}: {:.6} <= {:.6} ({})", r.name, r.lhs, r.rhs, r.notes),
    )
}

/// Print every report, then combine.
fn report_all(reports: &[VerificationReport]) -> bool {
    let results: Vec<bool> = reports.iter().map(report_line).collect();
    results.into_iter().all(|ok| ok)
}

fn criterion_1_identities() -> bool {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut ok = true;

    // two forms of Δ*
    let sums = DivisorSums::new(4_000_010).unwrap();
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let x: f64 = rng.gen_range(1.0..1e6);
        let a = sums.delta_star(x).unwrap();
        let b = sums.delta_star_three_delta(x).unwrap();
        worst = worst.max((a - b).abs());
    }
    ok &= sub(
        worst <= 1e-9,
        &format!(
            "Delta* alternating vs three-Delta form, 1000 x in [1, 1e6]: max diff {worst:.2e}"
        ),
    );

    // hyperbola vs sieve
    let table = sums.table().unwrap();
    let mut mismatches = 0;
    for n in (1..=100_000u64).chain((0..1000).map(|_| rng.gen_range(1..=4_000_000u64))) {
        if u128::from(table.prefix(n as usize)) != hyperbola_d(n) {
            mismatches += 1;
        }
    }
    ok &= sub(mismatches == 0, &format!("D(n) hyperbola == sieve for n <= 1e5 and 1000 random n <= 4e6: {mismatches} mismatches"));

    // Gaussian integral against erf and independent quadrature
    let gl = GaussLegendre::new(64);
    let panels = 96;
    let numeric = |f: &dyn Fn(f64) -> Complex64, lo: f64, hi: f64| -> Complex64 {
        let w = (hi - lo) / panels as f64;
        (0..panels)
            .map(|p| {
                let a = lo + p as f64 * w;
                let re = gl.integrate(a, a + w, |x| f(x).re);
                let im = gl.integrate(a, a + w, |x| f(x).im);
                Complex64::new(re, im)
            })
            .sum()
    };
    let mut worst: f64 = 0.0;
    for (a, b) in [
        (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)),
        (Complex64::new(1.5, 0.0), Complex64::new(2.0, 0.0)),
        (Complex64::new(0.0, 3.0), Complex64::new(1.0, 0.0)),
        (Complex64::new(0.7, -1.2), Complex64::new(0.8, 0.3)),
    ] {
        let closed = gaussian_integral(a, b).unwrap();
        let f = |x: f64| (a * x - b * x * x).exp();
        let quad = numeric(&f, -14.0, 14.0);
        worst = worst.max((closed - quad).norm() / closed.norm().max(1.0));
    }
    // Fourier transform closed form: ∫ e^{iωx - x²} = √π e^{-ω²/4}
    let w = 2.5;
    let ft = gaussian_integral(Complex64::new(0.0, w), Complex64::new(1.0, 0.0)).unwrap();
    worst = worst.max((ft - Complex64::new(PI.sqrt() * (-w * w / 4.0).exp(), 0.0)).norm());
    for m in [0.5, 1.0, 2.0, 3.0] {
        let quad = gl.integrate(-m, m, |u| (-u * u).exp() / PI.sqrt());
        worst = worst.max((weight_mass(m) - quad).abs());
    }
    ok &= sub(
        worst <= 1e-12,
        &format!(
            "Gaussian integral vs quadrature, Fourier closed form and erf: max err {worst:.2e}"
        ),
    );

    // weight normalisation of J_k for a constant integrand
    struct One;
    impl ZetaSqSource for One {
        fn zeta_sq(&self, _: f64) -> zeta_core::Result<f64> {
            Ok(1.0)
        }
        fn coverage(&self) -> (f64, f64) {
            (0.0, f64::INFINITY)
        }
    }
    let mut norm_ok = true;
    let mut detail = String::new();
    for (t, g, k) in [
        (20.0, 1.0, 1),
        (50.0, 2.0, 2),
        (100.0, 3.0, 3),
        (200.0, 5.0, 1),
    ] {
        let p = SmoothingParams::log_truncated(g, k, t);
        let j = j_k_direct(t, &p, &One).unwrap();
        let bound = (-(f64::ln(t)).powi(2)).exp();
        norm_ok &= (j - 1.0).abs() <= bound;
        detail.push_str(&format!(
            " T={t}: {:.1e} (bound {bound:.1e});",
            (j - 1.0).abs()
        ));
    }
    ok &= sub(
        norm_ok,
        &format!("constant integrand, |J_k - 1| <= e^(-(log T)^2):{detail}"),
    );

    let elapsed = start.elapsed();
    ok &= sub(
        elapsed < Duration::from_secs(60),
        &format!("runtime {elapsed:.1?} < 60 s"),
    );
    line(1, ok, "identity suite");
    ok
}

fn criterion_2_oracle() -> bool {
    let start = Instant::now();
    let cfg = EvalConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut ok = true;

    let mut worst: f64 = 0.0;
    let mut at = 0.0;
    for _ in 0..1000 {
        let t: f64 = rng.gen_range(50.0..5000.0);
        let z = z_riemann_siegel(t, cfg.rs_correction_order);
        let zeta = euler_maclaurin_zeta_half(t, terms_for(t).max(cfg.oracle_terms)).unwrap();
        let err = (z.abs() - zeta.norm()).abs();
        if err > worst {
            worst = err;
            at = t;
        }
    }
    ok &= sub(worst <= 1e-5, &format!("Riemann-Siegel |Z| vs Euler-Maclaurin |zeta|, 1000 t in [50, 5000]: max {worst:.2e} at t = {at:.3}"));

    let mut worst_eval: f64 = 0.0;
    for _ in 0..200 {
        let t: f64 = rng.gen_range(0.0..50.0);
        let zeta = euler_maclaurin_zeta_half(t, terms_for(t).max(cfg.oracle_terms)).unwrap();
        worst_eval = worst_eval.max((z_function(t, &cfg).unwrap().abs() - zeta.norm()).abs());
    }
    ok &= sub(
        worst_eval <= 1e-5,
        &format!("evaluator below t = 50, 200 points: max {worst_eval:.2e}"),
    );

    let (mut lo, mut hi) = (14.0, 14.3);
    let f = |t: f64| z_function(t, &cfg).unwrap();
    assert!(f(lo) * f(hi) < 0.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if f(lo) * f(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let zero = 0.5 * (lo + hi);
    ok &= sub(
        (zero - 14.1347).abs() <= 1e-3,
        &format!("first zero at {zero:.10}"),
    );

    let elapsed = start.elapsed();
    ok &= sub(
        elapsed < Duration::from_secs(60),
        &format!("runtime {elapsed:.1?} < 60 s"),
    );
    line(2, ok, "oracle suite");
    ok
}

fn criterion_3_means() -> bool {
    let f = fixture();
    let check = Instant::now();
    let reports = verify::verify_means(&f.bundle, T_BIG).unwrap();
    let check_time = check.elapsed();
    let mut ok = report_all(&reports);
    // single-core build time is an upper bound for the eight-thread figure
    ok &= sub(
        f.build_time < Duration::from_secs(900),
        &format!(
            "grid build {:.1?} on {} thread(s) < 15 min",
            f.build_time,
            rayon::current_num_threads()
        ),
    );
    ok &= sub(
        check_time < Duration::from_secs(1),
        &format!("checks {check_time:.1?} < 1 s"),
    );
    line(3, ok, "means of E and E* at T = 5e4");
    ok
}

fn criterion_4_second_moment_constant() -> bool {
    let f = fixture();
    let mut ts = geometric_t_list(T_BIG);
    ts.push(T_BIG);
    let r = verify::verify_e2_asymptotic(&f.bundle.e_curve(), &ts).unwrap();
    let ok = report_line(&r);
    line(
        4,
        ok,
        "int_0^T E^2 / T^(3/2) within 25% of 10.3047 at T = 5e4",
    );
    ok
}

fn criterion_5_exponent_fits() -> bool {
    let f = fixture();
    let ts = geometric_t_list(T_BIG);
    let mut reports = verify::verify_estar_moments(&f.bundle, &ts).unwrap();
    reports.extend(
        verify::verify_r_moments(&f.bundle, &ts)
            .unwrap()
            .into_iter()
            .filter(|r| r.name.starts_with("r2") || r.name.starts_with("r4")),
    );
    let ok = report_all(&reports);
    line(
        5,
        ok,
        "exponent fits of E* and R moments over T = 1000 * 2^j <= 5e4",
    );
    ok
}

fn criterion_6_representation() -> bool {
    let f = fixture();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    let mut at = 0.0;
    for _ in 0..200 {
        let t: f64 = rng.gen_range(1e4..=5e4);
        let g = t.powf(0.25);
        let p = SmoothingParams::log_truncated(g, 1, t);
        let direct = j_k_direct(t, &p, &f.zgrid).unwrap();
        let rep = j1_via_estar(t, &p, &f.bundle).unwrap();
        let c = (direct - rep.value).abs() / rep.uncertainty;
        if c > worst {
            worst = c;
            at = t;
        }
    }
    let ok = sub(worst <= 20.0, &format!("200 t in [1e4, 5e4]: max |J1_direct - J1_via_E*| / log^2 t = {worst:.4} at t = {at:.2}"));
    line(
        6,
        ok,
        "E* representation of J_1 within 20 log^2 t, G = t^(1/4)",
    );
    ok
}

fn criterion_7_smoothed_inequality() -> bool {
    let f = fixture();
    let t: f64 = 1e4;
    let mut ok = true;
    for m in [1, 2] {
        let r =
            verify::verify_smoothed_inequality(&f.bundle, &f.zgrid, m, t.powf(0.25), t).unwrap();
        ok &= report_line(&r);
    }
    line(
        7,
        ok,
        "smoothed-moment inequality constant C <= 100 at T = 1e4, G = T^(1/4)",
    );
    ok
}

fn criterion_8_smoothed_slopes() -> bool {
    let f = fixture();
    let ts = geometric_t_list(T_BIG);
    let reports = verify::verify_smoothed_slopes(&f.zgrid, &[1, 2, 3, 4, 5, 6], &ts).unwrap();
    let ok = report_all(&reports);
    line(
        8,
        ok,
        "slopes of int_T^2T J_1^m <= 1.2 at each threshold + 0.01, m = 1..6",
    );
    ok
}

fn run_reports(dir: &Path, threads: usize) -> (String, pipeline::RunOutcome) {
    let cfg = RunConfig {
        t_max: 16_000.0,
        suites: Suite::ALL.to_vec(),
        cache_dir: dir.join(format!("cache{threads}")),
        output: dir.join(format!("out{threads}")),
        threads,
        inequality_t: 4000.0,
        ..RunConfig::default()
    };
    let outcome = pipeline::run(&cfg).unwrap();
    (
        std::fs::read_to_string(cfg.output.join("reports.json")).unwrap(),
        outcome,
    )
}

fn criterion_9_determinism() -> bool {
    let dir = tempfile::tempdir().unwrap();
    let mut ok = true;
    let (one, _) = run_reports(dir.path(), 1);
    let (eight, _) = run_reports(dir.path(), 8);
    ok &= sub(
        one == eight,
        &format!(
            "reports.json with 1 and 8 threads byte-identical ({} bytes)",
            one.len()
        ),
    );

    // second run in the same directories is served from the caches
    let (again, outcome) = run_reports(dir.path(), 8);
    let all_loaded = outcome.caches.egrid == pipeline::CacheStatus::Loaded
        && outcome.caches.divisors == pipeline::CacheStatus::Loaded
        && outcome.caches.zgrid == Some(pipeline::CacheStatus::Loaded);
    ok &= sub(
        all_loaded && again == eight,
        "rerun served from caches with identical reports",
    );

    let b = ErrorTermBundle::load(
        &dir.path()
            .join("cache8/egrd.tmp")
            .with_file_name("egrid.egrd"),
    )
    .unwrap();
    let path = dir.path().join("copy.egrd");
    b.save(&path).unwrap();
    let back = ErrorTermBundle::load(&path).unwrap();
    let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
    let exact = bits(&b.cumulative) == bits(&back.cumulative)
        && bits(&b.e) == bits(&back.e)
        && bits(&b.e_star) == bits(&back.e_star)
        && bits(&b.r) == bits(&back.r);
    ok &= sub(exact, "E-grid cache save/load bit-exact");
    let table = DivisorTable::build(50_000).unwrap();
    table.save(&dir.path().join("d.divt")).unwrap();
    let t2 = DivisorTable::load(&dir.path().join("d.divt")).unwrap();
    ok &= sub(
        (1..=50_000).all(|n| t2.d(n) == table.d(n)),
        "divisor cache save/load exact",
    );
    line(9, ok, "determinism and cache round trip");
    ok
}

fn main() -> ExitCode {
    let criteria: [(u32, fn() -> bool); 9] = [
        (1, criterion_1_identities),
        (2, criterion_2_oracle),
        (3, criterion_3_means),
        (4, criterion_4_second_moment_constant),
        (5, criterion_5_exponent_fits),
        (6, criterion_6_representation),
        (7, criterion_7_smoothed_inequality),
        (8, criterion_8_smoothed_slopes),
        (9, criterion_9_determinism),
    ];
    let mut failed = Vec::new();
    for (n, run) in criteria {
        match panic::catch_unwind(run) {
            Ok(true) => {}
            Ok(false) => failed.push(n),
            Err(_) => {
                line(n, false, "panicked");
                failed.push(n);
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria passed{}",
        criteria.len() - failed.len(),
        criteria.len(),
        if failed.is_empty() {
            String::new()
        } else {
            format!("; failed: {failed:?}")
        }
    );
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
