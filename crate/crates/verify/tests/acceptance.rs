//! Acceptance suite. Prints one PASS/FAIL line per criterion (with indented
//! detail lines) and exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use leoshare_core::analytic::{
    laplace_derivative, laplace_interference, nearest_distance_cdf, nearest_distance_pdf,
    AnalyticModel, QuadratureConfig,
};
use leoshare_core::config::{preset, ScenarioFile};
use leoshare_core::fading::{sample_sr_power, NakagamiParams, ShadowedRicianParams};
use leoshare_core::montecarlo::{McOptions, Simulator};
use leoshare_core::scenario::{Direction, ScenarioConfig, SharingConfig, UserClass};
use leoshare_core::sweep::{
    lower_bound_crossing, mc_check, run_sweep, threshold_report, write_csv, McCheckCase, SweepSpec,
};
use rand_chacha::rand_core::SeedableRng;

const SEED: u64 = 20240601;

struct Outcome {
    pass: bool,
    summary: String,
    details: Vec<String>,
}

impl Outcome {
    fn new(pass: bool, summary: impl Into<String>) -> Self {
        Outcome {
            pass,
            summary: summary.into(),
            details: Vec::new(),
        }
    }
}

fn ks_critical(n: usize) -> f64 {
    1.6276 / (n as f64).sqrt()
}

fn ks_statistic(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
        })
        .fold(0.0, f64::max)
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

fn scenario(class: UserClass, sharing: SharingConfig, ratio: f64) -> ScenarioConfig {
    preset(class)
        .scenario(sharing)
        .expect("preset scenario")
        .with_density_ratio(ratio)
}

fn model(cfg: &ScenarioConfig) -> AnalyticModel {
    AnalyticModel::new(cfg, QuadratureConfig::default()).expect("model")
}

fn in_range(x: f64, lo: f64, hi: f64) -> bool {
    x >= lo && x <= hi
}

fn mark(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAIL"
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let reports: Vec<_> = [UserClass::Handheld, UserClass::Vsat]
        .into_iter()
        .map(|c| (c, threshold_report(&preset(c)).expect("thresholds")))
        .collect();
    let elapsed = start.elapsed().as_secs_f64();
    let mut pass = elapsed < 1.0;
    let mut details = Vec::new();
    for (class, t) in &reports {
        let ul = in_range(t.ul, 230.0, 240.0);
        let dl = in_range(t.dl, 33.0, 37.0);
        pass &= ul && dl;
        details.push(format!(
            "{}: UL {:.2} in [230, 240] {}; DL {:.2} in [33, 37] {}",
            class.name(),
            t.ul,
            mark(ul),
            t.dl,
            mark(dl)
        ));
    }
    let mut o = Outcome::new(
        pass,
        format!("threshold reproduction ({elapsed:.3} s, limit 1 s)"),
    );
    o.details = details;
    o
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let windows = [
        (UserClass::Handheld, Direction::Ul, 1.5, 2.5),
        (UserClass::Handheld, Direction::Dl, 1.0, 2.0),
        (UserClass::Vsat, Direction::Ul, 2.0, 3.0),
        (UserClass::Vsat, Direction::Dl, 1.0, 2.0),
    ];
    let mut pass = true;
    let mut details = Vec::new();
    for class in [UserClass::Handheld, UserClass::Vsat] {
        let mut spec = SweepSpec::from_file(preset(class)).expect("spec");
        spec.trials = 0;
        let result = run_sweep(&spec).expect("sweep");
        if !result.failures.is_empty() {
            pass = false;
            details.push(format!(
                "{}: {} point failures",
                class.name(),
                result.failures.len()
            ));
        }
        for &(c, dir, lo, hi) in windows.iter().filter(|w| w.0 == class) {
            let crossing = result
                .crossings
                .iter()
                .find(|x| x.direction == dir)
                .and_then(|x| x.se_crossing);
            let ok = crossing.is_some_and(|x| in_range(x.log10(), lo, hi));
            pass &= ok;
            details.push(format!(
                "{} {:?}: SE crossing at ratio {} (10^{}) in [10^{lo}, 10^{hi}] {}",
                c.name(),
                dir,
                crossing.map_or("none".into(), |x| format!("{x:.2}")),
                crossing.map_or("-".into(), |x| format!("{:.3}", x.log10())),
                mark(ok)
            ));
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    pass &= elapsed < 300.0;
    let mut o = Outcome::new(
        pass,
        format!("crossing reproduction ({elapsed:.1} s, limit 300 s)"),
    );
    o.details = details;
    o
}

fn criterion_3() -> (Outcome, Vec<McCheckCase>) {
    let start = Instant::now();
    let cases = mc_check(
        &preset(UserClass::Handheld),
        &[10.0, 100.0, 1000.0],
        20_000,
        SEED,
        QuadratureConfig::default(),
    )
    .expect("mc check");
    let elapsed = start.elapsed().as_secs_f64();
    let pass = cases.len() == 12 && cases.iter().all(|c| c.agrees) && elapsed < 1800.0;
    let mut o = Outcome::new(
        pass,
        format!(
            "analytic vs simulation, {} cases at 2e4 trials ({elapsed:.1} s, limit 1800 s)",
            cases.len()
        ),
    );
    for c in &cases {
        o.details.push(format!(
            "{:<16} ratio {:>6}: analytic {:.5} mc {:.5} +- {:.5} |diff| {:.5} tol {:.5} {}",
            c.config,
            c.ratio,
            c.analytic_se,
            c.mc_se,
            c.mc_stderr,
            (c.analytic_se - c.mc_se).abs(),
            c.tolerance,
            mark(c.agrees)
        ));
    }
    (o, cases)
}

fn criterion_4() -> Outcome {
    let mut pass = true;
    let mut details = Vec::new();
    for sharing in [SharingConfig::UlUlTerr, SharingConfig::DlUlTerr] {
        let cfg = scenario(UserClass::Vsat, sharing, 1.0);
        let sv = *model(&cfg).serving();
        let sim = Simulator::new(&cfg, &McOptions::default()).expect("simulator");
        let mut d: Vec<f64> = (0..100_000)
            .map(|i| sim.run_trial(SEED, i))
            .filter(|t| t.served)
            .map(|t| t.serving_distance)
            .collect();
        let n = d.len();
        let stat = ks_statistic(&mut d, |r| {
            nearest_distance_cdf(sv.density, &sv.bounds, r).expect("cdf")
        });
        let ok = stat < ks_critical(n);
        pass &= ok;
        details.push(format!(
            "nearest distance {sharing}: KS {stat:.5} < {:.5} (n = {n}) {}",
            ks_critical(n),
            mark(ok)
        ));
    }

    let sr = ShadowedRicianParams::table_one();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(SEED);
    let mut h: Vec<f64> = (0..100_000)
        .map(|_| sample_sr_power(&sr, &mut rng))
        .collect();
    let stat = ks_statistic(&mut h, |t| 1.0 - sr.power_ccdf(t));
    let ok = stat < ks_critical(h.len());
    pass &= ok;
    details.push(format!(
        "Shadowed-Rician power: KS {stat:.5} < {:.5} {}",
        ks_critical(h.len()),
        mark(ok)
    ));

    // About one visible user on average so that empty caps are common.
    let mut cfg = scenario(UserClass::Handheld, SharingConfig::UlUlTerr, 1.0);
    let ring = model(&cfg).serving().bounds.ring_area();
    cfg.densities.lambda_us = 1.0 / (ring * cfg.geometry.r_us / cfg.geometry.r_s);
    let want = model(&cfg).nonempty_probability();
    let e = Simulator::new(&cfg, &McOptions::default())
        .expect("simulator")
        .estimate(100_000, SEED, &[])
        .nonempty;
    let ok = (e.estimate - want).abs() <= 3.0 * e.std_error;
    pass &= ok;
    details.push(format!(
        "nonempty frequency {:.5} +- {:.5} vs formula {want:.5} {}",
        e.estimate,
        e.std_error,
        mark(ok)
    ));
    let mut o = Outcome::new(pass, "distributional checks (alpha = 0.01, 1e5 samples)");
    o.details = details;
    o
}

fn criterion_5() -> Outcome {
    let mut pass = true;
    let mut details = Vec::new();

    let mut worst: f64 = 0.0;
    for (m, b, omega) in [
        (1, 0.063, 8.97e-4),
        (2, 0.063, 8.97e-4),
        (3, 0.1, 0.5),
        (5, 0.25, 1.0),
    ] {
        let p = ShadowedRicianParams::new(m, b, omega).expect("params");
        let k = p.beta() - p.c_sr();
        let mut gamma = 1.0;
        let mut total = 0.0;
        for (z, &zt) in p.zeta().iter().enumerate() {
            if z > 0 {
                gamma *= z as f64;
            }
            total += zt * gamma / k.powi(z as i32 + 1);
        }
        worst = worst.max((total - 1.0).abs());
    }
    let ok = worst <= 1e-10;
    pass &= ok;
    details.push(format!(
        "normalization identity: max error {worst:.2e} {}",
        mark(ok)
    ));

    let mut l0_ok = true;
    for sharing in SharingConfig::ALL {
        let mut cfg = scenario(UserClass::Handheld, sharing, 100.0);
        cfg.noise_power = 0.0;
        let b = model(&cfg).serving().bounds;
        for f in [0.0, 0.5, 1.0] {
            let r = b.r_min + f * (b.r_max - b.r_min);
            l0_ok &= laplace_interference(&cfg, r, 0.0).expect("laplace") == 1.0;
        }
    }
    pass &= l0_ok;
    details.push(format!(
        "Laplace transform at s = 0 equals 1: {}",
        mark(l0_ok)
    ));

    let mut worst_fd: f64 = 0.0;
    let mut points = 0;
    for sharing in [SharingConfig::UlDlTerr, SharingConfig::DlUlTerr] {
        let cfg = scenario(UserClass::Handheld, sharing, 100.0);
        let sv = *model(&cfg).serving();
        for f in [0.0, 0.01, 0.1, 0.4, 0.9] {
            let r = sv.bounds.r_min + f * (sv.bounds.r_max - sv.bounds.r_min);
            let s = r.powf(sv.alpha) / sv.gain_power;
            let h = 1e-5 * s;
            let fd = (laplace_interference(&cfg, r, s + h).expect("laplace")
                - laplace_interference(&cfg, r, s - h).expect("laplace"))
                / (2.0 * h);
            let d = laplace_derivative(&cfg, r, s, 1).expect("derivative");
            worst_fd = worst_fd.max((d - fd).abs() / fd.abs());
            points += 1;
        }
    }
    let ok = worst_fd <= 1e-4;
    pass &= ok;
    details.push(format!(
        "first derivative vs central difference on {points} points: max rel error {worst_fd:.2e} {}",
        mark(ok)
    ));

    let sr = ShadowedRicianParams::table_one();
    let mut integrals = vec![
        (
            "SR amplitude",
            simpson(|x| sr.amplitude_pdf(x), 0.0, 3.0, 400_000),
        ),
        ("SR power", simpson(|x| sr.power_pdf(x), 0.0, 6.0, 400_000)),
    ];
    for m in [1, 3] {
        let p = NakagamiParams::new(m).expect("nakagami");
        integrals.push((
            "Nakagami amplitude",
            simpson(|x| p.amplitude_pdf(x), 0.0, 12.0, 400_000),
        ));
        integrals.push((
            "Nakagami power",
            simpson(|x| p.power_pdf(x), 0.0, 120.0, 400_000),
        ));
    }
    for class in [UserClass::Handheld, UserClass::Vsat] {
        for sharing in [SharingConfig::UlUlTerr, SharingConfig::DlDlTerr] {
            let sv = *model(&scenario(class, sharing, 1.0)).serving();
            integrals.push((
                "nearest distance",
                simpson(
                    |r| nearest_distance_pdf(sv.density, &sv.bounds, r).expect("pdf"),
                    sv.bounds.r_min,
                    sv.bounds.r_max,
                    2_000_000,
                ),
            ));
        }
    }
    let worst_pdf = integrals
        .iter()
        .map(|(_, v)| (v - 1.0).abs())
        .fold(0.0, f64::max);
    let ok = worst_pdf <= 1e-8;
    pass &= ok;
    details.push(format!(
        "{} PDFs integrate to 1: max error {worst_pdf:.2e} {}",
        integrals.len(),
        mark(ok)
    ));
    if !ok {
        for (name, v) in &integrals {
            details.push(format!("  {name}: {v:.12}"));
        }
    }
    let mut o = Outcome::new(pass, "numerical identities");
    o.details = details;
    o
}

fn criterion_6(cases: &[McCheckCase]) -> Outcome {
    let mut pass = cases.len() == 12;
    let mut details = Vec::new();
    let held = cases.iter().filter(|c| c.bound_holds).count();
    pass &= held == cases.len();
    details.push(format!(
        "lower bound <= ergodic SE on {held}/{} cases {}",
        cases.len(),
        mark(held == cases.len())
    ));
    let file: ScenarioFile = preset(UserClass::Handheld);
    let thresholds = threshold_report(&file).expect("thresholds");
    for (dir, thr) in [
        (Direction::Ul, thresholds.ul),
        (Direction::Dl, thresholds.dl),
    ] {
        let crossing = lower_bound_crossing(&file, dir, 1.0, 1e4).expect("bisection");
        let ok = crossing.is_some_and(|c| (c / thr - 1.0).abs() <= 0.02);
        pass &= ok;
        details.push(format!(
            "{dir:?}: lower-bound crossing {} vs threshold {thr:.3} (within 2%) {}",
            crossing.map_or("none".into(), |c| format!("{c:.3}")),
            mark(ok)
        ));
    }
    let mut o = Outcome::new(pass, "lower-bound ordering");
    o.details = details;
    o
}

fn criterion_7() -> Outcome {
    let mut spec = SweepSpec::from_file(preset(UserClass::Handheld)).expect("spec");
    spec.grid = vec![1.0, 10.0];
    spec.trials = 2_000;
    spec.seed = SEED;
    let csv_with = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool");
        let result = pool.install(|| run_sweep(&spec)).expect("sweep");
        let mut buf = Vec::new();
        write_csv(&result.rows, &mut buf).expect("csv");
        buf
    };
    let one = csv_with(1);
    let eight = csv_with(8);
    let pass = one == eight && !one.is_empty();
    Outcome::new(
        pass,
        format!(
            "determinism: sweep with {} trials, 1 vs 8 threads, {} CSV bytes identical",
            spec.trials,
            one.len()
        ),
    )
}

fn main() -> ExitCode {
    let (c3, cases) = criterion_3();
    let outcomes = [
        ("1", criterion_1()),
        ("2", criterion_2()),
        ("3", c3),
        ("4", criterion_4()),
        ("5", criterion_5()),
        ("6", criterion_6(&cases)),
        ("7", criterion_7()),
    ];
    let mut failed = 0;
    for (id, o) in &outcomes {
        println!(
            "{} criterion {id}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.summary
        );
        for d in &o.details {
            println!("    {d}");
        }
        failed += usize::from(!o.pass);
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        outcomes.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
