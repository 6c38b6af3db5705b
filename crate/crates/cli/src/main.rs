use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use leoshare_core::analytic::QuadratureConfig;
use leoshare_core::config::{log_grid, preset, ScenarioFile};
use leoshare_core::scenario::{Direction, Severity, UserClass};
use leoshare_core::sweep::{mc_check, run_sweep, threshold_report, write_outputs, SweepSpec};
use leoshare_core::Error;

const EXIT_VALIDATION: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;

#[derive(Parser)]
#[command(
    name = "leoshare",
    version,
    about = "Satellite/terrestrial spectrum-sharing analysis"
)]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum PresetArg {
    Vsat,
    Handheld,
}

#[derive(Clone, Copy, ValueEnum)]
enum DirectionArg {
    Ul,
    Dl,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportArg {
    Thresholds,
}

#[derive(Args)]
struct Source {
    /// Scenario file (TOML).
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Shipped preset.
    #[arg(long, value_enum)]
    preset: Option<PresetArg>,
}

impl Source {
    fn load(&self) -> Result<ScenarioFile, Error> {
        match (&self.config, self.preset) {
            (Some(path), _) => ScenarioFile::load(path),
            (None, Some(PresetArg::Vsat)) => Ok(preset(UserClass::Vsat)),
            (None, _) => Ok(preset(UserClass::Handheld)),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Sweep lambda_ut / lambda_b and report SE curves and crossings.
    Sweep {
        #[command(flatten)]
        source: Source,
        /// Simulation trials per grid point (0 = analytic only).
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory for CSV and JSON.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Log10 ratio grid `lo:hi:n`.
        #[arg(long)]
        grid: Option<String>,
        #[arg(long, value_enum, default_value = "both")]
        direction: DirectionArg,
        #[arg(long, value_enum)]
        report: Option<ReportArg>,
    },
    /// Check a scenario file and print diagnostics as JSON.
    Validate {
        #[command(flatten)]
        source: Source,
    },
    /// Print the UL and DL density-ratio thresholds.
    Thresholds {
        #[command(flatten)]
        source: Source,
    },
    /// Compare analytic SE with simulation for all four configurations.
    McCheck {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 20_000)]
        trials: u64,
        #[arg(long)]
        seed: Option<u64>,
        /// Comma-separated ratios.
        #[arg(long, default_value = "10,100,1000")]
        ratios: String,
    },
}

fn exit_for(e: &Error) -> u8 {
    match e {
        Error::Quadrature { .. } => EXIT_NUMERICAL,
        _ => EXIT_VALIDATION,
    }
}

fn parse_grid(s: &str) -> Result<Vec<f64>, Error> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || Error::Config(format!("grid `{s}`: expected lo:hi:n"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
    log_grid(lo, hi, n)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.5}"))
}

fn sweep(
    source: &Source,
    trials: Option<u64>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    grid: Option<String>,
    direction: DirectionArg,
    report: Option<ReportArg>,
) -> Result<u8, Error> {
    let file = source.load()?;
    let mut spec = SweepSpec::from_file(file)?;
    if let Some(g) = grid {
        spec.grid = parse_grid(&g)?;
    }
    if let Some(t) = trials {
        spec.trials = t;
    }
    if let Some(s) = seed {
        spec.seed = s;
    }
    spec.directions = match direction {
        DirectionArg::Ul => vec![Direction::Ul],
        DirectionArg::Dl => vec![Direction::Dl],
        DirectionArg::Both => vec![Direction::Ul, Direction::Dl],
    };
    let result = run_sweep(&spec)?;

    println!(
        "{:<16} {:>12} {:>10} {:>10} {:>10}",
        "config", "ratio", "analytic", "mc", "mc_se"
    );
    for r in &result.rows {
        println!(
            "{:<16} {:>12.4} {:>10} {:>10} {:>10}",
            r.config,
            r.ratio,
            fmt_opt(r.analytic_se),
            fmt_opt(r.mc_se),
            fmt_opt(r.mc_stderr)
        );
    }
    for c in &result.crossings {
        println!(
            "{:?} crossing: se {} lower-bound {} threshold {}",
            c.direction,
            fmt_opt(c.se_crossing),
            fmt_opt(c.lower_bound_crossing),
            fmt_opt(c.threshold)
        );
    }
    if let Some(ReportArg::Thresholds) = report {
        let t = threshold_report(&spec.file)?;
        println!("threshold UL {:.2}", t.ul);
        println!("threshold DL {:.2}", t.dl);
    }
    if let Some(dir) = out {
        let (csv, json) = write_outputs(&result, &dir)?;
        eprintln!("wrote {} and {}", csv.display(), json.display());
    }
    for f in &result.failures {
        eprintln!(
            "failure at {} ratio {}: {} ({})",
            f.config, f.ratio, f.message, f.stage
        );
    }
    Ok(if result.failures.is_empty() {
        0
    } else {
        EXIT_NUMERICAL
    })
}

fn validate(source: &Source) -> Result<u8, Error> {
    let file = source.load()?;
    let diags = file.diagnostics();
    println!(
        "{}",
        serde_json::to_string_pretty(&diags).expect("diagnostics serialize")
    );
    Ok(if diags.iter().any(|d| d.severity == Severity::Error) {
        EXIT_VALIDATION
    } else {
        0
    })
}

fn thresholds(source: &Source) -> Result<u8, Error> {
    let t = threshold_report(&source.load()?)?;
    println!("UL lambda_ut/lambda_b threshold: {:.2}", t.ul);
    println!("DL lambda_ut/lambda_b threshold: {:.2}", t.dl);
    Ok(0)
}

fn check(source: &Source, trials: u64, seed: Option<u64>, ratios: &str) -> Result<u8, Error> {
    let file = source.load()?;
    let ratios: Vec<f64> = ratios
        .split(',')
        .map(|r| {
            r.trim()
                .parse()
                .map_err(|_| Error::Config(format!("bad ratio `{r}`")))
        })
        .collect::<Result<_, _>>()?;
    let seed = seed.unwrap_or(file.sweep.seed);
    let cases = mc_check(&file, &ratios, trials, seed, QuadratureConfig::default())?;
    let mut ok = true;
    for c in &cases {
        let pass = c.agrees && c.bound_holds;
        ok &= pass;
        println!(
            "{} {:<16} ratio {:>8} analytic {:.5} mc {:.5} ± {:.5} (tol {:.5}) bound {:.5}",
            if pass { "PASS" } else { "FAIL" },
            c.config,
            c.ratio,
            c.analytic_se,
            c.mc_se,
            c.mc_stderr,
            c.tolerance,
            c.lower_bound
        );
    }
    Ok(if ok { 0 } else { EXIT_VALIDATION })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_VALIDATION);
        }
    }
    let outcome = match cli.command {
        Command::Sweep {
            source,
            trials,
            seed,
            out,
            grid,
            direction,
            report,
        } => sweep(&source, trials, seed, out, grid, direction, report),
        Command::Validate { source } => validate(&source),
        Command::Thresholds { source } => thresholds(&source),
        Command::McCheck {
            source,
            trials,
            seed,
            ratios,
        } => check(&source, trials, seed, &ratios),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_for(&e))
        }
    }
}
