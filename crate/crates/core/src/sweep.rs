//! Density-ratio sweeps, crossing search, threshold reports and the
//! analytic-versus-simulation check.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{density_ratio_threshold, se_lower_bound, AnalyticModel, QuadratureConfig};
use crate::config::ScenarioFile;
use crate::error::{Error, Result};
use crate::montecarlo::{McOptions, Simulator};
use crate::scenario::{Direction, SharingConfig, UserClass};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub file: ScenarioFile,
    pub directions: Vec<Direction>,
    /// Values of `lambda_ut / lambda_b`, sorted ascending.
    pub grid: Vec<f64>,
    /// Simulation trials per grid point; zero for analytic only.
    pub trials: u64,
    pub seed: u64,
    pub mc: McOptions,
    pub quad: QuadratureConfig,
}

impl SweepSpec {
    pub fn from_file(file: ScenarioFile) -> Result<Self> {
        let grid = file.ratio_grid()?;
        Ok(SweepSpec {
            trials: file.sweep.trials,
            seed: file.sweep.seed,
            file,
            directions: vec![Direction::Ul, Direction::Dl],
            grid,
            mc: McOptions::default(),
            quad: QuadratureConfig::default(),
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::invalid("grid", "must be nonempty"));
        }
        if self.grid.windows(2).any(|w| !(w[0] < w[1])) || !(self.grid[0] > 0.0) {
            return Err(Error::invalid(
                "grid",
                "ratios must be positive and increasing",
            ));
        }
        if self.directions.is_empty() {
            return Err(Error::invalid("directions", "must be nonempty"));
        }
        Ok(())
    }
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub config: String,
    pub ratio: f64,
    pub analytic_se: Option<f64>,
    pub mc_se: Option<f64>,
    pub mc_stderr: Option<f64>,
    pub trials: u64,
    pub seed: u64,
}

impl SweepRow {
    /// `(analytic - mc) / mc`.
    pub fn relative_deviation(&self) -> Option<f64> {
        match (self.analytic_se, self.mc_se) {
            (Some(a), Some(m)) if m != 0.0 => Some((a - m) / m),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointFailure {
    pub config: String,
    pub ratio: f64,
    pub stage: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingReport {
    pub direction: Direction,
    /// Mean-interference threshold on `lambda_ut / lambda_b`.
    pub threshold: Option<f64>,
    /// Ratio at which the exact SE curves of both sharing modes cross.
    pub se_crossing: Option<f64>,
    /// Ratio at which the SE lower bounds cross.
    pub lower_bound_crossing: Option<f64>,
    /// Lower-bound crossing within 2% of the threshold.
    pub lower_bound_matches_threshold: Option<bool>,
    /// `log10(se_crossing / threshold)`.
    pub se_crossing_offset_decades: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub user_class: UserClass,
    pub rows: Vec<SweepRow>,
    pub failures: Vec<PointFailure>,
    pub crossings: Vec<CrossingReport>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub ul: f64,
    pub dl: f64,
}

/// Seed of row `index`, derived from the master seed.
pub fn row_seed(master: u64, index: usize) -> u64 {
    master ^ (index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

pub fn threshold_report(file: &ScenarioFile) -> Result<ThresholdReport> {
    let ul = file.scenario(SharingConfig::UlDlTerr)?;
    let dl = file.scenario(SharingConfig::DlDlTerr)?;
    Ok(ThresholdReport {
        ul: density_ratio_threshold(&ul, Direction::Ul)?,
        dl: density_ratio_threshold(&dl, Direction::Dl)?,
    })
}

fn analytic_se(
    file: &ScenarioFile,
    sharing: SharingConfig,
    ratio: f64,
    qc: QuadratureConfig,
) -> Result<f64> {
    let cfg = file.scenario(sharing)?.with_density_ratio(ratio);
    AnalyticModel::new(&cfg, qc)?.ergodic_se()
}

fn lower_bound(file: &ScenarioFile, sharing: SharingConfig, ratio: f64) -> Result<f64> {
    se_lower_bound(&file.scenario(sharing)?.with_density_ratio(ratio))
}

/// Bisection in `log10` for a sign change of `f` on `[lo, hi]`.
pub fn bisect_log<F>(mut f: F, lo: f64, hi: f64, iterations: usize) -> Result<Option<f64>>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut a, mut b) = (lo.log10(), hi.log10());
    let fa = f(lo)?;
    let fb = f(hi)?;
    if fa == 0.0 {
        return Ok(Some(lo));
    }
    if fa.signum() == fb.signum() {
        return Ok(None);
    }
    for _ in 0..iterations {
        let m = 0.5 * (a + b);
        let fm = f(10f64.powf(m))?;
        if fm == 0.0 {
            return Ok(Some(10f64.powf(m)));
        }
        if fm.signum() == fa.signum() {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(Some(10f64.powf(0.5 * (a + b))))
}

/// Ratio in `[lo, hi]` where the exact SE of the terrestrial-UL mode drops
/// below that of the terrestrial-DL mode.
pub fn se_crossing(
    file: &ScenarioFile,
    direction: Direction,
    lo: f64,
    hi: f64,
    qc: QuadratureConfig,
) -> Result<Option<f64>> {
    let [bs_mode, ut_mode] = SharingConfig::for_direction(direction);
    // The BS-mode SE does not depend on lambda_ut.
    let reference = analytic_se(file, bs_mode, lo, qc)?;
    bisect_log(
        |r| Ok(analytic_se(file, ut_mode, r, qc)? - reference),
        lo,
        hi,
        14,
    )
}

/// Ratio in `[lo, hi]` where the SE lower bounds of both modes cross.
pub fn lower_bound_crossing(
    file: &ScenarioFile,
    direction: Direction,
    lo: f64,
    hi: f64,
) -> Result<Option<f64>> {
    let [bs_mode, ut_mode] = SharingConfig::for_direction(direction);
    let reference = lower_bound(file, bs_mode, lo)?;
    bisect_log(
        |r| Ok(lower_bound(file, ut_mode, r)? - reference),
        lo,
        hi,
        60,
    )
}

fn crossing_report(spec: &SweepSpec, rows: &[SweepRow], direction: Direction) -> CrossingReport {
    let [bs_mode, ut_mode] = SharingConfig::for_direction(direction);
    let series = |mode: SharingConfig| -> Vec<Option<f64>> {
        rows.iter()
            .filter(|r| r.config == mode.label())
            .map(|r| r.analytic_se)
            .collect()
    };
    let (bs, ut) = (series(bs_mode), series(ut_mode));
    let bracket = spec.grid.windows(2).enumerate().find_map(|(i, w)| {
        let d0 = ut.get(i).copied().flatten()? - bs.get(i).copied().flatten()?;
        let d1 = ut.get(i + 1).copied().flatten()? - bs.get(i + 1).copied().flatten()?;
        (d0 >= 0.0 && d1 < 0.0).then_some((w[0], w[1]))
    });
    let se_cross = bracket.and_then(|(lo, hi)| {
        se_crossing(&spec.file, direction, lo, hi, spec.quad)
            .ok()
            .flatten()
    });
    let threshold = spec
        .file
        .scenario(bs_mode)
        .and_then(|c| density_ratio_threshold(&c, direction))
        .ok();
    let (g_lo, g_hi) = (spec.grid[0], *spec.grid.last().expect("nonempty grid"));
    let lb_cross = if g_hi > g_lo {
        lower_bound_crossing(&spec.file, direction, g_lo, g_hi)
            .ok()
            .flatten()
    } else {
        None
    };
    CrossingReport {
        direction,
        threshold,
        se_crossing: se_cross,
        lower_bound_crossing: lb_cross,
        lower_bound_matches_threshold: match (lb_cross, threshold) {
            (Some(c), Some(t)) => Some((c / t - 1.0).abs() <= 0.02),
            _ => None,
        },
        se_crossing_offset_decades: match (se_cross, threshold) {
            (Some(c), Some(t)) => Some((c / t).log10()),
            _ => None,
        },
    }
}

pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let cases: Vec<(SharingConfig, f64)> = spec
        .directions
        .iter()
        .flat_map(|&d| SharingConfig::for_direction(d))
        .flat_map(|s| spec.grid.iter().map(move |&r| (s, r)))
        .collect();
    let evaluated: Vec<(SweepRow, Vec<PointFailure>)> = cases
        .par_iter()
        .enumerate()
        .map(|(i, &(sharing, ratio))| {
            let seed = row_seed(spec.seed, i);
            let mut failures = Vec::new();
            let mut fail = |stage: &str, e: Error| {
                failures.push(PointFailure {
                    config: sharing.label().into(),
                    ratio,
                    stage: stage.into(),
                    message: e.to_string(),
                })
            };
            let analytic = match analytic_se(&spec.file, sharing, ratio, spec.quad) {
                Ok(v) => Some(v),
                Err(e) => {
                    fail("analytic", e);
                    None
                }
            };
            let (mc_se, mc_stderr) = if spec.trials > 0 {
                match spec
                    .file
                    .scenario(sharing)
                    .map(|c| c.with_density_ratio(ratio))
                    .and_then(|c| Simulator::new(&c, &spec.mc))
                {
                    Ok(sim) => {
                        let e = sim.estimate(spec.trials, seed, &[]).ergodic_se;
                        (Some(e.estimate), Some(e.std_error))
                    }
                    Err(e) => {
                        fail("simulation", e);
                        (None, None)
                    }
                }
            } else {
                (None, None)
            };
            (
                SweepRow {
                    config: sharing.label().into(),
                    ratio,
                    analytic_se: analytic,
                    mc_se,
                    mc_stderr,
                    trials: spec.trials,
                    seed,
                },
                failures,
            )
        })
        .collect();
    let mut rows = Vec::with_capacity(evaluated.len());
    let mut failures = Vec::new();
    for (row, f) in evaluated {
        rows.push(row);
        failures.extend(f);
    }
    let crossings = spec
        .directions
        .iter()
        .map(|&d| crossing_report(spec, &rows, d))
        .collect();
    Ok(SweepResult {
        user_class: spec.file.scenario.user_class,
        rows,
        failures,
        crossings,
    })
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<SweepRow>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .map(|r| r.map_err(|e| Error::Config(format!("sweep csv: {e}"))))
        .collect()
}

#[derive(Debug, Serialize)]
struct SummaryRow<'a> {
    #[serde(flatten)]
    row: &'a SweepRow,
    relative_deviation: Option<f64>,
}

#[derive(Debug, Serialize)]
struct Summary<'a> {
    user_class: UserClass,
    rows: Vec<SummaryRow<'a>>,
    failures: &'a [PointFailure],
    crossings: &'a [CrossingReport],
}

pub fn summary_json(result: &SweepResult) -> String {
    let s = Summary {
        user_class: result.user_class,
        rows: result
            .rows
            .iter()
            .map(|row| SummaryRow {
                row,
                relative_deviation: row.relative_deviation(),
            })
            .collect(),
        failures: &result.failures,
        crossings: &result.crossings,
    };
    serde_json::to_string_pretty(&s).expect("summary serializes")
}

/// Write `sweep_<class>.csv` and `summary_<class>.json` into `dir`.
pub fn write_outputs(result: &SweepResult, dir: &Path) -> Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(dir)?;
    let name = result.user_class.name();
    let csv_path = dir.join(format!("sweep_{name}.csv"));
    let json_path = dir.join(format!("summary_{name}.json"));
    write_csv(&result.rows, std::fs::File::create(&csv_path)?)?;
    std::fs::write(&json_path, summary_json(result))?;
    Ok((csv_path, json_path))
}

/// One analytic-versus-simulation comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McCheckCase {
    pub config: String,
    pub ratio: f64,
    pub analytic_se: f64,
    pub lower_bound: f64,
    pub mc_se: f64,
    pub mc_stderr: f64,
    pub trials: u64,
    pub seed: u64,
    /// `max(3 s.e., 5% of the MC estimate)`.
    pub tolerance: f64,
    pub agrees: bool,
    pub bound_holds: bool,
}

/// Compare analytic SE and its lower bound with simulation for every sharing
/// configuration at each ratio.
pub fn mc_check(
    file: &ScenarioFile,
    ratios: &[f64],
    trials: u64,
    seed: u64,
    qc: QuadratureConfig,
) -> Result<Vec<McCheckCase>> {
    let cases: Vec<(SharingConfig, f64)> = SharingConfig::ALL
        .into_iter()
        .flat_map(|s| ratios.iter().map(move |&r| (s, r)))
        .collect();
    cases
        .iter()
        .enumerate()
        .map(|(i, &(sharing, ratio))| {
            let cfg = file.scenario(sharing)?.with_density_ratio(ratio);
            let analytic = AnalyticModel::new(&cfg, qc)?.ergodic_se()?;
            let lb = se_lower_bound(&cfg)?;
            let seed_i = row_seed(seed, i);
            let e = Simulator::new(&cfg, &McOptions::default())?
                .estimate(trials, seed_i, &[])
                .ergodic_se;
            let tolerance = (3.0 * e.std_error).max(0.05 * e.estimate.abs());
            Ok(McCheckCase {
                config: sharing.label().into(),
                ratio,
                analytic_se: analytic,
                lower_bound: lb,
                mc_se: e.estimate,
                mc_stderr: e.std_error,
                trials,
                seed: seed_i,
                tolerance,
                agrees: (analytic - e.estimate).abs() <= tolerance,
                bound_holds: lb <= analytic,
            })
        })
        .collect()
}
